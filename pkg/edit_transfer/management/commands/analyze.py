from ...pipeline import cmd_analyze
from ..base import PipelineCommand


class Command(PipelineCommand):
    help = "Detect shots in the source video and extract their editing style."

    def run_stage(self, config):
        return cmd_analyze(config)

    def describe_result(self, styles):
        return f"Analyzed {len(styles)} shots"
