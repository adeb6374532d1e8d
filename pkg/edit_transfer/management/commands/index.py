from ...pipeline import cmd_index
from ..base import PipelineCommand


class Command(PipelineCommand):
    help = "Index the raw footage repository."

    def run_stage(self, config):
        return cmd_index(config)

    def describe_result(self, index):
        return f"Indexed {len(index)} clips"
