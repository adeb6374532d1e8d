from ...pipeline import cmd_transfer
from ..base import PipelineCommand


class Command(PipelineCommand):
    help = "Select footage for every source shot and render the output video."

    def run_stage(self, config):
        return cmd_transfer(config)

    def describe_result(self, plan):
        return f"Rendered {len(plan.records)} shots"
