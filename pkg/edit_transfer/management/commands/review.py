from ...pipeline import cmd_review
from ..base import PipelineCommand


class Command(PipelineCommand):
    help = "Write the review bundle for a rendered edit plan."

    def run_stage(self, config):
        return cmd_review(config)
