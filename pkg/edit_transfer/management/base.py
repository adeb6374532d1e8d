import logging

from django.core.management.base import BaseCommand, CommandError

from ..config import load_config
from ..exceptions import ConfigurationError, EditTransferBaseException

logger = logging.getLogger(__name__)

EXIT_CONFIG_ERROR = 2
EXIT_PIPELINE_ERROR = 3


class PipelineCommand(BaseCommand):
    """Shared `--config`, `--set` and `--seed` handling of the stage commands."""

    def add_arguments(self, parser):
        parser.add_argument("--config", required=True, help="Project config JSON")
        parser.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="Override a configuration key or parameter",
        )
        parser.add_argument("--seed", type=int, default=None)

    def run_stage(self, config):
        raise NotImplementedError

    def describe_result(self, result):
        return ""

    def handle(self, *args, **options):
        try:
            config = load_config(
                options["config"], options["overrides"], options["seed"]
            )
            result = self.run_stage(config)
        except ConfigurationError as e:
            logger.error(f"Configuration error: {e}")
            raise CommandError(str(e), returncode=EXIT_CONFIG_ERROR)
        except EditTransferBaseException as e:
            raise CommandError(str(e), returncode=EXIT_PIPELINE_ERROR)
        message = self.describe_result(result)
        if message:
            self.stdout.write(message)
