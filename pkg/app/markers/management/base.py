"""
Shared plumbing for the marker commands.

Failures leave the process with the exit code of the error class (1 usage,
2 data, 3 analysis) and a JSON error record on stderr.
"""
import logging
import sys
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError, handle_default_options
from django.utils.text import get_valid_filename

from markers.artifacts import render_json
from markers.config import load_config, parse_config_text, validate_config
from markers.exceptions import MarkersError, UsageError
from markers.ingest import LAYOUTS, STACKED, ingest

logger = logging.getLogger(__name__)


def artifact_name(entity_id, suffix):
    return get_valid_filename(f"{entity_id}{suffix}")


class AnalysisCommand(BaseCommand):
    requires_system_checks = []

    def add_data_arguments(self, parser):
        parser.add_argument('data', help="CSV file to analyze")
        parser.add_argument('--layout', choices=LAYOUTS, default=STACKED,
                            help="stacked (entity_id,time,component,value) or wide (one entity)")
        parser.add_argument('--entity-id', dest='entity_id', default=None,
                            help="entity id for a wide file (default: file name)")

    def add_config_arguments(self, parser):
        parser.add_argument('--config', default=None, help="flat key = value configuration file")
        parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                            help="override one configuration key (repeatable)")

    def load_config(self, options):
        config = load_config(options.get('config'))
        overrides = parse_config_text('\n'.join(options.get('overrides') or []))
        if overrides:
            config = validate_config({**config.echo(), **overrides})
        return config

    def load_entities(self, options):
        return ingest(options['data'], options['layout'], options.get('entity_id'))

    def out_dir(self, options):
        path = Path(options['out_dir'])
        path.mkdir(parents=True, exist_ok=True)
        return path

    def run_from_argv(self, argv):
        # Parse errors raise CommandError instead of exiting with argparse's code 2.
        self._called_from_command_line = False
        try:
            parser = self.create_parser(argv[0], argv[1])
            options = parser.parse_args(argv[2:])
            cmd_options = vars(options)
            args = cmd_options.pop('args', ())
            handle_default_options(options)
            self.execute(*args, **cmd_options)
        except CommandError as e:
            self.fail(UsageError(str(e).removeprefix('Error: ')))
        except MarkersError as e:
            self.fail(e)

    def fail(self, error):
        logger.error(f"Command failed: {error}")
        self.stderr.write(render_json(error.as_record()), ending='')
        sys.exit(error.exit_code)
