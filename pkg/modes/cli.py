"""Shared plumbing for the solve, sweep, scan and wavefunction management commands."""

import json
import re

from django.core.management.base import BaseCommand, CommandError

from modes.serializers import format_errors
from modes.writers import render
from tunnel_circuits.exceptions import DomainError, TunnelCircuitError

# argparse takes only plain negative numbers as option values; signed ranges such as -360:0 are values too
NEGATIVE_VALUE = re.compile(r'^-\.?\d')


def add_model_arguments(parser):
    parser.add_argument('--energy', type=float, help="particle energy E in eV")
    parser.add_argument('--potential', type=float, help="barrier height (square) or peak potential (triangular) in V")
    parser.add_argument('--barrier-length', type=float, help="barrier length in nm")
    parser.add_argument('--theta', type=float, help="phase Θ in degrees")
    parser.add_argument('--pre-barrier-length', type=float, help="nm; square: signed coordinate a <= 0 where region I starts (Θ = ka), triangular: length A > 0 of region I (Θ = kA)")


class ModeCommand(BaseCommand):
    """
    Flags are merged over ``--config`` (a JSON object keyed by flag names with
    underscores), validated by ``request_serializer`` and handed to ``runner``.
    Library errors leave through CommandError with the error's exit code.
    """

    request_serializer = None
    runner = None

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser._negative_number_matcher = NEGATIVE_VALUE
        return parser

    def add_run_arguments(self, parser):
        raise NotImplementedError

    def add_arguments(self, parser):
        self.add_run_arguments(parser)
        parser.add_argument('--constants', help="si or paper")
        parser.add_argument('--format', help="csv or json")
        parser.add_argument('--config', help="JSON file supplying any of the flags")

    def load_config(self, path):
        if not path:
            return {}
        try:
            with open(path, encoding='utf-8') as handle:
                config = json.load(handle)
        except (OSError, ValueError) as exc:
            raise CommandError(f"cannot read config {path}: {exc}", returncode=DomainError.exit_code) from exc
        if not isinstance(config, dict):
            raise CommandError(f"config {path} must hold a JSON object", returncode=DomainError.exit_code)
        return config

    def handle(self, *args, **options):
        config = self.load_config(options.get('config'))
        for name in self.request_serializer().fields:
            if options.get(name) is not None:
                config[name] = options[name]

        serializer = self.request_serializer(data=config)
        if not serializer.is_valid():
            raise CommandError(format_errors(serializer.errors), returncode=DomainError.exit_code)
        try:
            result = self.runner(dict(serializer.validated_data))
        except TunnelCircuitError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        self.stdout.write(render(result, result.config['format']), ending='')
