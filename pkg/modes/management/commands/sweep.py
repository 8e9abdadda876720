from modes.cli import ModeCommand
from modes.runs import run_sweep
from modes.serializers import SweepRequestSerializer


class Command(ModeCommand):
    help = "Follow both square-loop Θ branches across a list of barrier lengths."

    request_serializer = SweepRequestSerializer
    runner = staticmethod(run_sweep)

    def add_run_arguments(self, parser):
        parser.add_argument('--energy', type=float, help="particle energy E in eV")
        parser.add_argument('--potential', type=float, help="barrier height in V")
        parser.add_argument('--b-values', help="comma separated barrier lengths in nm")
        parser.add_argument('--range', help="lo:hi[:step] barrier lengths in nm")
        parser.add_argument('--points', type=int, help="number of lengths when --range has no step")
        parser.add_argument('--spacing', help="linear or log")
