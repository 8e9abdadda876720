from modes.cli import ModeCommand
from modes.runs import run_scan
from modes.serializers import ScanRequestSerializer


class Command(ModeCommand):
    help = "Tabulate the triangular-loop geometry and determinant on a grid of Θ in degrees."

    request_serializer = ScanRequestSerializer
    runner = staticmethod(run_scan)

    def add_run_arguments(self, parser):
        parser.add_argument('--energy', type=float, help="particle energy E in eV")
        parser.add_argument('--potential', type=float, help="peak potential V0 in V")
        parser.add_argument('--barrier-length', type=float, help="ramp length L in nm")
        parser.add_argument('--theta-values', help="comma separated Θ values in degrees")
        parser.add_argument('--range', help="lo:hi:step in degrees")
