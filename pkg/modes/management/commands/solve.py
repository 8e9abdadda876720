from modes.cli import ModeCommand, add_model_arguments
from modes.runs import run_solve
from modes.serializers import SolveRequestSerializer


class Command(ModeCommand):
    help = "Find every mode of the square or triangular loop as one parameter varies over a range."

    request_serializer = SolveRequestSerializer
    runner = staticmethod(run_solve)

    def add_run_arguments(self, parser):
        parser.add_argument('model', nargs='?', help="square or triangular")
        add_model_arguments(parser)
        parser.add_argument('--free', help="theta, energy, potential, barrier_length or pre_barrier_length")
        parser.add_argument('--range', help="lo:hi[:step], degrees for theta; negative bounds such as -360:0 are accepted")
        parser.add_argument('--steps', type=int, help="scan intervals (default from settings)")
