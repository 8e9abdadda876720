from modes.cli import ModeCommand, add_model_arguments
from modes.runs import run_wavefunction
from modes.serializers import WavefunctionRequestSerializer


class Command(ModeCommand):
    help = "Sample ψ and ψ′ around the loop for one mode, with boundary residuals in the header."

    request_serializer = WavefunctionRequestSerializer
    runner = staticmethod(run_wavefunction)

    def add_run_arguments(self, parser):
        parser.add_argument('model', nargs='?', help="square or triangular")
        add_model_arguments(parser)
        parser.add_argument('--free', help="solve for this parameter first instead of taking all four as given")
        parser.add_argument('--range', help="search range for --free")
        parser.add_argument('--branch', type=int, help="which root to trace, 0 is nearest zero")
        parser.add_argument('--samples', type=int, help="points per region")
