import logging

from rest_framework import status, viewsets
from rest_framework.decorators import action
from rest_framework.response import Response

from modes.runs import run_scan, run_solve, run_sweep, run_wavefunction
from modes.serializers import (
    ScanRequestSerializer,
    SolveRequestSerializer,
    SweepRequestSerializer,
    WavefunctionRequestSerializer,
)
from tunnel_circuits.exceptions import DomainError, TunnelCircuitError

logger = logging.getLogger(__name__)


class ModeViewSet(viewsets.ViewSet):
    """Same requests and JSON documents as the management commands with ``--format json``."""

    def run(self, request, serializer_class, runner):
        serializer = serializer_class(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        try:
            result = runner(dict(serializer.validated_data))
        except TunnelCircuitError as exc:
            logger.warning("%s request failed: %s", runner.__name__, exc)
            code = status.HTTP_400_BAD_REQUEST if exc.exit_code == DomainError.exit_code else status.HTTP_422_UNPROCESSABLE_ENTITY
            return Response({"error": str(exc)}, status=code)
        return Response(result.payload, status=status.HTTP_200_OK)

    @action(detail=False, methods=['post'])
    def solve(self, request):
        return self.run(request, SolveRequestSerializer, run_solve)

    @action(detail=False, methods=['post'])
    def sweep(self, request):
        return self.run(request, SweepRequestSerializer, run_sweep)

    @action(detail=False, methods=['post'])
    def scan(self, request):
        return self.run(request, ScanRequestSerializer, run_scan)

    @action(detail=False, methods=['post'])
    def wavefunction(self, request):
        return self.run(request, WavefunctionRequestSerializer, run_wavefunction)
