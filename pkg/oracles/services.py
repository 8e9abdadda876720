"""
Numerical oracles that check the closed forms from an independent direction:
an LU determinant of the literal boundary matrices, and a fixed-step RK4
integration of ψ'' = k0²·(V(x) − E)·ψ composed into the closed-loop monodromy.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from calibration.services import wavenumber
from tunnel_circuits.exceptions import DomainError, EvaluationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Maps (ψ, ψ′) at one end of a region to (ψ, ψ′) at the other."""

    matrix: np.ndarray

    @property
    def det(self):
        return float(self.matrix[0, 0] * self.matrix[1, 1] - self.matrix[0, 1] * self.matrix[1, 0])

    @property
    def trace(self):
        return float(self.matrix[0, 0] + self.matrix[1, 1])

    @property
    def norm(self):
        return float(linalg.norm(self.matrix))

    def __matmul__(self, other):
        return TransferMatrix(self.matrix @ other.matrix)

    def inverse(self):
        (a, b), (c, d) = self.matrix
        return TransferMatrix(np.array([[d, -b], [-c, a]]) / self.det)


IDENTITY = TransferMatrix(np.eye(2))


@dataclass(frozen=True)
class PiecewiseLinearPotential:
    """Potential in volts through the (x, V) nodes, held constant beyond the end nodes."""

    nodes: tuple

    def __post_init__(self):
        xs = [x for x, _ in self.nodes]
        if len(xs) < 1 or any(b < a for a, b in zip(xs, xs[1:])):
            raise DomainError("potential nodes must be sorted by position")

    def __call__(self, x):
        xs, vs = zip(*self.nodes)
        return np.interp(x, xs, vs)

    @classmethod
    def constant(cls, value):
        return cls(((0.0, float(value)),))

    @classmethod
    def ramp(cls, start, end, start_value, end_value):
        return cls(((float(start), float(start_value)), (float(end), float(end_value))))


def lu_determinant(matrix):
    """Determinant from a partially pivoted LU factorisation; the sign comes from the pivot swaps."""
    matrix = np.asarray(matrix, dtype=float)
    if not np.all(np.isfinite(matrix)):
        raise EvaluationError("boundary matrix has non-finite entries")
    lu, piv = linalg.lu_factor(matrix, check_finite=False)
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    sign = -1.0 if swaps % 2 else 1.0
    return sign * float(np.prod(np.diag(lu)))


def integrate_transfer(potential, energy, x0, x1, steps, profile):
    """
    Transfer matrix of ψ'' = k0²·(V(x) − E)·ψ from x0 to x1 by classical RK4 with
    ``steps`` equal steps, propagating the two unit initial states side by side.
    """
    if not x0 < x1:
        raise DomainError(f"integration interval must have x0 < x1, got ({x0}, {x1})")
    if steps < 1:
        raise DomainError(f"steps must be positive, got {steps}")
    h = (x1 - x0) / steps
    k0_squared = profile.k0**2
    xs = x0 + h * np.arange(steps + 1)
    q_nodes = k0_squared * (potential(xs) - energy)
    q_mids = k0_squared * (potential(xs[:-1] + 0.5 * h) - energy)

    # columns: solution starting at (1, 0) and solution starting at (0, 1)
    psi = [1.0, 0.0]
    dpsi = [0.0, 1.0]
    half = 0.5 * h
    for i in range(steps):
        q0, qm, q1 = float(q_nodes[i]), float(q_mids[i]), float(q_nodes[i + 1])
        for column in range(2):
            y, v = psi[column], dpsi[column]
            k1y, k1v = v, q0 * y
            k2y, k2v = v + half * k1v, qm * (y + half * k1y)
            k3y, k3v = v + half * k2v, qm * (y + half * k2y)
            k4y, k4v = v + h * k3v, q1 * (y + h * k3y)
            psi[column] = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            dpsi[column] = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    result = TransferMatrix(np.array([[psi[0], psi[1]], [dpsi[0], dpsi[1]]]))
    if not np.all(np.isfinite(result.matrix)):
        raise EvaluationError("transfer matrix overflowed during integration", abscissa=x1)
    return result


def _region_transfer(potential, energy, start, end, steps, profile):
    if end == start:
        return IDENTITY
    if end < start:
        return integrate_transfer(potential, energy, end, start, steps, profile).inverse()
    return integrate_transfer(potential, energy, start, end, steps, profile)


def square_loop_monodromy(energy, potential, theta, barrier_length, profile, steps):
    """Region I from a = Θ/k up to 0 at zero potential, then the barrier from 0 to b."""
    k = wavenumber(profile, energy)
    a = theta / k
    region_one = _region_transfer(PiecewiseLinearPotential.constant(0.0), energy, a, 0.0, steps, profile)
    region_two = _region_transfer(
        PiecewiseLinearPotential.constant(potential), energy, 0.0, barrier_length, steps, profile
    )
    return region_two @ region_one


def triangular_loop_monodromy(energy, peak_potential, theta, barrier_length, profile, steps):
    """Region I from 0 to A = Θ/k, then the ramp V0 → 0 from A to C = A + L."""
    k = wavenumber(profile, energy)
    a = theta / k
    c = a + barrier_length
    region_one = _region_transfer(PiecewiseLinearPotential.constant(0.0), energy, 0.0, a, steps, profile)
    ramp = PiecewiseLinearPotential.ramp(a, c, peak_potential, 0.0)
    region_two = _region_transfer(ramp, energy, a, c, steps, profile)
    return region_two @ region_one


def loop_monodromy(model, energy, potential, theta, barrier_length, profile, steps):
    if model == 'square':
        monodromy = square_loop_monodromy(energy, potential, theta, barrier_length, profile, steps)
    elif model == 'triangular':
        monodromy = triangular_loop_monodromy(energy, potential, theta, barrier_length, profile, steps)
    else:
        raise DomainError(f"unknown model {model!r}")
    if abs(monodromy.det - 1.0) > 1e-6:
        logger.warning("monodromy determinant drifted to %.12g; raise RK4_STEPS", monodromy.det)
    return monodromy


def trace_residual(monodromy):
    """2 − tr(M); zero on a closed-loop mode."""
    return 2.0 - monodromy.trace


def monodromy_tolerance(monodromy, decay_length_product):
    """Absolute 1e-8 while the barrier is thin (βb ≤ 2), relative to ‖M‖ beyond that."""
    if decay_length_product <= 2.0:
        return 1e-8
    return 1e-8 * max(1.0, monodromy.norm)

