"""
Closed loop made of a zero-potential region I on [a, 0] and a square barrier
of height V on [0, b], joined back to region I at the far end.

    region I:   ψ = A·cos(kx) + B·sin(kx)
    region II:  ψ = C·e^(βx) + D·e^(−βx)

Matching ψ and ψ′ at x = 0 and closing the loop (ψ(a) = ψ(b), ψ′(a) = ψ′(b))
gives a 4x4 homogeneous system in (A, B, C, D) whose determinant expands to

    Det(Θ) = 2(β² − k²)·sinΘ·sinh(βb) + 4kβ·(1 − cosΘ·cosh(βb)),   Θ = k·a.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from calibration.services import decay_constant, wavenumber
from oracles.services import TransferMatrix, lu_determinant
from tunnel_circuits.exceptions import DomainError, EvaluationError

logger = logging.getLogger(__name__)

# Above this βb the closed form is returned scaled by e^(−βb)
SCALED_THRESHOLD = 30.0

# e^(βb) stops being a finite double a little above 709
LITERAL_MATRIX_LIMIT = 700.0


@dataclass(frozen=True)
class SquareBarrierSpec:
    energy: float
    potential: float
    pre_barrier_coordinate: float  # a, nm; region I spans [a, 0]
    barrier_length: float  # b, nm

    def __post_init__(self):
        if not self.energy > 0:
            raise DomainError(f"energy must be positive, got {self.energy!r}")
        if not self.energy < self.potential:
            raise DomainError("energy must be below barrier potential")
        if not self.barrier_length > 0:
            raise DomainError(f"barrier length must be positive, got {self.barrier_length!r}")
        if self.pre_barrier_coordinate > 0:
            raise DomainError(f"pre-barrier coordinate a must not be positive, got {self.pre_barrier_coordinate!r}")


@dataclass(frozen=True)
class SquareDerived:
    k: float
    beta: float
    theta: float


def derive(spec, profile):
    k = wavenumber(profile, spec.energy)
    beta = decay_constant(profile, spec.energy, spec.potential)
    if spec.pre_barrier_coordinate == 0:
        logger.warning("a = 0 collapses region I; the loop closure is degenerate")
    return SquareDerived(k=k, beta=beta, theta=k * spec.pre_barrier_coordinate)


def build_matrix(theta, k, beta, b):
    """Boundary matrix acting on (A, B, C, D); rows are ψ(0), ψ′(0), ψ closure, ψ′ closure."""
    if beta * b > LITERAL_MATRIX_LIMIT:
        raise EvaluationError(f"βb = {beta * b:.6g} is too large for the literal boundary matrix", abscissa=theta)
    grow, decay = math.exp(beta * b), math.exp(-beta * b)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return np.array([
        [1.0, 0.0, -1.0, -1.0],
        [0.0, k, -beta, beta],
        [cos_t, sin_t, -grow, -decay],
        [k * sin_t, -k * cos_t, beta * grow, -beta * decay],
    ])


def scaled_matrix(theta, k, beta, b):
    """
    The same system on (A, B, C·e^(βb), D), so every entry stays finite for any
    βb. ``field(..., barrier_length=b)`` reads coefficients in this form.
    """
    decay = math.exp(-beta * b)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return np.array([
        [1.0, 0.0, -decay, -1.0],
        [0.0, k, -beta * decay, beta],
        [cos_t, sin_t, -1.0, -decay],
        [k * sin_t, -k * cos_t, beta, -beta * decay],
    ])


def determinant_matrix(theta, k, beta, b):
    return lu_determinant(build_matrix(theta, k, beta, b))


def _one_minus_cos_cosh(theta, y):
    # half-angle forms keep 1 − cosΘ·cosh(y) accurate when both Θ and y are small
    return 2.0 * math.sin(0.5 * theta) ** 2 - 2.0 * math.cos(theta) * math.sinh(0.5 * y) ** 2


def determinant_closed_form(theta, k, beta, b):
    """
    Literal determinant for βb <= SCALED_THRESHOLD. Beyond that the value would
    swamp a double long before it matters, so the result is multiplied by e^(−βb):

        (β² − k²)·sinΘ·(1 − e^(−2βb)) + 4kβ·e^(−βb) − 2kβ·cosΘ·(1 + e^(−2βb))
    """
    y = beta * b
    if y <= SCALED_THRESHOLD:
        return 2.0 * (beta**2 - k**2) * math.sin(theta) * math.sinh(y) + 4.0 * k * beta * _one_minus_cos_cosh(theta, y)
    e1, e2 = math.exp(-y), math.exp(-2.0 * y)
    return (
        (beta**2 - k**2) * math.sin(theta) * (1.0 - e2)
        + 4.0 * k * beta * e1
        - 2.0 * k * beta * math.cos(theta) * (1.0 + e2)
    )


def _one_minus_sech(y):
    if y < SCALED_THRESHOLD:
        return 2.0 * math.sinh(0.5 * y) ** 2 / math.cosh(y)
    return 1.0 - 2.0 * math.exp(-y) / (1.0 + math.exp(-2.0 * y))


def normalized_determinant(theta, k, beta, b):
    """
    Det / (4kβ·cosh βb), which is dimensionless, finite for every b and free of
    cancellation near the small-b roots. This is the residual the solver works with.
    """
    y = beta * b
    sech = 1.0 / math.cosh(y) if y < SCALED_THRESHOLD else 2.0 * math.exp(-y) / (1.0 + math.exp(-2.0 * y))
    coupling = (beta**2 - k**2) / (2.0 * k * beta)
    return (
        coupling * math.tanh(y) * math.sin(theta)
        + 2.0 * math.sin(0.5 * theta) ** 2 * sech
        - math.cos(theta) * _one_minus_sech(y)
    )


def asymptotic_theta(k, beta, branch=0):
    """
    Root of (β² − k²)·sinΘ − 2kβ·cosΘ = 0 in (branch·π − π, branch·π], the
    b → ∞ limit of the closure condition. Branch 0 is the one nearest zero.
    """
    if branch > 0:
        raise DomainError(f"asymptotic branches are indexed by n <= 0, got {branch}")
    base = math.atan2(2.0 * k * beta, beta**2 - k**2)
    return base + (branch - 1) * math.pi


def free_transfer(k, length):
    """(ψ, ψ′) propagation over ``length`` at zero potential."""
    phase = k * length
    c, s = math.cos(phase), math.sin(phase)
    return TransferMatrix(np.array([[c, s / k], [-k * s, c]]))


def square_transfer(beta, length):
    """(ψ, ψ′) propagation through a barrier of decay constant β."""
    y = beta * length
    ch, sh = math.cosh(y), math.sinh(y)
    return TransferMatrix(np.array([[ch, sh / beta], [beta * sh, ch]]))


def analytic_monodromy(theta, k, beta, b):
    """Closed-form loop monodromy: free propagation over |a| = −Θ/k, then the barrier."""
    return square_transfer(beta, b) @ free_transfer(k, -theta / k)


def field(coefficients, k, beta, xs, region, barrier_length=None):
    """
    ψ and ψ′ sampled at ``xs`` in region I (oscillating) or region II (evanescent).
    With ``barrier_length`` the growing coefficient is C·e^(βb), as from scaled_matrix.
    """
    a_coef, b_coef, c_coef, d_coef = coefficients
    xs = np.asarray(xs, dtype=float)
    if region == 'I':
        c, s = np.cos(k * xs), np.sin(k * xs)
        return a_coef * c + b_coef * s, k * (-a_coef * s + b_coef * c)
    origin = 0.0 if barrier_length is None else barrier_length
    grow, decay = np.exp(beta * (xs - origin)), np.exp(-beta * xs)
    return c_coef * grow + d_coef * decay, beta * (c_coef * grow - d_coef * decay)
