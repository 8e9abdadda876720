"""
Closed loop made of a zero-potential region I on [0, A] followed by a linear
ramp from V0 at x = A down to 0 at x = C = A + L, closed back to x = 0.

In the ramp ψ'' = γ²·(K − γx)·ψ, so ψ = C3·Ai(K − γx) + C4·Bi(K − γx) with
γ = (k0²·V0/L)^(1/3). The Airy arguments at the two ends are X (at A) and Y (at C).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from airy_functions.services import airy_eval, airy_grid
from calibration.services import wavenumber
from oracles.services import TransferMatrix, lu_determinant
from tunnel_circuits.exceptions import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TriangularBarrierSpec:
    energy: float
    peak_potential: float
    barrier_length: float  # L = C − A, nm
    theta: float  # k·A, rad

    def __post_init__(self):
        if not self.energy > 0:
            raise DomainError(f"energy must be positive, got {self.energy!r}")
        if not self.energy < self.peak_potential:
            raise DomainError("energy must be below barrier potential")
        if not self.barrier_length > 0:
            raise DomainError(f"barrier length must be positive, got {self.barrier_length!r}")


@dataclass(frozen=True)
class TriangularDerived:
    k: float
    a: float  # start of the ramp
    b: float  # classical turning point, V(B) = E
    c: float  # end of the ramp
    gamma: float
    K: float
    R: float
    X: float
    Y: float

    @property
    def degenerate(self):
        """Region I has no extent when A <= 0."""
        return self.a <= 0


def x_minus_y(barrier_length, peak_potential, profile):
    """X − Y = γ·L = (k0²·V0)^(1/3)·L^(2/3); depends on neither E nor Θ."""
    return (profile.k0**2 * peak_potential) ** (1.0 / 3.0) * barrier_length ** (2.0 / 3.0)


def derive(spec, profile):
    k = wavenumber(profile, spec.energy)
    length = spec.barrier_length
    ratio = spec.energy / spec.peak_potential
    a = spec.theta / k
    c = a + length
    b = c - ratio * length
    gamma = (profile.k0**2 * spec.peak_potential / length) ** (1.0 / 3.0)
    # X = K − γA and Y = K − γC, written without the large K so nothing cancels
    x_arg = gamma * length * (1.0 - ratio)
    y_arg = -gamma * length * ratio
    derived = TriangularDerived(
        k=k, a=a, b=b, c=c, gamma=gamma, K=gamma * b, R=gamma / k, X=x_arg, Y=y_arg,
    )
    if derived.degenerate:
        logger.info("theta = %.6g gives A <= 0; region I is empty", spec.theta)
    return derived


def build_matrix(theta, x_arg, y_arg, r):
    """
    Boundary matrix acting on (C1, C2, C3, C4): ψ and ψ′/k matched at x = A,
    then the closure ψ(0) = ψ(C) and ψ′(0) = ψ′(C), also divided by k.
    """
    at_x, at_y = airy_eval(x_arg), airy_eval(y_arg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return np.array([
        [cos_t, sin_t, -at_x.ai, -at_x.bi],
        [-sin_t, cos_t, r * at_x.aip, r * at_x.bip],
        [1.0, 0.0, -at_y.ai, -at_y.bi],
        [0.0, 1.0, r * at_y.aip, r * at_y.bip],
    ])


def determinant(theta, x_arg, y_arg, r):
    return lu_determinant(build_matrix(theta, x_arg, y_arg, r))


def wronskian_offset(r):
    """Det(Θ) + Det(Θ + π) for any Θ: the Θ-independent part, −4R/π."""
    return -4.0 * r / math.pi


def _airy_frame(x_arg, gamma):
    values = airy_eval(x_arg)
    return np.array([[values.ai, values.bi], [-gamma * values.aip, -gamma * values.bip]])


def airy_transfer(derived):
    """(ψ, ψ′) propagation from A to C along the ramp."""
    start = _airy_frame(derived.X, derived.gamma)
    end = _airy_frame(derived.Y, derived.gamma)
    return TransferMatrix(end @ np.linalg.inv(start))


def analytic_monodromy(derived):
    """Free propagation over [0, A], then the ramp from A to C."""
    phase = derived.k * derived.a
    c, s = math.cos(phase), math.sin(phase)
    free = TransferMatrix(np.array([[c, s / derived.k], [-derived.k * s, c]]))
    return airy_transfer(derived) @ free


def field(coefficients, derived, xs, region):
    """ψ and ψ′ sampled at ``xs`` in region I (trigonometric) or region II (Airy)."""
    c1, c2, c3, c4 = coefficients
    xs = np.asarray(xs, dtype=float)
    k = derived.k
    if region == 'I':
        c, s = np.cos(k * xs), np.sin(k * xs)
        return c1 * c + c2 * s, k * (-c1 * s + c2 * c)
    args = derived.X - derived.gamma * (xs - derived.a)
    ai, bi, aip, bip = airy_grid(args)
    return c3 * ai + c4 * bi, -derived.gamma * (c3 * aip + c4 * bip)
