"""
Airy functions Ai, Bi and their derivatives for real arguments.

``airy_eval`` is the production evaluator (``scipy.special.airy``). The
Maclaurin series and the large-|x| asymptotic expansions below are kept as
independent reference evaluations; each is only trusted inside its own regime.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from tunnel_circuits.exceptions import AiryRangeError

# Bi overflows a double a little above x = 104
AIRY_ARGUMENT_RANGE = (-1.0e4, 100.0)

SERIES_REGIME = (-6.0, 3.0)
ASYMPTOTIC_THRESHOLD = 8.0

SERIES_TOLERANCE = 1e-18
SERIES_MAX_TERMS = 500

AI_0 = 3.0 ** (-2.0 / 3.0) / special.gamma(2.0 / 3.0)
AIP_0 = -(3.0 ** (-1.0 / 3.0)) / special.gamma(1.0 / 3.0)


@dataclass(frozen=True)
class AiryValues:
    ai: float
    bi: float
    aip: float
    bip: float

    @property
    def wronskian(self):
        """Ai·Bi′ − Ai′·Bi, which is 1/π for exact values."""
        return self.ai * self.bip - self.aip * self.bi


def _check_argument(x):
    lo, hi = AIRY_ARGUMENT_RANGE
    if not np.all(np.isfinite(x)) or np.any(x < lo) or np.any(x > hi):
        bad = np.atleast_1d(x)[~((x >= lo) & (x <= hi))] if np.ndim(x) else [x]
        raise AiryRangeError(float(bad[0]))


def airy_eval(x):
    _check_argument(x)
    ai, aip, bi, bip = special.airy(float(x))
    return AiryValues(ai=float(ai), bi=float(bi), aip=float(aip), bip=float(bip))


def airy_grid(xs):
    """Vectorised evaluation; returns arrays (ai, bi, aip, bip) shaped like ``xs``."""
    xs = np.asarray(xs, dtype=float)
    _check_argument(xs)
    ai, aip, bi, bip = special.airy(xs)
    return ai, bi, aip, bip


def maclaurin_airy(x):
    """
    Power series of the two standard solutions f, g of w'' = x·w:

        f = Σ a_k x^(3k),   (3k)(3k−1)·a_k = a_(k−1),  a_0 = 1
        g = Σ b_k x^(3k+1), (3k+1)(3k)·b_k = b_(k−1),  b_0 = 1

    with Ai = Ai(0)·f + Ai′(0)·g and Bi = √3·(Ai(0)·f − Ai′(0)·g).
    """
    x = float(x)
    x3 = x**3
    f_term, g_term = 1.0, x
    f, g = f_term, g_term
    fp, gp = 0.0, 1.0
    for k in range(1, SERIES_MAX_TERMS):
        f_term *= x3 / ((3 * k) * (3 * k - 1))
        g_term *= x3 / ((3 * k + 1) * (3 * k))
        fp_term = 3 * k * f_term / x if x else 0.0
        gp_term = (3 * k + 1) * g_term / x if x else 0.0
        f += f_term
        g += g_term
        fp += fp_term
        gp += gp_term
        pairs = ((f_term, f), (g_term, g), (fp_term, fp), (gp_term, gp))
        if all(abs(term) <= SERIES_TOLERANCE * abs(total) for term, total in pairs):
            break
    sqrt3 = math.sqrt(3.0)
    return AiryValues(
        ai=AI_0 * f + AIP_0 * g,
        bi=sqrt3 * (AI_0 * f - AIP_0 * g),
        aip=AI_0 * fp + AIP_0 * gp,
        bip=sqrt3 * (AI_0 * fp - AIP_0 * gp),
    )


def _asymptotic_coefficients(zeta):
    """u_k and v_k / ζ^k up to the smallest term of the divergent series."""
    u_terms, v_terms = [1.0], [1.0]
    u = 1.0
    for k in range(1, SERIES_MAX_TERMS):
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1))
        u_term = u / zeta**k
        if abs(u_term) >= abs(u_terms[-1]) or abs(u_term) < 1e-17:
            break
        u_terms.append(u_term)
        v_terms.append(-(6 * k + 1) / (6 * k - 1) * u_term)
    return u_terms, v_terms


def asymptotic_airy(x):
    """Large-|x| expansions: exponential forms for x > 0, modulus/phase forms for x < 0."""
    x = float(x)
    if x == 0.0:
        raise AiryRangeError(x)
    t = abs(x)
    zeta = 2.0 / 3.0 * t**1.5
    u_terms, v_terms = _asymptotic_coefficients(zeta)
    quarter = t**0.25
    root_pi = math.sqrt(math.pi)
    if x > 0:
        alternating = [(-1) ** k for k in range(len(u_terms))]
        u_alt = sum(s * u for s, u in zip(alternating, u_terms))
        v_alt = sum(s * v for s, v in zip(alternating, v_terms))
        decay = math.exp(-zeta)
        growth = math.exp(zeta)
        return AiryValues(
            ai=decay / (2.0 * root_pi * quarter) * u_alt,
            aip=-quarter * decay / (2.0 * root_pi) * v_alt,
            bi=growth / (root_pi * quarter) * sum(u_terms),
            bip=quarter * growth / root_pi * sum(v_terms),
        )
    # even/odd parts with alternating signs: Σ(−1)^k c_(2k) and Σ(−1)^k c_(2k+1)
    u_even = sum((-1) ** (k // 2) * u for k, u in enumerate(u_terms) if k % 2 == 0)
    u_odd = sum((-1) ** (k // 2) * u for k, u in enumerate(u_terms) if k % 2 == 1)
    v_even = sum((-1) ** (k // 2) * v for k, v in enumerate(v_terms) if k % 2 == 0)
    v_odd = sum((-1) ** (k // 2) * v for k, v in enumerate(v_terms) if k % 2 == 1)
    phase = zeta - math.pi / 4.0
    c, s = math.cos(phase), math.sin(phase)
    return AiryValues(
        ai=(c * u_even + s * u_odd) / (root_pi * quarter),
        bi=(-s * u_even + c * u_odd) / (root_pi * quarter),
        aip=quarter / root_pi * (s * v_even - c * v_odd),
        bip=quarter / root_pi * (c * v_even + s * v_odd),
    )


def reference_airy(x):
    """Series inside SERIES_REGIME, asymptotic expansion for |x| >= ASYMPTOTIC_THRESHOLD."""
    lo, hi = SERIES_REGIME
    if lo <= x <= hi:
        return maclaurin_airy(x)
    if abs(x) >= ASYMPTOTIC_THRESHOLD:
        return asymptotic_airy(x)
    raise AiryRangeError(x)
