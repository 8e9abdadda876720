"""
Mode solver: drives either closed-loop determinant to zero over one free
parameter, follows the square-barrier branches across a sweep of barrier
lengths, and rebuilds the wavefunction from the null space at a root.
"""

import enum
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from django.conf import settings
from scipy import linalg

from airy_functions.services import AIRY_ARGUMENT_RANGE
from calibration.services import decay_constant, wavenumber
from oracles.services import TransferMatrix, loop_monodromy, trace_residual
from square_barrier import services as square
from triangular_barrier import services as triangular
from tunnel_circuits.exceptions import (
    AiryRangeError,
    BracketError,
    ConvergenceError,
    DomainError,
    EvaluationError,
    NotAModeError,
)
from tunnel_circuits.utils import radians_to_degrees

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

DEFAULT_SETTINGS = {
    'CONSTANTS_MODE': 'paper',
    'SCAN_STEPS_PER_TURN': 10000,
    'RK4_STEPS': 10000,
    'MAX_BISECTIONS': 200,
    'ROOT_TOL_X': 1e-12,
    'ROOT_TOL_F': 0.0,
    'WAVEFUNCTION_SAMPLES': 201,
    'OUTPUT_FORMAT': 'csv',
}

# continuation window: ±25% of the previous root or ±0.05 rad, whichever is larger
CONTINUATION_FRACTION = 0.25
CONTINUATION_MIN_HALF_WIDTH = 0.05
CONTINUATION_WIDENING = 4.0
CONTINUATION_MIN_STEPS = 200

NOT_A_MODE_THRESHOLD = 1e-6


def solver_settings():
    return {**DEFAULT_SETTINGS, **getattr(settings, 'TUNNEL_CIRCUITS', {})}


class Model(str, enum.Enum):
    SQUARE = 'square'
    TRIANGULAR = 'triangular'


class FreeParameter(str, enum.Enum):
    THETA = 'theta'
    ENERGY = 'energy'
    BARRIER_HEIGHT = 'barrier_height'
    BARRIER_LENGTH = 'barrier_length'
    PRE_BARRIER_LENGTH = 'pre_barrier_length'


PHYSICAL_PARAMETERS = {'energy', 'barrier_height', 'barrier_length'}
PHASE_PARAMETERS = {'theta', 'pre_barrier_length'}


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    det_lo: float
    det_hi: float

    @property
    def degenerate(self):
        """An exact zero sitting on a grid point."""
        return self.lo == self.hi


@dataclass(frozen=True)
class ModeRoot:
    value: float
    residual: float
    free_parameter: FreeParameter = None
    branch_index: int = 0
    model: Model = None
    parameters: dict = field(default_factory=dict)

    @property
    def theta(self):
        return self.parameters.get('theta')


@dataclass(frozen=True)
class ModeCoefficients:
    c: tuple
    residual: float  # ‖M·c‖ / ‖M‖
    norm_convention: str = 'unit-l2-largest-positive'


@dataclass(frozen=True)
class WavefunctionSample:
    x: float
    psi: float
    dpsi: float
    region: str


@dataclass(frozen=True)
class WavefunctionTrace:
    samples: tuple
    boundary_residuals: tuple  # ψ and ψ′/k mismatches at the junction, then at the loop closure


@dataclass(frozen=True)
class BranchPoint:
    theta: float
    ka: float
    a: float


@dataclass(frozen=True)
class SweepRow:
    b: float
    branches: tuple  # BranchPoint or None per branch


@dataclass(frozen=True)
class ScanRow:
    theta: float
    a: float
    b: float
    c: float
    determinant: float
    note: str = ''


@dataclass(frozen=True)
class ModeReport:
    root: ModeRoot
    coefficients: ModeCoefficients
    trace: WavefunctionTrace
    monodromy_residual: float | None  # 2 − tr(M_loop) from RK4; None when the integration overflows
    monodromy: TransferMatrix | None = None


def resolve_parameters(model, values, profile):
    """
    Complete a set of four model parameters: Θ and the pre-barrier length are
    two views of the same quantity (Θ = k·a for the square loop, Θ = k·A for
    the triangular one). Domain rules are enforced here.
    """
    model = Model(model)
    energy = values['energy']
    height = values['barrier_height']
    length = values['barrier_length']
    k = wavenumber(profile, energy)
    if values.get('theta') is not None:
        theta = values['theta']
        offset = theta / k
    else:
        offset = values['pre_barrier_length']
        theta = k * offset
    if model is Model.SQUARE:
        square.SquareBarrierSpec(energy, height, offset, length)
    else:
        triangular.TriangularBarrierSpec(energy, height, length, theta)
    return {
        'energy': energy,
        'barrier_height': height,
        'barrier_length': length,
        'theta': theta,
        'pre_barrier_length': offset,
    }


def model_residual(model, parameters, profile):
    """The quantity driven to zero: the normalised square determinant, or the triangular one."""
    theta, length = parameters['theta'], parameters['barrier_length']
    if Model(model) is Model.SQUARE:
        k = wavenumber(profile, parameters['energy'])
        beta = decay_constant(profile, parameters['energy'], parameters['barrier_height'])
        return square.normalized_determinant(theta, k, beta, length)
    spec = triangular.TriangularBarrierSpec(parameters['energy'], parameters['barrier_height'], length, theta)
    derived = triangular.derive(spec, profile)
    return triangular.determinant(theta, derived.X, derived.Y, derived.R)


def mode_matrix(model, parameters, profile):
    theta, length = parameters['theta'], parameters['barrier_length']
    if Model(model) is Model.SQUARE:
        k = wavenumber(profile, parameters['energy'])
        beta = decay_constant(profile, parameters['energy'], parameters['barrier_height'])
        return square.scaled_matrix(theta, k, beta, length)
    spec = triangular.TriangularBarrierSpec(parameters['energy'], parameters['barrier_height'], length, theta)
    derived = triangular.derive(spec, profile)
    return triangular.build_matrix(theta, derived.X, derived.Y, derived.R)


@dataclass(frozen=True)
class ModeProblem:
    """Three fixed parameters and one free one; ``residual(value)`` re-derives everything per trial value."""

    model: Model
    fixed: dict
    free: FreeParameter
    profile: object

    def __post_init__(self):
        object.__setattr__(self, 'model', Model(self.model))
        object.__setattr__(self, 'free', FreeParameter(self.free))
        names = set(self.fixed) | {self.free.value}
        if self.free.value in self.fixed:
            raise DomainError(f"{self.free.value} cannot be both fixed and free")
        phase = names & PHASE_PARAMETERS
        if not PHYSICAL_PARAMETERS <= names or len(phase) != 1 or len(names) != 4:
            raise DomainError(
                "fixed and free parameters must cover energy, barrier_height, barrier_length "
                "and exactly one of theta or pre_barrier_length"
            )

    def parameters(self, value):
        values = {**self.fixed, self.free.value: value}
        return resolve_parameters(self.model, values, self.profile)

    def residual(self, value):
        return model_residual(self.model, self.parameters(value), self.profile)


def scan_brackets(det, lo, hi, steps):
    """Sign changes of ``det`` between adjacent points of a uniform grid with ``steps`` intervals."""
    if steps < 2:
        raise DomainError(f"scan needs at least 2 steps, got {steps}")
    if not lo < hi:
        raise DomainError(f"empty search range ({lo}, {hi})")
    xs = np.linspace(lo, hi, steps + 1)
    values = []
    for x in xs:
        value = det(float(x))
        if not math.isfinite(value):
            raise EvaluationError(f"determinant is not finite at {float(x)!r}", abscissa=float(x))
        values.append(value)

    brackets = []
    for i, (x, value) in enumerate(zip(xs, values)):
        if value == 0.0:
            brackets.append(RootBracket(float(x), float(x), 0.0, 0.0))
            continue
        if i + 1 < len(values) and values[i + 1] != 0.0 and math.copysign(1.0, value) != math.copysign(1.0, values[i + 1]):
            brackets.append(RootBracket(float(x), float(xs[i + 1]), value, values[i + 1]))
    return brackets


def refine_root(det, bracket, tol_x=None, tol_f=None, max_iterations=None):
    """
    Bisection with secant steps taken only when they land strictly inside the
    bracket; a secant step that fails to halve the bracket forces a bisection next.
    ``tol_x`` defaults to ROOT_TOL_X·max(1, |x|).
    """
    config = solver_settings()
    relative_tol = config['ROOT_TOL_X']
    tol_f = config['ROOT_TOL_F'] if tol_f is None else tol_f
    max_iterations = config['MAX_BISECTIONS'] if max_iterations is None else max_iterations

    if bracket.degenerate:
        return ModeRoot(value=bracket.lo, residual=bracket.det_lo)
    lo, hi, f_lo, f_hi = bracket.lo, bracket.hi, bracket.det_lo, bracket.det_hi
    if not lo < hi or math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi) and f_lo != 0 and f_hi != 0:
        raise BracketError(f"({lo}, {hi}) does not bracket a sign change")
    if f_lo == 0.0:
        return ModeRoot(value=lo, residual=0.0)
    if f_hi == 0.0:
        return ModeRoot(value=hi, residual=0.0)

    use_secant = True
    for _ in range(max_iterations):
        width = hi - lo
        tolerance = tol_x if tol_x is not None else relative_tol * max(1.0, abs(0.5 * (lo + hi)))
        if width <= tolerance:
            break
        x = None
        if use_secant:
            x = hi - f_hi * (hi - lo) / (f_hi - f_lo)
            if not lo < x < hi:
                x = None
        if x is None:
            x = 0.5 * (lo + hi)
        f_x = det(x)
        if not math.isfinite(f_x):
            raise EvaluationError(f"determinant is not finite at {x!r}", abscissa=x)
        if abs(f_x) <= tol_f:
            return ModeRoot(value=x, residual=f_x)
        if math.copysign(1.0, f_x) == math.copysign(1.0, f_lo):
            lo, f_lo = x, f_x
        else:
            hi, f_hi = x, f_x
        use_secant = hi - lo <= 0.5 * width
    else:
        raise ConvergenceError(f"no convergence within {max_iterations} iterations in ({lo}, {hi})", abscissa=0.5 * (lo + hi))

    middle = 0.5 * (lo + hi)
    return ModeRoot(value=middle, residual=det(middle))


def default_scan_steps(free, lo, hi):
    per_turn = solver_settings()['SCAN_STEPS_PER_TURN']
    if FreeParameter(free) is FreeParameter.THETA:
        return max(2, math.ceil(per_turn * (hi - lo) / TWO_PI - 1e-9))
    return max(2, per_turn)


def solve_free_parameter(model, fixed, free, search_range, profile, steps=None, tol_x=None, tol_f=None):
    """All roots of the model residual in ``search_range``, nearest to zero first."""
    problem = ModeProblem(model=model, fixed=dict(fixed), free=free, profile=profile)
    lo, hi = search_range
    if not lo < hi:
        raise DomainError(f"empty search range ({lo}, {hi})")
    problem.parameters(lo)
    problem.parameters(hi)
    steps = steps or default_scan_steps(problem.free, lo, hi)

    brackets = scan_brackets(problem.residual, lo, hi, steps)
    refined = [refine_root(problem.residual, bracket, tol_x=tol_x, tol_f=tol_f) for bracket in brackets]
    refined.sort(key=lambda root: abs(root.value))
    roots = [
        replace(
            root,
            free_parameter=problem.free,
            branch_index=index,
            model=problem.model,
            parameters=problem.parameters(root.value),
        )
        for index, root in enumerate(refined)
    ]
    logger.info("%s/%s: %d root(s) in (%g, %g)", problem.model.value, problem.free.value, len(roots), lo, hi)
    return roots


def mode_at(model, parameters, profile):
    """A ModeRoot for fully specified parameters, without solving."""
    model = Model(model)
    resolved = resolve_parameters(model, parameters, profile)
    return ModeRoot(
        value=resolved['theta'],
        residual=model_residual(model, resolved, profile),
        free_parameter=None,
        model=model,
        parameters=resolved,
    )


def _continue_branch(residual, previous):
    half_width = max(CONTINUATION_FRACTION * abs(previous), CONTINUATION_MIN_HALF_WIDTH)
    per_turn = solver_settings()['SCAN_STEPS_PER_TURN']
    for attempt, factor in enumerate((1.0, CONTINUATION_WIDENING)):
        lo = max(previous - factor * half_width, -TWO_PI)
        hi = min(previous + factor * half_width, 0.0)
        steps = max(CONTINUATION_MIN_STEPS, math.ceil(per_turn * (hi - lo) / TWO_PI - 1e-9))
        brackets = scan_brackets(residual, lo, hi, steps)
        if brackets:
            nearest = min(brackets, key=lambda bracket: abs(0.5 * (bracket.lo + bracket.hi) - previous))
            return refine_root(residual, nearest).value
        if attempt == 0:
            logger.info("no sign change within ±%.3g rad of %.6g; widening the window", half_width, previous)
    return None


def sweep_square(energy, potential, b_values, profile):
    """
    Both Θ branches in (−2π, 0) for every barrier length. The first length is
    solved from scratch; each later length seeds its search from the previous root.
    """
    b_values = [float(b) for b in b_values]
    if not b_values:
        raise DomainError("sweep needs at least one barrier length")
    if any(b2 <= b1 for b1, b2 in zip(b_values, b_values[1:])):
        raise DomainError("barrier lengths must be strictly increasing")
    k = wavenumber(profile, energy)

    def row(b, thetas):
        points = tuple(None if theta is None else BranchPoint(theta=theta, ka=theta, a=theta / k) for theta in thetas)
        return SweepRow(b=b, branches=points)

    fixed = {'energy': energy, 'barrier_height': potential, 'barrier_length': b_values[0]}
    roots = solve_free_parameter(Model.SQUARE, fixed, FreeParameter.THETA, (-TWO_PI, 0.0), profile)
    thetas = [root.value for root in roots[:2]] + [None] * (2 - min(len(roots), 2))
    for branch, theta in enumerate(thetas):
        if theta is None:
            logger.warning("branch %d has no root at b = %g", branch, b_values[0])
    rows = [row(b_values[0], thetas)]

    for b in b_values[1:]:
        problem = ModeProblem(
            model=Model.SQUARE,
            fixed={'energy': energy, 'barrier_height': potential, 'barrier_length': b},
            free=FreeParameter.THETA,
            profile=profile,
        )
        next_thetas = []
        for branch, previous in enumerate(thetas):
            theta = None if previous is None else _continue_branch(problem.residual, previous)
            if previous is not None and theta is None:
                logger.warning("branch %d terminated at b = %g", branch, b)
            next_thetas.append(theta)
        thetas = next_thetas
        rows.append(row(b, thetas))
    return rows


def sweep_triangular(energy, peak_potential, barrier_length, thetas, profile):
    """Geometry and determinant of the triangular loop on a grid of Θ values (radians)."""
    rows = []
    for theta in thetas:
        spec = triangular.TriangularBarrierSpec(energy, peak_potential, barrier_length, theta)
        derived = triangular.derive(spec, profile)
        try:
            value = triangular.determinant(theta, derived.X, derived.Y, derived.R)
        except AiryRangeError as exc:
            raise EvaluationError(
                f"Airy argument {exc.argument!r} outside {AIRY_ARGUMENT_RANGE} at theta = {radians_to_degrees(theta):.6g} deg",
                abscissa=theta,
            ) from exc
        note = 'degenerate geometry' if derived.degenerate else ''
        rows.append(ScanRow(theta=theta, a=derived.a, b=derived.b, c=derived.c, determinant=value, note=note))
    return rows


def nullspace_coefficients(matrix):
    """
    Unit vector minimising ‖M·c‖: rows and columns are equilibrated first, then
    the smallest right singular vector is mapped back and normalised with its
    largest-magnitude entry positive.
    """
    matrix = np.asarray(matrix, dtype=float)
    row_max = np.abs(matrix).max(axis=1)
    row_scale = np.where(row_max > 0, 1.0 / np.where(row_max > 0, row_max, 1.0), 1.0)
    scaled = matrix * row_scale[:, None]
    col_max = np.abs(scaled).max(axis=0)
    col_scale = np.where(col_max > 0, 1.0 / np.where(col_max > 0, col_max, 1.0), 1.0)
    scaled = scaled * col_scale[None, :]

    _, _, vt = linalg.svd(scaled)
    c = col_scale * vt[-1]
    c = c / linalg.norm(c)
    if c[np.argmax(np.abs(c))] < 0:
        c = -c
    residual = float(linalg.norm(matrix @ c) / linalg.norm(matrix, 2))
    if residual > NOT_A_MODE_THRESHOLD:
        raise NotAModeError(f"boundary matrix is not singular: relative residual {residual:.3e}")
    return ModeCoefficients(c=tuple(float(value) for value in c), residual=residual)


def _region_samples(xs, psi, dpsi, region):
    return [WavefunctionSample(float(x), float(p), float(d), region) for x, p, d in zip(xs, psi, dpsi)]


def trace_wavefunction(root, coefficients, n_samples, profile):
    """
    ψ and ψ′ on ``n_samples`` uniform points per region, plus the four boundary
    mismatches (ψ, then ψ′/k, at the junction and at the loop closure) relative to max|ψ|.
    """
    if n_samples < 2:
        raise DomainError(f"need at least 2 samples per region, got {n_samples}")
    parameters = root.parameters
    energy, length = parameters['energy'], parameters['barrier_length']
    k = wavenumber(profile, energy)
    c = coefficients.c

    if Model(root.model) is Model.SQUARE:
        beta = decay_constant(profile, energy, parameters['barrier_height'])
        a = parameters['pre_barrier_length']
        region_one = np.linspace(a, 0.0, n_samples)
        region_two = np.linspace(0.0, length, n_samples)

        def field_one(xs):
            return square.field(c, k, beta, xs, 'I')

        def field_two(xs):
            return square.field(c, k, beta, xs, 'II', barrier_length=length)

        junction, closure_one, closure_two = 0.0, a, length
    else:
        spec = triangular.TriangularBarrierSpec(energy, parameters['barrier_height'], length, parameters['theta'])
        derived = triangular.derive(spec, profile)
        region_one = np.linspace(0.0, derived.a, n_samples)
        region_two = np.linspace(derived.a, derived.c, n_samples)

        def field_one(xs):
            return triangular.field(c, derived, xs, 'I')

        def field_two(xs):
            return triangular.field(c, derived, xs, 'II')

        junction, closure_one, closure_two = derived.a, 0.0, derived.c

    psi_one, dpsi_one = field_one(region_one)
    psi_two, dpsi_two = field_two(region_two)
    samples = tuple(_region_samples(region_one, psi_one, dpsi_one, 'I') + _region_samples(region_two, psi_two, dpsi_two, 'II'))
    scale = max(float(np.abs(psi_one).max()), float(np.abs(psi_two).max()))

    def mismatch(x_one, x_two):
        p1, d1 = field_one(np.array([x_one]))
        p2, d2 = field_two(np.array([x_two]))
        return abs(float(p1[0] - p2[0])) / scale, abs(float(d1[0] - d2[0])) / (k * scale)

    residuals = mismatch(junction, junction) + mismatch(closure_one, closure_two)
    return WavefunctionTrace(samples=samples, boundary_residuals=residuals)


def mode_report(root, profile, n_samples=None, rk4_steps=None):
    """Coefficients, wavefunction and the RK4 monodromy check for one root."""
    config = solver_settings()
    n_samples = n_samples or config['WAVEFUNCTION_SAMPLES']
    rk4_steps = rk4_steps or config['RK4_STEPS']
    parameters = root.parameters
    coefficients = nullspace_coefficients(mode_matrix(root.model, parameters, profile))
    trace = trace_wavefunction(root, coefficients, n_samples, profile)
    try:
        monodromy = loop_monodromy(
            Model(root.model).value,
            parameters['energy'],
            parameters['barrier_height'],
            parameters['theta'],
            parameters['barrier_length'],
            profile,
            rk4_steps,
        )
    except EvaluationError as exc:
        logger.warning("monodromy check skipped for %s root at theta = %.6g: %s", Model(root.model).value, parameters['theta'], exc)
        return ModeReport(root=root, coefficients=coefficients, trace=trace, monodromy_residual=None)
    return ModeReport(
        root=root,
        coefficients=coefficients,
        trace=trace,
        monodromy_residual=trace_residual(monodromy),
        monodromy=monodromy,
    )
