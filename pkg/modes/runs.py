"""
One function per command. Each takes validated request data (request units:
degrees for Θ) and returns a RunResult that the writers render and the API
returns as is.
"""

from dataclasses import dataclass

import numpy as np

from calibration.services import make_profile
from modes.serializers import (
    PARAMETER_NAMES,
    ModeReportSerializer,
    ModeRootSerializer,
    ScanRowSerializer,
    SweepRowSerializer,
)
from modes.services import mode_at, mode_report, solve_free_parameter, solver_settings, sweep_square, sweep_triangular
from modes.writers import format_cell
from tunnel_circuits.exceptions import NoRootsError
from tunnel_circuits.utils import degrees_to_radians, parse_range, radians_to_degrees, range_grid

ROOT_COLUMNS = (
    'branch_index', 'free_parameter', 'value', 'theta_deg', 'ka',
    'pre_barrier_length', 'energy', 'potential', 'barrier_length', 'residual',
)
SWEEP_COLUMNS = (
    'b', 'theta_deg_branch0', 'ka_branch0', 'a_branch0', 'theta_deg_branch1', 'ka_branch1', 'a_branch1',
)
SCAN_COLUMNS = ('theta_deg', 'A', 'B', 'C', 'determinant', 'note')
SAMPLE_COLUMNS = ('x', 'psi', 'dpsi', 'region')


@dataclass(frozen=True)
class RunResult:
    config: dict
    payload: dict
    header: tuple
    rows: list
    comments: tuple = ()


def with_defaults(config):
    """Drop unset values and fill constants/format from settings, so the echo is complete."""
    defaults = solver_settings()
    config = {key: value for key, value in config.items() if value is not None}
    config.setdefault('constants', defaults['CONSTANTS_MODE'])
    config.setdefault('format', defaults['OUTPUT_FORMAT'])
    return config


def to_service(name, value):
    return degrees_to_radians(value) if name == 'theta' else value


def fixed_parameters(config, free=None):
    return {
        PARAMETER_NAMES[name]: to_service(name, config[name])
        for name in PARAMETER_NAMES
        if name != free and config.get(name) is not None
    }


def table(data, columns):
    return [[row[column] for column in columns] for row in data]


def find_roots(config, profile):
    free = config['free']
    lo, hi, step = parse_range(config['range'])
    steps = config.get('steps')
    if steps is None and step is not None:
        steps = max(2, round((hi - lo) / step))
    roots = solve_free_parameter(
        config['model'],
        fixed_parameters(config, free),
        PARAMETER_NAMES[free],
        (to_service(free, lo), to_service(free, hi)),
        profile,
        steps=steps,
    )
    if not roots:
        raise NoRootsError(f"no {config['model']} modes with {free} in [{lo}, {hi}]")
    return roots


def run_solve(config):
    config = with_defaults(config)
    roots = find_roots(config, make_profile(config['constants']))
    data = ModeRootSerializer(roots, many=True).data
    return RunResult(
        config=config,
        payload={'config': config, 'roots': data},
        header=ROOT_COLUMNS,
        rows=table(data, ROOT_COLUMNS),
    )


def barrier_lengths(config):
    if config.get('b_values'):
        return sorted(config['b_values'])
    lo, hi, step = parse_range(config['range'])
    if step is not None:
        return range_grid(lo, hi, step)
    if config.get('spacing') == 'log':
        return [float(b) for b in np.geomspace(lo, hi, config['points'])]
    return [float(b) for b in np.linspace(lo, hi, config['points'])]


def run_sweep(config):
    config = with_defaults(config)
    rows = sweep_square(config['energy'], config['potential'], barrier_lengths(config), make_profile(config['constants']))
    data = SweepRowSerializer(rows, many=True).data
    return RunResult(
        config=config,
        payload={'config': config, 'rows': data},
        header=SWEEP_COLUMNS,
        rows=table(data, SWEEP_COLUMNS),
    )


def run_scan(config):
    config = with_defaults(config)
    if config.get('theta_values'):
        thetas_deg = config['theta_values']
    else:
        thetas_deg = range_grid(*parse_range(config['range']))
    rows = sweep_triangular(
        config['energy'],
        config['potential'],
        config['barrier_length'],
        [degrees_to_radians(theta) for theta in thetas_deg],
        make_profile(config['constants']),
    )
    data = ScanRowSerializer(rows, many=True).data
    return RunResult(
        config=config,
        payload={'config': config, 'rows': data},
        header=SCAN_COLUMNS,
        rows=table(data, SCAN_COLUMNS),
    )


def run_wavefunction(config):
    config = with_defaults(config)
    profile = make_profile(config['constants'])
    if config.get('free'):
        roots = find_roots(config, profile)
        branch = config.get('branch', 0)
        if branch >= len(roots):
            raise NoRootsError(f"branch {branch} requested but only {len(roots)} mode(s) found")
        root = roots[branch]
    else:
        root = mode_at(config['model'], fixed_parameters(config), profile)
    report = mode_report(root, profile, n_samples=config.get('samples'))
    data = ModeReportSerializer(report).data
    comments = (
        f"theta_deg: {format_cell(radians_to_degrees(root.parameters['theta']))}",
        'boundary_residuals: ' + ','.join(format_cell(value) for value in report.trace.boundary_residuals),
        f"nullspace_residual: {format_cell(report.coefficients.residual)}",
        f"monodromy_residual: {format_cell(report.monodromy_residual)}",
    )
    return RunResult(
        config=config,
        payload={'config': config, 'mode': data},
        header=SAMPLE_COLUMNS,
        rows=table(data['samples'], SAMPLE_COLUMNS),
        comments=comments,
    )
