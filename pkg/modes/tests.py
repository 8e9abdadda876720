import csv
import json
import os
import tempfile
from io import StringIO

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from rest_framework import status
from rest_framework.test import APIClient

from calibration.services import decay_constant, make_profile, wavenumber
from modes.runs import ROOT_COLUMNS, SCAN_COLUMNS, SWEEP_COLUMNS
from square_barrier.services import asymptotic_theta
from tunnel_circuits.utils import radians_to_degrees

SQUARE_FLAGS = ['square', '--energy', '0.95', '--potential', '1.00', '--barrier-length', '0.5', '--constants', 'paper']
TRIANGULAR_FLAGS = ['triangular', '--energy', '0.95', '--potential', '1.00', '--barrier-length', '2', '--constants', 'paper']


def run(*args):
    out, err = StringIO(), StringIO()
    call_command(*args, stdout=out, stderr=err)
    return out.getvalue()


def read_csv(text):
    lines = [line for line in text.split('\n') if line and not line.startswith('#')]
    return list(csv.reader(lines))


def comments(text):
    return dict(
        line[2:].split(': ', 1) for line in text.split('\n') if line.startswith('# ')
    )


class ConfigFileMixin:
    def write_config(self, config):
        handle = tempfile.NamedTemporaryFile('w', suffix='.json', delete=False, encoding='utf-8')
        with handle:
            json.dump(config, handle)
        self.addCleanup(os.remove, handle.name)
        return handle.name


class SolveCommandTest(ConfigFileMixin, SimpleTestCase):
    def test_square_theta_roots(self):
        output = run('solve', *SQUARE_FLAGS, '--free', 'theta', '--range=-360:0')
        header, *rows = read_csv(output)
        self.assertEqual(header, list(ROOT_COLUMNS))
        self.assertEqual(len(rows), 2)
        value = ROOT_COLUMNS.index('value')
        self.assertAlmostEqual(float(rows[0][value]), -0.007529, delta=1e-5)
        self.assertLess(abs(float(rows[1][value]) / -359.8569 - 1), 1e-3)
        self.assertEqual(rows[0][ROOT_COLUMNS.index('free_parameter')], 'theta')
        self.assertRegex(rows[0][value], r'^-?\d\.\d{9}e[+-]\d\d$')

    def test_negative_range_as_separate_argument(self):
        joined = run('solve', *SQUARE_FLAGS, '--free', 'theta', '--range=-360:0')
        self.assertEqual(run('solve', *SQUARE_FLAGS, '--free', 'theta', '--range', '-360:0'), joined)
        header, *rows = read_csv(run('solve', *SQUARE_FLAGS, '--free', 'theta', '--range', '-1:-0.0001'))
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(float(rows[0][header.index('theta_deg')]), -0.007529, delta=1e-5)

    def test_square_pre_barrier_length_is_a_signed_coordinate(self):
        flags = ['square', '--energy', '0.95', '--potential', '1.00', '--constants', 'paper']
        header, *rows = read_csv(run(
            'solve', *flags, '--pre-barrier-length', '-0.026320', '--free', 'barrier_length', '--range', '0.1:1',
        ))
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(float(rows[0][header.index('barrier_length')]), 0.5, delta=1e-3)
        self.assertEqual(float(rows[0][header.index('pre_barrier_length')]), -0.02632)
        with self.assertRaises(CommandError) as caught:
            run('solve', *flags, '--pre-barrier-length', '0.026320', '--free', 'barrier_length', '--range', '0.1:1')
        self.assertEqual(caught.exception.returncode, 2)

    def test_output_is_byte_identical_across_runs(self):
        args = ('solve', *SQUARE_FLAGS, '--free', 'theta', '--range=-360:0')
        self.assertEqual(run(*args), run(*args))
        self.assertNotIn('\r', run(*args))

    def test_energy_above_barrier(self):
        flags = ['square', '--energy', '1.05', '--potential', '1.00', '--barrier-length', '0.5']
        with self.assertRaisesMessage(CommandError, "energy must be below barrier potential") as caught:
            run('solve', *flags, '--free', 'theta', '--range=-360:0')
        self.assertEqual(caught.exception.returncode, 2)

    def test_triangular_has_no_mode_below_359_degrees(self):
        with self.assertRaises(CommandError) as caught:
            run('solve', *TRIANGULAR_FLAGS, '--free', 'theta', '--range', '1:359')
        self.assertEqual(caught.exception.returncode, 3)

    def test_triangular_modes_near_full_turn(self):
        header, *rows = read_csv(run('solve', *TRIANGULAR_FLAGS, '--free', 'theta', '--range', '300:360'))
        self.assertEqual(len(rows), 2)
        for row in rows:
            self.assertTrue(359.0 < float(row[header.index('theta_deg')]) < 360.0)

    def test_invalid_requests(self):
        for args in (
            ['square', '--energy', '0.95', '--free', 'theta', '--range=-360:0'],
            [*SQUARE_FLAGS, '--free', 'theta', '--range', 'nonsense'],
            [*SQUARE_FLAGS, '--theta', '-10', '--free', 'theta', '--range=-360:0'],
            ['circle', '--energy', '0.95', '--potential', '1', '--barrier-length', '1', '--free', 'theta', '--range=-1:0'],
        ):
            with self.assertRaises(CommandError) as caught:
                run('solve', *args)
            self.assertEqual(caught.exception.returncode, 2, msg=args)

    def test_json_output(self):
        document = json.loads(run('solve', *SQUARE_FLAGS, '--free', 'theta', '--range=-360:0', '--format', 'json'))
        self.assertEqual(len(document['roots']), 2)
        self.assertEqual(document['config']['constants'], 'paper')
        self.assertEqual(document['config']['format'], 'json')
        self.assertEqual(document['roots'][0]['branch_index'], 0)

    def test_json_round_trip_through_config(self):
        first = run('solve', *SQUARE_FLAGS, '--free', 'theta', '--range=-360:0', '--format', 'json')
        path = self.write_config(json.loads(first)['config'])
        self.assertEqual(run('solve', '--config', path), first)

    def test_flags_override_config(self):
        path = self.write_config({
            'model': 'square', 'energy': 0.95, 'potential': 1.0, 'barrier_length': 0.5,
            'free': 'theta', 'range': '-360:0', 'constants': 'paper',
        })
        self.assertEqual(run('solve', '--config', path), run('solve', *SQUARE_FLAGS, '--free', 'theta', '--range=-360:0'))
        header, *rows = read_csv(run('solve', '--config', path, '--barrier-length', '1.0'))
        self.assertAlmostEqual(float(rows[0][header.index('theta_deg')]), -0.015059, delta=1e-5)

    def test_unreadable_config(self):
        with self.assertRaises(CommandError) as caught:
            run('solve', '--config', os.path.join(tempfile.gettempdir(), 'missing-tunnel-config.json'))
        self.assertEqual(caught.exception.returncode, 2)


class SweepCommandTest(SimpleTestCase):
    def test_single_length(self):
        output = run('sweep', '--energy', '0.95', '--potential', '1.0', '--b-values', '0.5', '--constants', 'paper')
        self.assertTrue(output.startswith(','.join(SWEEP_COLUMNS) + '\n'))
        header, *rows = read_csv(output)
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(float(rows[0][header.index('theta_deg_branch0')]), -0.007529, delta=1e-5)
        self.assertLess(abs(float(rows[0][header.index('a_branch1')]) / -1257.7377 - 1), 1e-3)

    def test_table_one_recipe(self):
        header, *rows = read_csv(run('sweep', '--config', str(settings.BASE_DIR / 'recipes' / 'table_one.json')))
        self.assertEqual(len(rows), 24)
        last = rows[-1]
        self.assertEqual(float(last[0]), 50000.0)
        self.assertAlmostEqual(float(last[header.index('theta_deg_branch0')]), -25.84194, delta=1e-3)
        self.assertAlmostEqual(float(last[header.index('theta_deg_branch1')]), -205.8419, delta=1e-3)

    def test_log_spaced_range(self):
        header, *rows = read_csv(run(
            'sweep', '--energy', '0.95', '--potential', '1.0', '--range', '1000:50000',
            '--points', '8', '--spacing', 'log', '--constants', 'paper',
        ))
        thetas = [float(row[header.index('theta_deg_branch0')]) for row in rows]
        self.assertEqual(len(thetas), 8)
        self.assertTrue(all(later <= earlier + 1e-8 for earlier, later in zip(thetas, thetas[1:])))
        self.assertLess(thetas[-1], thetas[0] - 10.0)
        self.assertAlmostEqual(thetas[-1], -25.84194, delta=1e-3)
        profile = make_profile('paper')
        limit = asymptotic_theta(wavenumber(profile, 0.95), decay_constant(profile, 0.95, 1.0), 0)
        self.assertAlmostEqual(thetas[-1], radians_to_degrees(limit), delta=1e-7)

    def test_terminated_branch_leaves_empty_cells(self):
        with self.assertLogs('modes.services', 'WARNING') as logs:
            output = run('sweep', '--energy', '0.95', '--potential', '1.0', '--b-values', '0.5,10000000', '--constants', 'si')
        header, first, second = read_csv(output)
        self.assertNotEqual(first[header.index('theta_deg_branch0')], '')
        for column in ('theta_deg_branch0', 'ka_branch0', 'a_branch0'):
            self.assertEqual(second[header.index(column)], '')
        self.assertAlmostEqual(float(second[header.index('theta_deg_branch1')]), -205.8419, delta=1e-3)
        self.assertIn('branch 0 terminated', '\n'.join(logs.output))
        self.assertNotIn('terminated', output)

    def test_invalid_lengths(self):
        for args in (
            ['--energy', '0.95', '--potential', '1.0', '--b-values', '1,1'],
            ['--energy', '0.95', '--potential', '1.0'],
            ['--energy', '0.95', '--potential', '1.0', '--range', '1:10'],
        ):
            with self.assertRaises(CommandError) as caught:
                run('sweep', *args)
            self.assertEqual(caught.exception.returncode, 2, msg=args)


class ScanCommandTest(SimpleTestCase):
    flags = ['--energy', '0.95', '--potential', '1.0', '--barrier-length', '2', '--constants', 'paper']

    def test_single_angle(self):
        header, *rows = read_csv(run('scan', *self.flags, '--theta-values', '90'))
        self.assertEqual(header, list(SCAN_COLUMNS))
        self.assertEqual(len(rows), 1)
        self.assertLess(abs(float(rows[0][1]) / 314.559 - 1), 1e-4)
        self.assertEqual(rows[0][-1], '')

    def test_zero_angle_is_degenerate(self):
        header, *rows = read_csv(run('scan', *self.flags, '--theta-values', '0'))
        self.assertEqual(float(rows[0][header.index('A')]), 0.0)
        self.assertEqual(rows[0][header.index('note')], 'degenerate geometry')

    def test_table_two_recipe(self):
        header, *rows = read_csv(run('scan', '--config', str(settings.BASE_DIR / 'recipes' / 'table_two.json')))
        self.assertEqual(len(rows), 38)
        by_angle = {round(float(row[0]), 6): row for row in rows}
        for theta, a, b, c in ((180, 629.119, 629.219, 631.119), (290, 1013.58, 1013.68, 1015.58)):
            row = by_angle[theta]
            self.assertLess(abs(float(row[1]) / a - 1), 1e-4)
            self.assertLess(abs(float(row[2]) / b - 1), 1e-4)
            self.assertLess(abs(float(row[3]) / c - 1), 1e-4)

    def test_stepped_range(self):
        _, *rows = read_csv(run('scan', *self.flags, '--range', '10:360:10'))
        self.assertEqual(len(rows), 36)

    def test_range_needs_step(self):
        with self.assertRaises(CommandError) as caught:
            run('scan', *self.flags, '--range', '10:360')
        self.assertEqual(caught.exception.returncode, 2)


class WavefunctionCommandTest(SimpleTestCase):
    def test_square_mode_header_and_rows(self):
        output = run('wavefunction', *SQUARE_FLAGS, '--free', 'theta', '--range=-360:0', '--samples', '2')
        summary = comments(output)
        residuals = [float(value) for value in summary['boundary_residuals'].split(',')]
        self.assertEqual(len(residuals), 4)
        self.assertTrue(all(value <= 1e-8 for value in residuals))
        self.assertLess(abs(float(summary['monodromy_residual'])), 1e-8)
        header, *rows = read_csv(output)
        self.assertEqual(header, ['x', 'psi', 'dpsi', 'region'])
        self.assertEqual(len(rows), 4)
        self.assertEqual([row[3] for row in rows], ['I', 'I', 'II', 'II'])

    def test_triangular_mode(self):
        output = run('wavefunction', *TRIANGULAR_FLAGS, '--free', 'theta', '--range', '300:360', '--branch', '1', '--samples', '5')
        residuals = [float(value) for value in comments(output)['boundary_residuals'].split(',')]
        self.assertTrue(all(value <= 1e-8 for value in residuals))
        self.assertEqual(len(read_csv(output)), 11)

    def test_long_si_barrier(self):
        flags = ['square', '--energy', '0.95', '--potential', '1.00', '--barrier-length', '1000', '--constants', 'si']
        with self.assertLogs('modes.services', 'WARNING'):
            output = run('wavefunction', *flags, '--free', 'theta', '--range', '-360:0', '--samples', '5')
        summary = comments(output)
        self.assertEqual(summary['monodromy_residual'], '')
        self.assertAlmostEqual(float(summary['theta_deg']), -25.84194, delta=1e-3)
        self.assertTrue(all(float(value) <= 1e-8 for value in summary['boundary_residuals'].split(',')))
        self.assertEqual(len(read_csv(output)), 11)

    def test_arbitrary_theta_is_not_a_mode(self):
        with self.assertRaises(CommandError) as caught:
            run('wavefunction', *SQUARE_FLAGS, '--theta', '-90')
        self.assertEqual(caught.exception.returncode, 5)

    def test_missing_branch(self):
        with self.assertRaises(CommandError) as caught:
            run('wavefunction', *SQUARE_FLAGS, '--free', 'theta', '--range=-360:0', '--branch', '5')
        self.assertEqual(caught.exception.returncode, 3)

    def test_json_document(self):
        document = json.loads(run('wavefunction', *SQUARE_FLAGS, '--free', 'theta', '--range=-360:0', '--samples', '3', '--format', 'json'))
        mode = document['mode']
        self.assertEqual(len(mode['samples']), 6)
        self.assertEqual(len(mode['coefficients']), 4)
        self.assertLessEqual(mode['nullspace_residual'], 1e-8)


class ModeApiTest(SimpleTestCase):
    def setUp(self):
        self.client = APIClient()
        self.square = {
            'model': 'square', 'energy': 0.95, 'potential': 1.0, 'barrier_length': 0.5,
            'free': 'theta', 'range': '-360:0', 'constants': 'paper',
        }

    def test_solve(self):
        response = self.client.post('/api/modes/solve/', self.square, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data['roots']), 2)
        self.assertAlmostEqual(response.data['roots'][0]['theta_deg'], -0.007529, delta=1e-5)

    def test_domain_error(self):
        response = self.client.post('/api/modes/solve/', {**self.square, 'energy': 1.05}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(response.data, {"error": "energy must be below barrier potential"})

    def test_no_roots(self):
        response = self.client.post('/api/modes/solve/', {**self.square, 'range': '-10:-5'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_422_UNPROCESSABLE_ENTITY)
        self.assertIn('error', response.data)

    def test_invalid_payload(self):
        response = self.client.post('/api/modes/solve/', {'model': 'square'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('free', response.data)

    def test_scan(self):
        payload = {'energy': 0.95, 'potential': 1.0, 'barrier_length': 2.0, 'theta_values': [10, 180], 'constants': 'paper'}
        response = self.client.post('/api/modes/scan/', payload, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual([row['note'] for row in response.data['rows']], ['', ''])

    def test_sweep_and_wavefunction(self):
        sweep = self.client.post(
            '/api/modes/sweep/', {'energy': 0.95, 'potential': 1.0, 'b_values': [0.5, 1.0], 'constants': 'paper'}, format='json'
        )
        self.assertEqual(sweep.status_code, status.HTTP_200_OK)
        self.assertEqual(len(sweep.data['rows']), 2)
        wave = self.client.post('/api/modes/wavefunction/', {**self.square, 'samples': 2}, format='json')
        self.assertEqual(wave.status_code, status.HTTP_200_OK)
        self.assertEqual(len(wave.data['mode']['samples']), 4)
