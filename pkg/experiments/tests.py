import io
import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.contrib.auth.models import User
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from rest_framework import status
from rest_framework.test import APIClient

from advection.selfsimilar import BandOverflow

from .forms import ConfigError, parse_config
from .models import CertificateRecord, ExperimentRun
from .runner import (
    PROBE_COLUMNS, PROBE_FILE, PROBE_SUMMARY_FILE, holder_probe, recompute_series, sharpness, simulate, write_probe,
)
from .suites import run_suite
from .utils import SeriesFormatError, check_columns, read_series, read_table, series_columns, write_series

MINIMAL = """
[grid]
d = 2
N = 16

[flow]
name = shear

[initial]
pattern = cosine

[run]
horizon = 0
"""

SHEAR = """
[grid]
d = 2
N = 16

[flow]
name = shear
amplitude = 0.5

[initial]
pattern = cosine
amplitude = 2

[run]
horizon = 0.2
sample_dt = 0.05
p = 2

[diagnostics]
s = 1, 0.5
positive_s = 0.5
kappa = 0.5
dvdt_check = yes
certificates = yes
calibration = integrated
"""

RANDOM_FLOW = """
[grid]
d = 2
N = 16

[flow]
name = random
kmax = 2

[initial]
pattern = random
kmax = 3

[run]
horizon = 0.1
sample_dt = 0.05
seed = 7
"""


class TemporaryDirectoryMixin:
    def make_dir(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        return Path(tmp.name)


class ConfigParsingTests(SimpleTestCase):
    def test_minimal(self):
        config = parse_config(MINIMAL)
        self.assertEqual(config.grid['N'], 16)
        self.assertEqual(config.grid['kind'], 'torus')
        self.assertEqual(config.run['horizon'], 0.0)
        self.assertEqual(config.diagnostics['s'], [1.0])
        self.assertFalse(config.diagnostics.get('certificates'))
        self.assertEqual(config.build_grid().N, 16)

    def test_lists_and_booleans(self):
        config = parse_config(SHEAR)
        self.assertEqual(config.diagnostics['s'], [1.0, 0.5])
        self.assertTrue(config.diagnostics['dvdt_check'])
        off = parse_config(SHEAR.replace('dvdt_check = yes', 'dvdt_check = no'))
        self.assertFalse(off.diagnostics['dvdt_check'])

    def test_parse_error_reports_line(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config("[grid]\nd = 2\nthis line has no delimiter\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_duplicate_option_reports_line(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config("[grid]\nd = 2\nd = 1\n")
        self.assertEqual(ctx.exception.line, 3)

    def test_validation_errors_name_the_key(self):
        cases = {
            'grid.N': MINIMAL.replace('N = 16', 'N = sixteen'),
            'grid.foo': MINIMAL.replace('N = 16', 'N = 16\nfoo = 1'),
            'flow.name': MINIMAL.replace('name = shear', 'name = vortex'),
            'grid.R': MINIMAL.replace('N = 16', 'N = 16\nkind = box'),
            'diagnostics.kappa': MINIMAL + "\n[diagnostics]\nkappa = 1\n",
            'diagnostics.v': MINIMAL + "\n[diagnostics]\nv = maybe\n",
            'run.sample_dt': MINIMAL.replace('horizon = 0', 'horizon = 1'),
        }
        for where, text in cases.items():
            with self.subTest(where=where):
                with self.assertRaises(ConfigError) as ctx:
                    parse_config(text)
                self.assertTrue(str(ctx.exception).startswith(where), str(ctx.exception))

    def test_missing_and_unknown_sections(self):
        with self.assertRaisesMessage(ConfigError, 'initial: missing section'):
            parse_config(MINIMAL.replace('[initial]\npattern = cosine\n', ''))
        with self.assertRaisesMessage(ConfigError, 'plots: unknown section'):
            parse_config(MINIMAL + "\n[plots]\nkind = line\n")

    def test_random_components_need_a_seed(self):
        text = RANDOM_FLOW.replace('seed = 7\n', '')
        with self.assertRaisesMessage(ConfigError, 'flow.seed'):
            parse_config(text)
        config = parse_config(RANDOM_FLOW)
        self.assertEqual(config.flow['seed'], 7)
        self.assertEqual(config.initial['seed'], 7)

    def test_component_seed_kept_unless_overridden(self):
        config = parse_config(RANDOM_FLOW.replace('kmax = 2', 'kmax = 2\nseed = 3'))
        self.assertEqual(config.flow['seed'], 3)
        self.assertEqual(config.with_seed(11).flow['seed'], 11)


class SeriesFileTests(TemporaryDirectoryMixin, SimpleTestCase):
    def test_default_columns(self):
        self.assertEqual(series_columns(), ['t', 'l2', 'v', 'w', 'hminus1', 'eps_geom', 'cum_grad_p'])
        self.assertIn('hplus0.5', series_columns((1.0,), (0.5,), dvdt_gap=True))

    def test_reader_returns_what_was_written(self):
        path = self.make_dir() / 'series.csv'
        columns = series_columns()
        rows = [
            {'t': 0.0, 'l2': np.sqrt(2), 'v': 0.1 + 0.2, 'w': 1 / 3, 'hminus1': 0.25,
             'eps_geom': math.inf, 'cum_grad_p': 0.0},
            {'t': 0.5, 'l2': np.sqrt(2), 'v': -1e-300, 'w': 2.0, 'hminus1': 0.125,
             'eps_geom': None, 'cum_grad_p': np.pi},
        ]
        write_series(path, rows, columns)
        read_columns, read_rows = read_series(path)
        self.assertEqual(read_columns, columns)
        self.assertEqual(read_rows, rows)

    def test_unknown_or_missing_columns(self):
        with self.assertRaises(SeriesFormatError):
            check_columns(['t', 'l2', 'v', 'w', 'eps_geom'])
        with self.assertRaises(SeriesFormatError):
            check_columns(series_columns() + ['energy'])


class SimulateTests(TemporaryDirectoryMixin, TestCase):
    def test_zero_horizon_gives_one_row(self):
        out = self.make_dir()
        result = simulate(parse_config(MINIMAL), out=out)
        _, rows = read_series(result.series_path)
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0]['t'], 0.0)
        self.assertIsNone(result.summary['slopes']['v'])
        self.assertIn('notice', result.summary)

    def test_shear_run_outputs(self):
        out = self.make_dir()
        result = simulate(parse_config(SHEAR), out=out)
        columns, rows = read_series(result.series_path)
        self.assertEqual(columns, [
            't', 'l2', 'v', 'w', 'hminus1', 'hminus0.5', 'hplus0.5', 'eps_geom', 'cum_grad_p', 'dvdt_gap',
        ])
        self.assertEqual(len(rows), 5)
        l2 = [row['l2'] for row in rows]
        self.assertLess(max(l2) - min(l2), 1e-6)
        self.assertIsNone(rows[0]['dvdt_gap'])
        self.assertIsNotNone(rows[2]['dvdt_gap'])
        self.assertTrue(all(row['eps_geom'] is not None for row in rows))

        summary = json.loads(result.summary_path.read_text())
        self.assertIsNotNone(summary['slopes']['v'])
        self.assertIn('calibrated:V:integrated:p=2', summary['calibration']['V']['provenance'])
        self.assertTrue(summary['monitor']['V']['holds'])
        kinds = [cert['kind'] for cert in summary['certificates']]
        self.assertIn('functional', kinds)
        self.assertTrue((out / 'snapshots' / 'snap_00004.csv').exists())

    def test_run_is_recorded(self):
        result = simulate(parse_config(SHEAR), out=self.make_dir())
        self.assertIsNotNone(result.run)
        run = ExperimentRun.objects.get(pk=result.run.pk)
        self.assertEqual(run.command, ExperimentRun.SIMULATE)
        self.assertEqual(run.status, ExperimentRun.COMPLETED)
        self.assertIsNotNone(run.finished_at)
        functional = CertificateRecord.objects.get(run=run, kind=CertificateRecord.FUNCTIONAL)
        self.assertTrue(functional.constant_provenance.startswith('calibrated:V'))
        self.assertIn(functional.verdict, ('pass', 'fail'))

    def test_same_seed_same_bytes(self):
        config = parse_config(RANDOM_FLOW)
        first = simulate(config, out=self.make_dir(), record=False)
        second = simulate(config, out=self.make_dir(), record=False)
        self.assertEqual(first.series_path.read_bytes(), second.series_path.read_bytes())
        third = simulate(config, out=self.make_dir(), seed=8, record=False)
        self.assertNotEqual(first.series_path.read_bytes(), third.series_path.read_bytes())

    def test_recomputed_series_matches(self):
        out = self.make_dir()
        result = simulate(parse_config(SHEAR.replace('dvdt_check = yes', 'dvdt_check = no')), out=out, record=False)
        diagnostics = {**parse_config(SHEAR).diagnostics, 'dvdt_check': False}
        target, records = recompute_series(out, diagnostics, out=out / 'again.csv')
        self.assertEqual(len(records), 5)
        self.assertEqual(target.read_text(), result.series_path.read_text())


class SharpnessTests(SimpleTestCase):
    def test_slope_is_two_log_two(self):
        report = sharpness(2, 8, 'cosine', N=1024, d=1)
        self.assertEqual(len(report.rows), 9)
        self.assertAlmostEqual(report.expected_slope, 2 * np.log(2), places=14)
        self.assertLessEqual(report.slope_error, 1e-9)
        for n, v in report.rows:
            self.assertAlmostEqual(v, 2 * n * np.log(2), delta=1e-10)

    def test_single_point(self):
        report = sharpness(3, 0, 'cosine', N=64, d=1)
        self.assertAlmostEqual(report.lam, 1 / 3)
        self.assertIsNone(report.slope)
        self.assertIsNotNone(report.notice)
        self.assertEqual(len(report.rows), 1)

    def test_mean_uses_centred_norm(self):
        report = sharpness(2, 4, 'cosine', N=128, d=1, mean=1.0)
        self.assertLessEqual(report.slope_error, 1e-9)
        self.assertAlmostEqual(report.base_mean, 1.0, places=12)
        self.assertEqual(report.as_dict()['lam'], 0.5)
        self.assertGreater(abs(report.slope - report.uncentred_slope), 0.5)

    def test_band_overflow(self):
        with self.assertRaises(BandOverflow) as ctx:
            sharpness(2, 9, 'cosine', N=1024, d=1)
        self.assertEqual(ctx.exception.max_admissible, 8)


class HolderRatioFileTests(TemporaryDirectoryMixin, SimpleTestCase):
    def test_files_read_back(self):
        report = holder_probe([1.5, 2.0], range(6), N=32, kmax=3)
        directory = write_probe(self.make_dir() / 'probe', report)
        columns, rows = read_table(directory / PROBE_FILE)
        self.assertEqual(columns, PROBE_COLUMNS)
        self.assertEqual(len(rows), 12)
        expected = report.rows()
        for row, sample in zip(rows, expected):
            self.assertEqual(row['seed'], sample['seed'])
            self.assertEqual(row['p'], sample['p'])
            self.assertEqual(row['ratio'], sample['ratio'])

        summary = json.loads((directory / PROBE_SUMMARY_FILE).read_text())
        self.assertEqual([s['p'] for s in summary['by_p']], [1.5, 2.0])
        for block in summary['by_p']:
            ratios = [r['ratio'] for r in rows if r['p'] == block['p']]
            self.assertEqual(block['max'], max(ratios))
            self.assertAlmostEqual(block['mean'], float(np.mean(ratios)), places=14)
            self.assertLessEqual(block['quantiles']['0.5'], block['max'])
        self.assertIn('notice', summary)

    def test_zero_velocity_family(self):
        report = holder_probe([2.0], range(3), N=32, kmax=3, family='zero-velocity')
        self.assertTrue(all(row['ratio'] == 0 for row in report.rows()))


class HierarchySuiteTests(SimpleTestCase):
    def test_envelopes_hold_on_a_short_run(self):
        result = run_suite('hierarchy', N=32, horizon=1.0, sample_dt=0.25, calibration_dt=0.025)
        checks = {check.name: check for check in result.checks}
        self.assertIn('V affine envelope', checks)
        self.assertIn('W quadratic envelope', checks)
        self.assertTrue(checks['V affine envelope'].passed, checks['V affine envelope'])
        self.assertTrue(checks['W quadratic envelope'].passed, checks['W quadratic envelope'])
        self.assertGreater(result.details['C_V'], 0)
        self.assertEqual(len(result.details['h_half']), 5)


class CommandTests(TemporaryDirectoryMixin, TestCase):
    def call(self, *args):
        out = io.StringIO()
        call_command(*args, stdout=out, stderr=io.StringIO())
        return out.getvalue()

    def test_constants(self):
        data = json.loads(self.call('constants', '--d', '2'))
        self.assertAlmostEqual(data['alpha'], 1 / (2 * np.pi), places=12)
        self.assertAlmostEqual(data['c'], 1 / np.pi, places=12)
        self.assertAlmostEqual(data['sigma'], 2 * np.pi, places=12)
        self.assertEqual(json.loads(self.call('constants', '--d', '1'))['sigma'], 2.0)

    def test_constants_rejects_dimension(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('constants', '--d', '3')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_verify(self):
        out = self.make_dir()
        text = self.call('verify', '--suite', 'expansion', '--suite', 'parseval', '--out', str(out))
        self.assertIn('expansion: PASS', text)
        data = json.loads((out / 'verify.json').read_text())
        self.assertTrue(data['passed'])
        self.assertEqual([s['name'] for s in data['suites']], ['expansion', 'parseval'])
        self.assertTrue(ExperimentRun.objects.filter(command=ExperimentRun.VERIFY).exists())

    def test_ratio_table_command(self):
        out = self.make_dir() / 'probe'
        text = self.call('probe', '--p', '2', '--p', '4', '--seeds', '4', '--N', '32', '--kmax', '3', '--out', str(out))
        self.assertIn('p=2', text)
        self.assertIn('p=4', text)
        columns, rows = read_table(out / PROBE_FILE)
        self.assertEqual(columns, ['seed', 'p', 'ratio'])
        self.assertEqual(len(rows), 8)
        self.assertTrue((out / PROBE_SUMMARY_FILE).exists())
        self.assertTrue(ExperimentRun.objects.filter(command=ExperimentRun.PROBE).exists())

    def test_ratio_table_rejects_bad_band(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('probe', '--seeds', '2', '--N', '16', '--kmax', '8', '--out', str(self.make_dir()))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_verify_unknown_suite(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('verify', '--suite', 'nonsense')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_simulate_and_diagnostics(self):
        directory = self.make_dir()
        config = directory / 'shear.ini'
        config.write_text(SHEAR)
        out = directory / 'run'
        self.call('simulate', '--config', str(config), '--out', str(out))
        self.assertTrue((out / 'series.csv').exists())
        text = self.call('diagnostics', str(out), '--s', '1', '--kappa', '0.5', '--out', str(directory / 'redo.csv'))
        self.assertIn('5 rows', text)
        columns, _ = read_series(directory / 'redo.csv')
        self.assertIn('hminus1', columns)

    def test_simulate_bad_config(self):
        directory = self.make_dir()
        config = directory / 'bad.ini'
        config.write_text(MINIMAL.replace('N = 16', 'N = 2'))
        with self.assertRaises(CommandError) as ctx:
            self.call('simulate', '--config', str(config))
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('grid.N', str(ctx.exception))

    def test_sharpness_command(self):
        out = self.make_dir()
        text = self.call('sharpness', '--d', '1', '--N', '64', '--n-max', '3', '--out', str(out))
        self.assertIn('slope', text)
        report = json.loads((out / 'sharpness.json').read_text())
        self.assertLessEqual(report['slope_error'], 1e-9)

    def test_sharpness_overflow_fails(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('sharpness', '--d', '1', '--N', '64', '--n-max', '6')
        self.assertEqual(ctx.exception.returncode, 1)


class RunApiTests(TestCase):
    def setUp(self):
        self.client = APIClient()
        self.user = User.objects.create_user(username='analyst', password='not-a-secret')
        self.run = ExperimentRun.objects.create(command=ExperimentRun.SIMULATE, seed=3, parameters={'N': 16})
        CertificateRecord.objects.create(
            run=self.run, kind=CertificateRecord.FUNCTIONAL, bound=0.5, constant=1.2,
            constant_provenance='calibrated:V:rate:p=2', verdict='pass',
        )

    def test_requires_login(self):
        response = self.client.get('/api/runs/')
        self.assertEqual(response.status_code, status.HTTP_403_FORBIDDEN)

    def test_list(self):
        self.client.force_authenticate(self.user)
        response = self.client.get('/api/runs/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 1)
        self.assertEqual(response.data[0]['certificate_count'], 1)
        filtered = self.client.get('/api/runs/', {'command': ExperimentRun.VERIFY})
        self.assertEqual(len(filtered.data), 0)

    def test_detail(self):
        self.client.force_authenticate(self.user)
        response = self.client.get(f'/api/runs/{self.run.pk}/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['seed'], 3)
        self.assertEqual(response.data['certificates'][0]['constant_provenance'], 'calibrated:V:rate:p=2')
        self.assertEqual(self.client.get('/api/runs/999/').status_code, status.HTTP_404_NOT_FOUND)
