import numpy as np
from django.test import SimpleTestCase
from scipy import integrate
from scipy.optimize import brentq
from scipy.special import jv

from advection.flows import velocity_library
from advection.patterns import make_pattern
from advection.solver import run
from functionals.functionals import v_functional
from spectral.fields import ScalarField, lp_norm
from spectral.grid import GridError, make_grid

from .certificates import (
    FAIL, FUNCTIONAL, GEOMETRIC, PASS, InitialNorms, certify_trajectory, conjugate_exponent,
    functional_decay_bound, geometric_certificate,
)
from .scales import (
    HypothesisError, averaging_ratio, ball_indicator_symbol, first_symbol_zero,
    geometric_mixing_scale, mollify, rho_for_eta,
)

TWO_PI = 2 * np.pi


class BallSymbolTests(SimpleTestCase):
    def test_unit_mass(self):
        for d in (1, 2):
            self.assertAlmostEqual(float(ball_indicator_symbol(0.0, d)), 1.0, places=14)

    def test_sinc_in_one_dimension(self):
        r = np.array([0.1, 0.2, 0.37, 0.8])
        expected = np.sin(TWO_PI * r) / (TWO_PI * r)
        np.testing.assert_allclose(ball_indicator_symbol(r, 1), expected, atol=1e-13)
        self.assertAlmostEqual(float(ball_indicator_symbol(0.5, 1)), 0.0, places=12)

    def test_disc_against_quadrature(self):
        for r in (0.25, 0.6, 1.3):
            value, _ = integrate.quad(lambda rho: TWO_PI * rho * jv(0, TWO_PI * rho * r), 0.0, 1.0, epsabs=1e-13)
            self.assertAlmostEqual(float(ball_indicator_symbol(r, 2)), value / np.pi, delta=1e-8)

    def test_first_zero(self):
        self.assertEqual(first_symbol_zero(1), 0.5)
        self.assertAlmostEqual(float(ball_indicator_symbol(first_symbol_zero(2), 2)), 0.0, places=12)


class MollifyTests(SimpleTestCase):
    def setUp(self):
        self.line = make_grid(1, 'torus', 64)
        self.plane = make_grid(2, 'torus', 32)

    def test_constant_unchanged(self):
        theta = ScalarField(self.plane, np.full(self.plane.shape, 3.0))
        for eps in (0.05, 0.25, 0.5):
            np.testing.assert_allclose(mollify(theta, eps).values, 3.0, atol=1e-13)

    def test_small_eps_is_identity(self):
        theta = make_pattern('random', self.plane, seed=5, kmax=2)
        self.assertLess(np.max(np.abs(mollify(theta, 1e-4).values - theta.values)), 1e-5)

    def test_cosine_vanishes_at_half(self):
        theta = make_pattern('cosine', self.line)
        self.assertLess(np.max(np.abs(mollify(theta, 0.5).values)), 1e-12)

    def test_rejects_large_and_nonpositive_eps(self):
        theta = make_pattern('cosine', self.line)
        with self.assertRaises(ValueError):
            mollify(theta, 0.51)
        with self.assertRaises(ValueError):
            mollify(theta, 0.0)

    def test_rejects_box(self):
        box = make_grid(1, 'box', 64, R=4.0)
        with self.assertRaises(GridError):
            mollify(ScalarField(box, np.ones(box.shape)), 0.1)

    def test_sup_norm_contraction(self):
        fields = [make_pattern('cosine', self.plane), make_pattern('shell', self.plane, radius=2)]
        for theta in fields:
            for eps in (0.01, 0.1, 0.3, 0.5):
                self.assertLessEqual(lp_norm(mollify(theta, eps), np.inf), lp_norm(theta, np.inf) * (1 + 1e-12))


class GeometricScaleTests(SimpleTestCase):
    def setUp(self):
        self.line = make_grid(1, 'torus', 256)

    def test_constant_gives_sentinel(self):
        theta = ScalarField(self.line, np.ones(self.line.shape))
        result = geometric_mixing_scale(theta, 0.5)
        self.assertTrue(result.is_sentinel)
        self.assertIsNone(result.as_dict()['eps'])

    def test_zero_field_rejected(self):
        with self.assertRaises(ValueError):
            geometric_mixing_scale(ScalarField.zeros(self.line), 0.5)

    def test_kappa_range(self):
        theta = make_pattern('cosine', self.line)
        for kappa in (0.0, 1.0, 1.5):
            with self.assertRaises(ValueError):
                geometric_mixing_scale(theta, kappa)

    def test_cosine_matches_sinc_root(self):
        grid = make_grid(1, 'torus', 64)
        theta = make_pattern('cosine', grid)
        root = brentq(lambda e: np.sin(TWO_PI * e) / (TWO_PI * e) - 0.01, 0.3, 0.5, xtol=1e-14)
        result = geometric_mixing_scale(theta, 0.99)
        self.assertFalse(result.is_sentinel)
        self.assertAlmostEqual(result.eps, root, delta=2e-4 * root)
        self.assertLessEqual(averaging_ratio(theta, result.eps), 0.01 + 1e-12)

    def test_stripes_against_dense_scan(self):
        theta = make_pattern('stripes', self.line, m=4)
        result = geometric_mixing_scale(theta, 0.5)
        dense = np.arange(1 / 256, 0.5, 1e-4)
        oracle = next(eps for eps in dense if averaging_ratio(theta, eps) <= 0.5)
        spacing = (0.5 - 1 / 256) / (result.scan_points - 1)
        self.assertLessEqual(abs(result.eps - oracle), 2 * spacing)
        self.assertLessEqual(averaging_ratio(theta, result.eps), 0.5)

    def test_finer_stripes_mix_at_smaller_scale(self):
        coarse = geometric_mixing_scale(make_pattern('stripes', self.line, m=4), 0.5)
        fine = geometric_mixing_scale(make_pattern('stripes', self.line, m=16), 0.5)
        self.assertLess(fine.eps, coarse.eps)

    def test_monotone_in_kappa(self):
        theta = make_pattern('stripes', self.line, m=4)
        loose = geometric_mixing_scale(theta, 0.3)
        strict = geometric_mixing_scale(theta, 0.6)
        self.assertLessEqual(loose.eps, strict.eps * (1 + 1e-3))

    def test_window_floor(self):
        grid = make_grid(1, 'torus', 64)
        theta = make_pattern('cosine', grid, mode=(31,))
        result = geometric_mixing_scale(theta, 0.5)
        self.assertTrue(result.at_window_floor)
        self.assertEqual(result.eps, 1 / 64)


class RhoForEtaTests(SimpleTestCase):
    def test_small_eta_reaches_first_zero(self):
        self.assertGreater(rho_for_eta(1e-8, 1), 0.499)
        self.assertLess(rho_for_eta(1e-8, 1), 0.5)

    def test_dense_sampling_in_the_plane(self):
        rho = rho_for_eta(0.81, 2)
        samples = ball_indicator_symbol(np.linspace(0.0, rho, 2001), 2)
        self.assertGreaterEqual(np.min(samples), 0.9 - 1e-10)
        self.assertAlmostEqual(float(ball_indicator_symbol(rho, 2)), 0.9, places=10)

    def test_monotone(self):
        for d in (1, 2):
            rhos = [rho_for_eta(eta, d) for eta in (0.1, 0.3, 0.5, 0.7, 0.9)]
            self.assertTrue(all(a > b for a, b in zip(rhos, rhos[1:])))

    def test_range(self):
        for eta in (0.0, 1.0, -0.2):
            with self.assertRaises(ValueError):
                rho_for_eta(eta, 2)


class FunctionalCertificateTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 32)

    def test_conjugate_exponent(self):
        self.assertEqual(conjugate_exponent(2), 2.0)
        self.assertEqual(conjugate_exponent(1), np.inf)
        self.assertAlmostEqual(conjugate_exponent(4), 4 / 3)

    def test_shell_equality_at_start(self):
        theta = make_pattern('shell', self.grid, radius=1)
        norms = InitialNorms.of(theta, 2.0)
        cert = functional_decay_bound(norms, v_functional(theta), 1.0, 2.0, 0.0, C=1.0)
        self.assertEqual(cert.kind, FUNCTIONAL)
        self.assertAlmostEqual(cert.bound, 1.0, places=12)

    def test_zero_s_gives_l2(self):
        theta = make_pattern('random', self.grid, seed=2, norm=1.5)
        norms = InitialNorms.of(theta, 2.0)
        cert = functional_decay_bound(norms, v_functional(theta), 0.0, 2.0, 7.0, C=3.0)
        self.assertAlmostEqual(cert.bound, 1.5, places=12)

    def test_exponential_structure(self):
        theta = make_pattern('random', self.grid, seed=8)
        norms = InitialNorms.of(theta, 1.5)
        V0 = v_functional(theta)
        single = functional_decay_bound(norms, V0, 0.7, 1.5, 2.0, C=0.4).bound
        double = functional_decay_bound(norms, V0, 1.4, 1.5, 2.0, C=0.4).bound
        self.assertAlmostEqual(double / (single ** 2 / norms.l2), 1.0, delta=1e-12)

    def test_serialization_keys(self):
        theta = make_pattern('random', self.grid, seed=1)
        cert = functional_decay_bound(InitialNorms.of(theta, 2.0), v_functional(theta), 1.0, 2.0, 0.5, C=2.0, C_provenance='calibrated')
        data = cert.as_dict()
        for key in ('kind', 'bound', 'C', 'C_provenance', 'inputs', 'verdict'):
            self.assertIn(key, data)
        self.assertEqual(data['C_provenance'], 'calibrated')
        self.assertGreater(data['bound'], 0)

    def test_invalid_inputs(self):
        theta = make_pattern('random', self.grid, seed=1)
        norms = InitialNorms.of(theta, 2.0)
        with self.assertRaises(ValueError):
            functional_decay_bound(norms, 0.0, 1.0, 2.0, -1.0, C=1.0)
        with self.assertRaises(ValueError):
            functional_decay_bound(norms, 0.0, 1.0, 2.0, 1.0, C=-1.0)

    def test_translation_run_passes(self):
        theta = make_pattern('random', self.grid, seed=4, kmax=4)
        flow = velocity_library('translation', self.grid, velocity=(0.5, 0.25))
        trajectory = run(theta, flow, 0.5, 0.25)
        cert = certify_trajectory(trajectory, 1.0, C=0.0, C_provenance='input')
        self.assertEqual(cert.verdict, PASS)
        self.assertEqual(len(cert.witnesses), 3)


class GeometricCertificateTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 32)

    def test_checkerboard(self):
        theta = make_pattern('checkerboard', make_grid(2, 'torus', 64), m=2)
        cert = geometric_certificate(theta, 0.5, 10.0)
        self.assertEqual(cert.kind, GEOMETRIC)
        self.assertAlmostEqual(cert.inputs['target_ratio'], 0.5, places=12)
        self.assertEqual(cert.verdict, PASS)

    def test_shell_two(self):
        theta = make_pattern('shell', self.grid, radius=2)
        cert = geometric_certificate(theta, 0.5, 10.0)
        self.assertAlmostEqual(cert.inputs['V'] / cert.inputs['l2_squared'], np.log(2), places=12)
        self.assertEqual(cert.verdict, PASS)
        self.assertTrue(all(0 < w['eps'] < cert.bound for w in cert.witnesses))
        self.assertAlmostEqual(cert.witnesses[-1]['eps'], min(cert.bound, 0.5) * 10 / 11, places=14)

    def test_random_sweep(self):
        failures = 0
        for seed in range(100):
            theta = make_pattern('random', self.grid, seed=seed, kmax=4)
            if geometric_certificate(theta, 0.5, 10.0).verdict == FAIL:
                failures += 1
        self.assertEqual(failures, 0)

    def test_requires_positive_v(self):
        with self.assertRaises(HypothesisError):
            geometric_certificate(make_pattern('shell', self.grid, radius=1), 0.5, 10.0)

    def test_requires_admissible_eta(self):
        theta = make_pattern('shell', self.grid, radius=2)
        with self.assertRaises(HypothesisError):
            geometric_certificate(theta, 0.05, 10.0)
        with self.assertRaises(ValueError):
            geometric_certificate(theta, 0.5, 1.0)
