import numpy as np
from django.test import SimpleTestCase
from scipy.special import polygamma

from advection.flows import random_solenoidal, velocity_library
from advection.patterns import make_pattern, random_field
from advection.solver import run
from mixing.certificates import PASS, certify_trajectory
from spectral.fields import ScalarField, VelocityField
from spectral.grid import GridError, make_grid

from .checks import (
    INTEGRATED, QUANTITY_SQRT_W, RATE, ZERO_VELOCITY, calibrate, dual_exponent_for_sqrt_w,
    dv_dt_check, dw_dt_check, holder_ratio_probe,
)
from .kernel import (
    CommutatorKernel, commutator_constant, kernel_matrix, lattice_zeta_tail, periodized_kernel,
)
from .trilinear import (
    NonSolenoidalField, log_field, near_weight, richardson_limit, trilinear_fourier, trilinear_pv,
)

TWO_PI = 2 * np.pi


def field(grid, func):
    return ScalarField.from_function(grid, func)


def shear_triple(grid):
    """f = g = cos 2pi x1 + cos 2pi (x1 + x2), v = (sin 2pi x2, 0); T = -(pi/2) log 2."""
    theta = field(grid, lambda x, y: np.cos(TWO_PI * x) + np.cos(TWO_PI * (x + y)))
    v = VelocityField.from_arrays(grid, np.sin(TWO_PI * grid.coords[1]), np.zeros(grid.shape))
    return theta, v


class KernelTests(SimpleTestCase):
    def test_plug_in(self):
        expected = np.array([[0.5, 0.0], [0.0, -0.5]]) / np.pi
        np.testing.assert_allclose(kernel_matrix([1.0, 0.0]), expected, atol=1e-15)
        self.assertAlmostEqual(commutator_constant(1), 0.5)

    def test_trace_free_and_homogeneous(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            h = rng.standard_normal(2)
            K = kernel_matrix(h)
            self.assertAlmostEqual(np.trace(K), 0.0, places=12)
            np.testing.assert_allclose(kernel_matrix(2 * h), K / 4, rtol=1e-12, atol=1e-14)
            np.testing.assert_allclose(K, K.T)

    def test_singular_point(self):
        with self.assertRaises(ValueError):
            kernel_matrix([0.0, 0.0])

    def test_ladder(self):
        grid = make_grid(2, 'torus', 64)
        kernel = CommutatorKernel.for_grid(grid)
        np.testing.assert_allclose(kernel.ladder, [grid.h, grid.h / 2, grid.h / 4, grid.h / 8])
        coarse = CommutatorKernel.for_grid(grid, refine=1)
        np.testing.assert_allclose(coarse.ladder, [4 * grid.h, 2 * grid.h, grid.h, grid.h / 2])
        self.assertAlmostEqual(kernel.c, 1 / np.pi)

    def test_lattice_tail_decreases(self):
        tails = [lattice_zeta_tail(2, m) for m in (2, 4, 8, 16)]
        self.assertTrue(all(t > 0 for t in tails))
        self.assertTrue(all(a > b for a, b in zip(tails, tails[1:])))

    def test_periodized_kernel_in_one_dimension(self):
        grid = make_grid(1, 'torus', 64)
        k_per = periodized_kernel(grid, 16)[0]
        z = grid.h * np.arange(1, 32)
        expected = polygamma(1, z) - polygamma(1, 1 - z)
        np.testing.assert_allclose(k_per[1:32], expected, rtol=1e-5, atol=1e-5)
        np.testing.assert_allclose(k_per[1:32], -k_per[:32:-1], rtol=1e-12)
        self.assertEqual(k_per[0], 0.0)


class FourierTrilinearTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 32)

    def test_zero_velocity(self):
        theta, _ = shear_triple(self.grid)
        self.assertEqual(trilinear_fourier(theta, theta, VelocityField.zeros(self.grid)), 0.0)

    def test_hand_computed_value(self):
        theta, v = shear_triple(self.grid)
        self.assertAlmostEqual(trilinear_fourier(theta, theta, v), -0.5 * np.pi * np.log(2), places=12)

    def test_unit_shell_under_shear(self):
        theta = make_pattern('cosine', self.grid)
        _, v = shear_triple(self.grid)
        self.assertAlmostEqual(trilinear_fourier(theta, theta, v), 0.0, places=12)

    def test_symmetry(self):
        f = make_pattern('random', self.grid, seed=1, kmax=4)
        g = make_pattern('random', self.grid, seed=2, kmax=4)
        v = velocity_library('random', self.grid, seed=3).velocity(0.0)
        a, b = trilinear_fourier(f, g, v), trilinear_fourier(g, f, v)
        self.assertAlmostEqual(a, b, delta=1e-12 * max(1.0, abs(a)))

    def test_rejects_box(self):
        box = make_grid(2, 'box', 32, R=2.0)
        f = ScalarField.zeros(box)
        with self.assertRaises(GridError):
            trilinear_fourier(f, f, VelocityField.zeros(box))

    def test_log_field(self):
        theta = make_pattern('cosine', self.grid, mode=(2, 0))
        np.testing.assert_allclose(log_field(theta).values, np.log(2) * theta.values, atol=1e-13)


class PVTrilinearTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 128)

    def test_matches_fourier_side(self):
        theta, v = shear_triple(self.grid)
        result = trilinear_pv(theta, theta, v)
        exact = trilinear_fourier(theta, theta, v)
        self.assertAlmostEqual(result.value, exact, delta=1e-2 * abs(exact))
        self.assertEqual(len(result.ladder), 4)
        self.assertGreaterEqual(result.order, 1.0)
        self.assertLessEqual(result.order, 4.0)

    def test_random_triples_match_fourier_side(self):
        for kmax in (4, 16):
            for seed in range(4):
                f = random_field(self.grid, [seed, 0], kmax=kmax)
                g = random_field(self.grid, [seed, 1], kmax=kmax)
                v = random_solenoidal(self.grid, [seed, 2], kmax=kmax)
                exact = trilinear_fourier(f, g, v)
                result = trilinear_pv(f, g, v)
                with self.subTest(kmax=kmax, seed=seed):
                    self.assertAlmostEqual(result.value, exact, delta=max(1e-2 * abs(exact), 1e-8))
                    self.assertTrue(np.isfinite(result.residual))
                    self.assertEqual(len(result.ladder), 4)

    def test_unit_shell_under_shear(self):
        theta = make_pattern('cosine', self.grid)
        _, v = shear_triple(self.grid)
        self.assertLess(abs(trilinear_pv(theta, theta, v).value), 1e-8)

    def test_bilinear_symmetry(self):
        grid = make_grid(2, 'torus', 32)
        f = make_pattern('random', grid, seed=4, kmax=3)
        g = make_pattern('random', grid, seed=5, kmax=3)
        v = velocity_library('random', grid, seed=6, kmax=3).velocity(0.0)
        a, b = trilinear_pv(f, g, v).value, trilinear_pv(g, f, v).value
        self.assertAlmostEqual(a, b, delta=1e-9 * max(1.0, abs(a)))

    def test_zero_and_constant_velocity(self):
        grid = make_grid(2, 'torus', 32)
        f = make_pattern('random', grid, seed=7, kmax=3)
        g = make_pattern('random', grid, seed=8, kmax=3)
        self.assertAlmostEqual(trilinear_pv(f, g, VelocityField.zeros(grid)).value, 0.0, places=14)
        drift = VelocityField.from_arrays(grid, np.full(grid.shape, 0.3), np.full(grid.shape, -0.2))
        self.assertLess(abs(trilinear_pv(f, g, drift).value), 1e-10)

    def test_one_dimensional_translation(self):
        grid = make_grid(1, 'torus', 64)
        f = make_pattern('random', grid, seed=9, kmax=5)
        v = VelocityField.from_arrays(grid, np.full(grid.shape, 1.5))
        self.assertLess(abs(trilinear_pv(f, f, v).value), 1e-10)

    def test_rejects_compressible_velocity(self):
        grid = make_grid(2, 'torus', 32)
        f = make_pattern('cosine', grid)
        v = VelocityField.from_arrays(grid, np.sin(TWO_PI * grid.coords[0]), np.zeros(grid.shape))
        with self.assertRaises(NonSolenoidalField):
            trilinear_pv(f, f, v)


class ExtrapolationTests(SimpleTestCase):
    def ladder(self, values):
        return [(2.0 ** -j, value) for j, value in enumerate(values)]

    def test_second_order_ladder(self):
        eps = [2.0 ** -j for j in range(4)]
        limit, order, residual = richardson_limit(self.ladder([1.0 + e ** 2 for e in eps]))
        self.assertAlmostEqual(limit, 1.0, places=12)
        self.assertAlmostEqual(order, 2.0, places=12)
        self.assertLess(residual, 1e-12)

    def test_unconverged_ladder_reports_residual(self):
        limit, order, residual = richardson_limit(self.ladder([1.0, 0.5, 0.3, 0.1]))
        self.assertGreater(residual, 1e-3)
        self.assertGreaterEqual(order, 1.0)

    def test_mixed_orders_leave_residual(self):
        eps = [2.0 ** -j for j in range(4)]
        _, _, residual = richardson_limit(self.ladder([1.0 + e ** 2 + 0.5 * e ** 3 for e in eps]))
        self.assertGreater(residual, 0.0)

    def test_near_weight(self):
        np.testing.assert_allclose(near_weight([0.0, 0.1, 0.4, 0.45]), [1.0, 1.0, 0.0, 0.0])
        self.assertAlmostEqual(float(near_weight(0.25)), 0.5, places=12)
        inside = near_weight(np.linspace(0.1, 0.4, 31))
        self.assertTrue(np.all(np.diff(inside) <= 0))


class DerivativeCheckTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 64)
        self.flow = velocity_library('shear', self.grid)
        self.theta0 = make_pattern('cosine', self.grid)

    def test_dv_dt_along_shear(self):
        check = dv_dt_check(self.theta0, self.flow, 0.25, 1e-3, dt=1e-3)
        self.assertLessEqual(check.gap, 1e-4 * max(1.0, abs(check.rhs)))
        self.assertGreater(abs(check.rhs), 0.1)

    def test_dv_dt_second_order(self):
        coarse = dv_dt_check(self.theta0, self.flow, 0.25, 1e-2, dt=1e-3)
        fine = dv_dt_check(self.theta0, self.flow, 0.25, 5e-3, dt=1e-3)
        self.assertGreater(coarse.gap / fine.gap, 3.5)
        self.assertLess(coarse.gap / fine.gap, 4.5)

    def test_still_flow(self):
        flow = velocity_library('translation', self.grid, velocity=(0.0, 0.0))
        theta0 = make_pattern('random', self.grid, seed=3, kmax=4)
        for check in (dv_dt_check(theta0, flow, 0.1, 1e-2), dw_dt_check(theta0, flow, 0.1, 1e-2)):
            self.assertAlmostEqual(check.lhs, 0.0, places=8)
            self.assertEqual(check.rhs, 0.0)

    def test_dw_dt_along_shear(self):
        check = dw_dt_check(self.theta0, self.flow, 0.25, 1e-3, dt=1e-3)
        self.assertLessEqual(check.gap, 1e-3 * max(1.0, abs(check.rhs)))

    def test_delta_before_start(self):
        with self.assertRaises(ValueError):
            dv_dt_check(self.theta0, self.flow, 0.001, 0.01)


class TrajectoryIntegralTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        grid = make_grid(2, 'torus', 64)
        cls.flow = velocity_library('shear', grid)
        cls.trajectory = run(make_pattern('cosine', grid), cls.flow, 0.5, 0.005, dt=1e-3)

    def test_rate_integrates_to_change_of_v(self):
        from functionals.functionals import v_functional

        traj = self.trajectory
        rates = [trilinear_fourier(theta, theta, self.flow.velocity(t)) for t, theta in traj]
        integral = np.trapz(rates, traj.times)
        change = v_functional(traj.final) - v_functional(traj.initial)
        self.assertAlmostEqual(integral, change, delta=1e-3 * abs(change))

    def test_calibrated_certificates_hold(self):
        rate = calibrate(self.trajectory, RATE)
        integrated = calibrate(self.trajectory, INTEGRATED)
        self.assertGreater(rate.C, 0)
        self.assertLessEqual(integrated.C, rate.C * 1.05)
        for calibration in (rate, integrated):
            cert = certify_trajectory(self.trajectory, 1.0, calibration.C, calibration.provenance)
            self.assertEqual(cert.verdict, PASS)
            self.assertTrue(cert.C_provenance.startswith('calibrated:V'))

    def test_sqrt_w_calibration(self):
        calibration = calibrate(self.trajectory, RATE, QUANTITY_SQRT_W)
        self.assertTrue(np.isfinite(calibration.C))
        self.assertGreater(calibration.C, 0)
        self.assertEqual(dual_exponent_for_sqrt_w(2), np.inf)
        self.assertAlmostEqual(dual_exponent_for_sqrt_w(4), 4.0)
        with self.assertRaises(ValueError):
            dual_exponent_for_sqrt_w(1.5)

    def test_unknown_mode(self):
        with self.assertRaises(ValueError):
            calibrate(self.trajectory, 'median')


class HolderProbeTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 32)

    def test_zero_velocity_family(self):
        stats = holder_ratio_probe(self.grid, 2.0, range(5), family=ZERO_VELOCITY)
        self.assertTrue(np.all(stats.ratios == 0))

    def test_reproducible(self):
        first = holder_ratio_probe(self.grid, 2.0, [11])
        second = holder_ratio_probe(self.grid, 2.0, [11])
        self.assertEqual(first.samples, second.samples)
        self.assertGreater(first.samples[0].ratio, 0)

    def test_summary(self):
        stats = holder_ratio_probe(self.grid, 1.5, range(20))
        summary = stats.summary()
        self.assertEqual(summary['count'], 20)
        self.assertGreaterEqual(summary['max'], summary['quantiles']['0.9'])
        self.assertGreaterEqual(summary['quantiles']['0.9'], summary['quantiles']['0.5'])
