import numpy as np
from django.test import SimpleTestCase

from functionals.functionals import is_single_shell, punctured_l2_squared, v_functional
from spectral.fields import ScalarField, VelocityField, lp_norm, sobolev_w1p_seminorm
from spectral.grid import GridError, make_grid

from .flows import time_reversed, velocity_library
from .patterns import make_pattern
from .selfsimilar import (
    BandOverflow, SelfSimilarSchedule, frozen_base, rescale_field, self_similar_trajectory,
    trajectory_base,
)
from .solver import CFLViolation, admissible_dt, run, sample_times, step

TWO_PI = 2 * np.pi


def max_error(a, b):
    return float(np.max(np.abs(a.values - b.values)))


class VelocityLibraryTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 32)

    def test_shear_seminorm(self):
        flow = velocity_library('shear', self.grid, amplitude=0.5)
        u = flow.velocity(0.0)
        self.assertAlmostEqual(sobolev_w1p_seminorm(u, 2), np.sqrt(2) * np.pi * 0.5, places=12)
        self.assertTrue(u.is_solenoidal())

    def test_cellular_is_solenoidal(self):
        u = velocity_library('cellular', self.grid).velocity(0.3)
        self.assertTrue(u.is_solenoidal())
        self.assertGreater(u.max_speed(), 0.5)

    def test_random_normalized_and_reproducible(self):
        flow = velocity_library('random', self.grid, seed=3, p=2.0, target=1.0, interval=0.25)
        for t in (0.0, 0.3, 0.6):
            u = flow.velocity(t)
            self.assertAlmostEqual(sobolev_w1p_seminorm(u, 2.0), 1.0, delta=1e-10)
            self.assertTrue(u.is_solenoidal())
        again = velocity_library('random', self.grid, seed=3, p=2.0, target=1.0, interval=0.25)
        np.testing.assert_array_equal(flow.velocity(0.6)[0].values, again.velocity(0.6)[0].values)
        self.assertFalse(np.array_equal(flow.velocity(0.1)[0].values, flow.velocity(0.3)[0].values))
        self.assertEqual(flow.switch_times(0.0, 1.0), [0.25, 0.5, 0.75])

    def test_alternating_switches(self):
        flow = velocity_library('alternating', self.grid, period=1.0)
        self.assertEqual(flow.switch_times(0.0, 2.0), [0.5, 1.0, 1.5])
        self.assertEqual(np.max(np.abs(flow.velocity(0.2)[1].values)), 0.0)
        self.assertEqual(np.max(np.abs(flow.velocity(0.7)[0].values)), 0.0)

    def test_unknown_and_dimension_errors(self):
        with self.assertRaises(ValueError):
            velocity_library('vortex', self.grid)
        with self.assertRaises(GridError):
            velocity_library('shear', make_grid(1, 'torus', 32))
        with self.assertRaises(ValueError):
            velocity_library('random', self.grid, seed=None)
        flow = velocity_library('translation', make_grid(1, 'torus', 32), velocity=(2.0,))
        self.assertEqual(flow.velocity(0)[0].values[0], 2.0)


class StepTests(SimpleTestCase):
    def test_zero_velocity(self):
        grid = make_grid(2, 'torus', 32)
        theta = make_pattern('random', grid, seed=1, kmax=6)
        out = step(theta, VelocityField.zeros(grid), 0.1)
        self.assertLess(max_error(out, theta), 1e-14)

    def test_translation_phase_shift_per_step(self):
        grid = make_grid(2, 'torus', 32)
        theta = make_pattern('cosine', grid)
        u = velocity_library('translation', grid).velocity(0)
        dt = 1e-3
        out = step(theta, u, dt)
        exact = ScalarField.from_function(grid, lambda x, y: 2 * np.cos(TWO_PI * (x - dt)))
        self.assertLess(max_error(out, exact), 1e-10)

    def test_cfl_violation_carries_admissible_dt(self):
        grid = make_grid(2, 'torus', 32)
        theta = make_pattern('cosine', grid)
        u = velocity_library('shear', grid).velocity(0)
        with self.assertRaises(CFLViolation) as ctx:
            step(theta, u, 0.1)
        self.assertAlmostEqual(ctx.exception.admissible_dt, 0.5 / 32, places=12)
        self.assertAlmostEqual(admissible_dt(u), 0.5 / 32, places=12)

    def test_l2_drift_per_step(self):
        grid = make_grid(2, 'torus', 128)
        theta = make_pattern('cosine', grid)
        u = velocity_library('shear', grid).velocity(0)
        out = step(theta, u, admissible_dt(u))
        drift = abs(out.l2_squared() - theta.l2_squared()) / theta.l2_squared()
        self.assertLess(drift, 1e-10)


class RunTests(SimpleTestCase):
    def test_zero_horizon(self):
        grid = make_grid(2, 'torus', 32)
        theta = make_pattern('cosine', grid)
        traj = run(theta, velocity_library('shear', grid), 0.0, 0.1)
        self.assertEqual(len(traj), 1)
        self.assertIs(traj.final, theta)
        self.assertEqual(traj.cum_grad, [0.0])

    def test_translation_characteristics(self):
        grid = make_grid(2, 'torus', 32)
        theta = make_pattern('cosine', grid)
        traj = run(theta, velocity_library('translation', grid), 0.25, 0.25, dt=1e-3)
        exact = ScalarField.from_function(grid, lambda x, y: 2 * np.cos(TWO_PI * (x - 0.25)))
        self.assertLess(max_error(traj.final, exact), 1e-8)

    def test_shear_lagrangian_solution(self):
        grid = make_grid(2, 'torus', 128)
        theta = make_pattern('cosine', grid)
        traj = run(theta, velocity_library('shear', grid), 0.5, 0.25)
        exact = ScalarField.from_function(
            grid, lambda x, y: 2 * np.cos(TWO_PI * (x - 0.5 * np.sin(TWO_PI * y))))
        self.assertLess(max_error(traj.final, exact), 1e-4)
        self.assertEqual(traj.times, [0.0, 0.25, 0.5])

    def test_norms_conserved_under_shear(self):
        grid = make_grid(2, 'torus', 128)
        theta = make_pattern('cosine', grid)
        traj = run(theta, velocity_library('shear', grid), 1.0, 0.25)
        l2, l4 = lp_norm(theta, 2), lp_norm(theta, 4)
        for _, snap in traj:
            self.assertLess(abs(lp_norm(snap, 2) - l2) / l2, 1e-8)
            self.assertLess(abs(lp_norm(snap, 4) - l4) / l4, 1e-6)

    def test_cumulative_gradient(self):
        grid = make_grid(2, 'torus', 32)
        theta = make_pattern('cosine', grid)
        traj = run(theta, velocity_library('shear', grid, amplitude=0.5), 1.0, 0.5)
        rate = np.sqrt(2) * np.pi * 0.5
        np.testing.assert_allclose(traj.cum_grad, [0.0, 0.5 * rate, rate], rtol=1e-12)

    def test_time_reversal(self):
        grid = make_grid(2, 'torus', 128)
        theta = make_pattern('cosine', grid)
        flow = velocity_library('shear', grid)
        forward = run(theta, flow, 0.5, 0.5).final
        back = run(forward, time_reversed(flow, 0.5), 0.5, 0.5).final
        self.assertLess(max_error(back, theta), 1e-4)

    def test_alternating_reversal_crosses_switches(self):
        grid = make_grid(2, 'torus', 64)
        theta = make_pattern('cosine', grid)
        flow = velocity_library('alternating', grid, amplitude=0.25, period=0.5)
        forward = run(theta, flow, 0.75, 0.75, dt=5e-3).final
        back = run(forward, time_reversed(flow, 0.75), 0.75, 0.75, dt=5e-3).final
        self.assertLess(max_error(back, theta), 1e-6)

    def test_sample_times(self):
        self.assertEqual(sample_times(1.0, 0.25), [0.0, 0.25, 0.5, 0.75, 1.0])
        self.assertEqual(sample_times(0.6, 0.25), [0.0, 0.25, 0.5, 0.6])
        with self.assertRaises(ValueError):
            sample_times(-1.0, 0.1)

    def test_rejects_box_grid(self):
        grid = make_grid(2, 'box', 32, 4)
        flow = velocity_library('shear', make_grid(2, 'torus', 32))
        with self.assertRaises(GridError):
            run(ScalarField.zeros(grid), flow, 1.0, 0.5)


class RescaleTests(SimpleTestCase):
    def test_identity(self):
        grid = make_grid(2, 'torus', 32)
        f = make_pattern('random', grid, seed=2, kmax=4)
        self.assertIs(rescale_field(f, 1), f)

    def test_cosine_doubling(self):
        grid = make_grid(1, 'torus', 64)
        f = make_pattern('cosine', grid)
        g = rescale_field(f, 2)
        exact = ScalarField.from_function(grid, lambda x: 2 * np.cos(2 * TWO_PI * x))
        self.assertLess(max_error(g, exact), 1e-13)
        self.assertAlmostEqual(v_functional(g), np.log(2) * f.l2_squared(), places=12)

    def test_random_field_increment(self):
        grid = make_grid(2, 'torus', 64)
        f = make_pattern('random', grid, seed=9, kmax=6)
        g = rescale_field(f, 3)
        self.assertAlmostEqual(v_functional(g) - v_functional(f), np.log(3) * f.l2_squared(), delta=1e-10)

    def test_pointwise_rescaling(self):
        grid = make_grid(1, 'torus', 64)
        f = make_pattern('random', grid, seed=4, kmax=5, mean_zero=False)
        g = rescale_field(f, 4)
        # g(j/N) = f(4j/N mod 1)
        idx = (4 * np.arange(64)) % 64
        np.testing.assert_allclose(g.values, f.values[idx], atol=1e-12)

    def test_band_overflow(self):
        grid = make_grid(1, 'torus', 64)
        f = make_pattern('cosine', grid, mode=(8,))
        with self.assertRaises(BandOverflow) as ctx:
            rescale_field(f, 4)
        self.assertEqual(ctx.exception.max_admissible, 3)


class SelfSimilarTests(SimpleTestCase):
    def test_first_period_is_base(self):
        grid = make_grid(1, 'torus', 64)
        theta0 = make_pattern('cosine', grid)
        schedule = SelfSimilarSchedule(m=2, base=frozen_base(theta0))
        self.assertIs(self_similar_trajectory(schedule, 0.5), theta0)

    def test_frozen_base_three_periods(self):
        grid = make_grid(1, 'torus', 64)
        theta0 = make_pattern('cosine', grid)
        schedule = SelfSimilarSchedule(m=2, base=frozen_base(theta0))
        theta = self_similar_trajectory(schedule, 3.0)
        exact = ScalarField.from_function(grid, lambda x: 2 * np.cos(TWO_PI * 8 * x))
        self.assertLess(max_error(theta, exact), 1e-13)
        self.assertAlmostEqual(v_functional(theta), 3 * np.log(2) * 2, places=12)

    def test_linear_growth_slope(self):
        grid = make_grid(1, 'torus', 1024)
        theta0 = make_pattern('cosine', grid, mean=0.5)
        schedule = SelfSimilarSchedule(m=2, base=frozen_base(theta0))
        n = np.arange(1, 9)
        values = [v_functional(self_similar_trajectory(schedule, float(k))) for k in n]
        slope, _ = np.polyfit(n, values, 1)
        self.assertAlmostEqual(slope, np.log(2) * punctured_l2_squared(theta0), delta=1e-9)
        self.assertAlmostEqual(punctured_l2_squared(theta0), 2.0, places=12)

    def test_overflow_reports_max_periods(self):
        grid = make_grid(1, 'torus', 64)
        schedule = SelfSimilarSchedule(m=2, base=frozen_base(make_pattern('cosine', grid)))
        self.assertEqual(schedule.max_periods(), 4)
        with self.assertRaises(BandOverflow) as ctx:
            self_similar_trajectory(schedule, 5.5)
        self.assertEqual(ctx.exception.max_admissible, 4)

    def test_rejects_non_integer_scale(self):
        grid = make_grid(1, 'torus', 64)
        with self.assertRaises(ValueError):
            SelfSimilarSchedule(m=2.5, base=frozen_base(make_pattern('cosine', grid)))

    def test_recursion_with_solver_base(self):
        grid = make_grid(2, 'torus', 128)
        theta0 = make_pattern('random', grid, seed=5, kmax=2)
        flow = velocity_library('shear', grid, amplitude=0.25)
        schedule = SelfSimilarSchedule(m=2, base=trajectory_base(theta0, flow))
        base = schedule.base(0.5)
        theta = self_similar_trajectory(schedule, 1.5)
        expected = v_functional(base) + np.log(2) * punctured_l2_squared(base)
        self.assertAlmostEqual(v_functional(theta), expected, delta=1e-10)


class PatternTests(SimpleTestCase):
    def test_checkerboard_values(self):
        grid = make_grid(2, 'torus', 32)
        f = make_pattern('checkerboard', grid, m=4)
        self.assertEqual(set(np.unique(f.values)), {-1.0, 1.0})

    def test_stripes_values(self):
        grid = make_grid(1, 'torus', 64)
        self.assertEqual(set(np.unique(make_pattern('stripes', grid, m=16).values)), {-1.0, 1.0})

    def test_shell(self):
        grid = make_grid(2, 'torus', 32)
        f = make_pattern('shell', grid, radius=5)
        self.assertTrue(is_single_shell(f))
        self.assertAlmostEqual(f.l2_squared(), 1.0, places=12)

    def test_random_requires_seed(self):
        grid = make_grid(2, 'torus', 32)
        with self.assertRaises(ValueError):
            make_pattern('random', grid, seed=None)
        f = make_pattern('random', grid, seed=1)
        self.assertAlmostEqual(f.l2_squared(), 1.0, places=12)
        self.assertAlmostEqual(f.mean(), 0.0, places=14)

    def test_unknown_pattern(self):
        with self.assertRaises(ValueError):
            make_pattern('spiral', make_grid(2, 'torus', 32))

    def test_gaussian_needs_box(self):
        with self.assertRaises(GridError):
            make_pattern('gaussian', make_grid(1, 'torus', 32))
