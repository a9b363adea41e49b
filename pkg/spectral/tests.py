import numpy as np
from django.test import SimpleTestCase

from .constants import Constants, sphere_area
from .fields import (
    ScalarField, VelocityField, boundary_mass_fraction, forward_transform, gradient,
    inverse_transform, lp_norm, project_divergence_free, sobolev_w1p_seminorm,
)
from .grid import GridError, make_grid
from .snapshots import SnapshotFormatError, format_snapshot, parse_snapshot

TWO_PI = 2 * np.pi


class GridTests(SimpleTestCase):
    def test_torus_modes(self):
        grid = make_grid(2, 'torus', 64)
        self.assertEqual(grid.shape, (64, 64))
        self.assertEqual(int(np.max(np.abs(grid.modes[0]))), 32)

    def test_box_spacing(self):
        grid = make_grid(1, 'box', 256, 8)
        self.assertAlmostEqual(grid.h, 1 / 16)
        self.assertAlmostEqual(grid.axis[0], -8.0)

    def test_rejects_bad_parameters(self):
        with self.assertRaises(GridError):
            make_grid(2, 'torus', 5)
        with self.assertRaises(GridError):
            make_grid(3, 'torus', 8)
        with self.assertRaises(GridError):
            make_grid(1, 'box', 64, -1)
        with self.assertRaises(GridError):
            make_grid(1, 'box', 64)
        with self.assertRaises(GridError):
            make_grid(1, 'torus', 64, 2.0)

    def test_nyquist_zeroed_for_derivatives(self):
        grid = make_grid(1, 'torus', 8)
        self.assertEqual(grid.derivative_frequencies[0][4], 0.0)
        self.assertEqual(grid.frequencies[0][4], -4)


class TransformTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 16)

    def test_cosine_coefficients(self):
        f = ScalarField.from_function(self.grid, lambda x, y: 2 * np.cos(TWO_PI * x))
        c = f.spectrum.coeffs
        self.assertAlmostEqual(abs(c[1, 0] - 1), 0, places=13)
        self.assertAlmostEqual(abs(c[-1, 0] - 1), 0, places=13)
        c = c.copy()
        c[1, 0] = c[-1, 0] = 0
        self.assertLess(np.max(np.abs(c)), 1e-14)

    def test_constant_field(self):
        f = ScalarField(self.grid, np.ones(self.grid.shape))
        c = f.spectrum.coeffs
        self.assertAlmostEqual(c[0, 0].real, 1.0, places=14)
        self.assertAlmostEqual(f.spectrum.l2_squared(), 1.0, places=13)

    def test_gaussian_box_spectrum(self):
        grid = make_grid(1, 'box', 256, 8)
        f = ScalarField.from_function(grid, lambda x: np.exp(-np.pi * x ** 2))
        xi = grid.frequencies[0]
        window = np.abs(xi) <= 4
        exact = np.exp(-np.pi * xi ** 2)
        err = np.max(np.abs(f.spectrum.coeffs[window] - exact[window]))
        self.assertLess(err, 1e-8)

    def test_parseval_and_round_trip(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            f = ScalarField(self.grid, rng.standard_normal(self.grid.shape))
            l2 = f.l2_squared()
            self.assertLess(abs(f.spectrum.l2_squared() - l2) / l2, 1e-12)
            back = inverse_transform(forward_transform(f))
            err = np.sqrt(np.sum((back.values - f.values) ** 2) / np.sum(f.values ** 2))
            self.assertLess(err, 1e-12)
            self.assertLess(f.spectrum.hermitian_defect(), 1e-12)

    def test_box_parseval(self):
        grid = make_grid(2, 'box', 32, 3)
        rng = np.random.default_rng(3)
        f = ScalarField(grid, rng.standard_normal(grid.shape))
        self.assertAlmostEqual(f.spectrum.l2_squared() / f.l2_squared(), 1.0, places=12)

    def test_values_are_read_only(self):
        f = ScalarField.zeros(self.grid)
        with self.assertRaises(ValueError):
            f.values[0, 0] = 1.0


class ProjectionTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 32)

    def test_shear_unchanged(self):
        x, y = self.grid.coords
        u = VelocityField.from_arrays(self.grid, np.sin(TWO_PI * y), np.zeros_like(x))
        p = project_divergence_free(u)
        self.assertLess(np.max(np.abs(p[0].values - u[0].values)), 1e-14)
        self.assertLess(np.max(np.abs(p[1].values)), 1e-14)

    def test_gradient_removed(self):
        phi = ScalarField.from_function(self.grid, lambda x, y: np.sin(TWO_PI * x) * np.sin(TWO_PI * y))
        u = VelocityField(self.grid, gradient(phi))
        p = project_divergence_free(u)
        self.assertLess(max(np.max(np.abs(c.values)) for c in p.components), 1e-12)

    def test_idempotent_and_solenoidal(self):
        rng = np.random.default_rng(11)
        u = VelocityField.from_arrays(self.grid, *rng.standard_normal((2,) + self.grid.shape))
        once = project_divergence_free(u)
        twice = project_divergence_free(once)
        self.assertTrue(once.is_solenoidal())
        for a, b in zip(once.components, twice.components):
            scale = np.max(np.abs(a.spectrum.coeffs))
            self.assertLess(np.max(np.abs(a.spectrum.coeffs - b.spectrum.coeffs)) / scale, 1e-12)


class NormTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 32)
        self.cos = ScalarField.from_function(self.grid, lambda x, y: 2 * np.cos(TWO_PI * x))

    def test_lp_norms(self):
        self.assertAlmostEqual(lp_norm(ScalarField(self.grid, np.ones(self.grid.shape)), 2), 1.0)
        self.assertAlmostEqual(lp_norm(self.cos, 2), np.sqrt(2), places=12)
        self.assertAlmostEqual(lp_norm(self.cos, np.inf), 2.0, places=12)
        with self.assertRaises(ValueError):
            lp_norm(self.cos, 0.5)

    def test_gradient_of_sine(self):
        f = ScalarField.from_function(self.grid, lambda x, y: np.sin(TWO_PI * x))
        dx, dy = gradient(f)
        x, _ = self.grid.coords
        self.assertLess(np.max(np.abs(dx.values - TWO_PI * np.cos(TWO_PI * x))), 1e-11)
        self.assertLess(np.max(np.abs(dy.values)), 1e-12)

    def test_shear_seminorm(self):
        x, y = self.grid.coords
        u = VelocityField.from_arrays(self.grid, np.sin(TWO_PI * y), np.zeros_like(x))
        self.assertAlmostEqual(sobolev_w1p_seminorm(u, 2), np.sqrt(2) * np.pi, places=10)
        self.assertEqual(sobolev_w1p_seminorm(VelocityField.zeros(self.grid), 2), 0.0)

    def test_boundary_mass(self):
        grid = make_grid(1, 'box', 128, 6)
        narrow = ScalarField.from_function(grid, lambda x: np.exp(-np.pi * x ** 2))
        self.assertLess(boundary_mass_fraction(narrow), 1e-8)
        wide = ScalarField.from_function(grid, lambda x: np.exp(-0.01 * x ** 2))
        self.assertGreater(boundary_mass_fraction(wide), 1e-8)


class ConstantsTests(SimpleTestCase):
    def test_sphere_areas(self):
        self.assertEqual(sphere_area(1), 2.0)
        self.assertEqual(sphere_area(2), 2 * np.pi)

    def test_derived_constants(self):
        consts = Constants.from_zeta(2, -10.0)
        self.assertAlmostEqual(consts.alpha, 1 / (2 * np.pi))
        self.assertAlmostEqual(consts.c, 1 / np.pi)
        self.assertEqual(consts.beta, consts.zeta * consts.alpha)


class SnapshotTests(SimpleTestCase):
    def test_round_trip(self):
        grid = make_grid(2, 'torus', 8)
        rng = np.random.default_rng(5)
        f = ScalarField(grid, rng.standard_normal(grid.shape))
        text = format_snapshot(f)
        self.assertTrue(text.startswith('mixlog-field v1 d=2 kind=torus N=8 R=0\n'))
        g = parse_snapshot(text)
        np.testing.assert_array_equal(g.values, f.values)

    def test_box_header(self):
        grid = make_grid(1, 'box', 16, 4)
        g = parse_snapshot(format_snapshot(ScalarField.zeros(grid)))
        self.assertEqual(g.grid, grid)

    def test_rejects_mismatch(self):
        grid = make_grid(1, 'torus', 8)
        text = format_snapshot(ScalarField.zeros(grid))
        with self.assertRaises(SnapshotFormatError):
            parse_snapshot(text, kind='box')
        with self.assertRaises(SnapshotFormatError):
            parse_snapshot(text.replace('v1', 'v2', 1))
        with self.assertRaises(SnapshotFormatError):
            parse_snapshot('\n'.join(text.splitlines()[:1] + ['1,2,3']))
