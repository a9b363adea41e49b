import numpy as np
from django.test import SimpleTestCase
from scipy import integrate

from spectral.constants import Constants
from spectral.fields import ScalarField, Spectrum, inverse_transform
from spectral.grid import GridError, make_grid

from .functionals import (
    HS, L2, V, W, functional_mixing_scale, functional_value, high_frequency_mass, hs_norm, is_single_shell,
    jensen_bound, punctured_l2_squared, small_s_expansion_residual, v_functional, w_functional,
)
from .lattice import EULER_GAMMA, beta_mellin_parts, beta_prime_0, catalan
from .physical import unit_ball_fraction, v_physical

TWO_PI = 2 * np.pi
GAUSSIAN_V_1D = -(EULER_GAMMA + np.log(8 * np.pi)) / (2 * np.sqrt(2))


def band_limited(grid, kmax, seed, mean_zero=True):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(grid.shape)
    spec = ScalarField(grid, values).spectrum
    mask = np.all([np.abs(k) <= kmax for k in grid.modes], axis=0)
    if mean_zero:
        mask[grid.zero_mode] = False
    return inverse_transform(Spectrum(grid, spec.coeffs * mask))


def gaussian(grid, a=1.0):
    return ScalarField.from_function(grid, lambda *x: np.exp(-np.pi * sum(c ** 2 for c in x) / a ** 2))


def constants_for(d):
    zeta = -2 * (EULER_GAMMA + np.log(TWO_PI)) if d == 1 else -TWO_PI * (EULER_GAMMA + np.log(np.pi))
    return Constants.from_zeta(d, zeta)


class TorusFunctionalTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid(2, 'torus', 32)

    def cosine(self, m, amplitude=2.0):
        return ScalarField.from_function(self.grid, lambda x, y: amplitude * np.cos(TWO_PI * m * x))

    def test_v_examples(self):
        self.assertAlmostEqual(v_functional(self.cosine(1)), 0.0, places=13)
        self.assertAlmostEqual(v_functional(self.cosine(2)), 2 * np.log(2), places=12)

    def test_w_examples(self):
        self.assertAlmostEqual(w_functional(self.cosine(1)), 0.0, places=13)
        self.assertAlmostEqual(w_functional(self.cosine(2)), 2 * np.log(2) ** 2, places=12)
        shell = self.cosine(4, amplitude=np.sqrt(2))
        self.assertAlmostEqual(w_functional(shell), np.log(4) ** 2, places=12)

    def test_hs_examples(self):
        self.assertAlmostEqual(hs_norm(self.cosine(1), -1), np.sqrt(2), places=12)
        self.assertAlmostEqual(hs_norm(self.cosine(2), -1), np.sqrt(2) / 2, places=12)
        f = band_limited(self.grid, 6, seed=1, mean_zero=False)
        centred = f.values - f.values.mean()
        expected = np.sqrt(np.mean(centred ** 2))
        self.assertAlmostEqual(hs_norm(f, 0), expected, places=12)
        self.assertEqual(functional_mixing_scale(self.cosine(2), 1), hs_norm(self.cosine(2), -1))

    def test_w_nonnegative_and_shell_additivity(self):
        low = band_limited(self.grid, 3, seed=2)
        high_spec = band_limited(self.grid, 10, seed=3).spectrum
        mask = np.sqrt(self.grid.modes[0] ** 2 + self.grid.modes[1] ** 2) > 5
        high = inverse_transform(Spectrum(self.grid, high_spec.coeffs * mask))
        low_spec = low.spectrum
        low_mask = np.sqrt(self.grid.modes[0] ** 2 + self.grid.modes[1] ** 2) <= 5
        low = inverse_transform(Spectrum(self.grid, low_spec.coeffs * low_mask))
        both = low + high
        self.assertAlmostEqual(v_functional(both), v_functional(low) + v_functional(high), places=11)
        self.assertAlmostEqual(w_functional(both), w_functional(low) + w_functional(high), places=11)
        self.assertGreaterEqual(w_functional(low), 0.0)

    def test_integer_rescaling_law(self):
        grid = make_grid(1, 'torus', 128)
        rng = np.random.default_rng(4)
        a = rng.standard_normal(6)
        b = rng.standard_normal(6)
        mean = 0.7

        def f(x, m=1):
            return mean + sum(a[j] * np.cos(TWO_PI * (j + 1) * m * x) + b[j] * np.sin(TWO_PI * (j + 1) * m * x)
                              for j in range(6))

        base = ScalarField.from_function(grid, f)
        norm2 = punctured_l2_squared(base)
        for m in (2, 3):
            g = ScalarField.from_function(grid, lambda x: f(x, m))
            log_m = np.log(m)
            self.assertAlmostEqual(v_functional(g), v_functional(base) + log_m * norm2, delta=1e-10)
            expected_w = w_functional(base) + 2 * log_m * v_functional(base) + log_m ** 2 * norm2
            self.assertAlmostEqual(w_functional(g), expected_w, delta=1e-10)


class JensenTests(SimpleTestCase):
    def test_random_fields(self):
        grid = make_grid(2, 'torus', 32)
        for seed in range(100):
            f = band_limited(grid, 8, seed=seed)
            for s in (0.25, 0.5, 1.0):
                check = jensen_bound(f, s)
                self.assertTrue(check.holds, (seed, s, check))
                self.assertGreaterEqual(check.slack, -1e-12 * check.bound)

    def test_single_shell_equality(self):
        grid = make_grid(2, 'torus', 32)
        f = ScalarField.from_function(grid, lambda x, y: np.cos(TWO_PI * (3 * x + 4 * y)) + np.sin(TWO_PI * 5 * y))
        self.assertTrue(is_single_shell(f))
        for s in (0.25, 0.5, 1.0):
            check = jensen_bound(f, s)
            self.assertTrue(check.equality)
            self.assertTrue(check.single_shell)

    def test_high_frequency_mass(self):
        grid = make_grid(2, 'torus', 32)
        for seed in range(20):
            f = band_limited(grid, 10, seed=seed)
            for B in (1.5, 3.0, 10.0):
                self.assertTrue(high_frequency_mass(f, B).holds)
        with self.assertRaises(ValueError):
            high_frequency_mass(f, 1.0)


class SmallSExpansionTests(SimpleTestCase):
    def test_single_shell_exact(self):
        grid = make_grid(1, 'torus', 32)
        f = ScalarField.from_function(grid, lambda x: 2 * np.cos(TWO_PI * 2 * x))
        s = 0.01
        L = np.log(2)
        expected = (np.exp(2 * s * L) - 1 - 2 * s * L - 2 * s ** 2 * L ** 2) * 2
        self.assertAlmostEqual(small_s_expansion_residual(f, s), expected, delta=1e-14)
        self.assertEqual(small_s_expansion_residual(f, 0.0), 0.0)

    def test_third_order_scaling(self):
        grid = make_grid(2, 'torus', 32)
        for seed in range(20):
            f = band_limited(grid, 10, seed=100 + seed)
            ratio = small_s_expansion_residual(f, 1e-2) / small_s_expansion_residual(f, 5e-3)
            self.assertGreaterEqual(ratio, 6)
            self.assertLessEqual(ratio, 10)


class BoxFunctionalTests(SimpleTestCase):
    def test_gaussian_v_1d(self):
        grid = make_grid(1, 'box', 512, 8)
        self.assertAlmostEqual(v_functional(gaussian(grid)), GAUSSIAN_V_1D, delta=1e-4)

    def test_gaussian_v_2d(self):
        grid = make_grid(2, 'box', 256, 6)
        exact, _ = integrate.quad(lambda r: TWO_PI * r * np.log(r) * np.exp(-TWO_PI * r ** 2), 0, np.inf)
        self.assertAlmostEqual(v_functional(gaussian(grid)), exact, delta=1e-4)

    def test_gaussian_w_1d(self):
        grid = make_grid(1, 'box', 512, 8)
        exact, _ = integrate.quad(lambda x: 2 * np.log(x) ** 2 * np.exp(-TWO_PI * x ** 2), 0, np.inf)
        self.assertAlmostEqual(w_functional(gaussian(grid)), exact, delta=2e-3)

    def test_dilation_law(self):
        grid = make_grid(1, 'box', 512, 8)
        f, f2 = gaussian(grid), gaussian(grid, a=2.0)
        expected = 2 * (v_functional(f) - np.log(2) * f.l2_squared())
        self.assertAlmostEqual(v_functional(f2), expected, delta=2e-3)

    def test_hs_zero_includes_origin_on_box(self):
        grid = make_grid(1, 'box', 256, 8)
        f = gaussian(grid)
        self.assertAlmostEqual(hs_norm(f, 0) ** 2, f.l2_squared(), places=12)


class FunctionalValueTests(SimpleTestCase):
    def test_kinds(self):
        grid = make_grid(2, 'torus', 32)
        f = band_limited(grid, 4, 3)
        self.assertEqual(functional_value(V, f).value, v_functional(f))
        self.assertEqual(functional_value(W, f).value, w_functional(f))
        self.assertGreaterEqual(functional_value(W, f).value, 0)
        self.assertAlmostEqual(functional_value(HS, f, 0).value ** 2, functional_value(L2, f).value ** 2, places=12)
        self.assertEqual(functional_value(HS, f, 0.5).s, 0.5)
        self.assertEqual(functional_value(V, f).grid, 'd=2 kind=torus N=32 R=0')

    def test_box_values_record_lattice_correction(self):
        f = gaussian(make_grid(1, 'box', 256, 8))
        self.assertTrue(functional_value(V, f).metadata['lattice_correction'])
        self.assertNotIn('lattice_correction', functional_value(L2, f).metadata)

    def test_unknown_kind(self):
        with self.assertRaises(ValueError):
            functional_value('energy', ScalarField.zeros(make_grid(1, 'torus', 16)))


class PhysicalFormTests(SimpleTestCase):
    def test_matches_spectral_1d(self):
        grid = make_grid(1, 'box', 512, 8)
        f = gaussian(grid)
        spectral_v = v_functional(f)
        self.assertAlmostEqual(v_physical(f, constants_for(1)).value, spectral_v, delta=2e-3 * max(1, abs(spectral_v)))

    def test_matches_spectral_2d(self):
        grid = make_grid(2, 'box', 256, 6)
        f = gaussian(grid)
        spectral_v = v_functional(f)
        self.assertAlmostEqual(v_physical(f, constants_for(2)).value, spectral_v, delta=2e-3 * max(1, abs(spectral_v)))

    def test_dilation_in_physical_form(self):
        grid = make_grid(1, 'box', 512, 8)
        consts = constants_for(1)
        f, f2 = gaussian(grid), gaussian(grid, a=2.0)
        expected = 2 * (v_physical(f, consts).value - np.log(2) * f.l2_squared())
        self.assertAlmostEqual(v_physical(f2, consts).value, expected, delta=2e-3)

    def test_zero_field(self):
        grid = make_grid(1, 'box', 64, 4)
        value = v_physical(ScalarField.zeros(grid), constants_for(1))
        self.assertEqual(value.value, 0.0)
        self.assertEqual(value.kind, V)

    def test_truncation_metadata(self):
        grid = make_grid(2, 'box', 64, 4)
        value = v_physical(gaussian(grid), constants_for(2))
        self.assertEqual(value.grid, grid.describe())
        self.assertEqual(value.metadata['form'], 'physical')
        self.assertAlmostEqual(value.metadata['inner_cutoff'], grid.h / 2)
        self.assertAlmostEqual(value.metadata['outer_radius'], np.sqrt(2) * 8)
        self.assertGreater(value.metadata['diagonal_term'], 0)
        self.assertEqual(value.as_dict()['value'], value.value)

    def test_rejects_torus(self):
        grid = make_grid(1, 'torus', 64)
        with self.assertRaises(GridError):
            v_physical(ScalarField.zeros(grid), constants_for(1))

    def test_unit_ball_fraction(self):
        h = 0.1
        centres = np.array([[0.0, 0.5, 1.0, 2.0]])
        np.testing.assert_allclose(unit_ball_fraction(centres, h), [1.0, 1.0, 0.5, 0.0])


class LatticeConstantTests(SimpleTestCase):
    def test_catalan(self):
        self.assertAlmostEqual(catalan(), 0.915965594177219, places=13)

    def test_beta_prime_consistency(self):
        f0, _ = beta_mellin_parts()
        self.assertAlmostEqual(EULER_GAMMA / 2 + f0, beta_prime_0(), places=10)
