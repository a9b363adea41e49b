import numpy as np
from django.test import SimpleTestCase

from .bessel import bessel_jtilde, hankel_pq
from .zeta import (
    alpha_beta, build_constants, gaussian_log_moment, log_slope_fit, verify_log_ft,
    zeta_closed_form, zeta_constant,
)


class BesselTests(SimpleTestCase):
    def test_half_order_closed_form(self):
        s = np.linspace(0.0, 100.0, 2001)
        scaled = np.sqrt(2 * np.pi) * bessel_jtilde(-0.5, 2 * np.pi * s)
        np.testing.assert_allclose(scaled, 2 * np.cos(2 * np.pi * s), rtol=0, atol=1e-12)
        direct = bessel_jtilde(-0.5, s)
        np.testing.assert_allclose(direct, np.sqrt(2 / np.pi) * np.cos(s), rtol=0, atol=1e-13)

    def test_limits_and_zero(self):
        self.assertEqual(bessel_jtilde(0, 0.0), 1.0)
        self.assertAlmostEqual(bessel_jtilde(1, 0.0), 0.5)
        self.assertAlmostEqual(bessel_jtilde(0, 2.404825557695773), 0.0, delta=1e-12)

    def test_rejects_negative_argument(self):
        with self.assertRaises(ValueError):
            bessel_jtilde(0, -1.0)

    def test_hankel_expansion_matches_at_large_argument(self):
        t = np.array([150.0, 300.0])
        for nu in (0.0, 1.0):
            P, Q = hankel_pq(nu, t)
            w = t - nu * np.pi / 2 - np.pi / 4
            approx = np.sqrt(2 / (np.pi * t)) * (P * np.cos(w) - Q * np.sin(w))
            exact = bessel_jtilde(nu, t) * t ** nu
            np.testing.assert_allclose(approx, exact, rtol=0, atol=1e-10)


class ZetaTests(SimpleTestCase):
    def test_golden_values(self):
        for d in (1, 2):
            result = zeta_constant(d)
            self.assertAlmostEqual(result.value, zeta_closed_form(d), delta=1e-8)
            self.assertLessEqual(result.error_bound, 1e-8)
            self.assertLess(result.value, 0)
        self.assertAlmostEqual(zeta_closed_form(1), -4.830267, places=6)
        self.assertAlmostEqual(zeta_closed_form(2), -10.81938, places=5)

    def test_split_doubling_is_stable(self):
        for d in (1, 2):
            a = zeta_constant(d, 32.0)
            b = zeta_constant(d, 64.0)
            self.assertLessEqual(abs(a.value - b.value), 1e-8)

    def test_rejects_dimension(self):
        with self.assertRaises(ValueError):
            zeta_constant(3)

    def test_alpha_beta(self):
        alpha, beta = alpha_beta(1, zeta_closed_form(1))
        self.assertEqual(alpha, 0.5)
        self.assertAlmostEqual(beta, -2.415134, places=6)
        alpha2, _ = alpha_beta(2, zeta_closed_form(2))
        self.assertAlmostEqual(alpha2, 1 / (2 * np.pi))

    def test_build_constants(self):
        consts = build_constants(2)
        self.assertAlmostEqual(consts.c, 1 / np.pi)
        self.assertEqual(consts.beta, consts.zeta * consts.alpha)
        self.assertLessEqual(consts.zeta_error, 1e-8)


class LogTransformTests(SimpleTestCase):
    def test_gaussian_residual(self):
        for d in (1, 2):
            self.assertLessEqual(verify_log_ft(d).residual, 1e-6)

    def test_symbol_side_closed_form(self):
        for d in (1, 2):
            check = verify_log_ft(d)
            expected = zeta_closed_form(d) - (2.0 if d == 1 else 2 * np.pi) * gaussian_log_moment(d)
            self.assertAlmostEqual(check.symbol_side, expected, delta=1e-8)

    def test_scaled_family(self):
        for a in (2.0, 4.0):
            self.assertLessEqual(verify_log_ft(2, a).residual, 1e-6)

    def test_wrong_constant_is_detected(self):
        check = verify_log_ft(1, zeta=zeta_closed_form(1) + 1e-3)
        self.assertGreater(check.residual, 5e-4)

    def test_log_slope(self):
        for d in (1, 2):
            fit = log_slope_fit(d)
            self.assertLessEqual(fit.slope_error, 1e-6)
