"""
Origin corrections for punctured lattice sums of log-weighted integrands.

With Z(s) the zeta function of the punctured lattice Z^d (Z(s) = 2 zeta(s)
for d = 1, 4 zeta(s/2) beta(s/2) for d = 2), a spacing-delta sum of
log|x| g(x) over x != 0 misses

    delta^d [log delta + Z'(0)] g(0) + delta^(d+2) Z'(-2) lap g(0) / (2d)

of the integral, and the (log|x|)^2 weight misses
delta^d [(log delta)^2 + 2 log delta Z'(0) - Z''(0)] g(0) at leading order.
"""
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gamma, zeta

EULER_GAMMA = float(np.euler_gamma)
LOG_2PI = float(np.log(2 * np.pi))
# first Stieltjes constant
STIELTJES_1 = -0.0728158454836767248605863758749547

ZETA_PRIME_0 = -0.5 * LOG_2PI
ZETA_DOUBLE_PRIME_0 = 0.5 * EULER_GAMMA ** 2 - np.pi ** 2 / 24 - 0.5 * LOG_2PI ** 2 + STIELTJES_1


def catalan():
    return float((zeta(2, 0.25) - zeta(2, 0.75)) / 16)


def beta_prime_0():
    """Derivative at 0 of the Dirichlet beta function."""
    return float(2 * np.log(gamma(0.25)) - np.log(2 * np.pi * np.sqrt(2)))


@lru_cache(maxsize=None)
def beta_mellin_parts():
    """
    F(0) and F'(0) where beta(s) Gamma(s) = F(s) + 1/(2s) and F is the
    Mellin transform of h(t) = 1/(2 cosh t) with h(0) removed on [0, 1].
    """
    def h(t):
        return np.exp(-t) / (1 + np.exp(-2 * t))

    def head(t, power):
        return np.log(t) ** power * (h(t) - 0.5) / t

    def tail(t, power):
        return np.log(t) ** power * h(t) / t

    def F(power):
        a, _ = integrate.quad(head, 0, 1, args=(power,), epsabs=1e-14, epsrel=1e-13, limit=200)
        b, _ = integrate.quad(tail, 1, np.inf, args=(power,), epsabs=1e-14, epsrel=1e-13, limit=200)
        return a + b

    return F(0), F(1)


def beta_double_prime_0():
    """Second derivative at 0 of the Dirichlet beta function."""
    f0, f1 = beta_mellin_parts()
    c3 = 0.5 * EULER_GAMMA ** 2 - np.pi ** 2 / 12
    return float(2 * (0.5 * c3 + EULER_GAMMA * f0 + f1))


@lru_cache(maxsize=None)
def lattice_zeta_derivatives(d):
    """(Z'(0), Z''(0), Z'(-2)) for the punctured lattice Z^d."""
    if d == 1:
        return (
            2 * ZETA_PRIME_0,
            2 * ZETA_DOUBLE_PRIME_0,
            -float(zeta(3)) / (2 * np.pi ** 2),
        )
    if d == 2:
        bp = beta_prime_0()
        return (
            ZETA_PRIME_0 - bp,
            0.5 * ZETA_DOUBLE_PRIME_0 + 2 * ZETA_PRIME_0 * bp - 0.5 * beta_double_prime_0(),
            -catalan() / (3 * np.pi),
        )
    raise ValueError(f"Lattice constants are only tabulated for d in (1, 2), got {d}")


def discrete_laplacian_at_origin(values, spacing):
    """Second-order central difference Laplacian of a periodic array at index 0."""
    origin = (0,) * values.ndim
    total = 0.0
    for axis in range(values.ndim):
        plus = list(origin)
        minus = list(origin)
        plus[axis] = 1
        minus[axis] = -1
        total += values[tuple(plus)] + values[tuple(minus)] - 2 * values[origin]
    return float(total / spacing ** 2)


def log_origin_correction(values, spacing):
    """Correction to add to the punctured sum of log|x| * values."""
    d = values.ndim
    dz0, _, dzm2 = lattice_zeta_derivatives(d)
    g0 = float(values[(0,) * d])
    lap = discrete_laplacian_at_origin(values, spacing)
    log_h = np.log(spacing)
    return spacing ** d * (log_h + dz0) * g0 + spacing ** (d + 2) * dzm2 * lap / (2 * d)


def log_squared_origin_correction(values, spacing):
    """Leading correction for the punctured sum of (log|x|)^2 * values."""
    d = values.ndim
    dz0, ddz0, _ = lattice_zeta_derivatives(d)
    g0 = float(values[(0,) * d])
    log_h = np.log(spacing)
    return spacing ** d * (log_h ** 2 + 2 * log_h * dz0 - ddz0) * g0
