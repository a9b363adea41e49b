"""
The constant zeta_d in the Fourier transform of the truncated kernel

    <T, f> = ∫_{|x|<=1} (f(x) - f(0))/|x|^d dx + ∫_{|x|>1} f(x)/|x|^d dx,
    T^(xi) = zeta_d - sigma_{d-1} log|xi|,

and the constants derived from it.

In the variable t = 2 pi s, with nu = d/2 - 1,

    zeta_d = ∫_0^{2pi} ((2pi)^{d/2} t^-nu J_nu(t) - sigma) dt/t
             + ∫_{2pi}^inf (2pi)^{d/2} t^-nu J_nu(t) dt/t.
"""
import logging
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import digamma

from mixlog_lab.conf import mixlog_setting
from spectral.constants import Constants, sphere_area

from .bessel import bessel_jtilde, hankel_coefficient, hankel_pq

logger = logging.getLogger(__name__)

EULER_GAMMA = float(np.euler_gamma)
HANKEL_TERMS = 4
QUAD_OPTS = {'epsabs': 1e-13, 'epsrel': 1e-12, 'limit': 1000}


def zeta_closed_form(d):
    """-2(gamma + ln 2pi) for d = 1, -2pi(gamma + ln pi) for d = 2."""
    if d == 1:
        return -2.0 * (EULER_GAMMA + np.log(2 * np.pi))
    if d == 2:
        return -2.0 * np.pi * (EULER_GAMMA + np.log(np.pi))
    raise ValueError(f"Closed forms are only known here for d in (1, 2), got {d}")


def _check_dimension(d):
    if d not in (1, 2):
        raise ValueError(f"zeta_d is computed for d in (1, 2), got {d}")


@dataclass(frozen=True)
class ZetaResult:
    d: int
    value: float
    split: float
    head: float
    middle: float
    tail: float
    error_bound: float
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self):
        return asdict(self)


def _tail(d, start):
    """∫_start^inf (2pi)^{d/2} t^-nu J_nu(t) dt/t from the Hankel expansion."""
    nu = d / 2 - 1
    scale = (2 * np.pi) ** (d / 2) * np.sqrt(2 / np.pi)
    phase = nu * np.pi / 2 + np.pi / 4
    cos_p, sin_p = np.cos(phase), np.sin(phase)

    def envelope(t):
        return t ** (-nu - 1.5)

    # cos(t - phase) and sin(t - phase) expanded on cos t, sin t
    def cos_part(t):
        P, Q = hankel_pq(nu, t, HANKEL_TERMS)
        return scale * envelope(t) * (P * cos_p + Q * sin_p)

    def sin_part(t):
        P, Q = hankel_pq(nu, t, HANKEL_TERMS)
        return scale * envelope(t) * (P * sin_p - Q * cos_p)

    c_val, c_err = integrate.quad(cos_part, start, np.inf, weight='cos', wvar=1.0, limlst=200)
    s_val, s_err = integrate.quad(sin_part, start, np.inf, weight='sin', wvar=1.0, limlst=200)

    exponent = nu + 0.5 + HANKEL_TERMS
    omitted = scale * abs(hankel_coefficient(nu, HANKEL_TERMS)) * start ** (-exponent) / exponent
    return c_val + s_val, c_err + s_err, omitted


@lru_cache(maxsize=None)
def zeta_constant(d, split=None):
    """zeta_d by quadrature; split is the S in the [2pi, 2pi S] middle panel."""
    _check_dimension(d)
    split = float(split or mixlog_setting('ZETA_SPLIT'))
    nu = d / 2 - 1
    sigma = sphere_area(d)
    scale = (2 * np.pi) ** (d / 2)
    first = 2 * np.pi
    last = 2 * np.pi * split

    def head_integrand(t):
        return (scale * bessel_jtilde(nu, t) - sigma) / t

    def body_integrand(t):
        return scale * bessel_jtilde(nu, t) / t

    head, head_err = integrate.quad(head_integrand, 0.0, first, **QUAD_OPTS)
    middle, middle_err = integrate.quad(body_integrand, first, last, **QUAD_OPTS)
    tail, tail_err, omitted = _tail(d, last)

    value = head + middle + tail
    error_bound = head_err + middle_err + tail_err + omitted
    logger.debug("zeta_%d = %.15g (error bound %.2e)", d, value, error_bound)
    if error_bound > 1e-8:
        logger.warning("zeta_%d error bound %.2e exceeds 1e-8", d, error_bound)
    return ZetaResult(
        d=d,
        value=float(value),
        split=split,
        head=float(head),
        middle=float(middle),
        tail=float(tail),
        error_bound=float(error_bound),
        diagnostics={
            'head_error': float(head_err),
            'middle_error': float(middle_err),
            'tail_error': float(tail_err),
            'omitted_asymptotic_term': float(omitted),
        },
    )


def alpha_beta(d, zeta):
    sigma = sphere_area(d)
    return 1.0 / sigma, float(zeta) / sigma


def build_constants(d):
    _check_dimension(d)
    result = zeta_constant(d)
    return Constants.from_zeta(d, result.value, result.error_bound)


def _radial(d, func, lower, upper):
    value, _ = integrate.quad(func, lower, upper, epsabs=1e-14, epsrel=1e-12, limit=500)
    return sphere_area(d) * value


@dataclass(frozen=True)
class LogTransformCheck:
    d: int
    scale: float
    kernel_side: float
    symbol_side: float

    @property
    def residual(self):
        return abs(self.kernel_side - self.symbol_side)


def verify_log_ft(d, scale=1.0, zeta=None):
    """
    Both sides of <T, psi^> = ∫ (zeta_d - sigma log|xi|) psi(xi) dxi for
    psi(xi) = exp(-pi a^2 |xi|^2), whose transform is a^-d exp(-pi |x|^2 / a^2).
    """
    _check_dimension(d)
    a = float(scale)
    zeta = zeta_constant(d).value if zeta is None else zeta
    sigma = sphere_area(d)

    def psi_hat(r):
        return a ** -d * np.exp(-np.pi * r ** 2 / a ** 2)

    near = _radial(d, lambda r: (psi_hat(r) - psi_hat(0.0)) / r, 0.0, 1.0)
    far = _radial(d, lambda r: psi_hat(r) / r, 1.0, np.inf)

    mass = a ** -d
    log_moment = _radial(d, lambda r: r ** (d - 1) * np.log(r) * np.exp(-np.pi * a ** 2 * r ** 2), 0.0, np.inf)
    return LogTransformCheck(
        d=d,
        scale=a,
        kernel_side=float(near + far),
        symbol_side=float(zeta * mass - sigma * log_moment),
    )


def gaussian_log_moment(d):
    """∫ log|xi| exp(-pi |xi|^2) dxi = (digamma(d/2) - log pi)/2."""
    return 0.5 * (float(digamma(d / 2)) - np.log(np.pi))


@dataclass(frozen=True)
class LogSlopeFit:
    d: int
    scales: tuple
    values: tuple
    slope: float
    intercept: float
    expected_slope: float

    @property
    def slope_error(self):
        return abs(self.slope - self.expected_slope)


def log_slope_fit(d, scales=(1.0, 2.0, 4.0, 8.0)):
    """
    Least-squares slope of a^d <T, psi_a^> against log a. For the Gaussian
    family it equals sigma_{d-1} times the mass of psi, which is 1.
    """
    _check_dimension(d)
    scales = tuple(float(a) for a in scales)
    values = tuple(a ** d * verify_log_ft(d, a).kernel_side for a in scales)
    slope, intercept = np.polyfit(np.log(scales), values, 1)
    return LogSlopeFit(
        d=d,
        scales=scales,
        values=values,
        slope=float(slope),
        intercept=float(intercept),
        expected_slope=sphere_area(d),
    )

