"""
Geometric mixing scale: the smallest eps at which the ball average
theta * chi_eps drops below (1 - kappa) of sup |theta|.
"""
import logging
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import jn_zeros

from logft.bessel import bessel_jtilde
from mixlog_lab.conf import mixlog_setting
from spectral.constants import ball_volume
from spectral.fields import inverse_transform, lp_norm
from spectral.grid import GridError

logger = logging.getLogger(__name__)


class HypothesisError(ValueError):
    """Raised when a certificate's hypotheses do not hold for its input."""


def ball_indicator_symbol(xi, d):
    """
    Fourier transform of the normalized unit-ball indicator,
    J_{d/2}(2 pi |xi|) / (|B_1| |xi|^{d/2}), equal to 1 at 0.
    """
    xi = np.abs(np.asarray(xi, dtype=float))
    value = (2 * np.pi) ** (d / 2) * bessel_jtilde(d / 2, 2 * np.pi * xi) / ball_volume(d)
    return value


def first_symbol_zero(d):
    if d == 1:
        return 0.5
    if d == 2:
        return float(jn_zeros(1, 1)[0] / (2 * np.pi))
    raise ValueError(f"Ball symbols are tabulated for d in (1, 2), got {d}")


def mollify(theta, eps):
    """theta * chi_eps on the torus, by multiplying the spectrum."""
    grid = theta.grid
    if not grid.is_torus:
        raise GridError("Mollification is defined on the torus")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if eps > 0.5:
        raise ValueError(f"eps = {eps} exceeds 1/2; the ball would overlap its periodic images")
    multiplier = ball_indicator_symbol(eps * grid.frequency_magnitude, grid.d)
    return inverse_transform(theta.spectrum.scaled(multiplier))


def averaging_ratio(theta, eps):
    """||theta * chi_eps||_inf / ||theta||_inf."""
    return lp_norm(mollify(theta, eps), np.inf) / lp_norm(theta, np.inf)


@dataclass(frozen=True)
class GeometricScaleResult:
    kappa: float
    eps: float
    eps_min: float
    eps_max: float
    scan_points: int
    rtol: float
    at_window_floor: bool = False

    @property
    def is_sentinel(self):
        return np.isinf(self.eps)

    def as_dict(self):
        data = asdict(self)
        data['eps'] = None if self.is_sentinel else self.eps
        return data


def geometric_mixing_scale(theta, kappa, scan_points=None, rtol=None):
    """
    First eps in the window [1/N, 1/2] with ratio(eps) <= 1 - kappa, located
    on a uniform scan and refined by bisection; +inf when none qualifies.
    """
    if not 0 < kappa < 1:
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    if lp_norm(theta, np.inf) == 0:
        raise ValueError("The geometric mixing scale of the zero field is undefined")
    grid = theta.grid
    count = scan_points or max(mixlog_setting('SCAN_POINTS'), grid.N)
    rtol = rtol or mixlog_setting('BISECTION_RTOL')
    eps_min, eps_max = 1.0 / grid.N, 0.5
    level = 1.0 - kappa
    scan = np.linspace(eps_min, eps_max, count)

    def result(eps, floor=False):
        return GeometricScaleResult(kappa, float(eps), eps_min, eps_max, count, rtol, floor)

    previous = None
    for eps in scan:
        if averaging_ratio(theta, eps) <= level:
            break
        previous = eps
    else:
        logger.info("No eps in [%g, %g] reaches ratio %g; returning the sentinel", eps_min, eps_max, level)
        return result(np.inf)
    if previous is None:
        return result(eps_min, floor=True)

    lo, hi = previous, eps
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if averaging_ratio(theta, mid) <= level:
            hi = mid
        else:
            lo = mid
    return result(hi)


def rho_for_eta(eta, d):
    """Radius where chi^ first falls to sqrt(eta); |chi^| >= sqrt(eta) inside it."""
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    target = np.sqrt(eta)
    zero = first_symbol_zero(d)
    return float(brentq(lambda r: ball_indicator_symbol(r, d) - target, 0.0, zero, xtol=1e-14, rtol=1e-13))
