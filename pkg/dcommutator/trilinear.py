"""
The commutator trilinear form

    T(f, g, v) = c_d PV ∬ f(x) g(y) (v(x) - v(y)) . (x - y) / |x - y|^(d+2) dx dy

on the torus, by physical-space quadrature and by its exact Fourier side
Re[<L f, -v . grad g> + <L g, -v . grad f>] with L the log|k| multiplier.
T(theta, theta, u) is dV/dt along the transport equation.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import fft
from scipy.integrate import fixed_quad
from scipy.special import j1

from mixlog_lab.conf import mixlog_setting
from spectral.fields import ScalarField, inverse_transform
from spectral.grid import GridError, make_grid

from .kernel import CommutatorKernel, displacements, periodized_kernel

logger = logging.getLogger(__name__)

PV_PHYSICAL = 'pv-physical'
FOURIER = 'fourier'

# Radii of the smooth split between the near field (polar quadrature) and
# the far field (grid sum); both stay inside the nearest-image cell.
NEAR_INNER = 0.1
NEAR_OUTER = 0.4
FAR_GRID_MIN = 128


class NonSolenoidalField(ValueError):
    """Raised when the velocity of the trilinear form is not divergence-free."""


@dataclass
class TrilinearResult:
    value: float
    method: str
    ladder: list = field(default_factory=list)
    order: float | None = None
    residual: float = 0.0
    far_term: float = 0.0

    def as_dict(self):
        return {
            'value': self.value,
            'method': self.method,
            'ladder': [{'eps': eps, 'value': value} for eps, value in self.ladder],
            'order': self.order,
            'residual': self.residual,
            'far_term': self.far_term,
        }


def _check_inputs(f, g, v):
    grid = f.grid
    if not grid.is_torus:
        raise GridError("The trilinear form is evaluated on torus grids")
    if g.grid != grid or v.grid != grid:
        raise GridError("f, g and v must share one grid")


def log_field(f):
    """phi with phi^(k) = log|k| f^(k), zero at k = 0."""
    mag = f.grid.frequency_magnitude
    weight = np.log(np.where(mag > 0, mag, 1.0))
    return inverse_transform(f.spectrum.scaled(weight))


class _Padded:
    """Band below Nyquist of an N-grid, re-sampled on a finer torus grid."""

    def __init__(self, grid, fine_N=None):
        self.coarse = grid
        self.fine = make_grid(grid.d, 'torus', fine_N or 2 * grid.N)
        nyquist = grid.N // 2
        self.mask = np.all([np.abs(k) < nyquist for k in grid.modes], axis=0)
        self.targets = tuple((k % self.fine.N)[self.mask] for k in grid.modes)
        mag = self.fine.frequency_magnitude
        self.log_weight = np.log(np.where(mag > 0, mag, 1.0))

    def place(self, coeffs):
        out = np.zeros(self.fine.shape, dtype=complex)
        out[self.targets] = coeffs[self.mask]
        return out

    def coeffs(self, f):
        return self.place(f.spectrum.coeffs)

    def values(self, coeffs):
        return fft.ifftn(coeffs).real * self.fine.size

    def transport(self, v_fine, g_coeffs):
        """Fourier coefficients of -v . grad g on the fine grid."""
        total = np.zeros(self.fine.shape)
        for v_i, k in zip(v_fine, self.fine.frequencies):
            total -= v_i * self.values(2j * np.pi * k * g_coeffs)
        return fft.fftn(total) / self.fine.size

    def log_pairing(self, f_coeffs, w_coeffs):
        """<L f, w> over the fine modes."""
        return float(np.real(np.sum(self.log_weight * np.conj(f_coeffs) * w_coeffs)))


def trilinear_fourier(f, g, v):
    """
    Exact value on band-limited inputs: products are formed on the doubled
    grid, so no mode aliases. Nyquist-plane coefficients are ignored.
    """
    _check_inputs(f, g, v)
    padded = _Padded(f.grid)
    f_hat, g_hat = padded.coeffs(f), padded.coeffs(g)
    v_fine = [padded.values(padded.coeffs(c)) for c in v.components]
    value = padded.log_pairing(f_hat, padded.transport(v_fine, g_hat))
    value += padded.log_pairing(g_hat, padded.transport(v_fine, f_hat))
    return float(value)


def correlation_coeffs(f, g, v):
    """
    Fourier coefficients of the displacement correlation
    C(z) = ∫ f(x) g(x - z) (v(x) - v(x - z)) dx, one array per component.
    Exact while the products f v and g v stay below Nyquist.
    """
    grid = f.grid
    f_hat, g_hat = f.spectrum.coeffs, g.spectrum.coeffs
    out = []
    for comp in v.components:
        fv = ScalarField(grid, f.values * comp.values).spectrum.coeffs
        gv = ScalarField(grid, g.values * comp.values).spectrum.coeffs
        out.append(fv * np.conj(g_hat) - f_hat * np.conj(gv))
    return out


def near_weight(r, inner=NEAR_INNER, outer=NEAR_OUTER):
    """Smooth step: 1 for r <= inner, 0 for r >= outer."""
    s = np.clip((np.asarray(r, dtype=float) - inner) / (outer - inner), 0.0, 1.0)
    rising = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    falling = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return falling / (falling + rising)


class _SphericalMoment:
    """
    Phi(r) = ∮ omega . C(r omega) d omega over the unit sphere, exact for a
    trigonometric C: 2i sum s_m sin(2 pi r |m|) in d = 1 and
    2 pi i sum s_m J1(2 pi r |m|) in d = 2, with s_m = m/|m| . C^(m).
    """

    def __init__(self, grid, coeffs):
        self.d = grid.d
        nyquist = grid.N // 2
        keep = np.all([np.abs(k) < nyquist for k in grid.modes], axis=0)
        mag = grid.frequency_magnitude
        keep &= mag > 0
        projected = sum(k * c for k, c in zip(grid.modes, coeffs))
        projected = np.where(keep, projected / np.where(mag > 0, mag, 1.0), 0.0)
        scale = np.max(np.abs(projected), initial=0.0)
        active = keep & (np.abs(projected) > mixlog_setting('ACTIVE_MODE_RTOL') * scale)
        self.wavenumber = 2 * np.pi * mag[active]
        self.weights = projected[active]

    @property
    def is_empty(self):
        return self.weights.size == 0

    @property
    def k_max(self):
        return float(np.max(self.wavenumber, initial=0.0))

    def __call__(self, r):
        arg = np.outer(np.atleast_1d(r), self.wavenumber)
        if self.d == 1:
            return np.real(2j * (np.sin(arg) @ self.weights))
        return np.real(2j * np.pi * (j1(arg) @ self.weights))


def _segment_integral(integrand, a, b, k_max):
    nodes = int(np.ceil(k_max * (b - a) / 2)) + 32
    value, _ = fixed_quad(integrand, a, b, n=nodes)
    return float(value)


def _extrapolate(values):
    """Limit from three levels halving eps, with the order fitted on them."""
    coarse, middle, fine = values
    first, second = middle - coarse, fine - middle
    order = 1.0
    if first != 0 and second != 0 and first / second > 0:
        order = float(np.clip(np.log2(first / second), 1.0, 4.0))
    return fine + second / (2.0 ** order - 1.0), order


def richardson_limit(ladder):
    """
    Extrapolate S(eps) to eps -> 0 on a ladder halving eps at every level.
    Returns (limit, order, residual); the limit uses the three finest levels
    and the residual is its distance to the limit from the three levels
    above them, or to the finest raw value when only three levels exist.
    """
    values = [value for _, value in ladder]
    if len(values) < 2:
        return values[-1], None, 0.0
    if len(values) == 2:
        limit = 2 * values[-1] - values[-2]
        return limit, 1.0, abs(limit - values[-1])
    limit, order = _extrapolate(values[-3:])
    if len(values) >= 4:
        previous, _ = _extrapolate(values[-4:-1])
    else:
        previous = values[-1]
    return limit, order, abs(limit - previous)


def trilinear_pv(f, g, v, kernel=None, solenoidal_tol=1e-10):
    """
    Physical-space quadrature of the PV integral over displacements z = x - y.

    The nearest-image kernel is split by a smooth radial weight. Inside it
    the cutoff integral over eps < |z| < NEAR_OUTER runs in polar form, Gauss
    nodes in r against the spherical moment of the correlation; outside, the
    periodized kernel minus the split part is smooth and is summed on a
    refined grid. The cutoff values on the eps ladder are then extrapolated.
    """
    _check_inputs(f, g, v)
    if not v.is_solenoidal(solenoidal_tol):
        raise NonSolenoidalField(
            f"Velocity divergence defect {v.divergence_defect():.3e} exceeds {solenoidal_tol:g}"
        )
    grid = f.grid
    kernel = kernel or CommutatorKernel.for_grid(grid)
    coeffs = correlation_coeffs(f, g, v)
    moment = _SphericalMoment(grid, coeffs)
    if moment.is_empty:
        return TrilinearResult(0.0, PV_PHYSICAL, [(float(eps), 0.0) for eps in kernel.ladder], None, 0.0, 0.0)

    inner = max(NEAR_INNER, 1.25 * max(kernel.ladder))
    if inner >= NEAR_OUTER:
        raise GridError(f"Grid N={grid.N} is too coarse for the PV cutoff ladder")

    padded = _Padded(grid, max(2 * grid.N, FAR_GRID_MIN))
    fine = padded.fine
    z = displacements(fine)
    r = np.sqrt(np.sum(z ** 2, axis=0))
    with np.errstate(divide='ignore', invalid='ignore'):
        near = np.where(r > 0, near_weight(r, inner) / r ** (grid.d + 2), 0.0) * z
    smooth = periodized_kernel(fine, kernel.shells) - near
    far = fine.cell_volume * sum(
        float(np.sum(smooth[i] * padded.values(padded.place(c)))) for i, c in enumerate(coeffs)
    )

    def integrand(radius):
        return near_weight(radius, inner) * moment(radius) / radius ** 2

    cuts = sorted(float(eps) for eps in kernel.ladder)
    breaks = cuts + [inner, NEAR_OUTER]
    pieces = [_segment_integral(integrand, a, b, moment.k_max) for a, b in zip(breaks, breaks[1:])]
    ladder = []
    for eps in kernel.ladder:
        start = cuts.index(float(eps))
        ladder.append((float(eps), float(kernel.c * (far + sum(pieces[start:])))))

    value, order, residual = richardson_limit(ladder)
    scale = max(abs(value), 1e-8)
    if residual > 1e-2 * scale:
        logger.warning("PV extrapolation residual %.3e is large against |T| = %.3e", residual, abs(value))
    return TrilinearResult(
        value=float(value),
        method=PV_PHYSICAL,
        ladder=ladder,
        order=order,
        residual=float(residual),
        far_term=float(kernel.c * far),
    )
