"""
Scalar and velocity fields on a Grid, with the fixed Fourier convention
f^(xi) = integral of exp(-2 i pi xi.x) f(x) dx.

Torus coefficients are the exact Fourier coefficients of the trigonometric
interpolant; box coefficients are the Riemann sum of the continuum transform
on the dual lattice xi = k / (2R).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft

from mixlog_lab.conf import mixlog_setting

from .grid import Grid

logger = logging.getLogger(__name__)


def _box_phase(grid):
    # (-1)^(k_1 + ... + k_d) from the x = -R origin shift
    parity = sum(grid.modes) % 2
    return np.where(parity == 0, 1.0, -1.0)


def _forward_scale(grid):
    if grid.is_torus:
        return 1.0 / grid.size
    return grid.cell_volume * _box_phase(grid)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients of a real field, FFT ordering along every axis."""

    grid: Grid
    coeffs: np.ndarray

    @property
    def dual_cell(self):
        """Measure attached to one frequency sample."""
        return self.grid.dual_spacing ** self.grid.d

    @property
    def power(self):
        return np.abs(self.coeffs) ** 2

    def l2_squared(self):
        """Parseval: sum of |c|^2 times the dual cell measure."""
        return float(self.dual_cell * np.sum(self.power))

    def zero_mode(self):
        return complex(self.coeffs[self.grid.zero_mode])

    def hermitian_defect(self):
        """max |c(-k) - conj c(k)| relative to max |c|."""
        reflected = self.coeffs
        for axis in range(self.grid.d):
            reflected = np.roll(np.flip(reflected, axis=axis), 1, axis=axis)
        scale = np.max(np.abs(self.coeffs))
        if scale == 0:
            return 0.0
        return float(np.max(np.abs(reflected - np.conj(self.coeffs))) / scale)

    def scaled(self, multiplier):
        return Spectrum(self.grid, self.coeffs * multiplier)


class ScalarField:
    """Real samples on a grid; the spectrum is computed once on demand."""

    def __init__(self, grid, values):
        values = np.array(values, dtype=float)
        if values.size != grid.size:
            raise ValueError(f"Expected {grid.size} samples for {grid.describe()}, got {values.size}")
        values = values.reshape(grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("Field values must be finite")
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, func(*grid.coords))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    @cached_property
    def spectrum(self):
        return forward_transform(self)

    def with_values(self, values):
        return ScalarField(self.grid, values)

    def mean(self):
        """Average over the torus, or integral over the box."""
        if self.grid.is_torus:
            return float(np.mean(self.values))
        return float(self.grid.cell_volume * np.sum(self.values))

    def l2_squared(self):
        return float(self.grid.cell_volume * np.sum(self.values ** 2))

    def centered(self):
        """Torus field with its mean removed."""
        return self.with_values(self.values - np.mean(self.values))

    def __add__(self, other):
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        return self.with_values(self.values - other.values)

    def __neg__(self):
        return self.with_values(-self.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return f"ScalarField({self.grid.describe()})"


@dataclass(frozen=True, eq=False)
class VelocityField:
    """d components sharing one grid."""

    grid: Grid
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != self.grid.d:
            raise ValueError(f"Velocity needs {self.grid.d} components, got {len(comps)}")
        if any(c.grid != self.grid for c in comps):
            raise ValueError("Velocity components must share the velocity grid")
        object.__setattr__(self, 'components', comps)

    @classmethod
    def from_arrays(cls, grid, *arrays):
        return cls(grid, tuple(ScalarField(grid, a) for a in arrays))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, tuple(ScalarField.zeros(grid) for _ in range(grid.d)))

    def __getitem__(self, i):
        return self.components[i]

    def __neg__(self):
        return VelocityField(self.grid, tuple(-c for c in self.components))

    def __mul__(self, scalar):
        return VelocityField(self.grid, tuple(c * scalar for c in self.components))

    __rmul__ = __mul__

    def max_speed(self):
        speed2 = sum(c.values ** 2 for c in self.components)
        return float(np.sqrt(np.max(speed2)))

    def divergence_defect(self):
        """max |k.u^(k)| / max |u^(k)| with the differentiation wavenumbers."""
        kd = self.grid.derivative_frequencies
        div = sum(k * c.spectrum.coeffs for k, c in zip(kd, self.components))
        scale = max(np.max(np.abs(c.spectrum.coeffs)) for c in self.components)
        if scale == 0:
            return 0.0
        # integer-mode units so the threshold does not depend on the box size
        return float(np.max(np.abs(div)) / (scale * self.grid.dual_spacing))

    def is_solenoidal(self, tol=1e-10):
        return self.divergence_defect() <= tol


def forward_transform(field):
    """Spectrum of a ScalarField."""
    grid = field.grid
    coeffs = fft.fftn(field.values) * _forward_scale(grid)
    return Spectrum(grid, coeffs)


def inverse_transform(spectrum):
    """ScalarField from a (Hermitian) spectrum; the imaginary residue is dropped."""
    grid = spectrum.grid
    values = fft.ifftn(spectrum.coeffs / _forward_scale(grid)).real
    return ScalarField(grid, values)


def project_divergence_free(v):
    """Leray projection u^ <- u^ - (k.u^) k / |k|^2, k = 0 untouched."""
    grid = v.grid
    kd = grid.derivative_frequencies
    k2 = sum(k ** 2 for k in kd)
    safe = np.where(k2 == 0, 1.0, k2)
    coeffs = [c.spectrum.coeffs for c in v.components]
    kdotu = sum(k * c for k, c in zip(kd, coeffs))
    projected = []
    for k, c in zip(kd, coeffs):
        new = c - np.where(k2 == 0, 0.0, kdotu * k / safe)
        projected.append(inverse_transform(Spectrum(grid, new)))
    return VelocityField(grid, tuple(projected))


def lp_norm(field, p):
    """Grid quadrature L^p norm; p = inf gives max |f|."""
    values = field.values if isinstance(field, ScalarField) else np.asarray(field)
    if p == np.inf or p == 'inf':
        return float(np.max(np.abs(values)))
    p = float(p)
    if p < 1:
        raise ValueError(f"L^p norms need p >= 1, got {p}")
    cell = field.grid.cell_volume if isinstance(field, ScalarField) else 1.0
    return float((cell * np.sum(np.abs(values) ** p)) ** (1.0 / p))


def gradient(field):
    """Spectral gradient (multiply by 2 pi i xi), one ScalarField per axis."""
    spec = field.spectrum
    return tuple(
        inverse_transform(spec.scaled(2j * np.pi * k))
        for k in field.grid.derivative_frequencies
    )


def jacobian_magnitude(v):
    """Pointwise Frobenius norm of the Jacobian of v."""
    total = np.zeros(v.grid.shape)
    for comp in v.components:
        for partial in gradient(comp):
            total += partial.values ** 2
    return ScalarField(v.grid, np.sqrt(total))


def sobolev_w1p_seminorm(v, p):
    """||grad v||_{L^p} with the Frobenius norm taken pointwise."""
    return lp_norm(jacobian_magnitude(v), p)


def boundary_mass_fraction(field, strip=None):
    """Share of the L^2 mass in the outer strip of a box grid."""
    grid = field.grid
    if grid.is_torus:
        return 0.0
    strip = strip or max(1, grid.N // 32)
    outer = np.ones(grid.shape, dtype=bool)
    core = tuple(slice(strip, grid.N - strip) for _ in range(grid.d))
    outer[core] = False
    total = np.sum(field.values ** 2)
    if total == 0:
        return 0.0
    return float(np.sum(field.values[outer] ** 2) / total)


def check_boundary_mass(field):
    """Log a warning when a box field is not negligible near the boundary."""
    fraction = boundary_mass_fraction(field)
    tol = mixlog_setting('BOUNDARY_MASS_TOL')
    if fraction > tol:
        logger.warning(
            "Field on %s carries %.3e of its L2 mass near the boundary (tolerance %.1e)",
            field.grid.describe(), fraction, tol,
        )
    return fraction
