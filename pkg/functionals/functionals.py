"""
Spectral mixing functionals.

On the torus every sum runs over k != 0. On the box the sums run over the
dual lattice without xi = 0, and V and W add the lattice origin correction
so the Riemann sum tracks the continuum integral.
"""
from dataclasses import dataclass, field

import numpy as np

from mixlog_lab.conf import mixlog_setting

from .lattice import log_origin_correction, log_squared_origin_correction

V = 'V'
W = 'W'
HS = 'Hs'
L2 = 'L2'


@dataclass(frozen=True)
class FunctionalValue:
    kind: str
    value: float
    grid: str
    s: float | None = None
    metadata: dict = field(default_factory=dict)

    def as_dict(self):
        return {'kind': self.kind, 'value': self.value, 'grid': self.grid, 's': self.s, **self.metadata}


def punctured_spectrum(f):
    """
    (log|xi|, |f^|^2 * dual cell) on the nonzero frequencies, flattened.
    """
    spec = f.spectrum
    mag = f.grid.frequency_magnitude
    mask = mag > 0
    return np.log(mag[mask]), spec.power[mask] * spec.dual_cell


def punctured_l2_squared(f):
    """||f||^2 without the zero mode (||f - mean||^2 on the torus)."""
    _, mass = punctured_spectrum(f)
    return float(np.sum(mass))


def v_functional(f, lattice_correction=True):
    """sum over xi != 0 of log|xi| |f^(xi)|^2."""
    logs, mass = punctured_spectrum(f)
    value = float(np.sum(logs * mass))
    if not f.grid.is_torus and lattice_correction:
        value += log_origin_correction(f.spectrum.power, f.grid.dual_spacing)
    return value


def w_functional(f, lattice_correction=True):
    """sum over xi != 0 of (log|xi|)^2 |f^(xi)|^2; never negative."""
    logs, mass = punctured_spectrum(f)
    value = float(np.sum(logs ** 2 * mass))
    if not f.grid.is_torus and lattice_correction:
        value += log_squared_origin_correction(f.spectrum.power, f.grid.dual_spacing)
    return max(value, 0.0)


def hs_norm(f, s):
    """Homogeneous H^s norm; on the box xi = 0 only counts when s == 0."""
    s = float(s)
    logs, mass = punctured_spectrum(f)
    total = float(np.sum(np.exp(2 * s * logs) * mass))
    if s == 0 and not f.grid.is_torus:
        spec = f.spectrum
        total += float(spec.power[f.grid.zero_mode] * spec.dual_cell)
    return float(np.sqrt(total))


def functional_mixing_scale(f, s=1.0):
    """||f||_{H^-s}."""
    return hs_norm(f, -abs(s))


def small_s_expansion_residual(f, s):
    """
    |‖f‖²_{H^s} - (‖f‖² + 2sV + 2s²W)| from the combined weight
    expm1(2sL) - 2sL - 2s²L² over the punctured spectrum.
    """
    s = float(s)
    logs, mass = punctured_spectrum(f)
    x = 2 * s * logs
    weight = np.expm1(x) - x - 0.5 * x ** 2
    return float(abs(np.sum(weight * mass)))


@dataclass(frozen=True)
class JensenCheck:
    s: float
    ratio: float
    bound: float
    holds: bool
    single_shell: bool
    equality: bool
    slack: float


def is_single_shell(f, rtol=1e-12):
    """True when the punctured spectrum sits on one sphere |xi| = r."""
    logs, mass = punctured_spectrum(f)
    total = np.sum(mass)
    if total == 0:
        return False
    active = mass > rtol * np.max(mass)
    return bool(np.ptp(logs[active]) <= 1e-12)


def jensen_bound(f, s):
    """
    Both sides of ‖f‖_{H^-s}/‖f‖ >= exp(-s V/‖f‖²), norms over the
    punctured spectrum.
    """
    s = float(s)
    norm2 = punctured_l2_squared(f)
    if norm2 == 0:
        raise ValueError("Jensen bound needs a field with nonzero oscillating part")
    ratio = hs_norm(f, -s) / np.sqrt(norm2)
    bound = float(np.exp(-s * v_functional(f, lattice_correction=False) / norm2))
    slack = mixlog_setting('JENSEN_SLACK')
    shell = is_single_shell(f)
    return JensenCheck(
        s=s,
        ratio=ratio,
        bound=bound,
        holds=ratio >= bound * (1 - 1e-12),
        single_shell=shell,
        equality=abs(ratio - bound) <= slack * bound,
        slack=ratio - bound,
    )


@dataclass(frozen=True)
class HighFrequencyMass:
    threshold: float
    mass: float
    bound: float

    @property
    def holds(self):
        return self.mass <= self.bound * (1 + 1e-12)


def high_frequency_mass(f, B):
    """Spectral mass above |xi| = exp(B V/‖f‖²) against the bound ‖f‖²/B."""
    if not B > 1:
        raise ValueError(f"B must exceed 1, got {B}")
    norm2 = punctured_l2_squared(f)
    v = v_functional(f, lattice_correction=False)
    if v <= 0:
        raise ValueError("High-frequency bound needs V(f) > 0")
    log_threshold = B * v / norm2
    logs, mass = punctured_spectrum(f)
    return HighFrequencyMass(
        threshold=float(np.exp(log_threshold)),
        mass=float(np.sum(mass[logs > log_threshold])),
        bound=norm2 / B,
    )


def functional_value(kind, f, s=None):
    """Evaluate one functional and wrap it with its provenance."""
    metadata = {'form': 'spectral'}
    if kind == V:
        value = v_functional(f)
    elif kind == W:
        value = w_functional(f)
    elif kind == HS:
        value = hs_norm(f, s)
    elif kind == L2:
        value = float(np.sqrt(f.l2_squared()))
    else:
        raise ValueError(f"Unknown functional {kind!r}")
    if kind in (V, W) and not f.grid.is_torus:
        metadata['lattice_correction'] = True
    return FunctionalValue(kind=kind, value=value, grid=f.grid.describe(), s=s, metadata=metadata)
