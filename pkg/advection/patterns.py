"""
Named initial scalar fields.
"""
import numpy as np

from spectral.fields import ScalarField, Spectrum, inverse_transform
from spectral.grid import GridError

TWO_PI = 2 * np.pi


def _cell_centres(grid):
    return tuple(x + 0.5 * grid.h for x in grid.coords)


def _require_torus(grid, name):
    if not grid.is_torus:
        raise GridError(f"Pattern {name!r} is defined on the torus")


def cosine(grid, amplitude=2.0, mode=None, mean=0.0):
    """amplitude * cos(2 pi k.x) + mean."""
    mode = tuple(mode or (1,) + (0,) * (grid.d - 1))
    if len(mode) != grid.d:
        raise ValueError(f"Mode {mode} does not match d={grid.d}")
    phase = sum(k * x for k, x in zip(mode, grid.coords))
    return ScalarField(grid, amplitude * np.cos(TWO_PI * phase) + mean)


def stripes(grid, m=1):
    """sign(sin(2 pi m x1)) sampled at cell centres, values +-1."""
    _require_torus(grid, 'stripes')
    x = _cell_centres(grid)[0]
    return ScalarField(grid, np.sign(np.sin(TWO_PI * m * x)))


def checkerboard(grid, m=1):
    """sign(sin(2 pi m x1) sin(2 pi m x2)) at cell centres, values +-1."""
    _require_torus(grid, 'checkerboard')
    if grid.d != 2:
        raise GridError("Checkerboard needs d=2")
    x, y = _cell_centres(grid)
    return ScalarField(grid, np.sign(np.sin(TWO_PI * m * x) * np.sin(TWO_PI * m * y)))


def random_field(grid, seed, kmax=8, mean_zero=True, norm=1.0):
    """Band-limited random field |k_i| <= kmax with L2 norm `norm`."""
    if seed is None:
        raise ValueError("Random patterns need a seed")
    _require_torus(grid, 'random')
    if not 0 < kmax < grid.N // 2:
        raise ValueError(f"kmax must lie in (0, {grid.N // 2}), got {kmax}")
    rng = np.random.default_rng(seed)
    spec = ScalarField(grid, rng.standard_normal(grid.shape)).spectrum
    mask = np.all([np.abs(k) <= kmax for k in grid.modes], axis=0)
    if mean_zero:
        mask[grid.zero_mode] = False
    field = inverse_transform(Spectrum(grid, spec.coeffs * mask))
    scale = np.sqrt(field.l2_squared())
    return field * (norm / scale)


def gaussian(grid, width=1.0):
    """exp(-pi |x|^2 / width^2) on a box grid."""
    if grid.is_torus:
        raise GridError("The Gaussian pattern lives on box grids")
    r2 = sum(x ** 2 for x in grid.coords)
    return ScalarField(grid, np.exp(-np.pi * r2 / width ** 2))


def shell(grid, radius=2):
    """Unit-L2 field whose spectrum sits on the single shell |k| = radius."""
    _require_torus(grid, 'shell')
    r2 = int(radius) ** 2
    k2 = sum(k.astype(np.int64) ** 2 for k in grid.modes)
    on_shell = k2 == r2
    if not np.any(on_shell):
        raise ValueError(f"No lattice points on the shell |k| = {radius}")
    if np.any(np.abs(np.stack(grid.modes))[:, on_shell] >= grid.N // 2):
        raise ValueError(f"Shell |k| = {radius} does not fit on N={grid.N}")
    field = inverse_transform(Spectrum(grid, on_shell.astype(complex)))
    return field * (1.0 / np.sqrt(field.l2_squared()))


PATTERNS = {
    'cosine': cosine,
    'stripes': stripes,
    'checkerboard': checkerboard,
    'random': random_field,
    'gaussian': gaussian,
    'shell': shell,
}


def make_pattern(name, grid, **params):
    try:
        builder = PATTERNS[name]
    except KeyError:
        raise ValueError(f"Unknown pattern {name!r}; choose from {sorted(PATTERNS)}") from None
    return builder(grid, **params)
