"""
Physical-space form of V on the box:

    V(f) = alpha (1/2 ∬_{|x-y|<=1} |f(x)-f(y)|²/|x-y|^d - ∬_{|x-y|>1} f(x)f(y)/|x-y|^d)
           + beta ||f||²

Both double integrals depend on f only through the autocorrelation
A(h) = ∫ f(x) f(x+h) dx, so they reduce to single integrals over h.
"""
import logging

import numpy as np
from scipy import fft

from spectral.fields import check_boundary_mass, gradient
from spectral.grid import GridError

from .functionals import FunctionalValue, V

logger = logging.getLogger(__name__)

SUPERSAMPLE = 32


def autocorrelation(f):
    """A(j h) for j in fftfreq order over 2N per axis, from a zero-padded FFT."""
    grid = f.grid
    shape = tuple(2 * n for n in grid.shape)
    spec = fft.fftn(f.values, s=shape)
    return fft.ifftn(np.abs(spec) ** 2).real * grid.cell_volume


def unit_ball_fraction(offsets, h, supersample=SUPERSAMPLE):
    """
    Fraction of each cell [c - h/2, c + h/2]^d lying in the closed unit ball,
    for cell centres c given as an array of shape (d, ...).
    """
    d = offsets.shape[0]
    r = np.sqrt(np.sum(offsets ** 2, axis=0))
    reach = 0.5 * h * np.sqrt(d)
    fraction = (r + reach <= 1.0).astype(float)
    straddle = np.abs(r - 1.0) < reach
    if not np.any(straddle):
        return fraction
    centres = offsets[:, straddle]
    sub = ((np.arange(supersample) + 0.5) / supersample - 0.5) * h
    sub_grid = np.stack(np.meshgrid(*([sub] * d), indexing='ij')).reshape(d, -1)
    points = centres[:, :, None] + sub_grid[:, None, :]
    inside = np.sum(points ** 2, axis=0) <= 1.0
    fraction[straddle] = inside.mean(axis=1)
    return fraction


def v_physical(f, consts):
    """
    V(f) by quadrature of the physical-space double integral; box grids only.
    The diagonal cell |x - y| < h/2 is replaced by its Taylor term and the
    displacements reach the diameter of the box; both radii go into the
    metadata of the returned FunctionalValue.
    """
    grid = f.grid
    if grid.is_torus:
        raise GridError("The physical-space form of V is only defined on box grids")
    if consts.d != grid.d:
        raise ValueError(f"Constants are for d={consts.d}, field has d={grid.d}")
    check_boundary_mass(f)

    d, h = grid.d, grid.h
    metadata = {
        'form': 'physical',
        'inner_cutoff': 0.5 * h,
        'outer_radius': float(np.sqrt(d) * grid.N * h),
        'supersample': SUPERSAMPLE,
    }
    A = autocorrelation(f)
    norm2 = float(A[(0,) * d])
    if norm2 == 0:
        return FunctionalValue(kind=V, value=0.0, grid=grid.describe(), metadata=metadata)

    idx = np.fft.fftfreq(2 * grid.N, d=1.0 / (2 * grid.N))
    offsets = np.stack(np.meshgrid(*([idx * h] * d), indexing='ij'))
    r = np.sqrt(np.sum(offsets ** 2, axis=0))
    inner = unit_ball_fraction(offsets, h)

    origin = r == 0
    safe_r = np.where(origin, 1.0, r)
    integrand = (inner * (norm2 - A) - (1.0 - inner) * A) / safe_r ** d
    integrand[origin] = 0.0
    total = float(np.sum(integrand)) * h ** d

    # diagonal cell: norm2 - A(x) ~ x^T M x / 2 with M the gradient Gram matrix
    grad2 = sum(g.l2_squared() for g in gradient(f))
    diagonal = grad2 * h ** 2 / (8.0 if d == 1 else 4.0)
    metadata['diagonal_term'] = float(consts.alpha * diagonal)

    value = float(consts.alpha * (total + diagonal) + consts.beta * norm2)
    logger.debug("v_physical on %s: %.12g", grid.describe(), value)
    return FunctionalValue(kind=V, value=value, grid=grid.describe(), metadata=metadata)
