"""
Kernels of the commutator form.

K(h) = c_d (h ⊗ h - |h|^2 I / d) / |h|^(d+2) is the matrix kernel; the PV
quadrature itself only needs the vector kernel h / |h|^(d+2), periodized
over the images of the unit torus.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import zeta

from functionals.lattice import catalan
from mixlog_lab.conf import mixlog_setting
from spectral.constants import sphere_area


def commutator_constant(d):
    """c_d = d / sigma_{d-1}."""
    return d / sphere_area(d)


def kernel_matrix(h, c=None):
    h = np.asarray(h, dtype=float)
    d = h.shape[-1]
    r2 = float(np.dot(h, h))
    if r2 == 0:
        raise ValueError("The commutator kernel is singular at h = 0")
    c = commutator_constant(d) if c is None else c
    return c * (np.outer(h, h) - r2 * np.eye(d) / d) / r2 ** (1 + d / 2)


@dataclass(frozen=True)
class CommutatorKernel:
    """
    Cutoff data for the PV quadrature on one torus grid. The ladder is
    measured in cells of the displacement grid refined `refine` times.
    """

    d: int
    c: float
    ladder: tuple
    outer_radius: float = 0.5
    shells: int = 16

    @classmethod
    def for_grid(cls, grid, base_cells=None, levels=None, shells=None, refine=None):
        base_cells = base_cells or mixlog_setting('PV_LADDER_BASE_CELLS')
        levels = levels or mixlog_setting('PV_LADDER_LEVELS')
        shells = shells if shells is not None else mixlog_setting('PV_IMAGE_SHELLS')
        refine = refine or mixlog_setting('PV_LADDER_REFINE')
        ladder = tuple(base_cells * grid.h / refine * 2.0 ** -j for j in range(levels))
        return cls(d=grid.d, c=commutator_constant(grid.d), ladder=ladder, shells=int(shells))


def lattice_zeta_tail(d, shells):
    """Sum of |n|^-(d+2) over the integer lattice outside the box |n_i| <= shells."""
    if d == 1:
        total = 2 * float(zeta(3))
    elif d == 2:
        total = 4 * float(zeta(2)) * catalan()
    else:
        raise ValueError(f"Lattice sums are tabulated for d in (1, 2), got {d}")
    n = np.arange(-shells, shells + 1, dtype=float)
    box = np.meshgrid(*([n] * d), indexing='ij')
    r2 = sum(b ** 2 for b in box)
    r2 = r2[r2 > 0]
    return total - float(np.sum(r2 ** (-(d + 2) / 2)))


def displacements(grid):
    """Nearest-image displacements j h wrapped to [-1/2, 1/2), FFT ordering."""
    axis = grid.mode_axis * grid.h
    return np.stack(np.meshgrid(*([axis] * grid.d), indexing='ij'))


@lru_cache(maxsize=8)
def periodized_kernel(grid, shells):
    """
    sum over n in Z^d of (z + n)/|z + n|^(d+2) at every grid displacement z,
    images with |n_i| <= shells summed directly and the rest taken from the
    first-order expansion -(2/d) T z; zero at z = 0.
    """
    d = grid.d
    z = displacements(grid)
    total = np.zeros_like(z)
    n = np.arange(-shells, shells + 1)
    for image in np.stack(np.meshgrid(*([n] * d), indexing='ij')).reshape(d, -1).T:
        shifted = z + image.reshape((d,) + (1,) * d)
        r2 = np.sum(shifted ** 2, axis=0)
        with np.errstate(divide='ignore', invalid='ignore'):
            term = shifted / r2 ** (1 + d / 2)
        total += np.where(r2 > 0, term, 0.0)
    total -= (2.0 / d) * lattice_zeta_tail(d, shells) * z
    total[(slice(None),) + grid.zero_mode] = 0.0
    total.setflags(write=False)
    return total
