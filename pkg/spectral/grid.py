"""
Discretization descriptors for the torus T^d (period 1) and the box [-R, R]^d.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

TORUS = 'torus'
BOX = 'box'
KINDS = (TORUS, BOX)


class GridError(ValueError):
    """Raised for grid parameters outside the supported range."""


@dataclass(frozen=True)
class Grid:
    """
    Uniform grid with N points per axis.

    Axis 0 carries x1, axis 1 carries x2 (``indexing='ij'``). On the torus the
    sample points are j/N; on the box they are -R + j*h with h = 2R/N.
    """

    d: int
    kind: str
    N: int
    R: float | None = None

    def __post_init__(self):
        if self.d not in (1, 2):
            raise GridError(f"Dimension must be 1 or 2, got {self.d}")
        if self.kind not in KINDS:
            raise GridError(f"Unknown grid kind {self.kind!r}; expected one of {KINDS}")
        if self.N < 4 or self.N % 2 or self.N & (self.N - 1):
            raise GridError(f"N must be a power of two >= 4, got {self.N}")
        if self.kind == BOX:
            if self.R is None or not self.R > 0:
                raise GridError(f"Box grids need R > 0, got {self.R}")
            object.__setattr__(self, 'R', float(self.R))
        elif self.R not in (None, 0, 0.0):
            raise GridError("Torus grids have period 1 and take no R")
        else:
            object.__setattr__(self, 'R', None)

    @property
    def is_torus(self):
        return self.kind == TORUS

    @property
    def length(self):
        return 1.0 if self.is_torus else 2.0 * self.R

    @property
    def h(self):
        return self.length / self.N

    @property
    def cell_volume(self):
        return self.h ** self.d

    @property
    def dual_spacing(self):
        """Spacing of the frequency lattice: 1 on the torus, 1/(2R) on the box."""
        return 1.0 / self.length

    @property
    def shape(self):
        return (self.N,) * self.d

    @property
    def size(self):
        return self.N ** self.d

    @cached_property
    def axis(self):
        start = 0.0 if self.is_torus else -self.R
        return start + self.h * np.arange(self.N)

    @cached_property
    def coords(self):
        """Tuple of d coordinate arrays shaped like the grid."""
        return tuple(np.meshgrid(*([self.axis] * self.d), indexing='ij'))

    @cached_property
    def mode_axis(self):
        """Integer mode indices along one axis, FFT ordering, -N/2 .. N/2-1."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).round().astype(np.int64)

    @cached_property
    def modes(self):
        """Tuple of d integer mode-index arrays."""
        return tuple(np.meshgrid(*([self.mode_axis] * self.d), indexing='ij'))

    @cached_property
    def frequencies(self):
        """Frequencies xi = k * dual_spacing (equal to k on the torus)."""
        return tuple(k * self.dual_spacing for k in self.modes)

    @cached_property
    def derivative_frequencies(self):
        """Frequencies used for differentiation; the Nyquist plane is zeroed."""
        nyquist = self.N // 2
        out = []
        for k in self.modes:
            xi = k * self.dual_spacing
            xi[np.abs(k) == nyquist] = 0.0
            out.append(xi)
        return tuple(out)

    @cached_property
    def frequency_magnitude(self):
        return np.sqrt(sum(xi ** 2 for xi in self.frequencies))

    @cached_property
    def zero_mode(self):
        return (0,) * self.d

    def describe(self):
        r = 0 if self.R is None else self.R
        return f"d={self.d} kind={self.kind} N={self.N} R={r:g}"


def make_grid(d, kind, N, R=None):
    """Build and validate a Grid; R is required iff kind is 'box'."""
    if kind == TORUS and R not in (None, 0, 0.0):
        raise GridError("R is only accepted for box grids")
    return Grid(d=int(d), kind=kind, N=int(N), R=R)
