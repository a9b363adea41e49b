"""
Velocity-field library. Every generated field is solenoidal on its grid.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from spectral.fields import (
    ScalarField, Spectrum, VelocityField, gradient, inverse_transform, project_divergence_free,
    sobolev_w1p_seminorm,
)
from spectral.grid import GridError

TWO_PI = 2 * np.pi

STEADY = 'steady'
TIME_PERIODIC = 'time-periodic'
PIECEWISE = 'piecewise'
SELF_SIMILAR = 'self-similar'


@dataclass(frozen=True, eq=False)
class FlowSpec:
    """
    A named velocity field u(t). Piecewise-steady flows list the times where
    u jumps through `switch_every`; the solver never steps across them.
    """

    name: str
    kind: str
    grid: object
    velocity_at: Callable
    params: dict = field(default_factory=dict)
    switch_every: float | None = None
    switch_offset: float = 0.0
    cfl: float | None = None
    dealias: bool = True

    def velocity(self, t):
        return self.velocity_at(float(t))

    def switch_times(self, start, stop):
        """Jump times strictly inside (start, stop)."""
        if not self.switch_every:
            return []
        period = self.switch_every
        first = np.floor((start - self.switch_offset) / period) + 1
        times = []
        t = self.switch_offset + first * period
        while t < stop - 1e-12:
            if t > start + 1e-12:
                times.append(float(t))
            first += 1
            t = self.switch_offset + first * period
        return times

    def describe(self):
        return {'name': self.name, 'kind': self.kind, 'params': dict(self.params)}


def _require_2d_torus(grid, name):
    if not grid.is_torus:
        raise GridError(f"Flow {name!r} is defined on the torus")
    if grid.d != 2:
        raise GridError(f"Flow {name!r} needs d=2")


def _steady(name, grid, u, params):
    return FlowSpec(name=name, kind=STEADY, grid=grid, velocity_at=lambda t: u, params=params)


def shear_velocity(grid, amplitude=1.0, axis=0):
    """amplitude * sin(2 pi x_other) along `axis`."""
    x, y = grid.coords
    wave = amplitude * np.sin(TWO_PI * (y if axis == 0 else x))
    zero = np.zeros(grid.shape)
    return VelocityField.from_arrays(grid, *((wave, zero) if axis == 0 else (zero, wave)))


def shear(grid, amplitude=1.0):
    _require_2d_torus(grid, 'shear')
    return _steady('shear', grid, shear_velocity(grid, amplitude), {'amplitude': amplitude})


def alternating(grid, amplitude=1.0, period=1.0):
    """Horizontal shear on the first half of each period, vertical on the second."""
    _require_2d_torus(grid, 'alternating')
    if not period > 0:
        raise ValueError("period must be positive")
    horizontal = shear_velocity(grid, amplitude, axis=0)
    vertical = shear_velocity(grid, amplitude, axis=1)
    half = 0.5 * period

    def velocity_at(t):
        return horizontal if (t % period) < half else vertical

    return FlowSpec(
        name='alternating', kind=TIME_PERIODIC, grid=grid, velocity_at=velocity_at,
        params={'amplitude': amplitude, 'period': period}, switch_every=half,
    )


def cellular(grid, amplitude=1.0):
    """u = perp-gradient of amplitude * sin(2 pi x1) sin(2 pi x2) / (2 pi)."""
    _require_2d_torus(grid, 'cellular')
    x, y = grid.coords
    psi = ScalarField(grid, amplitude * np.sin(TWO_PI * x) * np.sin(TWO_PI * y) / TWO_PI)
    dpsi_dx, dpsi_dy = gradient(psi)
    u = VelocityField(grid, (-dpsi_dy, dpsi_dx))
    return _steady('cellular', grid, u, {'amplitude': amplitude})


def translation(grid, velocity=None):
    """Constant velocity; the only solenoidal field in d=1."""
    if not grid.is_torus:
        raise GridError("Flow 'translation' is defined on the torus")
    velocity = tuple(float(c) for c in (velocity or (1.0,) + (0.0,) * (grid.d - 1)))
    if len(velocity) != grid.d:
        raise ValueError(f"Translation velocity {velocity} does not match d={grid.d}")
    u = VelocityField.from_arrays(grid, *(np.full(grid.shape, c) for c in velocity))
    return _steady('translation', grid, u, {'velocity': list(velocity)})


def random_solenoidal(grid, seed, kmax=4, p=2.0, target=1.0):
    """Band-limited solenoidal field with ||grad u||_p = target."""
    rng = np.random.default_rng(seed)
    mask = np.all([np.abs(k) <= kmax for k in grid.modes], axis=0)
    mask[grid.zero_mode] = False
    comps = []
    for _ in range(grid.d):
        spec = ScalarField(grid, rng.standard_normal(grid.shape)).spectrum
        comps.append(inverse_transform(Spectrum(grid, spec.coeffs * mask)))
    u = project_divergence_free(VelocityField(grid, tuple(comps)))
    return u * (target / sobolev_w1p_seminorm(u, p))


def random_in_time(grid, seed, kmax=4, p=2.0, target=1.0, interval=0.25):
    """
    A fresh random solenoidal field on every interval [n tau, (n+1) tau),
    drawn from the seed sequence (seed, n).
    """
    _require_2d_torus(grid, 'random')
    if seed is None:
        raise ValueError("Random flows need a seed")
    if not interval > 0:
        raise ValueError("interval must be positive")

    @lru_cache(maxsize=64)
    def field_for(n):
        return random_solenoidal(grid, [int(seed), n], kmax=kmax, p=p, target=target)

    def velocity_at(t):
        return field_for(int(np.floor(t / interval + 1e-12)))

    return FlowSpec(
        name='random', kind=PIECEWISE, grid=grid, velocity_at=velocity_at,
        params={'seed': seed, 'kmax': kmax, 'p': p, 'target': target, 'interval': interval},
        switch_every=interval,
    )


def time_reversed(flow, horizon):
    """u_rev(t) = -u(horizon - t): undoes `flow` over [0, horizon]."""
    def velocity_at(t):
        return -flow.velocity(horizon - t)

    offset = 0.0
    if flow.switch_every:
        offset = (horizon - flow.switch_offset) % flow.switch_every
    return FlowSpec(
        name=f'{flow.name}-reversed', kind=flow.kind, grid=flow.grid, velocity_at=velocity_at,
        params={**flow.params, 'reversed_from': horizon}, switch_every=flow.switch_every,
        switch_offset=offset, cfl=flow.cfl, dealias=flow.dealias,
    )


FLOWS = {
    'shear': shear,
    'alternating': alternating,
    'cellular': cellular,
    'random': random_in_time,
    'translation': translation,
}


def velocity_library(name, grid, **params):
    try:
        builder = FLOWS[name]
    except KeyError:
        raise ValueError(f"Unknown flow {name!r}; choose from {sorted(FLOWS)}") from None
    return builder(grid, **params)
