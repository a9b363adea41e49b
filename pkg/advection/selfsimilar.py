"""
Self-similar trajectories theta(t, x) = theta_base(t - n, m^n x), n = floor(t).
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from mixlog_lab.conf import mixlog_setting
from spectral.fields import Spectrum, inverse_transform
from spectral.grid import GridError

from .solver import solve_at


class BandOverflow(ValueError):
    """Raised when a rescaled spectrum would not fit below the Nyquist mode."""

    def __init__(self, message, max_admissible):
        self.max_admissible = max_admissible
        super().__init__(f"{message} (max admissible: {max_admissible})")


def active_band(f):
    """Largest |k_i| carrying a coefficient above the activity threshold."""
    coeffs = np.abs(f.spectrum.coeffs)
    peak = np.max(coeffs)
    if peak == 0:
        return 0
    active = coeffs > mixlog_setting('ACTIVE_MODE_RTOL') * peak
    return int(max(np.max(np.abs(k[active])) for k in f.grid.modes))


def max_factor(band, N):
    """Largest m with m * band strictly below N/2."""
    if band == 0:
        return np.inf
    return (N // 2 - 1) // band


def rescale_field(f, m):
    """g(x) = f(m x): g^(m k) = f^(k), every other mode zero."""
    grid = f.grid
    if not grid.is_torus:
        raise GridError("Rescaling is defined on the torus")
    m = int(m)
    if m < 1:
        raise ValueError(f"Rescaling factor must be a positive integer, got {m}")
    if m == 1:
        return f
    band = active_band(f)
    if band * m >= grid.N // 2:
        raise BandOverflow(
            f"Rescaling by {m} pushes mode {band} to {band * m} >= N/2 = {grid.N // 2}",
            max_factor(band, grid.N),
        )
    coeffs = f.spectrum.coeffs
    out = np.zeros_like(coeffs)
    targets = tuple((m * k) % grid.N for k in grid.modes)
    active = np.abs(grid.modes[0]) * m < grid.N // 2
    for k in grid.modes[1:]:
        active &= np.abs(k) * m < grid.N // 2
    out[tuple(t[active] for t in targets)] = coeffs[active]
    return inverse_transform(Spectrum(grid, out))


def frozen_base(theta0):
    """Base evolution that keeps theta0 for the whole period."""
    return lambda s: theta0


def trajectory_base(theta0, flow, dt=None):
    """Base evolution given by solving the transport equation over one period."""
    @lru_cache(maxsize=128)
    def base(s):
        return solve_at(theta0, flow, s, dt=dt)

    return lambda s: base(float(s))


@dataclass(frozen=True, eq=False)
class SelfSimilarSchedule:
    m: int
    base: Callable = field(repr=False)
    periods: int | None = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"1/lambda must be an integer >= 2, got {self.m}")
        object.__setattr__(self, 'm', int(self.m))

    @property
    def lam(self):
        return 1.0 / self.m

    @property
    def initial(self):
        return self.base(0.0)

    @property
    def base_mean(self):
        return self.initial.mean()

    def max_periods(self):
        """Largest n with m^n times the active band of theta_base(0) below N/2."""
        theta0 = self.initial
        band = active_band(theta0)
        if band == 0:
            return None
        n = 0
        while band * self.m ** (n + 1) < theta0.grid.N // 2:
            n += 1
        return n


def self_similar_trajectory(schedule, t):
    if t < 0:
        raise ValueError("Self-similar trajectories start at t = 0")
    n = int(np.floor(t))
    if schedule.periods is not None and n > schedule.periods:
        raise ValueError(f"t = {t} is past the {schedule.periods} scheduled periods")
    base = schedule.base(t - n)
    try:
        return rescale_field(base, schedule.m ** n)
    except BandOverflow as exc:
        limit = schedule.max_periods()
        raise BandOverflow(f"Period n = {n} does not fit on N={base.grid.N}", limit) from exc
