"""
Pseudo-spectral RK4 solver for d theta/dt + u . grad theta = 0 on the torus.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from mixlog_lab.conf import mixlog_setting
from spectral.fields import ScalarField, sobolev_w1p_seminorm
from spectral.grid import GridError

logger = logging.getLogger(__name__)


class CFLViolation(ValueError):
    """Raised when max|u| dt / h exceeds the CFL target."""

    def __init__(self, dt, admissible_dt, courant):
        self.dt = dt
        self.admissible_dt = admissible_dt
        self.courant = courant
        super().__init__(
            f"Time step {dt:.6g} violates the CFL limit (Courant number {courant:.3g}); "
            f"admissible dt <= {admissible_dt:.6g}"
        )


def dealias_mask(grid):
    """2/3 rule: keep |k_i| <= N/3 on every axis."""
    kcut = grid.N / 3.0
    return np.all([np.abs(k) <= kcut for k in grid.modes], axis=0)


def admissible_dt(u, cfl=None):
    cfl = mixlog_setting('CFL') if cfl is None else cfl
    speed = u.max_speed()
    if speed == 0:
        return np.inf
    return cfl * u.grid.h / speed


class _Transport:
    """Right-hand side -P(u . grad theta) on raw FFT coefficients."""

    def __init__(self, u, dealias=True):
        grid = u.grid
        self.u = [c.values for c in u.components]
        self.ik = [2j * np.pi * k for k in grid.derivative_frequencies]
        self.mask = dealias_mask(grid) if dealias else None

    def __call__(self, theta_hat):
        advection = np.zeros(theta_hat.shape)
        for u_i, ik in zip(self.u, self.ik):
            advection += u_i * fft.ifftn(ik * theta_hat).real
        out = -fft.fftn(advection)
        if self.mask is not None:
            out *= self.mask
        return out

    def rk4(self, theta_hat, dt):
        k1 = self(theta_hat)
        k2 = self(theta_hat + 0.5 * dt * k1)
        k3 = self(theta_hat + 0.5 * dt * k2)
        k4 = self(theta_hat + dt * k3)
        return theta_hat + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _check_grids(theta, u):
    if not theta.grid.is_torus:
        raise GridError("The transport solver runs on torus grids")
    if theta.grid != u.grid:
        raise GridError("Scalar and velocity must share one grid")


def _check_cfl(u, dt, cfl):
    limit = admissible_dt(u, cfl)
    if dt > limit * (1 + 1e-12):
        raise CFLViolation(dt, limit, u.max_speed() * dt / u.grid.h)


def step(theta, u, dt, cfl=None, dealias=True):
    """One classical RK4 step of the advective form."""
    _check_grids(theta, u)
    _check_cfl(u, dt, cfl)
    rhs = _Transport(u, dealias)
    theta_hat = rhs.rk4(fft.fftn(theta.values), dt)
    return ScalarField(theta.grid, fft.ifftn(theta_hat).real)


@dataclass
class Trajectory:
    """Snapshots at strictly increasing times on one grid."""

    flow: object
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    cum_grad: list = field(default_factory=list)
    p: float = 2.0

    def append(self, t, theta, cum_grad):
        if self.times and t <= self.times[-1]:
            raise ValueError(f"Snapshot time {t} does not increase past {self.times[-1]}")
        if self.snapshots and theta.grid != self.snapshots[0].grid:
            raise GridError("All snapshots must share one grid")
        self.times.append(float(t))
        self.snapshots.append(theta)
        self.cum_grad.append(float(cum_grad))

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return iter(zip(self.times, self.snapshots))

    @property
    def grid(self):
        return self.snapshots[0].grid

    @property
    def initial(self):
        return self.snapshots[0]

    @property
    def final(self):
        return self.snapshots[-1]


def sample_times(horizon, sample_dt):
    """Multiples of sample_dt in [0, horizon], with the horizon itself last."""
    if horizon < 0:
        raise ValueError("Horizon must be non-negative")
    if horizon == 0:
        return [0.0]
    if not sample_dt > 0:
        raise ValueError("sample_dt must be positive")
    count = int(np.floor(horizon / sample_dt + 1e-9))
    times = [j * sample_dt for j in range(count + 1)]
    if horizon - times[-1] > 1e-9 * max(1.0, horizon):
        times.append(float(horizon))
    else:
        times[-1] = float(horizon)
    return times


def _merge_events(samples, switches, sample_set):
    """Sorted event times with near-duplicates collapsed onto the sample time."""
    merged = []
    for t in sorted(set(samples) | set(switches)):
        if merged and t - merged[-1] < 1e-10:
            if t in sample_set:
                merged[-1] = t
            continue
        merged.append(t)
    return merged


def run(theta0, flow, horizon, sample_dt, dt=None, p=2.0):
    """
    Integrate to `horizon`, keeping snapshots at the sample times. Steps never
    cross a sample or a flow switch time; inside each such interval the
    velocity is frozen at the interval midpoint and the step count is the
    smallest one meeting the CFL target (and `dt`, when given).
    """
    grid = theta0.grid
    if not grid.is_torus:
        raise GridError("The transport solver runs on torus grids")
    if flow.grid != grid:
        raise GridError("Initial field and flow must share one grid")
    samples = sample_times(horizon, sample_dt)
    sample_set = set(samples)
    events = _merge_events(samples, flow.switch_times(0.0, horizon), sample_set)

    trajectory = Trajectory(flow=flow, p=p)
    trajectory.append(0.0, theta0, 0.0)
    theta_hat = fft.fftn(theta0.values)
    cum_grad = 0.0
    cfl = flow.cfl

    for a, b in zip(events[:-1], events[1:]):
        span = b - a
        u = flow.velocity(0.5 * (a + b))
        limit = min(admissible_dt(u, cfl), dt or np.inf)
        n_steps = max(1, int(np.ceil(span / limit - 1e-12)))
        h_step = span / n_steps
        rhs = _Transport(u, flow.dealias)
        for _ in range(n_steps):
            theta_hat = rhs.rk4(theta_hat, h_step)
        # piecewise-constant in time on [a, b]: trapezoid equals the exact integral
        cum_grad += sobolev_w1p_seminorm(u, p) * span
        if b in sample_set:
            trajectory.append(b, ScalarField(grid, fft.ifftn(theta_hat).real), cum_grad)
    logger.debug("run(%s) produced %d snapshots up to t=%g", flow.name, len(trajectory), horizon)
    return trajectory


def solve_at(theta0, flow, t, dt=None):
    """theta(t) from a single-sample run."""
    if t == 0:
        return theta0
    return run(theta0, flow, t, t, dt=dt).final
