"""
Checks of the trilinear form along trajectories: centred differences of V
and W against the Fourier side, growth-constant calibration and the
empirical Hölder-ratio probe.
"""
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from advection.flows import random_solenoidal
from advection.patterns import random_field
from advection.solver import solve_at
from functionals.functionals import v_functional, w_functional
from mixing.certificates import InitialNorms, conjugate_exponent
from spectral.fields import VelocityField, lp_norm, sobolev_w1p_seminorm

from .trilinear import log_field, trilinear_fourier

logger = logging.getLogger(__name__)

RATE = 'rate'
INTEGRATED = 'integrated'
CALIBRATION_MODES = (RATE, INTEGRATED)
QUANTITY_V = 'V'
QUANTITY_SQRT_W = 'sqrtW'


@dataclass(frozen=True)
class DerivativeCheck:
    t: float
    delta: float
    lhs: float
    rhs: float

    @property
    def gap(self):
        return abs(self.lhs - self.rhs)


def _neighbours(theta0, flow, t, delta, dt):
    if not delta > 0:
        raise ValueError("delta must be positive")
    if t - delta < 0:
        raise ValueError(f"t - delta = {t - delta:g} falls before the start of the run")
    before = solve_at(theta0, flow, t - delta, dt=dt)
    now = solve_at(theta0, flow, t, dt=dt)
    after = solve_at(theta0, flow, t + delta, dt=dt)
    return before, now, after


def dv_dt_check(theta0, flow, t, delta, dt=None):
    """Centred difference of V against T(theta, theta, u) at time t."""
    before, now, after = _neighbours(theta0, flow, t, delta, dt)
    lhs = (v_functional(after) - v_functional(before)) / (2 * delta)
    rhs = trilinear_fourier(now, now, flow.velocity(t))
    return DerivativeCheck(t=float(t), delta=float(delta), lhs=float(lhs), rhs=float(rhs))


def dw_dt_check(theta0, flow, t, delta, dt=None):
    """Centred difference of W against 2 T(phi, theta, u), phi^ = log|k| theta^."""
    before, now, after = _neighbours(theta0, flow, t, delta, dt)
    lhs = (w_functional(after) - w_functional(before)) / (2 * delta)
    rhs = 2 * trilinear_fourier(log_field(now), now, flow.velocity(t))
    return DerivativeCheck(t=float(t), delta=float(delta), lhs=float(lhs), rhs=float(rhs))


def dual_exponent_for_sqrt_w(q):
    """q~ with 1/q + 1/q~ = 1/2."""
    q = float(q)
    if q < 2:
        raise ValueError(f"The sqrt(W) estimate needs q >= 2, got {q}")
    if q == 2:
        return np.inf
    if np.isinf(q):
        return 2.0
    return 1.0 / (0.5 - 1.0 / q)


@dataclass
class Calibration:
    quantity: str
    mode: str
    p: float
    C: float
    argmax_t: float | None
    ratios: list = field(default_factory=list)

    @property
    def provenance(self):
        return f"calibrated:{self.quantity}:{self.mode}:p={self.p:g}"

    def as_dict(self):
        data = asdict(self)
        data['provenance'] = self.provenance
        return data


def _ratio(numerator, denominator):
    if denominator == 0:
        return 0.0 if numerator == 0 else np.inf
    return abs(numerator) / denominator


def calibrate(trajectory, mode=RATE, quantity=QUANTITY_V):
    """
    Empirical growth constant along a trajectory.

    For V the reference is ||theta0||_inf ||theta0||_{p'} ||grad u||_p; for
    sqrt(W) it is ||theta0||_{q~} ||grad u||_q with q = p. The rate mode
    takes the sup of instantaneous ratios, the integrated mode compares the
    change since t = 0 with the accumulated ∫||grad u||_p.
    """
    if mode not in CALIBRATION_MODES:
        raise ValueError(f"Unknown calibration mode {mode!r}; choose from {CALIBRATION_MODES}")
    theta0 = trajectory.initial
    p = trajectory.p
    if quantity == QUANTITY_V:
        reference = InitialNorms.of(theta0, p).holder_product()
    elif quantity == QUANTITY_SQRT_W:
        reference = lp_norm(theta0.centered(), dual_exponent_for_sqrt_w(p))
    else:
        raise ValueError(f"Unknown calibrated quantity {quantity!r}")

    flow = trajectory.flow
    ratios = []
    start = None
    for t, theta, cum in zip(trajectory.times, trajectory.snapshots, trajectory.cum_grad):
        if mode == RATE:
            u = flow.velocity(t)
            if quantity == QUANTITY_V:
                rate = trilinear_fourier(theta, theta, u)
            else:
                w = w_functional(theta)
                rate = 0.0 if w == 0 else trilinear_fourier(log_field(theta), theta, u) / np.sqrt(w)
            ratio = _ratio(rate, reference * sobolev_w1p_seminorm(u, p))
        else:
            current = v_functional(theta) if quantity == QUANTITY_V else np.sqrt(w_functional(theta))
            if start is None:
                start = current
                continue
            ratio = _ratio(current - start, reference * cum)
        ratios.append((float(t), float(ratio)))

    if not ratios:
        return Calibration(quantity, mode, float(p), 0.0, None, [])
    argmax_t, C = max(ratios, key=lambda item: item[1])
    logger.info("Calibrated C for %s (%s mode) = %.6g at t=%g", quantity, mode, C, argmax_t)
    return Calibration(quantity, mode, float(p), float(C), argmax_t, ratios)


@dataclass(frozen=True)
class ProbeSample:
    seed: int
    p: float
    ratio: float


@dataclass
class ProbeStatistics:
    p: float
    samples: list

    @property
    def ratios(self):
        return np.array([s.ratio for s in self.samples])

    def summary(self):
        ratios = self.ratios
        return {
            'p': self.p,
            'count': len(self.samples),
            'max': float(np.max(ratios)),
            'mean': float(np.mean(ratios)),
            'quantiles': {
                str(q): float(np.quantile(ratios, q)) for q in (0.5, 0.9, 0.99)
            },
        }


ZERO_VELOCITY = 'zero-velocity'
RANDOM_TRIPLES = 'random'
PROBE_FAMILIES = (RANDOM_TRIPLES, ZERO_VELOCITY)


def holder_ratio_probe(grid, p, seeds, family=RANDOM_TRIPLES, kmax=4):
    """
    |T(f, g, v)| / (||f||_inf ||g||_{p'} ||grad v||_p) over seeded random
    band-limited triples. The maximum is an empirical constant only.
    """
    if family not in PROBE_FAMILIES:
        raise ValueError(f"Unknown probe family {family!r}; choose from {PROBE_FAMILIES}")
    p = float(p)
    samples = []
    for seed in seeds:
        f = random_field(grid, [int(seed), 0], kmax=kmax)
        g = random_field(grid, [int(seed), 1], kmax=kmax)
        if family == ZERO_VELOCITY:
            v = VelocityField.zeros(grid)
        else:
            v = random_solenoidal(grid, [int(seed), 2], kmax=kmax, p=p)
        numerator = trilinear_fourier(f, g, v)
        denominator = lp_norm(f, np.inf) * lp_norm(g, conjugate_exponent(p)) * sobolev_w1p_seminorm(v, p)
        samples.append(ProbeSample(seed=int(seed), p=p, ratio=float(_ratio(numerator, denominator))))
    return ProbeStatistics(p=p, samples=samples)
