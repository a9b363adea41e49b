"""
Named verification suites run by `manage.py verify`.

Each suite returns a SuiteResult whose checks carry the measured value and
the tolerance it was held to.
"""
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from advection.flows import random_solenoidal, velocity_library
from advection.patterns import make_pattern, random_field
from advection.solver import run
from dcommutator.checks import QUANTITY_SQRT_W, QUANTITY_V, calibrate, dual_exponent_for_sqrt_w, dv_dt_check, dw_dt_check
from dcommutator.trilinear import trilinear_fourier, trilinear_pv
from functionals.functionals import (
    V, functional_value, hs_norm, jensen_bound, small_s_expansion_residual, v_functional, w_functional,
)
from functionals.lattice import EULER_GAMMA
from functionals.physical import v_physical
from logft.zeta import build_constants, verify_log_ft, zeta_closed_form, zeta_constant
from mixing.certificates import PASS, InitialNorms, geometric_certificate
from mixing.scales import HypothesisError
from spectral.fields import ScalarField, VelocityField, inverse_transform, lp_norm
from spectral.grid import make_grid

from .runner import sharpness

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
GAUSSIAN_V_1D = -(EULER_GAMMA + np.log(8 * np.pi)) / (2 * np.sqrt(2))


class UnknownSuite(KeyError):
    pass


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    tolerance: float | None = None
    detail: str = ''


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.checks) and all(check.passed for check in self.checks)

    def failures(self):
        return [check for check in self.checks if not check.passed]


def _at_most(name, value, tolerance, detail=''):
    value = float(value)
    return Check(name, bool(value <= tolerance), value, float(tolerance), detail)


SUITES = {}


def suite(name):
    def register(func):
        SUITES[name] = func
        return func
    return register


def shear_setup(N, amplitude=1.0):
    grid = make_grid(2, 'torus', N)
    return grid, velocity_library('shear', grid, amplitude=amplitude), make_pattern('cosine', grid)


@suite('parseval')
def parseval_suite(result, seeds=100):
    worst_roundtrip = worst_parseval = 0.0
    grids = [make_grid(2, 'torus', 64), make_grid(2, 'box', 64, 4.0)]
    for grid in grids:
        for seed in range(seeds):
            f = ScalarField(grid, np.random.default_rng(seed).standard_normal(grid.shape))
            back = inverse_transform(f.spectrum)
            worst_roundtrip = max(worst_roundtrip, np.max(np.abs(back.values - f.values)) / np.max(np.abs(f.values)))
            worst_parseval = max(worst_parseval, abs(f.spectrum.l2_squared() - f.l2_squared()) / f.l2_squared())
    result.checks.append(_at_most('round trip', worst_roundtrip, 1e-12, f"{seeds} fields per grid"))
    result.checks.append(_at_most('parseval', worst_parseval, 1e-12, f"{seeds} fields per grid"))


@suite('lemma31')
def physical_form_suite(result):
    for d, N, R in ((1, 512, 8.0), (2, 256, 6.0)):
        grid = make_grid(d, 'box', N, R)
        f = make_pattern('gaussian', grid)
        spectral = functional_value(V, f)
        physical = v_physical(f, build_constants(d))
        spectral_v, physical_v = spectral.value, physical.value
        result.details[f'd={d}'] = {'spectral': spectral.as_dict(), 'physical': physical.as_dict()}
        result.checks.append(_at_most(
            f'physical vs spectral d={d}', abs(physical_v - spectral_v), 2e-3 * max(1.0, abs(spectral_v))))
        if d == 1:
            result.checks.append(_at_most('closed form d=1', abs(spectral_v - GAUSSIAN_V_1D), 1e-4))


def _derivative_suite(result, check, N=256, t=0.25):
    _, flow, theta0 = shear_setup(N)
    fine = check(theta0, flow, t, 1e-3, dt=1e-3)
    result.checks.append(_at_most('centred difference gap', fine.gap, 1e-4 * max(1.0, abs(fine.rhs))))
    coarse = check(theta0, flow, t, 1e-2, dt=1e-3)
    half = check(theta0, flow, t, 5e-3, dt=1e-3)
    ratio = coarse.gap / half.gap if half.gap > 0 else np.inf
    result.checks.append(Check('halving ratio', bool(3.5 <= ratio <= 4.5), float(ratio), 4.0, 'expected in [3.5, 4.5]'))
    result.details.update({'lhs': fine.lhs, 'rhs': fine.rhs, 'N': N, 't': t})


@suite('lemma32')
def dv_dt_suite(result):
    _derivative_suite(result, dv_dt_check)


@suite('lemma33')
def dw_dt_suite(result):
    _derivative_suite(result, dw_dt_check)


@suite('jensen')
def jensen_suite(result, seeds=100):
    grid = make_grid(2, 'torus', 32)
    failures = 0
    worst = np.inf
    for seed in range(seeds):
        f = make_pattern('random', grid, seed=seed)
        for s in (0.25, 0.5, 1.0):
            check = jensen_bound(f, s)
            worst = min(worst, check.slack)
            failures += not check.holds
    result.checks.append(Check('random fields', failures == 0, float(failures), 0.0, f"{seeds} fields x 3 orders"))
    result.checks.append(Check('slack', bool(worst >= -1e-12), float(worst), -1e-12))
    shell = make_pattern('shell', grid, radius=5)
    gap = max(abs(jensen_bound(shell, s).ratio - jensen_bound(shell, s).bound) for s in (0.25, 0.5, 1.0))
    result.checks.append(_at_most('single-shell equality', gap, 1e-9))


@suite('geomcert')
def geometric_certificate_suite(result, seeds=100, kappa=0.5, B=10.0):
    grid = make_grid(2, 'torus', 32)
    failures, skipped = [], 0
    for seed in range(seeds):
        theta = make_pattern('random', grid, seed=seed, kmax=4)
        try:
            cert = geometric_certificate(theta, kappa, B)
        except HypothesisError:
            skipped += 1
            continue
        if cert.verdict != PASS:
            failures.append(seed)
    result.details.update({'failed_seeds': failures, 'skipped': skipped})
    result.checks.append(Check('implication at sampled eps', not failures, float(len(failures)), 0.0,
                               f"{seeds - skipped} fields with V > 0"))


@suite('zeta')
def zeta_suite(result):
    for d in (1, 2):
        computed = zeta_constant(d)
        exact = zeta_closed_form(d)
        result.details[f'd={d}'] = {'zeta': computed.value, 'closed_form': exact, 'error_bound': computed.error_bound}
        result.checks.append(_at_most(f'zeta_{d}', abs(computed.value - exact), 1e-8))
        result.checks.append(_at_most(f'log transform d={d}', verify_log_ft(d).residual, 1e-6))


@suite('trilinear')
def trilinear_suite(result, N=128, seeds=4):
    grid = make_grid(2, 'torus', N)
    x, y = grid.coords
    theta = ScalarField(grid, np.cos(TWO_PI * x) + np.cos(TWO_PI * (x + y)))
    v = VelocityField.from_arrays(grid, np.sin(TWO_PI * y), np.zeros(grid.shape))
    exact = trilinear_fourier(theta, theta, v)
    pv = trilinear_pv(theta, theta, v)
    result.details.update({'fourier': exact, 'pv': pv.as_dict()})
    result.checks.append(_at_most('fourier closed form', abs(exact + 0.5 * np.pi * np.log(2)), 1e-10))
    result.checks.append(_at_most('pv vs fourier', abs(pv.value - exact), 1e-2 * abs(exact),
                                  f"extrapolation residual {pv.residual:.3e}"))
    worst = 0.0
    for seed in range(seeds):
        f = random_field(grid, [seed, 0], kmax=N // 8)
        g = random_field(grid, [seed, 1], kmax=N // 8)
        u = random_solenoidal(grid, [seed, 2], kmax=N // 8)
        reference = trilinear_fourier(f, g, u)
        gap = abs(trilinear_pv(f, g, u).value - reference)
        worst = max(worst, gap / max(abs(reference), 1e-6))
    result.details['random_worst_relative_gap'] = worst
    result.checks.append(_at_most('random triples at band N/8', worst, 1e-2, f"{seeds} seeded triples"))
    drift = VelocityField.from_arrays(grid, np.full(grid.shape, 0.7), np.full(grid.shape, -0.3))
    still = trilinear_pv(theta, make_pattern('random', grid, seed=1, kmax=4), drift)
    result.checks.append(_at_most('constant drift', abs(still.value), 1e-10))


@suite('sharpness')
def sharpness_suite(result, N=1024):
    report = sharpness(2, 8, 'cosine', N=N, d=2)
    result.details.update(report.as_dict())
    result.checks.append(_at_most('slope', report.slope_error, 1e-9,
                                  f"expected {report.expected_slope:.17g}"))


@suite('expansion')
def expansion_suite(result, seeds=20):
    grid = make_grid(2, 'torus', 32)
    ratios = []
    for seed in range(seeds):
        f = make_pattern('random', grid, seed=100 + seed, kmax=10)
        ratios.append(small_s_expansion_residual(f, 1e-2) / small_s_expansion_residual(f, 5e-3))
    result.details['ratios'] = ratios
    result.checks.append(Check('third-order ratio', bool(all(6 <= r <= 10 for r in ratios)),
                               float(min(ratios)), 6.0, f"range [{min(ratios):.4f}, {max(ratios):.4f}]"))


def envelope_ratios(trajectory):
    """
    Largest |V(t) - V(0)| and |sqrt W(t) - sqrt W(0)| along a run, each in
    units of its rate-calibrated bound C * reference * ∫||grad u||_p.
    """
    theta0, p = trajectory.initial, trajectory.p
    cal_v = calibrate(trajectory, quantity=QUANTITY_V)
    cal_w = calibrate(trajectory, quantity=QUANTITY_SQRT_W)
    ref_v = InitialNorms.of(theta0, p).holder_product()
    ref_w = lp_norm(theta0.centered(), dual_exponent_for_sqrt_w(p))
    v0, w0 = v_functional(theta0), np.sqrt(w_functional(theta0))
    worst_v = worst_w = 0.0
    for theta, cum in zip(trajectory.snapshots, trajectory.cum_grad):
        if cum == 0 or cal_v.C == 0 or cal_w.C == 0:
            continue
        worst_v = max(worst_v, abs(v_functional(theta) - v0) / (cal_v.C * ref_v * cum))
        worst_w = max(worst_w, abs(np.sqrt(w_functional(theta)) - w0) / (cal_w.C * ref_w * cum))
    return worst_v, worst_w, cal_v, cal_w


@suite('monitor')
def monitoring_suite(result, N=256, horizon=2.0, sample_dt=0.02, p=2.0):
    _, flow, theta0 = shear_setup(N)
    trajectory = run(theta0, flow, horizon, sample_dt, p=p)
    worst_v, worst_w, cal_v, cal_w = envelope_ratios(trajectory)
    result.details.update({'C_V': cal_v.C, 'C_sqrtW': cal_w.C, 'samples': len(trajectory)})
    result.checks.append(_at_most('V affine envelope', worst_v, 1 + 1e-6))
    result.checks.append(_at_most('sqrt W envelope', worst_w, 1 + 1e-6))


@suite('hierarchy')
def hierarchy_suite(result, N=256, horizon=4.0, sample_dt=0.25, amplitude=0.5, calibration_dt=0.05):
    grid = make_grid(2, 'torus', N)
    flow = velocity_library('alternating', grid, amplitude=amplitude)
    stride = max(1, int(round(sample_dt / calibration_dt)))
    trajectory = run(make_pattern('cosine', grid), flow, horizon, sample_dt / stride)
    samples = trajectory.snapshots[::stride]
    l2 = np.array([np.sqrt(theta.l2_squared()) for theta in samples])
    half = np.array([hs_norm(theta, 0.5) for theta in samples])
    worst_v, worst_w, cal_v, cal_w = envelope_ratios(trajectory)
    result.details.update({
        'times': trajectory.times[::stride], 'h_half': half, 'C_V': cal_v.C, 'C_sqrtW': cal_w.C,
    })
    result.checks.append(_at_most('L2 drift', np.max(np.abs(l2 - l2[0])) / l2[0], 1e-6))
    result.checks.append(_at_most('V affine envelope', worst_v, 1 + 1e-6))
    result.checks.append(_at_most('W quadratic envelope', worst_w, 1 + 1e-6,
                                  'sqrt W(t) <= sqrt W(0) + C ||theta0|| ∫||grad u||'))
    increments = np.diff(half)
    result.checks.append(Check('H^1/2 strictly increasing', bool(np.all(increments > 0)),
                               float(np.min(increments)), 0.0))


def run_suite(name, **params):
    try:
        func = SUITES[name]
    except KeyError:
        raise UnknownSuite(f"Unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    result = SuiteResult(name)
    started = time.perf_counter()
    func(result, **params)
    result.elapsed = time.perf_counter() - started
    level = logging.INFO if result.passed else logging.WARNING
    logger.log(level, "Suite %s %s in %.2fs", name, 'passed' if result.passed else 'FAILED', result.elapsed)
    return result
