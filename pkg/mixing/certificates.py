"""
Exponential-decay certificates for the functional and geometric mixing scales.

On the torus the norms of theta0 are taken on its oscillating part
theta0 - mean; the mean is transported unchanged and drops out of V, W and
every negative Sobolev norm.
"""
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from functionals.functionals import functional_mixing_scale, punctured_l2_squared, v_functional

from spectral.fields import lp_norm

from .scales import HypothesisError, averaging_ratio, rho_for_eta

logger = logging.getLogger(__name__)

FUNCTIONAL = 'functional'
GEOMETRIC = 'geometric'
PASS = 'pass'
FAIL = 'fail'


def conjugate_exponent(p):
    p = float(p)
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1)


@dataclass(frozen=True)
class InitialNorms:
    """||theta0||_2, ||theta0||_inf and ||theta0||_{p'} of the oscillating part."""

    l2: float
    linf: float
    lp_dual: float
    p: float

    @classmethod
    def of(cls, theta0, p):
        f = theta0.centered() if theta0.grid.is_torus else theta0
        return cls(
            l2=float(np.sqrt(punctured_l2_squared(theta0))),
            linf=lp_norm(f, np.inf),
            lp_dual=lp_norm(f, conjugate_exponent(p)),
            p=float(p),
        )

    def holder_product(self):
        return self.linf * self.lp_dual


@dataclass
class DecayCertificate:
    kind: str
    bound: float
    C: float | None = None
    C_provenance: str | None = None
    inputs: dict = field(default_factory=dict)
    verdict: str | None = None
    witnesses: list = field(default_factory=list)

    def as_dict(self):
        data = asdict(self)
        data['bound'] = float(self.bound)
        return data


def functional_decay_bound(norms, V0, s, p, cumulative_grad, C, C_provenance='input'):
    """
    ||theta0|| exp(-s (V0 + C ||theta0||_inf ||theta0||_{p'} cum) / ||theta0||^2),
    a lower bound for ||theta(t)||_{H^-s}.
    """
    if not norms.l2 > 0:
        raise ValueError("The decay certificate needs a nonzero oscillating part")
    if cumulative_grad < 0:
        raise ValueError("cumulative_grad must be non-negative")
    if C < 0:
        raise ValueError("C must be non-negative")
    s = float(s)
    exponent = s * (V0 + C * norms.holder_product() * cumulative_grad) / norms.l2 ** 2
    bound = norms.l2 * float(np.exp(-exponent))
    return DecayCertificate(
        kind=FUNCTIONAL,
        bound=bound,
        C=float(C),
        C_provenance=C_provenance,
        inputs={
            's': s,
            'p': float(p),
            'V0': float(V0),
            'cumulative_grad': float(cumulative_grad),
            'l2': norms.l2,
            'linf': norms.linf,
            'lp_dual': norms.lp_dual,
        },
    )


@dataclass(frozen=True)
class DecaySample:
    t: float
    bound: float
    measured: float

    @property
    def holds(self):
        return self.measured >= self.bound * (1 - 1e-9)


def certify_trajectory(trajectory, s, C, C_provenance='input'):
    """Functional certificate at every snapshot, checked against the measured H^-s norm."""
    theta0 = trajectory.initial
    norms = InitialNorms.of(theta0, trajectory.p)
    V0 = v_functional(theta0)
    samples = []
    for t, theta, cum in zip(trajectory.times, trajectory.snapshots, trajectory.cum_grad):
        cert = functional_decay_bound(norms, V0, s, trajectory.p, cum, C, C_provenance)
        samples.append(DecaySample(t, cert.bound, functional_mixing_scale(theta, s)))
    failures = [sample.t for sample in samples if not sample.holds]
    if failures:
        logger.warning("Decay certificate fails at %d samples, first at t=%g", len(failures), failures[0])
    final = functional_decay_bound(norms, V0, s, trajectory.p, trajectory.cum_grad[-1], C, C_provenance)
    final.verdict = FAIL if failures else PASS
    final.witnesses = [asdict(sample) for sample in samples]
    return final


def eta_for(kappa, B):
    """Midpoint of the admissible eta range (1 - kappa)/(1 - 1/B) < eta < 1."""
    lower = (1 - kappa) / (1 - 1 / B)
    if lower >= 1:
        raise HypothesisError(f"No eta < 1 satisfies eta (1 - 1/B) > 1 - kappa for kappa={kappa}, B={B}")
    return 0.5 * (1 + lower)


def geometric_certificate(f, kappa, B, samples=10):
    """
    Checks that every sampled eps strictly below A^-1 exp(-A V/||f||^2) keeps
    ||f * chi_eps||_inf / ||f||_inf above (1 - kappa)||f||^2 / (||f||_1 ||f||_inf).
    """
    if not 0 < kappa < 1:
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    if not B > 1:
        raise ValueError(f"B must exceed 1, got {B}")
    V = v_functional(f)
    if V <= 0:
        raise HypothesisError(f"The geometric certificate needs V(f) > 0, got {V:.6g}")
    eta = eta_for(kappa, B)
    rho = rho_for_eta(eta, f.grid.d)
    A = max(B, 1.0 / rho)
    norm2 = f.l2_squared()
    threshold = float(np.exp(-A * V / norm2) / A)
    target = (1 - kappa) * norm2 / (lp_norm(f, 1) * lp_norm(f, np.inf))

    # eps above 1/2 would wrap the ball onto itself
    top = min(threshold, 0.5)
    witnesses = []
    for j in range(1, samples + 1):
        eps = top * j / (samples + 1)
        witnesses.append({'eps': eps, 'ratio': averaging_ratio(f, eps)})
    failed = [w for w in witnesses if not w['ratio'] > target]
    return DecayCertificate(
        kind=GEOMETRIC,
        bound=threshold,
        inputs={
            'kappa': float(kappa),
            'B': float(B),
            'eta': eta,
            'rho': rho,
            'A': A,
            'V': V,
            'l2_squared': norm2,
            'target_ratio': target,
        },
        verdict=FAIL if failed else PASS,
        witnesses=witnesses,
    )
