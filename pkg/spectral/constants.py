"""
Dimensional constants shared by the functionals and the commutator form.
"""
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import gamma


def sphere_area(d):
    """Surface area of the unit sphere in R^d (2 for d = 1, 2 pi for d = 2)."""
    if d == 1:
        return 2.0
    if d == 2:
        return 2.0 * np.pi
    return float(2.0 * np.pi ** (d / 2) / gamma(d / 2))


def ball_volume(d):
    return sphere_area(d) / d


@dataclass(frozen=True)
class Constants:
    """sigma_{d-1}, zeta_d and the derived alpha_d, beta_d, c_d."""

    d: int
    sigma: float
    zeta: float
    alpha: float
    beta: float
    c: float
    zeta_error: float = 0.0

    @classmethod
    def from_zeta(cls, d, zeta, zeta_error=0.0):
        sigma = sphere_area(d)
        alpha = 1.0 / sigma
        return cls(
            d=d,
            sigma=sigma,
            zeta=float(zeta),
            alpha=alpha,
            beta=float(zeta) * alpha,
            c=d * alpha,
            zeta_error=float(zeta_error),
        )

    def as_dict(self):
        return asdict(self)
