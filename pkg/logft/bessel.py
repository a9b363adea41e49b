import numpy as np
from scipy.special import gamma, jv


def jtilde_at_zero(nu):
    return 1.0 / (2.0 ** nu * gamma(nu + 1.0))


def bessel_jtilde(nu, s):
    """s^-nu J_nu(s), continued to s = 0 by its series limit."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("bessel_jtilde is defined for s >= 0")
    small = s == 0
    safe = np.where(small, 1.0, s)
    value = np.where(small, jtilde_at_zero(nu), safe ** (-nu) * jv(nu, safe))
    return value if value.ndim else float(value)


def hankel_coefficient(nu, k):
    """a_k(nu) = prod_{j<=k} (4nu^2 - (2j-1)^2) / (k! 8^k)."""
    mu = 4.0 * nu ** 2
    value = 1.0
    for j in range(1, k + 1):
        value *= (mu - (2 * j - 1) ** 2) / (j * 8.0)
    return value


def hankel_pq(nu, t, terms=4):
    """
    P and Q of J_nu(t) ~ sqrt(2/(pi t)) (P cos w - Q sin w),
    w = t - nu pi/2 - pi/4, using a_0 .. a_{terms-1}.
    """
    t = np.asarray(t, dtype=float)
    P = np.zeros_like(t)
    Q = np.zeros_like(t)
    for k in range(terms):
        term = hankel_coefficient(nu, k) / t ** k
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            P = P + sign * term
        else:
            Q = Q + sign * term
    return P, Q
