"""Classical orthogonal polynomials by three-term recurrence."""
from __future__ import annotations

import numpy as np


def monic_laguerre(n: int, nu: float, x, gamma_sq: float = 1.0):
    """Monic orthogonal polynomial of degree ``n`` for the weight ``x^nu exp(-x/Gamma^2)``.

    ``p_{j+1} = (x - G (2j+nu+1)) p_j - G^2 j (j+nu) p_{j-1}`` with ``G = Gamma^2``.
    """
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = x - gamma_sq * (nu + 1)
    for j in range(1, n):
        prev, cur = cur, (x - gamma_sq * (2 * j + nu + 1)) * cur - gamma_sq ** 2 * j * (j + nu) * prev
    return cur


def jacobi_polynomial(n: int, alpha: float, beta: float, x):
    """``P_n^(alpha, beta)(x)`` in the standard normalisation, orthogonal for
    ``(1-x)^alpha (1+x)^beta`` on ``[-1, 1]``."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = (alpha + 1) + (alpha + beta + 2) * (x - 1) / 2
    for k in range(2, n + 1):
        s = 2 * k + alpha + beta
        a = 2 * k * (k + alpha + beta) * (s - 2)
        b = (s - 1) * (s * (s - 2) * x + alpha ** 2 - beta ** 2)
        c = 2 * (k + alpha - 1) * (k + beta - 1) * s
        prev, cur = cur, (b * cur - c * prev) / a
    return cur


def christoffel_darboux_laguerre(n: int, nu: float, gamma_sq: float, m1: float, m2: float) -> float:
    """``[p_{n+1}(m1) p_n(m2) - p_{n+1}(m2) p_n(m1)] / (m1 - m2)`` for monic Laguerre ``p``.

    For the ``n x n`` complex Wishart ensemble this equals the average of
    ``det(WW^† - m1) det(WW^† - m2)``.
    """
    p = lambda k, x: float(monic_laguerre(k, nu, x, gamma_sq))
    return (p(n + 1, m1) * p(n, m2) - p(n + 1, m2) * p(n, m1)) / (m1 - m2)
