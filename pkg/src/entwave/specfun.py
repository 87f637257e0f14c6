"""Special functions behind the radial wavelet family.

Two-variable Hermite polynomials H_{m,n}(x, y) and Laguerre polynomials
L_n(x).  On the diagonal they are tied together by

    (-1)^n H_{n,n}(eta, conj(eta)) = n! L_n(|eta|^2),

which the test suite exercises as an invariant.
"""

from __future__ import annotations

import math

import numpy as np

# Individual series terms of H_{m,n} reach ~max(m,n)! in magnitude; beyond
# this total order they can leave double-precision range.
HERMITE_ORDER_CAP = 120

# Default cap on polynomial orders carried by wavelet descriptors.
DEFAULT_ORDER_CAP = 32


class OrderOverflowError(ValueError):
    """Polynomial order too large for double-precision evaluation."""


def _check_order(m: int, n: int) -> None:
    if m < 0 or n < 0:
        raise ValueError(f"polynomial orders must be non-negative, got ({m}, {n})")
    if m + n > HERMITE_ORDER_CAP:
        raise OrderOverflowError(
            f"order m+n={m + n} exceeds the factorial-safe cutoff {HERMITE_ORDER_CAP}"
        )


def hermite2(m: int, n: int, x, y):
    """Two-variable Hermite polynomial H_{m,n}(x, y).

    Evaluated by the exact finite series

        H_{m,n}(x, y) = sum_k (-1)^k m! n! x^(m-k) y^(n-k) / (k! (m-k)! (n-k)!)

    with integer coefficients C(m,k) C(n,k) k!, so no truncation error is
    introduced.  ``x`` and ``y`` may be scalars or broadcastable arrays.
    """
    _check_order(m, n)
    xa = np.asarray(x, dtype=complex)
    ya = np.asarray(y, dtype=complex)
    scalar = xa.ndim == 0 and ya.ndim == 0
    acc = np.zeros(np.broadcast(xa, ya).shape, dtype=complex)
    for k in range(min(m, n) + 1):
        coef = math.comb(m, k) * math.comb(n, k) * math.factorial(k)
        if k % 2:
            coef = -coef
        acc += float(coef) * xa ** (m - k) * ya ** (n - k)
    return complex(acc) if scalar else acc


def laguerre(n: int, x):
    """Laguerre polynomial L_n(x) via the stable three-term recurrence.

    (k+1) L_{k+1}(x) = (2k+1-x) L_k(x) - k L_{k-1}(x), with L_0 = 1 and
    L_1 = 1 - x.  ``x`` may be a scalar or an array.
    """
    if n < 0:
        raise ValueError(f"order must be non-negative, got {n}")
    if n > HERMITE_ORDER_CAP:
        raise OrderOverflowError(
            f"order {n} exceeds the factorial-safe cutoff {HERMITE_ORDER_CAP}"
        )
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    prev = np.ones_like(xa)
    if n == 0:
        return float(prev) if scalar else prev
    cur = 1.0 - xa
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - xa) * cur - k * prev) / (k + 1)
    return float(cur) if scalar else cur


def hermite2_diagonal_table(x, y, order: int) -> np.ndarray:
    """Table of H_{m,n}(x, y) for all 0 <= m, n <= order at scalar x, y.

    Built with the raising recurrences H_{m+1,n} = x H_{m,n} - n H_{m,n-1}
    and H_{0,n} = y^n; used where whole blocks of orders are consumed at
    once (Fock-basis resummations).
    """
    _check_order(order, order)
    table = np.empty((order + 1, order + 1), dtype=complex)
    table[0, :] = [complex(y) ** k for k in range(order + 1)]
    for m in range(order):
        table[m + 1, 0] = x * table[m, 0]
        for n in range(1, order + 1):
            table[m + 1, n] = x * table[m, n] - n * table[m, n - 1]
    return table
