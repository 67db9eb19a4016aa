"""Incomplete two-dimensional Hermite polynomials and Laguerre polynomials.

``h_{m,n}(x, y | tau) = sum_i C(m,i) C(n,i) i! tau^i x^(m-i) y^(n-i)``

The integer contraction coefficients are kept exact (Python ints); evaluation
works with any numeric type supporting ``+``, ``*`` and ``**`` (``complex``,
``mpmath.mpc``, ...).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Literal

MAX_DEGREE = 256


class DegreeError(ValueError):
    """Raised when m + n exceeds :data:`MAX_DEGREE`."""


def check_degree(m: int, n: int) -> None:
    if m < 0 or n < 0:
        raise ValueError(f"indices must be non-negative, got ({m}, {n})")
    if m + n > MAX_DEGREE:
        raise DegreeError(f"degree too large: m + n = {m + n} exceeds cap {MAX_DEGREE}")


@dataclass(frozen=True)
class H2Coeffs:
    """Exact contraction coefficients ``c_i = C(m,i) C(n,i) i!`` for i = 0..min(m,n)."""

    m: int
    n: int
    terms: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)


@lru_cache(maxsize=4096)
def h2_coeffs(m: int, n: int) -> H2Coeffs:
    check_degree(m, n)
    terms = tuple((i, comb(m, i) * comb(n, i) * factorial(i)) for i in range(min(m, n) + 1))
    return H2Coeffs(m, n, terms)


def h2_eval(m: int, n: int, x, y, tau):
    """Evaluate ``h_{m,n}(x, y | tau)`` from the exact coefficient table."""
    total = 0
    for i, c in h2_coeffs(m, n):
        total += c * tau**i * x ** (m - i) * y ** (n - i)
    return total


def laguerre_eval(n: int, z):
    """Ordinary Laguerre polynomial ``L_n(z)`` by the three-term recurrence."""
    check_degree(n, 0)
    prev, cur = 1, 1 - z
    if n == 0:
        return prev + 0 * z
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - z) * cur - k * prev) / (k + 1)
    return cur


def h2_diagonal_laguerre(n: int, x, y, tau):
    """``tau^n n! L_n(-x y / tau)``; the diagonal h_{n,n} through Laguerre. Needs tau != 0."""
    if tau == 0:
        raise ZeroDivisionError("Laguerre form of h_{n,n} is singular at tau = 0")
    return tau**n * factorial(n) * laguerre_eval(n, -x * y / tau)


def h2_partial_sum_closed(
    n: int, lam, x, y, tau, which: Literal["m", "n"] = "m"
) -> complex:
    """Closed form of a one-index generating sum.

    ``which="m"``: sum_m lam^m/m! h_{m,n}(x,y|tau) = (y + tau lam)^n e^(lam x).
    ``which="n"``: sum_k lam^k/k! h_{n,k}(x,y|tau) = (x + tau lam)^n e^(lam y),
    with ``n`` the fixed first index.
    """
    check_degree(n, 0)
    if which == "m":
        return (y + tau * lam) ** n * cmath.exp(lam * x)
    if which == "n":
        return (x + tau * lam) ** n * cmath.exp(lam * y)
    raise ValueError(f"which must be 'm' or 'n', got {which!r}")


def h2_partial_sum_series(n: int, lam, x, y, tau, terms: int, which: Literal["m", "n"] = "m"):
    """Truncated series matching :func:`h2_partial_sum_closed`."""
    total = 0
    for k in range(terms + 1):
        h = h2_eval(k, n, x, y, tau) if which == "m" else h2_eval(n, k, x, y, tau)
        total += lam**k / factorial(k) * h
    return total
