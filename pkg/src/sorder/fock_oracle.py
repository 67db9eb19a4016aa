"""Brute-force truncated Fock-space evaluation of ordered operators.

Every ordered object is brought to normal order (``s = 1``) and summed as
``sum c_pq (A^dagger)^p A^q`` over a ``D``-level basis. Normal-ordered
products are exact inside the truncated space, so the only error sources are
coefficient arithmetic and series truncation.

Two things keep the arithmetic honest at tight tolerances:

* The ladder matrices factor through an integer basis:
  ``A = S B S^-1`` and ``A^dagger = S C S^-1`` with ``S = diag(sqrt(k!))``,
  ``B[k-1, k] = k`` and ``C[k, k-1] = 1``. Powers and products of ``B`` and
  ``C`` are computed exactly with Python ints; only the final similarity
  scaling touches square roots.
* Coefficients are carried in mpmath at :data:`ORACLE_DPS` digits, because
  the normal-ordered expansion of a projector alternates with terms many
  orders of magnitude above the result.

Ordered exponentials are summed with Euler weights (see
:func:`sorder.ordered_algebra.euler_weights`). The plain exponential series
of ``{e^(lam a^dagger a)}_s`` brought to normal order has ratio
``r = -lam (1 - s)/2`` and diverges for ``|r| >= 1`` (the projector at
``t <= 0`` is such a case). With ``q = r`` every matrix element becomes a
polynomial in the Euler variable, so a cutoff of about ``D + n + m`` is
exact.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath
import numpy as np

from .ordered_algebra import (
    GaussianForm,
    OrderedExp,
    OrderedPoly,
    convert_poly,
    exp_to_poly,
)

MAX_DIM = 128
DEFAULT_MARGIN = 5
ORACLE_DPS = 80
COHERENT_TAIL = 1e-12

# Private context: precision is fixed here once, never toggled, so concurrent
# callers and user code touching mpmath.mp do not interfere.
_mp = mpmath.MPContext()
_mp.dps = ORACLE_DPS


class TruncationError(ValueError):
    """The truncated basis cannot represent the requested state faithfully."""


def _check_dim(D: int) -> None:
    if not 2 <= D <= MAX_DIM:
        raise ValueError(f"dimension must be in [2, {MAX_DIM}], got {D}")


def ladder(D: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated lowering and raising matrices ``(A, A^dagger)``."""
    _check_dim(D)
    A = np.diag(np.sqrt(np.arange(1, D, dtype=float)), 1).astype(complex)
    return A, A.conj().T


def basis_projector(n: int, m: int, D: int) -> np.ndarray:
    """``E_nm = |n><m|``."""
    _check_dim(D)
    if not (0 <= n < D and 0 <= m < D):
        raise IndexError(f"basis indices ({n}, {m}) outside dimension {D}")
    E = np.zeros((D, D), dtype=complex)
    E[n, m] = 1
    return E


def coherent_vector(beta: complex, D: int) -> np.ndarray:
    """Components ``exp(-|beta|^2/2) beta^k / sqrt(k!)`` for ``k < D``.

    Raises :class:`TruncationError` if the dropped probability mass exceeds
    :data:`COHERENT_TAIL`.
    """
    _check_dim(D)
    nbar = abs(beta) ** 2
    tail = float(mpmath.gammainc(D, 0, nbar, regularized=True)) if nbar else 0.0
    if tail > COHERENT_TAIL:
        raise TruncationError(
            f"truncation too coarse: |beta|^2 = {nbar:.4g} leaves tail {tail:.3g} beyond D = {D}"
        )
    v = np.empty(D, dtype=complex)
    v[0] = np.exp(-nbar / 2)
    for k in range(1, D):
        v[k] = v[k - 1] * beta / np.sqrt(k)
    return v


def matrix_distance(X: np.ndarray, Y: np.ndarray, interior_margin: int = DEFAULT_MARGIN) -> float:
    """Max-abs difference on the leading ``(D - margin)`` block."""
    if X.shape != Y.shape:
        raise ValueError(f"dimension mismatch: {X.shape} vs {Y.shape}")
    D = X.shape[0]
    k = D - interior_margin
    if k <= 0:
        raise ValueError(f"margin {interior_margin} leaves no interior block at D = {D}")
    return float(np.max(np.abs(X[:k, :k] - Y[:k, :k])))


@lru_cache(maxsize=8)
def _integer_powers(D: int):
    B = np.zeros((D, D), dtype=object)
    C = np.zeros((D, D), dtype=object)
    B[:] = 0
    C[:] = 0
    for k in range(1, D):
        B[k - 1, k] = k
        C[k, k - 1] = 1
    bpow, cpow = [None] * D, [None] * D
    eye = np.zeros((D, D), dtype=object)
    eye[:] = 0
    for k in range(D):
        eye[k, k] = 1
    bpow[0] = cpow[0] = eye
    for k in range(1, D):
        bpow[k] = bpow[k - 1].dot(B)
        cpow[k] = cpow[k - 1].dot(C)
    return bpow, cpow


@lru_cache(maxsize=65536)
def _normal_term(D: int, p: int, q: int):
    """Nonzero entries of ``C^p B^q`` as ``(rows, cols, values)``."""
    bpow, cpow = _integer_powers(D)
    M = cpow[p].dot(bpow[q])
    rows, cols = np.nonzero(M != 0)
    return tuple(rows), tuple(cols), tuple(M[r, c] for r, c in zip(rows, cols))


def _mp_poly(P: OrderedPoly) -> OrderedPoly:
    return OrderedPoly(_mp.mpf(P.order), {k: _mp.mpc(c) for k, c in P.terms.items()})


def _sum_normal(N: OrderedPoly, D: int) -> np.ndarray:
    acc = [[_mp.mpc(0)] * D for _ in range(D)]
    for (p, q), c in N.terms.items():
        if p >= D or q >= D:
            continue  # C^p = 0 and B^q = 0 past the top level
        rows, cols, vals = _normal_term(D, p, q)
        for r, col, v in zip(rows, cols, vals):
            acc[r][col] += c * v
    sqrt_fact = [_mp.sqrt(_mp.factorial(k)) for k in range(D)]
    out = np.empty((D, D), dtype=complex)
    for r in range(D):
        for col in range(D):
            out[r, col] = complex(acc[r][col] * sqrt_fact[r] / sqrt_fact[col])
    return out


def eval_poly(P: OrderedPoly, D: int) -> np.ndarray:
    """Matrix of ``P`` on ``D`` levels via conversion to normal order."""
    _check_dim(D)
    normal = convert_poly(_mp_poly(P), _mp.mpf(1))
    return _sum_normal(normal, D)


def euler_parameter(lam, s) -> float:
    """Ratio ``-lam (1 - s)/2`` of the normal-order conversion series."""
    r = -lam * (1 - s) / 2
    r = complex(r)
    if r.imag != 0 or r.real == -1:
        return 0.0
    return r.real


def default_cutoff(D: int, n: int = 0, m: int = 0) -> int:
    return D + n + m + 20


def eval_exp(E: OrderedExp, D: int, cutoff: int | None = None, euler: bool = True) -> np.ndarray:
    """Matrix of an ordered exponential form.

    ``euler=False`` falls back to plain partial sums of length ``cutoff``.
    """
    _check_dim(D)
    if cutoff is None:
        cutoff = default_cutoff(D, E.n, E.m)
    Emp = OrderedExp(
        _mp.mpc(E.prefactor), E.n, E.m, _mp.mpc(E.kappa), _mp.mpc(E.lam), _mp.mpf(E.order)
    )
    q = _mp.mpf(euler_parameter(E.lam, E.order)) if euler else None
    P = exp_to_poly(Emp, cutoff, euler=q)
    return _sum_normal(convert_poly(P, _mp.mpf(1)), D)


def eval_gaussian(G: GaussianForm, D: int, cutoff: int | None = None, euler: bool = True) -> np.ndarray:
    """Matrix of a shifted Gaussian form such as a coherent projector."""
    _check_dim(D)
    if cutoff is None:
        cutoff = D + 40
    Gmp = GaussianForm(_mp.mpc(G.prefactor), _mp.mpc(G.center), _mp.mpc(G.rate), _mp.mpf(G.order))
    q = _mp.mpf(euler_parameter(-G.rate, G.order)) if euler else None
    P = Gmp.to_poly(cutoff, euler=q)
    return _sum_normal(convert_poly(P, _mp.mpf(1)), D)


def evaluate(obj, D: int, cutoff: int | None = None) -> np.ndarray:
    """Dispatch on :class:`OrderedPoly`, :class:`OrderedExp` or :class:`GaussianForm`."""
    if isinstance(obj, OrderedPoly):
        return eval_poly(obj, D)
    if isinstance(obj, OrderedExp):
        return eval_exp(obj, D, cutoff)
    if isinstance(obj, GaussianForm):
        return eval_gaussian(obj, D, cutoff)
    raise TypeError(f"cannot evaluate {type(obj).__name__}")


def number_diagonal(D: int, power: int = 1) -> np.ndarray:
    return np.diag(np.arange(D, dtype=float) ** power).astype(complex)


