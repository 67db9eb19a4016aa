"""Boson polynomials and Gaussian closed forms under an s-ordering symbol.

An ordering is labelled by a real parameter ``s`` (1 normal, 0 Weyl,
-1 antinormal). Inside ``{...}_s`` the symbols ``a^dagger`` and ``a`` commute,
so a polynomial is a coefficient map over exponent pairs ``(p, q)`` meaning
``sum c_pq {a^dagger^p a^q}_s``. Orderings are plain numbers; coefficients may
be ``complex`` or ``mpmath.mpc`` (used by the Fock-space oracle for extra
precision), and every routine here is written to carry either type through.

Conversion between orderings follows

    {a^dagger^p a^q}_s = sum_i C(p,i) C(q,i) i! ((t - s)/2)^i {a^dagger^(p-i) a^(q-i)}_t,

i.e. the coefficient image of ``h_{p,q}(., . | (t - s)/2)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb, factorial, sqrt
from types import MappingProxyType
from typing import Mapping

import numpy as np
from numpy.polynomial import laguerre as _np_laguerre

from .hermite2d import check_degree, h2_coeffs, h2_eval

PRUNE_BELOW = 1e-300
DEFAULT_CUTOFF = 40


class OrderingPoleError(ValueError):
    """A reordering formula hit a pole of its prefactor."""


class DegenerateKappaError(ValueError):
    """``kappa = (s - 1)/2 * lam + 1`` vanished in a ladder sandwich."""


Key = tuple[int, int]


@dataclass(frozen=True, eq=False)
class OrderedPoly:
    """``sum c_pq {a^dagger^p a^q}_order`` with zero coefficients pruned.

    ``tail`` carries the truncation diagnostic of :func:`exp_to_poly` and takes
    no part in equality.
    """

    order: float
    terms: Mapping[Key, complex] = field(default_factory=dict)
    tail: float = 0.0

    def __post_init__(self):
        clean = {}
        for (p, q), c in self.terms.items():
            if p < 0 or q < 0:
                raise ValueError(f"negative exponent in term {(p, q)}")
            if abs(c) >= PRUNE_BELOW:
                clean[(int(p), int(q))] = c
        object.__setattr__(self, "terms", MappingProxyType(clean))

    @classmethod
    def constant(cls, c, order: float) -> OrderedPoly:
        return cls(order, {(0, 0): c})

    @classmethod
    def monomial(cls, p: int, q: int, order: float, c=1.0 + 0j) -> OrderedPoly:
        return cls(order, {(p, q): c})

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __getitem__(self, key: Key):
        return self.terms.get(key, 0)

    @property
    def degree(self) -> int:
        return max((p + q for p, q in self.terms), default=0)

    def _check_order(self, other: OrderedPoly) -> None:
        if other.order != self.order:
            raise ValueError(
                f"cannot combine polynomials at orders {self.order} and {other.order}; convert first"
            )

    def __add__(self, other: OrderedPoly) -> OrderedPoly:
        self._check_order(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return OrderedPoly(self.order, out)

    def __neg__(self) -> OrderedPoly:
        return self.scale(-1)

    def __sub__(self, other: OrderedPoly) -> OrderedPoly:
        return self + (-other)

    def scale(self, c) -> OrderedPoly:
        return OrderedPoly(self.order, {k: c * v for k, v in self.terms.items()})

    def symbol_product(self, other: OrderedPoly) -> OrderedPoly:
        """Classical product of two symbols inside one ordering bracket.

        This is not the operator product: ``{F}_s {G}_s != {F G}_s`` in general.
        """
        self._check_order(other)
        out: dict[Key, complex] = {}
        for (p1, q1), c1 in self.terms.items():
            for (p2, q2), c2 in other.terms.items():
                k = (p1 + p2, q1 + q2)
                out[k] = out.get(k, 0) + c1 * c2
        return OrderedPoly(self.order, out)

    def symbol(self, alpha):
        """Classical value with ``a^dagger -> conj(alpha)``, ``a -> alpha``.

        ``alpha`` may be a scalar or a numpy array.
        """
        conj = alpha.conjugate()
        total = 0
        for (p, q), c in self.terms.items():
            total = total + complex(c) * conj**p * alpha**q
        return total

    def isclose(self, other: OrderedPoly, rtol: float = 1e-12) -> bool:
        """Coefficient-wise comparison.

        Matched keys must agree to ``rtol`` relative to the larger of the two
        coefficients; unmatched (or cancelling) keys are allowed residue up to
        ``rtol`` times the largest coefficient of either polynomial.
        """
        if other.order != self.order:
            return False
        scale = max((abs(c) for c in (*self.terms.values(), *other.terms.values())), default=0)
        for k in set(self.terms) | set(other.terms):
            a, b = self[k], other[k]
            diff = abs(a - b)
            if diff > rtol * max(abs(a), abs(b)) and diff > rtol * scale:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, OrderedPoly):
            return NotImplemented
        return self.isclose(other)

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "order": float(self.order),
            "terms": [
                {"p": p, "q": q, "re": complex(c).real, "im": complex(c).imag}
                for (p, q), c in self
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> OrderedPoly:
        try:
            order = float(data["order"])
            terms: dict[Key, complex] = {}
            for t in data["terms"]:
                k = (int(t["p"]), int(t["q"]))
                terms[k] = terms.get(k, 0) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed OrderedPoly document: {exc}") from exc
        return cls(order, terms)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> OrderedPoly:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed JSON: {exc}") from exc
        return cls.from_dict(data)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {complex(c):.6g}" for k, c in self)
        return f"OrderedPoly(order={self.order}, {{{body}}})"


@dataclass(frozen=True)
class OrderedExp:
    """``prefactor * {h_{n,m}(a^dagger, a | kappa) * exp(lam a^dagger a)}_order``."""

    prefactor: complex
    n: int
    m: int
    kappa: complex
    lam: complex
    order: float

    def __post_init__(self):
        check_degree(self.n, self.m)

    def symbol(self, alpha):
        """Classical symbol at ``a^dagger -> conj(alpha)``, ``a -> alpha``."""
        x = alpha.conjugate()
        return (
            complex(self.prefactor)
            * h2_eval(self.n, self.m, x, alpha, complex(self.kappa))
            * np.exp(complex(self.lam) * x * alpha)
        )


@dataclass(frozen=True)
class GaussianForm:
    """``prefactor * {exp[-rate (conj(center) - a^dagger)(center - a)]}_order``."""

    prefactor: complex
    center: complex
    rate: complex
    order: float

    def exponent(self) -> OrderedPoly:
        b = self.center
        r = self.rate
        return OrderedPoly(
            self.order,
            {(1, 1): -r, (1, 0): r * b, (0, 1): r * b.conjugate(), (0, 0): -r * b * b.conjugate()},
        )

    def symbol(self, alpha):
        return complex(self.prefactor) * np.exp(
            -complex(self.rate) * (self.center.conjugate() - alpha.conjugate()) * (self.center - alpha)
        )

    def to_poly(self, cutoff: int = DEFAULT_CUTOFF, euler=None) -> OrderedPoly:
        """Expand ``exp`` of the quadratic exponent to ``cutoff`` powers.

        ``euler`` selects Euler-weighted partial sums, see :func:`euler_weights`.
        """
        check_degree(cutoff, cutoff)
        weights = euler_weights(cutoff, euler)
        q = self.exponent()
        power = OrderedPoly.constant(1, self.order)
        total: dict[Key, complex] = {}
        for k in range(cutoff + 1):
            if k:
                power = power.symbol_product(q).scale(1 / _as_like(k, self.rate))
            for key, c in power.terms.items():
                total[key] = total.get(key, 0) + self.prefactor * weights[k] * c
        return OrderedPoly(self.order, total)


def _as_like(k: int, ref):
    """``k`` in the numeric family of ``ref`` so mpmath precision is kept."""
    return k if isinstance(ref, (int, float, complex)) else type(ref)(k)


def convert_monomial(p: int, q: int, s: float, t: float) -> OrderedPoly:
    """Express ``{a^dagger^p a^q}_s`` at order ``t``."""
    check_degree(p, q)
    tau = (t - s) / 2
    terms = {}
    for i, c in h2_coeffs(p, q):
        terms[(p - i, q - i)] = c * tau**i if i else 1.0 + 0j
    return OrderedPoly(t, terms)


def convert_poly(poly: OrderedPoly, t: float) -> OrderedPoly:
    """Re-express ``poly`` at order ``t`` term by term."""
    if t == poly.order:
        return OrderedPoly(t, dict(poly.terms))
    tau = (t - poly.order) / 2
    out: dict[Key, complex] = {}
    for (p, q), c in poly.terms.items():
        check_degree(p, q)
        for i, ci in h2_coeffs(p, q):
            k = (p - i, q - i)
            out[k] = out.get(k, 0) + c * ci * tau**i
    return OrderedPoly(t, out)


def number_op_power(k: int) -> OrderedPoly:
    """Normal-ordered expansion of ``(a^dagger a)^k``.

    Built by repeated right multiplication,
    ``a^dagger^p a^q (a^dagger a) = a^dagger^(p+1) a^(q+1) + q a^dagger^p a^q``.
    """
    check_degree(k, k)
    terms: dict[Key, int] = {(0, 0): 1}
    for _ in range(k):
        nxt: dict[Key, int] = {}
        for (p, q), c in terms.items():
            nxt[(p + 1, q + 1)] = nxt.get((p + 1, q + 1), 0) + c
            if q:
                nxt[(p, q)] = nxt.get((p, q), 0) + q * c
        terms = nxt
    return OrderedPoly(1.0, {key: complex(c) for key, c in terms.items()})


def _require_plain_exp(E: OrderedExp, what: str) -> None:
    if E.n or E.m:
        raise ValueError(f"{what} needs a pure ordered exponential (n = m = 0), got n={E.n}, m={E.m}")


def exp_reorder(E: OrderedExp, t: float) -> OrderedExp:
    """``{e^(lam a^dagger a)}_s = f {e^(g a^dagger a)}_t``, ``f = 2/(2 - lam (t - s))``, ``g = lam f``."""
    _require_plain_exp(E, "exp_reorder")
    denom = 2 - E.lam * (t - E.order)
    if abs(denom) == 0:
        raise OrderingPoleError(f"ordering pole: lam*(t - s) = {E.lam * (t - E.order)} equals 2")
    f = 2 / denom
    return OrderedExp(E.prefactor * f, 0, 0, E.kappa, E.lam * f, t)


def sandwich(E: OrderedExp, n_left: int, m_right: int) -> OrderedExp:
    """``a^dagger^n {e^(lam a^dagger a)}_s a^m`` as a single s-ordered form.

    The result is ``kappa^(n+m) {h_{n,m}(a^dagger, a | tau/kappa) e^(lam a^dagger a)}_s``
    with ``tau = (s - 1)/2`` and ``kappa = tau lam + 1``.
    """
    _require_plain_exp(E, "sandwich")
    if n_left < 0 or m_right < 0:
        raise ValueError("ladder powers must be non-negative")
    tau = (E.order - 1) / 2
    kappa = tau * E.lam + 1
    if abs(kappa) == 0:
        raise DegenerateKappaError(f"degenerate kappa: (s - 1)/2 * lam + 1 = 0 at s={E.order}, lam={E.lam}")
    return OrderedExp(
        E.prefactor * kappa ** (n_left + m_right), n_left, m_right, tau / kappa, E.lam, E.order
    )


def _projector_params(t: float):
    if t == -1:
        raise OrderingPoleError("antinormal pole: the projector expansion is undefined at t = -1")
    f = 2 / (t + 1)
    kappa = (t * t - 1) / 4
    return f, kappa


def projector(n: int, m: int, t: float) -> OrderedExp:
    """``|n><m|`` as ``(n! m!)^(-1/2) f^(n+m+1) {h_{n,m}(a^dagger, a | kappa) e^(-f a^dagger a)}_t``.

    ``f = 2/(t + 1)``, ``kappa = (t^2 - 1)/4``; ``t = -1`` is a pole.
    """
    check_degree(n, m)
    f, kappa = _projector_params(t)
    c = f ** (n + m + 1) / sqrt(factorial(n) * factorial(m))
    return OrderedExp(c, n, m, kappa, -f, t)


def projector_laguerre(n: int, t: float) -> OrderedPoly:
    """Diagonal projector ``f^(2n+1) kappa^n {L_n(-a^dagger a/kappa) e^(-f a^dagger a)}_t``.

    Returns only the polynomial factor ``f^(2n+1) kappa^n L_n(-x/kappa)`` as an
    OrderedPoly in ``x = a^dagger a``; the exponential is the same as in
    :func:`projector`. Coefficients come from the Laguerre power series, so
    ``kappa = 0`` (t = 1) is regular: ``kappa^n (-1/kappa)^k = (-1)^k kappa^(n-k)``.
    """
    f, kappa = _projector_params(t)
    basis = [0] * n + [1]
    coeffs = _np_laguerre.lag2poly(basis)
    terms = {}
    for k, ck in enumerate(coeffs):
        terms[(k, k)] = f ** (2 * n + 1) * ck * (-1) ** k * kappa ** (n - k)
    return OrderedPoly(t, terms)


def coherent_projector(beta: complex, t: float) -> GaussianForm:
    """``|beta><beta| = 2/(1-t) {exp[-2/(1-t) (beta* - a^dagger)(beta - a)]}_(-t)``."""
    if t == 1:
        raise OrderingPoleError("pole of 2/(1 - t) at t = 1")
    rate = 2 / (1 - t)
    return GaussianForm(rate + 0j, complex(beta), rate, -t)


def euler_weights(cutoff: int, q=None) -> list:
    """Per-term weights of Euler (E, q) summation truncated at ``cutoff``.

    Summing ``sum_k a_k`` through the substitution ``z = w/(1 - q w)`` evaluated
    at ``w = 1/(1 + q)`` turns into ``sum_k weight_k a_k`` with
    ``weight_k = sum_{n=k..cutoff} C(n-1, n-k) q^(n-k) w^n`` (``weight_0 = 1``).
    ``q=None`` or 0 gives plain partial sums. The method is regular, so it
    agrees with the ordinary sum wherever that converges.
    """
    if q is None or q == 0:
        return [1] * (cutoff + 1)
    if q == -1:
        raise ValueError("Euler parameter q = -1 maps the evaluation point to infinity")
    w = 1 / (1 + q)
    weights = [w**0]
    for k in range(1, cutoff + 1):
        acc = 0
        for n in range(k, cutoff + 1):
            acc += comb(n - 1, n - k) * q ** (n - k) * w**n
        weights.append(acc)
    return weights


def exp_to_poly(E: OrderedExp, cutoff: int = DEFAULT_CUTOFF, euler=None) -> OrderedPoly:
    """Expand the exponential of ``E`` to ``cutoff`` powers inside the ordering symbol.

    The result's ``tail`` is ``|prefactor| |lam|^(N+1)/(N+1)! max_i |c_i kappa^i|``,
    the size of the first dropped coefficient.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    check_degree(E.n + cutoff, E.m + cutoff)
    weights = euler_weights(cutoff, euler)
    hterms = [(i, c * E.kappa**i if i else c) for i, c in h2_coeffs(E.n, E.m)]
    out: dict[Key, complex] = {}
    lam_k = E.prefactor
    for k in range(cutoff + 1):
        if k:
            lam_k = lam_k * E.lam / _as_like(k, E.lam)
        wk = lam_k * weights[k]
        for i, c in hterms:
            key = (E.n - i + k, E.m - i + k)
            out[key] = out.get(key, 0) + wk * c
    hmax = max(abs(c) for _, c in hterms)
    tail = float(abs(lam_k * E.lam) / (cutoff + 1) * hmax)
    return OrderedPoly(E.order, out, tail=tail)
