"""Phase-space symbols of Fock and coherent projectors, and trace pairing.

Convention: ``W_F(alpha, u)`` is the classical symbol of ``F`` in its
``(-u)``-ordered expansion, with ``a^dagger -> conj(alpha)`` and ``a -> alpha``.
So ``W_{|n><m|}(alpha, -t)`` is read off the t-ordered projector and
``W_{|beta><beta|}(alpha, t)`` off the (-t)-ordered coherent projector. With
this choice

    Tr(F G) = int d^2 alpha / pi  W_F(alpha, -t) W_G(alpha, t)

holds for any pair of opposite orderings, in particular
``<m|F|n> = int d^2 alpha/pi W_{|n><m|}(alpha, -t) W_F(alpha, t)``.
Integrals use a midpoint tensor rule on ``[-L, L]^2``; the integrands are
entire functions times Gaussians, for which this converges spectrally.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Callable, Sequence

import numpy as np

from .hermite2d import h2_eval
from .ordered_algebra import OrderedPoly, OrderingPoleError, convert_poly

DEFAULT_L = 6.0
DEFAULT_N = 160
CALIBRATION_TOL = 1e-8

Symbol = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform midpoint grid of ``N x N`` nodes over ``[-L, L]^2``."""

    L: float = DEFAULT_L
    N: int = DEFAULT_N

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("half-width L must be positive")
        if self.N <= 0 or self.N % 2:
            raise ValueError("points per axis N must be a positive even integer")

    @property
    def spacing(self) -> float:
        return 2 * self.L / self.N

    @property
    def weight(self) -> float:
        return self.spacing**2

    @cached_property
    def axis(self) -> np.ndarray:
        # mirror the positive half so x -> -x maps nodes onto nodes bit for bit
        half = (np.arange(self.N // 2) + 0.5) * self.spacing
        return np.concatenate((-half[::-1], half))

    @cached_property
    def nodes(self) -> np.ndarray:
        """Complex nodes, rows indexed by y and columns by x."""
        x = self.axis
        return x[np.newaxis, :] + 1j * x[:, np.newaxis]

    def integrate(self, values: np.ndarray) -> complex:
        """``(1/pi) sum w f``, compensated so results are reproducible."""
        values = np.asarray(values, dtype=complex).ravel()
        re = math.fsum(values.real)
        im = math.fsum(values.imag)
        return complex(re, im) * self.weight / math.pi


def calibrate(grid: QuadratureGrid) -> float:
    """Grid value of ``(1/pi) int exp(-|alpha|^2)``; exactly 1 in the continuum."""
    a = grid.nodes
    return grid.integrate(np.exp(-(a * a.conjugate()).real)).real


def check_calibration(grid: QuadratureGrid, tol: float = CALIBRATION_TOL) -> float:
    err = abs(calibrate(grid) - 1)
    if err > tol:
        raise ValueError(f"quadrature calibration failed: |I - 1| = {err:.3g} > {tol:g}")
    return err


def _projector_params(t: float):
    if t == -1:
        raise OrderingPoleError("pole at t = -1: f = 2/(t + 1) is undefined")
    return 2 / (t + 1), (t * t - 1) / 4


def w_projector(n: int, m: int, alpha, t: float):
    """``W_{|n><m|}(alpha, -t) = (n! m!)^(-1/2) f^(n+m+1) h_{n,m}(alpha*, alpha | kappa) e^(-f |alpha|^2)``."""
    f, kappa = _projector_params(t)
    alpha = np.asarray(alpha, dtype=complex)
    conj = alpha.conjugate()
    out = (
        f ** (n + m + 1)
        / math.sqrt(factorial(n) * factorial(m))
        * h2_eval(n, m, conj, alpha, kappa)
        * np.exp(-f * (conj * alpha).real)
    )
    return out[()] if out.ndim == 0 else out


def w_coherent(beta: complex, alpha, t: float):
    """``W_{|beta><beta|}(alpha, t) = 2/(1-t) exp(-2 |beta - alpha|^2 / (1-t))``."""
    if t == 1:
        raise OrderingPoleError("pole at t = 1: 2/(1 - t) is undefined")
    alpha = np.asarray(alpha, dtype=complex)
    out = 2 / (1 - t) * np.exp(-2 * np.abs(beta - alpha) ** 2 / (1 - t))
    return out[()] if out.ndim == 0 else out


def w_operator(P: OrderedPoly, t: float) -> Symbol:
    """``W_P(., t)``: the symbol of ``P`` after conversion to order ``-t``."""
    converted = convert_poly(P, -t)
    return converted.symbol


def trace_pair(Wf, Wg, grid: QuadratureGrid | None = None) -> complex:
    """``int d^2 alpha/pi Wf Wg`` on ``grid``.

    ``Wf`` and ``Wg`` are callables on complex arrays or arrays already sampled
    on the grid nodes. The result is left complex; an imaginary residue is a
    quadrature-quality signal, not something to discard.
    """
    grid = grid or QuadratureGrid()
    a = grid.nodes
    f = Wf(a) if callable(Wf) else np.asarray(Wf)
    g = Wg(a) if callable(Wg) else np.asarray(Wg)
    return grid.integrate(f * g)


@dataclass(frozen=True)
class IntegrationCheck:
    n: int
    m: int
    beta: complex
    t: float
    lhs: complex
    rhs: complex

    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.rhs)


def verify_integration_formula(
    n: int, m: int, beta: complex, t: float, grid: QuadratureGrid | None = None
) -> IntegrationCheck:
    """Compare ``beta*^n beta^m`` with its Gaussian-integral representation.

    rhs = 2 f^(n+m+1) e^(|beta|^2)/(1-t) int d^2 alpha/pi
          h_{n,m}(alpha*, alpha | kappa) exp(-f |alpha|^2 - 2 |beta - alpha|^2/(1-t))

    with ``f = 2/(t+1)`` and ``kappa = (t^2-1)/4``. Needs ``-1 < t < 1``.
    """
    if not -1 < t < 1:
        raise ValueError(f"t must lie in (-1, 1) so both Gaussian rates are positive, got {t}")
    grid = grid or QuadratureGrid()
    f, kappa = _projector_params(t)
    a = grid.nodes
    conj = a.conjugate()
    integrand = h2_eval(n, m, conj, a, kappa) * np.exp(
        -f * (conj * a).real - 2 * np.abs(beta - a) ** 2 / (1 - t)
    )
    rhs = 2 * f ** (n + m + 1) * math.exp(abs(beta) ** 2) / (1 - t) * grid.integrate(integrand)
    lhs = complex(np.conj(beta) ** n * beta**m)
    return IntegrationCheck(n, m, complex(beta), t, lhs, rhs)


def constant_discrepancy(checks: Sequence[IntegrationCheck], rtol: float = 1e-6) -> complex | None:
    """Common ratio ``lhs/rhs`` over all checks with non-negligible values.

    Returns the ratio if it is the same for every check to ``rtol``, else
    ``None``. A ratio of 1 means the formula holds as displayed.
    """
    ratios = [c.lhs / c.rhs for c in checks if abs(c.lhs) > 1e-8 and abs(c.rhs) > 1e-8]
    if not ratios:
        return None
    ref = ratios[0]
    if all(abs(r - ref) <= rtol * abs(ref) for r in ratios):
        return ref
    return None


@dataclass(frozen=True)
class ComplexGrid:
    """A symbol sampled on the nodes of a :class:`QuadratureGrid`."""

    L: float
    N: int
    values: np.ndarray

    def __post_init__(self):
        if np.shape(self.values) != (self.N, self.N):
            raise ValueError(f"expected {self.N}x{self.N} values, got {np.shape(self.values)}")

    @property
    def grid(self) -> QuadratureGrid:
        return QuadratureGrid(self.L, self.N)

    def rows(self):
        """``(x, y, re, im)`` tuples, row-major (y outer, x inner)."""
        ax = self.grid.axis
        for iy, y in enumerate(ax):
            for ix, x in enumerate(ax):
                v = complex(self.values[iy, ix])
                yield float(x), float(y), v.real, v.imag

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y", "re", "im"])
        for row in self.rows():
            writer.writerow([repr(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "L": self.L,
            "N": self.N,
            "values": [{"x": x, "y": y, "re": re, "im": im} for x, y, re, im in self.rows()],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> ComplexGrid:
        doc = json.loads(text)
        N = int(doc["N"])
        vals = np.array([complex(v["re"], v["im"]) for v in doc["values"]]).reshape(N, N)
        return cls(float(doc["L"]), N, vals)

    @classmethod
    def from_csv(cls, text: str, L: float) -> ComplexGrid:
        reader = csv.DictReader(io.StringIO(text))
        vals = [complex(float(r["re"]), float(r["im"])) for r in reader]
        N = math.isqrt(len(vals))
        return cls(L, N, np.array(vals).reshape(N, N))


def sample_grid(symbol: Symbol, L: float = DEFAULT_L, N: int = DEFAULT_N) -> ComplexGrid:
    grid = QuadratureGrid(L, N)
    values = np.broadcast_to(np.asarray(symbol(grid.nodes), dtype=complex), (N, N)).copy()
    return ComplexGrid(L, N, values)
