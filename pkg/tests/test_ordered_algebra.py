import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sorder import fock_oracle as fo
from sorder import hermite2d as h2
from sorder import ordered_algebra as oa

coef = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False).filter(
    lambda c: abs(c) > 1e-3
)
order = st.floats(-1, 1)


@st.composite
def polys(draw, max_deg=8):
    s = draw(order)
    keys = draw(
        st.lists(
            st.tuples(st.integers(0, max_deg), st.integers(0, max_deg)).filter(lambda k: sum(k) <= max_deg),
            min_size=1,
            max_size=6,
            unique=True,
        )
    )
    return oa.OrderedPoly(s, {k: draw(coef) for k in keys})


# OrderedPoly container --------------------------------------------------


def test_pruning_keeps_tiny_but_nonzero_terms():
    P = oa.OrderedPoly(0.0, {(1, 1): 1e-200, (0, 0): 0.0, (2, 0): 1e-320})
    assert set(P.terms) == {(1, 1)}


def test_negative_exponent_rejected():
    with pytest.raises(ValueError):
        oa.OrderedPoly(0.0, {(-1, 0): 1})


def test_terms_are_read_only():
    P = oa.OrderedPoly.monomial(1, 1, 0.0)
    with pytest.raises(TypeError):
        P.terms[(0, 0)] = 1


def test_mixing_orders_is_an_error():
    with pytest.raises(ValueError, match="convert first"):
        oa.OrderedPoly.constant(1, 0.0) + oa.OrderedPoly.constant(1, 0.5)


def test_equality_tolerance():
    a = oa.OrderedPoly(0.5, {(1, 1): 1.0, (0, 0): 2.0})
    assert a == oa.OrderedPoly(0.5, {(1, 1): 1.0 + 1e-14, (0, 0): 2.0})
    assert a != oa.OrderedPoly(0.5, {(1, 1): 1.0 + 1e-9, (0, 0): 2.0})
    assert a != oa.OrderedPoly(0.0, dict(a.terms))


def test_json_schema_and_round_trip():
    P = oa.OrderedPoly(-0.25, {(2, 1): 1 - 2j, (0, 0): 0.5})
    doc = json.loads(P.to_json())
    assert doc["order"] == -0.25
    assert {"p": 2, "q": 1, "re": 1.0, "im": -2.0} in doc["terms"]
    assert oa.OrderedPoly.from_json(P.to_json()) == P


@pytest.mark.parametrize(
    "text", ["not json", "{}", '{"order": 0, "terms": [{"p": 1}]}', '{"order": "x", "terms": []}']
)
def test_malformed_json(text):
    with pytest.raises(ValueError):
        oa.OrderedPoly.from_json(text)


# conversion -------------------------------------------------------------


def test_convert_monomial_examples():
    # {a^dagger a}_s at normal order picks up the constant (1 - s)/2
    assert oa.convert_monomial(1, 1, -1, 1) == oa.OrderedPoly(1, {(1, 1): 1, (0, 0): 1})
    assert oa.convert_monomial(1, 1, 1, -1) == oa.OrderedPoly(-1, {(1, 1): 1, (0, 0): -1})
    assert oa.convert_monomial(3, 0, 0.2, -0.7) == oa.OrderedPoly.monomial(3, 0, -0.7)


@settings(max_examples=50, deadline=None)
@given(polys(), order, order)
def test_transitivity(P, u, t):
    two_step = oa.convert_poly(oa.convert_poly(P, u), t)
    assert two_step.isclose(oa.convert_poly(P, t), rtol=1e-12)


@settings(max_examples=50, deadline=None)
@given(polys(), order)
def test_round_trip(P, t):
    assert oa.convert_poly(oa.convert_poly(P, t), P.order).isclose(P, rtol=1e-12)


def test_identity_conversion():
    P = oa.OrderedPoly(0.3, {(2, 2): 1.5, (1, 0): 2j})
    Q = oa.convert_poly(P, 0.3)
    assert dict(Q.terms) == dict(P.terms)


@pytest.mark.parametrize("s", [-1, -0.5, 0, 0.5, 1])
def test_worked_example_reaches_number_squared(s):
    tp, tm = (s + 1) / 2, (s - 1) / 2
    P = oa.OrderedPoly(s, {(2, 2): 1, (1, 1): tp + 3 * tm, (0, 0): tp * tm + tm * tm})
    assert oa.convert_poly(P, 1.0) == oa.OrderedPoly(1.0, {(2, 2): 1, (1, 1): 1})


def test_number_op_powers():
    assert oa.number_op_power(1) == oa.OrderedPoly.monomial(1, 1, 1.0)
    assert oa.number_op_power(2) == oa.OrderedPoly(1.0, {(2, 2): 1, (1, 1): 1})
    # Stirling numbers of the second kind S(4, k)
    assert oa.number_op_power(4) == oa.OrderedPoly(1.0, {(4, 4): 1, (3, 3): 6, (2, 2): 7, (1, 1): 1})
    D = 12
    assert fo.matrix_distance(fo.eval_poly(oa.number_op_power(3), D), fo.number_diagonal(D, 3), 0) < 1e-9


def test_degree_cap_propagates():
    with pytest.raises(h2.DegreeError):
        oa.convert_monomial(h2.MAX_DEGREE + 1, 0, 0, 1)


# exponential forms ------------------------------------------------------


def test_exp_reorder_examples():
    E = oa.OrderedExp(1.0, 0, 0, 0.0, -0.7, 0.2)
    same = oa.exp_reorder(E, 0.2)
    assert same.prefactor == 1 and same.lam == -0.7
    t = 0.4
    R = oa.exp_reorder(oa.OrderedExp(1.0, 0, 0, 0.0, -1.0, 1.0), t)
    assert R.prefactor == pytest.approx(2 / (t + 1))
    assert R.lam == pytest.approx(-2 / (t + 1))
    assert R.order == t


def test_exp_reorder_pole():
    with pytest.raises(oa.OrderingPoleError, match="ordering pole"):
        oa.exp_reorder(oa.OrderedExp(1.0, 0, 0, 0.0, 2.0, 0.0), 1.0)


def test_exp_reorder_needs_plain_exponential():
    with pytest.raises(ValueError):
        oa.exp_reorder(oa.OrderedExp(1.0, 1, 0, 0.0, 0.5, 0.0), 1.0)


@pytest.mark.parametrize("lam,s,t", [(0.3, 0.0, 0.8), (-1.0, 0.5, -0.5), (-0.5, 1.0, 0.0)])
def test_exp_reorder_oracle(lam, s, t):
    E = oa.OrderedExp(1.0, 0, 0, 0.0, lam, s)
    lhs = fo.eval_exp(E, 30, 40)
    rhs = fo.eval_exp(oa.exp_reorder(E, t), 30, 40)
    assert fo.matrix_distance(lhs, rhs) < 1e-8


def test_exp_to_poly_examples():
    lam_zero = oa.exp_to_poly(oa.OrderedExp(1.0, 2, 1, 0.3, 0.0, 0.0), 10)
    assert lam_zero == oa.OrderedPoly(0.0, {(2, 1): 1, (1, 0): 2 * 0.3})
    plain = oa.exp_to_poly(oa.OrderedExp(1.0, 0, 0, 0.0, 0.5, -0.5), 6)
    assert plain == oa.OrderedPoly(-0.5, {(k, k): 0.5**k / math.factorial(k) for k in range(7)})
    assert plain.tail == pytest.approx(0.5**7 / math.factorial(7))


def test_exp_to_poly_degree_cap():
    with pytest.raises(h2.DegreeError):
        oa.exp_to_poly(oa.OrderedExp(1.0, 10, 10, 0.0, 0.5, 0.0), h2.MAX_DEGREE)


def test_euler_weights():
    assert oa.euler_weights(5) == [1] * 6
    # weights must reproduce a convergent geometric series 1/(1 - x)
    # the transformed series has ratio (x + q)/(1 + q)
    x = 0.5
    for q in (0.3, 1.0, 2.0):
        w = oa.euler_weights(80, q)
        rate = ((x + q) / (1 + q)) ** 80
        assert sum(wk * x**k for k, wk in enumerate(w)) == pytest.approx(1 / (1 - x), rel=10 * rate + 1e-14)
    # and sum a divergent one: q = 2 makes the ratio vanish at x = -2
    w = oa.euler_weights(10, 2)
    assert sum(wk * (-2) ** k for k, wk in enumerate(w)) == pytest.approx(1 / 3, rel=1e-12)
    with pytest.raises(ValueError):
        oa.euler_weights(3, -1)


def test_sandwich_trivial_cases():
    E = oa.OrderedExp(1.0, 0, 0, 0.0, -0.4, 0.5)
    same = oa.sandwich(E, 0, 0)
    assert (same.prefactor, same.n, same.m, same.lam) == (1.0, 0, 0, -0.4)
    normal = oa.sandwich(oa.OrderedExp(1.0, 0, 0, 0.0, -0.4, 1.0), 3, 2)
    assert normal.kappa == 0 and normal.prefactor == 1


def test_sandwich_degenerate_kappa():
    with pytest.raises(oa.DegenerateKappaError, match="degenerate kappa"):
        oa.sandwich(oa.OrderedExp(1.0, 0, 0, 0.0, 2.0, 0.0), 1, 1)


def test_sandwich_oracle_example():
    D = 30
    E = oa.OrderedExp(1.0, 0, 0, 0.0, -0.5, 0.0)
    A, Ad = fo.ladder(D)
    direct = Ad @ Ad @ fo.eval_exp(E, D) @ A
    assert fo.matrix_distance(fo.eval_exp(oa.sandwich(E, 2, 1), D), direct) < 1e-8


# projectors ---------------------------------------------------------------


def test_projector_parameters():
    P = oa.projector(2, 1, 1.0)
    assert P.kappa == 0 and P.lam == -1
    assert P.prefactor == pytest.approx(1 / math.sqrt(2))
    V = oa.projector(0, 0, 0.0)
    assert (V.prefactor, V.lam) == (2.0, -2.0)


def test_projector_pole():
    with pytest.raises(oa.OrderingPoleError, match="antinormal pole"):
        oa.projector(1, 1, -1.0)


@pytest.mark.parametrize("n,m,t", [(0, 0, 0.0), (1, 1, 0.5), (2, 1, 0.5), (3, 0, -0.5)])
def test_projector_oracle(n, m, t):
    M = fo.eval_exp(oa.projector(n, m, t), 30)
    assert fo.matrix_distance(M, fo.basis_projector(n, m, 30)) < 1e-8


@pytest.mark.parametrize("t", [-0.5, 0.0, 0.5, 1.0])
def test_projector_laguerre_form_matches_hermite_form(t):
    for n in range(6):
        E = oa.projector(n, n, t)
        from_h = oa.OrderedPoly(t, {(n - i, n - i): E.prefactor * c * E.kappa**i for i, c in h2.h2_coeffs(n, n)})
        assert from_h.isclose(oa.projector_laguerre(n, t), rtol=1e-12)


def test_projector_completeness():
    D, N0 = 30, 12
    total = sum(fo.eval_exp(oa.projector(n, n, 0.5), D) for n in range(N0 + 1))
    k = N0 - 5
    assert np.max(np.abs(total[:k, :k] - np.eye(k))) < 1e-6


def test_projector_hermiticity():
    for n, m in [(0, 1), (2, 3), (1, 3)]:
        X = fo.eval_exp(oa.projector(n, m, 0.5), 30)
        Y = fo.eval_exp(oa.projector(m, n, 0.5), 30)
        assert np.max(np.abs(X - Y.conj().T)) < 1e-10


# coherent projector -----------------------------------------------------------


def test_coherent_projector_forms():
    G = oa.coherent_projector(0.7 + 0.2j, 0.0)
    assert (G.prefactor, G.rate, G.order) == (2, 2, -0.0)
    normal = oa.coherent_projector(0.3j, -1.0)
    assert normal.rate == 1 and normal.order == 1
    with pytest.raises(oa.OrderingPoleError):
        oa.coherent_projector(0.1, 1.0)


def test_coherent_projector_oracle():
    beta = 0.7 + 0.2j
    D = 30
    v = fo.coherent_vector(beta, D)
    M = fo.eval_gaussian(oa.coherent_projector(beta, 0.0), D)
    assert fo.matrix_distance(M, np.outer(v, v.conj())) < 1e-7


def test_coherent_projector_at_zero_is_plain_exponential():
    G = oa.coherent_projector(0, 0.5)
    E = oa.OrderedExp(G.prefactor, 0, 0, 0.0, -G.rate, G.order)
    assert fo.matrix_distance(fo.eval_gaussian(G, 30), fo.eval_exp(E, 30)) < 1e-10
