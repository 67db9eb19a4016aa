import cmath
import math

import numpy as np
import pytest

from sorder import fock_oracle as fo
from sorder import ordered_algebra as oa
from sorder import phase_space as ps


def test_grid_validation():
    with pytest.raises(ValueError):
        ps.QuadratureGrid(6.0, 161)
    with pytest.raises(ValueError):
        ps.QuadratureGrid(0.0, 160)


def test_grid_symmetry():
    a = ps.QuadratureGrid(3.0, 20).nodes
    assert np.array_equal(np.sort_complex((-a).ravel()), np.sort_complex(a.ravel()))
    assert np.array_equal(np.sort_complex(a.conjugate().ravel()), np.sort_complex(a.ravel()))
    assert ps.QuadratureGrid(3.0, 20).weight == pytest.approx(0.09)


def test_calibration(grid):
    assert abs(ps.calibrate(grid) - 1) < 1e-8
    assert ps.check_calibration(ps.QuadratureGrid(6.0, 120)) < 1e-8


def test_calibration_gate_rejects_coarse_grid():
    with pytest.raises(ValueError, match="calibration"):
        ps.check_calibration(ps.QuadratureGrid(2.0, 160))


def test_w_projector_examples():
    alpha = 0.4 - 0.3j
    assert ps.w_projector(0, 0, alpha, 1.0) == pytest.approx(math.exp(-abs(alpha) ** 2))
    v = fo.coherent_vector(alpha, 20)
    assert ps.w_projector(0, 0, alpha, 1.0) == pytest.approx(abs(v[0]) ** 2)
    assert ps.w_projector(0, 0, alpha, 0.0) == pytest.approx(2 * math.exp(-2 * abs(alpha) ** 2))
    assert ps.w_projector(1, 0, 0, 0.3) == 0
    assert ps.w_projector(1, 1, 0, 0.0) == pytest.approx(-2)
    with pytest.raises(oa.OrderingPoleError):
        ps.w_projector(0, 0, alpha, -1.0)


def test_w_coherent_examples():
    b = 0.3 + 1.1j
    assert ps.w_coherent(b, b, 0.0) == 2
    assert ps.w_coherent(0, b, -1.0) == pytest.approx(math.exp(-abs(b) ** 2))
    with pytest.raises(oa.OrderingPoleError):
        ps.w_coherent(b, 0, 1.0)


def test_symbol_hermiticity():
    a = ps.QuadratureGrid(4.0, 40).nodes
    for t in (-0.5, 0.0, 0.5, 1.0):
        for n, m in [(0, 1), (2, 3), (4, 1)]:
            X = ps.w_projector(n, m, a, t)
            Y = ps.w_projector(m, n, a, t)
            assert np.max(np.abs(X - Y.conj())) <= 1e-14 * max(1, np.max(np.abs(X)))


def test_vacuum_purity(grid):
    W = lambda a: ps.w_projector(0, 0, a, 0.0)
    assert abs(ps.trace_pair(W, W, grid) - 1) < 1e-8


def test_vacuum_coherent_overlap(grid):
    for b in (0.0, 0.5 - 0.5j, 1.5):
        val = ps.trace_pair(
            lambda a: ps.w_projector(0, 0, a, 0.3), lambda a: ps.w_coherent(b, a, 0.3), grid
        )
        assert abs(val - math.exp(-abs(b) ** 2)) < 1e-8


def test_first_excited_overlap(grid):
    for b in (0.2 + 0.1j, -1.0 + 1.1j, 1.5j):
        val = ps.trace_pair(
            lambda a: ps.w_projector(1, 0, a, 0.5), lambda a: ps.w_coherent(b, a, 0.5), grid
        )
        assert abs(val - math.exp(-abs(b) ** 2) * b.conjugate()) < 1e-6


def test_fock_orthogonality(grid):
    a = grid.nodes
    for t in (-0.5, 0.0, 0.5):
        for n in range(5):
            for m in range(5):
                val = ps.trace_pair(ps.w_projector(n, n, a, t), ps.w_projector(m, m, a, -t), grid)
                assert abs(val - (n == m)) < 1e-6


@pytest.mark.parametrize("t", [-0.5, 0.0, 0.5])
def test_normalization(grid, t):
    for n in range(5):
        val = ps.trace_pair(ps.w_projector(n, n, grid.nodes, t), np.ones_like(grid.nodes), grid)
        assert abs(val - 1) < 1e-6


@pytest.mark.parametrize("t", [-0.5, 0.0, 0.5])
def test_matrix_element_consistency(grid, t):
    rng = np.random.default_rng(int(100 * (t + 1)))
    terms = {(p, q): complex(*rng.normal(size=2)) for p in range(4) for q in range(4) if p + q <= 3}
    P = oa.OrderedPoly(1.0, terms)
    M = fo.eval_poly(P, 30)
    WP = ps.w_operator(P, t)(grid.nodes)
    for n in range(4):
        for m in range(4):
            val = ps.trace_pair(ps.w_projector(n, m, grid.nodes, t), WP, grid)
            assert abs(val - M[m, n]) < 1e-6


def test_integration_formula_examples(grid):
    chk = ps.verify_integration_formula(0, 0, 0, 0.0, grid)
    assert chk.lhs == 1
    assert chk.abs_err < 1e-8
    b = 0.6 - 0.4j
    chk = ps.verify_integration_formula(1, 0, b, 0.0, grid)
    assert chk.lhs == pytest.approx(b.conjugate())
    assert chk.abs_err < 1e-8
    for n, m in [(1, 0), (0, 2), (3, 1)]:
        assert abs(ps.verify_integration_formula(n, m, 0, 0.4, grid).rhs) < 1e-10


def test_integration_formula_domain():
    for t in (-1.0, 1.0, 1.5):
        with pytest.raises(ValueError):
            ps.verify_integration_formula(0, 0, 0, t)


def test_constant_discrepancy_detection():
    mk = lambda lhs, rhs: ps.IntegrationCheck(0, 0, 0j, 0.0, lhs, rhs)
    assert ps.constant_discrepancy([mk(1, 2), mk(3j, 6j)]) == 0.5
    assert ps.constant_discrepancy([mk(1, 2), mk(1, 1)]) is None
    assert ps.constant_discrepancy([mk(0, 0)]) is None


def test_quadrature_convergence():
    # halving the spacing shrinks the error by 4x or more until it reaches the rounding floor
    for n, m, b, t in [(2, 1, 0.7 + 0.2j, 0.0), (3, 3, 1.2 - 0.5j, 0.5), (1, 2, 0.7 + 0.2j, -0.5)]:
        errs = [ps.verify_integration_formula(n, m, b, t, ps.QuadratureGrid(6.0, N)).abs_err for N in (20, 40, 80)]
        for coarse, fine in zip(errs, errs[1:]):
            assert fine <= coarse / 4 or fine < 1e-9


def test_sample_grid_examples():
    G = ps.sample_grid(lambda a: ps.w_projector(0, 0, a, 0.0), 6.0, 160)
    mid = 80
    # the four nodes nearest the origin sit at |alpha| = spacing/sqrt(2)
    near = G.values[mid - 1 : mid + 1, mid - 1 : mid + 1]
    assert np.allclose(near, 2, atol=0.02)
    W1 = ps.sample_grid(lambda a: ps.w_projector(1, 1, a, 0.0), 6.0, 160).values
    assert np.allclose(W1[mid - 1 : mid + 1, mid - 1 : mid + 1], -2, atol=0.05)
    # 2 (4|alpha|^2 - 1) exp(-2|alpha|^2): negative dip at the origin, positive ring at |alpha| = sqrt(3)/2
    iy, ix = np.unravel_index(np.argmax(W1.real), W1.shape)
    assert abs(G.grid.nodes[iy, ix]) == pytest.approx(math.sqrt(3) / 2, abs=G.grid.spacing)
    # rotation by pi maps the grid onto itself and leaves diagonal symbols unchanged
    W2 = ps.sample_grid(lambda a: ps.w_projector(2, 2, a, 0.5), 6.0, 40).values
    assert np.allclose(W2, W2[::-1, ::-1], rtol=0, atol=1e-15)


def test_grid_export_csv():
    G = ps.sample_grid(lambda a: ps.w_projector(1, 0, a, 0.0), 3.0, 8)
    text = G.to_csv()
    lines = text.splitlines()
    assert lines[0] == "x,y,re,im"
    assert len(lines) == 8 * 8 + 1
    back = ps.ComplexGrid.from_csv(text, 3.0)
    assert np.array_equal(back.values, G.values)
    # row-major with y outer
    assert [float(v) for v in lines[2].split(",")[:2]] == [G.grid.axis[1], G.grid.axis[0]]


def test_grid_export_json_round_trip():
    G = ps.sample_grid(lambda a: ps.w_projector(2, 1, a, -0.3), 4.0, 10)
    back = ps.ComplexGrid.from_json(G.to_json())
    assert (back.L, back.N) == (G.L, G.N)
    assert np.array_equal(back.values, G.values)


def test_grid_shape_check():
    with pytest.raises(ValueError):
        ps.ComplexGrid(1.0, 4, np.zeros((4, 3)))


def test_pairing_is_deterministic(grid):
    f = lambda a: ps.w_projector(2, 3, a, 0.1)
    g = lambda a: ps.w_coherent(0.4 + 0.9j, a, 0.1)
    results = {ps.trace_pair(f, g, grid) for _ in range(3)}
    assert len(results) == 1
