import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import gram_exact, jacobi_eigenvalues, rank2_sup_lower_bound
from septensor.errors import InvalidRank, NumericError
from septensor.lowrank import (
    SvdFactors,
    energy_ratio,
    evaluate_lowrank,
    export_svd,
    frobenius_tail,
    svd_decompose,
    truncate,
)


def test_identity():
    np.testing.assert_allclose(svd_decompose(np.eye(3)).sigma, [1.0, 1.0, 1.0], rtol=1e-15)


def test_outer_product():
    a, b = np.array([1.0, -2.0, 2.0]), np.array([3.0, 0.0, 4.0, 0.0])
    s = svd_decompose(np.outer(a, b)).sigma
    assert s[0] == pytest.approx(15.0, rel=1e-15)
    np.testing.assert_array_equal(s[1:], 0.0)


@pytest.mark.parametrize("shape,seed", [((4, 4), 1), ((6, 8), 2), ((8, 6), 3), ((4, 4), 4)])
def test_sigma_squared_against_jacobi_oracle(shape, seed):
    F = np.random.default_rng(seed).normal(size=shape)
    s = svd_decompose(F).sigma
    lam = jacobi_eigenvalues(gram_exact(F))[: min(shape)]
    np.testing.assert_allclose(s ** 2, lam, rtol=1e-8)


def test_sigma_squared_paper_f_normwise(paper_factors, paper_T):
    lam = np.array(jacobi_eigenvalues(gram_exact(paper_T.F)))
    s2 = paper_factors.sigma ** 2
    assert np.max(np.abs(s2 - lam)) <= 1e-8 * lam[0]
    # well separated leading values also match elementwise
    np.testing.assert_allclose(s2[:4], lam[:4], rtol=1e-8)


def test_sign_convention(paper_factors):
    U, V = paper_factors.U, paper_factors.V
    for k in range(U.shape[1]):
        assert U[np.argmax(np.abs(U[:, k])), k] >= 0


def test_factors_reconstruct(paper_factors, paper_T):
    F = paper_T.F
    assert np.linalg.norm(F - paper_factors.reconstruct()) <= 1e-13 * np.linalg.norm(F)


def test_invariants_enforced():
    U = np.eye(2)
    with pytest.raises(NumericError):
        SvdFactors(U, U, np.array([1.0, 2.0]))
    with pytest.raises(NumericError):
        SvdFactors(U, U, np.array([1.0, -1.0]))
    with pytest.raises(NumericError):
        SvdFactors(np.ones((2, 2)), U, np.array([2.0, 1.0]))
    with pytest.raises(NumericError):
        svd_decompose(np.array([[1.0, np.nan]]))


@pytest.mark.parametrize("sigma,K,expected", [
    ([4.0, 3.0], 1, 3.0),
    ([4.0, 3.0], 2, 0.0),
    ([4.0, 3.0], 0, 5.0),
])
def test_frobenius_tail_examples(sigma, K, expected):
    f = SvdFactors(np.eye(2), np.eye(2), np.array(sigma))
    assert frobenius_tail(f, K) == expected


def test_frobenius_tail_bad_K(paper_factors):
    with pytest.raises(InvalidRank):
        frobenius_tail(paper_factors, 11)


def test_eckart_young_paper_f(paper_factors, paper_T):
    F = paper_T.F
    fro = np.linalg.norm(F)
    for K in range(0, 11):
        tail = frobenius_tail(paper_factors, K)
        direct = np.linalg.norm(F - paper_factors.reconstruct(K))
        assert abs(direct - tail) <= 1e-10 * fro
        if tail >= 1e-4 * fro:
            assert abs(direct - tail) <= 1e-10 * tail


@pytest.mark.parametrize("seed", range(20))
def test_eckart_young_random(seed):
    F = np.random.default_rng(100 + seed).normal(size=(6, 8))
    f = svd_decompose(F)
    for K in range(0, 7):
        tail = frobenius_tail(f, K)
        direct = np.linalg.norm(F - f.reconstruct(K))
        if K < 6:
            assert abs(direct - tail) <= 1e-10 * tail
        else:
            assert direct <= 1e-10 * np.linalg.norm(F)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_energy_ratio(F):
    f = svd_decompose(F)
    fro2 = np.linalg.norm(F) ** 2
    if fro2 < 1e-200:
        return
    for K in range(f.sigma.size + 1):
        assert abs(energy_ratio(f, K) - frobenius_tail(f, K) ** 2 / fro2) <= 1e-12


def test_full_rank_equals_interpolant(paper_T, paper_factors, diag_grid):
    L = truncate(paper_T, paper_factors, 10)
    t = diag_grid.points
    I = paper_T.on_grid(t, t)
    assert np.max(np.abs(L.on_grid(t, t) - I)) <= 1e-10 * np.max(np.abs(I))


def test_origin_value(paper_T, paper_factors, paper_f):
    L = truncate(paper_T, paper_factors, 10)
    interp_err = abs(paper_T(0.0, 0.0) - 1.0)
    assert abs(evaluate_lowrank(L, 0.0, 0.0) - 1.0) <= 1e-10 + interp_err
    assert abs(evaluate_lowrank(L, 0.0, 0.0) - 1.0) <= 1e-8


def test_rank1_source_exact(rank1, diag_grid):
    from septensor.pipeline import RunConfig, decompose
    dec = decompose(RunConfig(rank1, m=3, n=3, K=1, diag_points=201))
    assert dec.lowrank.rank_K == 1
    assert dec.rel_err <= 1e-12


def test_sign_pair_flip_invariance(paper_T, paper_factors):
    flip = np.ones(10)
    flip[[0, 3, 7]] = -1.0
    flipped = SvdFactors(paper_factors.U * flip, paper_factors.V * flip, paper_factors.sigma)
    t = np.linspace(0.0, 1.0, 101)
    for K in (1, 4, 10):
        a = truncate(paper_T, paper_factors, K).on_grid(t, t)
        b = truncate(paper_T, flipped, K).on_grid(t, t)
        np.testing.assert_array_equal(a, b)


def test_grid_error_non_increasing_in_K(paper_T, paper_factors):
    t = np.linspace(0.0, 1.0, 1001)
    I = paper_T.on_grid(t, t)
    errs = [np.linalg.norm(I - truncate(paper_T, paper_factors, K).on_grid(t, t))
            for K in range(1, 11)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(errs, errs[1:]))


def test_truncate_bounds(paper_T, paper_factors):
    for K in (0, 11):
        with pytest.raises(InvalidRank):
            truncate(paper_T, paper_factors, K)


def test_phi_psi_shapes(paper_T, paper_factors):
    L = truncate(paper_T, paper_factors, 3)
    assert L.phi(0.5).shape == (3,)
    assert L.psi(np.array([0.1, 0.2])).shape == (2, 3)
    assert L(0.2, 0.4) == pytest.approx(L.on_grid([0.2], [0.4])[0, 0], rel=1e-14)


def test_export_svd(paper_factors, tmp_path):
    export_svd(paper_factors, 2, tmp_path / "svd.json")
    doc = json.loads((tmp_path / "svd.json").read_text())
    assert doc["K"] == 2
    np.testing.assert_array_equal(doc["sigma"], paper_factors.sigma)
    np.testing.assert_array_equal(doc["U"], paper_factors.U)


def test_rank2_sup_error_lower_bound(paper_f, diag_grid):
    # no rank-2 function gets below ~2.06% relative sup error on this grid
    G = paper_f.sample(diag_grid.points, diag_grid.points)
    bound = rank2_sup_lower_bound(G) / np.max(np.abs(G))
    assert bound > 0.02
    assert bound == pytest.approx(0.02065, abs=5e-5)
