import math

import numpy as np
import oracles
import pytest
from conftest import convex_weights, matrices
from hypothesis import given
from hypothesis import strategies as st

from hspec.constructions import (
    alpha_profile,
    c_matrix,
    cyclic_products,
    grid_bundle,
    pair_family,
    refinement_sequence,
    sym,
    weighted_gmean,
)
from hspec.errors import (
    DepthOverflow,
    ExponentDomain,
    MissingPermutation,
    OddM,
    WeightsNotConvex,
    WeightsTooSmall,
)
from hspec.matcore import (
    NonnegMatrix,
    Permutation,
    Weights,
    diag,
    entrywise_leq,
    from_rows,
    identity,
    linear_comb,
    matmul,
    matpow,
    product,
    transpose,
)
from hspec.spectral import certified, spectral_radius

P3 = from_rows([[0, 1, 0], [0, 0, 1], [1, 0, 0]])


def close(X, Y, rel=1e-12):
    return np.allclose(X.entries, Y.entries, rtol=rel, atol=1e-300)


def test_weighted_gmean_examples():
    K1, K2 = from_rows([[1, 4], [9, 16]]), from_rows([[4, 1], [1, 4]])
    assert close(weighted_gmean([K1, K2], [0.5, 0.5]), from_rows([[2, 2], [3, 8]]))
    assert weighted_gmean([K1], [1]) == K1
    K1, K2 = from_rows([[1, 2], [3, 4]]), from_rows([[4, 3], [2, 1]])
    r6 = math.sqrt(6)
    assert close(weighted_gmean([K1, K2], [0.5, 0.5]), from_rows([[2, r6], [r6, 2]]))


def test_weighted_gmean_drops_zero_weights():
    K1 = from_rows([[0, 2], [3, 0]])
    K2 = from_rows([[1, 1], [1, 1]])
    assert weighted_gmean([K1, K2], [0, 1]) == K2


def test_c_matrix_examples():
    K1, K2 = from_rows([[1, 4], [9, 1]]), from_rows([[4, 1], [1, 3]])
    assert close(c_matrix([K1, K2], [0.5, 0.5]), from_rows([[2.5, 2], [3, 2]]))
    assert c_matrix([K1], [1]) == K1
    assert close(c_matrix([diag([2, 4]), diag([6, 0])], [0.5, 0.5]), diag([4, 2]))
    with pytest.raises(WeightsNotConvex):
        c_matrix([K1, K2], [0.5, 0.6])


def test_sym_examples():
    K = from_rows([[1, 2], [8, 4]])
    assert close(sym(K, 0.5), from_rows([[1, 4], [4, 4]]))
    assert close(sym(K, 0.5, 0.5), from_rows([[1, 4], [4, 4]]))
    assert sym(K, 1, 1) == from_rows([[1, 16], [16, 16]])
    S = from_rows([[1, 3], [3, 2]])
    for a in (0, 0.25, 0.7, 1):
        assert close(sym(S, a), S)


def test_sym_domain():
    K = from_rows([[1, 2], [3, 4]])
    with pytest.raises(ExponentDomain):
        sym(K, 1.5)
    with pytest.raises(ExponentDomain):
        sym(K, 0.3, 0.3)
    with pytest.raises(ExponentDomain):
        sym(K, -0.1, 2)


def test_grid_bundle_examples():
    g = grid_bundle([[diag([2, 2]), diag([3, 3])]], [1, 1])
    assert close(g.H, diag([6, 6]))
    assert g.M == 3 and g.beta == 3 and g.delta == 9
    assert g.weights.betas == (0.5, 0.5)

    K1, K2 = from_rows([[1, 2], [3, 4]]), from_rows([[0, 1], [5, 1]])
    g = grid_bundle([[K1, K2]], [0.3, 0.7])
    assert close(g.H, weighted_gmean([K1, K2], [0.3, 0.7])) and g.beta == 1

    g = grid_bundle([[K1], [K2]], [1])
    assert close(g.H, matmul(K1, K2)) and close(g.H_list[0], g.H)


def test_grid_bundle_errors():
    K = identity(2)
    with pytest.raises(WeightsTooSmall):
        grid_bundle([[K, K]], [0.3, 0.3])
    with pytest.raises(ValueError):
        grid_bundle([[K, K], [K]], [0.5, 0.5])


def test_refinement_three_cycle():
    seq = refinement_sequence(P3, 0.5, depth=3)
    assert seq.values == (0, 0, 0, 0)
    assert seq.cap == pytest.approx(1, rel=1e-12)
    assert seq.cap_term.lo <= 1 <= seq.cap_term.hi


def test_refinement_periodic_closed_form():
    # S(K) = [[0,2],[2,0]] and K^2 = 4I, so every term is 2
    seq = refinement_sequence(from_rows([[0, 4], [1, 0]]), 0.5, depth=2)
    assert seq.values == pytest.approx((2, 2, 2), rel=1e-12)
    assert seq.cap == pytest.approx(2, rel=1e-12)


def test_refinement_two_by_two_is_constant():
    K = from_rows([[1, 2], [3, 4]])
    exact = float(oracles.r2(K.tolist()))
    seq = refinement_sequence(K, 0.5, depth=1)
    assert seq.values == pytest.approx((exact, exact), rel=1e-10)


def test_refinement_with_beta_reports_both_caps():
    K = from_rows([[1, 2], [3, 4]])
    seq = refinement_sequence(K, 0.7, 0.6, depth=2)
    assert len(seq.caps) == 2
    assert seq.cap == min(c.value for c in seq.caps)


def test_refinement_large_depth_rescales():
    K = from_rows([[1e3, 2e3], [3e3, 4e3]])
    seq = refinement_sequence(K, 0.5, depth=8)
    exact = float(oracles.r2(K.tolist()))
    assert seq.values[-1] == pytest.approx(exact, rel=1e-9)


def test_refinement_support_loss_raises():
    K = from_rows([[1e-200, 1e-200], [1e-200, 1e-200]])
    with pytest.raises(DepthOverflow):
        refinement_sequence(K, 0.5, depth=3)


def test_refinement_rejects_other_functionals():
    with pytest.raises(ValueError):
        refinement_sequence(identity(2), 0.5, f="op2")


def test_alpha_profile_examples():
    S = from_rows([[1, 3], [3, 2]])
    prof = alpha_profile(S, "r", 5)
    assert prof.values == pytest.approx([spectral_radius(S).value] * 5, rel=1e-12)
    prof = alpha_profile(P3, "r", 5)
    assert prof.values == pytest.approx((1, 0, 0, 0, 1), abs=1e-12)
    K = from_rows([[1, 2], [8, 4]])
    prof = alpha_profile(K, "r", 3)
    rK = float(oracles.r2(K.tolist()))
    assert prof.grid == (0, 0.5, 1)
    assert prof.values == pytest.approx((rK, rK, rK), rel=1e-12)


def test_alpha_profile_validation():
    with pytest.raises(ValueError):
        alpha_profile(P3, "r", 4)
    with pytest.raises(ValueError):
        alpha_profile(P3, "op1", 5)


def test_pair_family_examples():
    H1, H2 = from_rows([[1, 2], [0, 3]]), from_rows([[2, 0], [1, 1]])
    T = transpose
    ident = Permutation.identity(2)
    assert pair_family([H1, H2], ident, kind="A") == [matmul(T(H1), H2), matmul(T(H2), H1)]
    assert pair_family([H1, H2], ident, kind="B") == [matmul(H1, T(H2)), matmul(H2, T(H1))]
    Q = pair_family([H1, H2], ident, ident, kind="Q")
    F1, F2 = matmul(T(H1), H1), matmul(T(H2), H2)
    assert Q == [matmul(F1, F2), matmul(F2, F1)]


def test_pair_family_errors():
    Hs = [identity(2)] * 3
    with pytest.raises(OddM):
        pair_family(Hs, Permutation.identity(3), kind="A")
    with pytest.raises(MissingPermutation):
        pair_family(Hs, Permutation.identity(3), kind="Q")


def test_cyclic_products_examples():
    A1, A2 = from_rows([[1, 2], [0, 3]]), from_rows([[2, 0], [1, 1]])
    assert cyclic_products([A1]) == [A1]
    assert cyclic_products([A1, A2]) == [matmul(A1, A2), matmul(A2, A1)]
    assert cyclic_products([identity(3)] * 4) == [identity(3)] * 4


# --------------------------------------------------------------------------
# properties


@given(st.data())
def test_gmean_c_matrix_am_sandwich(data):
    n = data.draw(st.integers(1, 4))
    k = data.draw(st.integers(1, 4))
    Ks = [data.draw(matrices(n=n)) for _ in range(k)]
    w = data.draw(convex_weights(k))
    G, C, A = weighted_gmean(Ks, w), c_matrix(Ks, w), linear_comb(w, Ks)
    assert entrywise_leq(G, C).holds and entrywise_leq(C, A).holds


@given(matrices(), st.floats(0, 1))
def test_sym_adjoint_identity(K, a):
    assert close(transpose(sym(K, a)), sym(K, 1 - a, a), rel=1e-15)


@given(matrices(max_n=4), st.floats(0, 1), st.floats(0, 1))
def test_symmetrization_of_square_dominates_square(K, a, extra):
    for alpha, beta in ((a, 1 - a), (a, 1 - a + extra)):
        S = sym(K, alpha, beta)
        assert entrywise_leq(matmul(S, S), sym(matpow(K, 2), alpha, beta)).holds


@given(matrices(min_n=2, max_n=6), st.sampled_from([(0.5, None), (0.3, None), (0.8, 0.6)]))
def test_refinement_nondecreasing_and_capped(K, ab):
    a, b = ab
    try:
        seq = refinement_sequence(K, a, b, depth=4)
    except DepthOverflow:
        return
    t = seq.terms + (seq.cap_term,)
    for x, y in zip(t, t[1:]):
        assert x.value <= y.value * (1 + 1e-9) + 1e-12 + x.width + y.width


@given(matrices(min_n=1, max_n=5), st.sampled_from(["r", "op2", "w"]))
def test_alpha_profile_unimodal_and_symmetric(K, f):
    prof = alpha_profile(K, f, 11)
    v, t = prof.values, prof.terms
    tol = lambda i, j: 1e-9 * max(v[i], v[j]) + 1e-12 + t[i].width + t[j].width  # noqa: E731
    for i in range(5):
        assert v[i + 1] <= v[i] + tol(i, i + 1)
    for i in range(5, 10):
        assert v[i] <= v[i + 1] + tol(i, i + 1)
    for i in range(11):
        assert abs(v[i] - v[10 - i]) <= tol(i, 10 - i)


@given(matrices(n=2))
def test_two_by_two_symmetrization_preserves_spectral_radius(K):
    a, b = spectral_radius(sym(K, 0.5)), spectral_radius(K)
    assert abs(a.value - b.value) <= 1e-9 * b.value + a.width + b.width + 1e-300


@given(st.data())
def test_cyclic_products_share_spectral_radius(data):
    n = data.draw(st.integers(1, 4))
    k = data.draw(st.integers(1, 4))
    As = [data.draw(matrices(n=n, positive=True)) for _ in range(k)]
    nu = Permutation(tuple(data.draw(st.permutations(list(range(1, k + 1))))))
    rs = [spectral_radius(P) for P in cyclic_products(As, nu)]
    top = max(r.value for r in rs)
    for r in rs:
        assert abs(r.value - top) <= 1e-9 * top + 2 * max(x.width for x in rs) + 1e-300


def test_profile_uses_literal_endpoints():
    K = NonnegMatrix(np.arange(9.0).reshape(3, 3))
    prof = alpha_profile(K, "op2", 3)
    assert prof.values[0] == certified("op2", transpose(K)).value
    assert prof.values[-1] == certified("op2", K).value
