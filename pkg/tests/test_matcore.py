import numpy as np
import pytest
from conftest import arrays, matrices
from hypothesis import given
from hypothesis import strategies as st

from hspec.errors import DimensionMismatch, NegativeEntry, NonFiniteEntry, NonSquare
from hspec.matcore import (
    NonnegMatrix,
    Permutation,
    Weights,
    diag,
    entrywise_leq,
    from_rows,
    hadamard_power,
    hadamard_product,
    identity,
    linear_comb,
    matmul,
    matpow,
    max_entry,
    ones,
    product,
    transpose,
    zeros,
)

A = from_rows([[1, 2], [3, 4]])
P3 = from_rows([[0, 1, 0], [0, 0, 1], [1, 0, 0]])


def test_from_rows_builds_square_matrix():
    assert A.n == 2
    assert A.tolist() == [[1.0, 2.0], [3.0, 4.0]]


def test_negative_entry_reports_one_based_index():
    with pytest.raises(NegativeEntry) as exc:
        from_rows([[1, -1], [0, 0]])
    assert exc.value.index == (1, 2)


@pytest.mark.parametrize("rows", [[[1, 2, 3]], [], [[1, 2], [3]]])
def test_non_square_rejected(rows):
    with pytest.raises(NonSquare):
        from_rows(rows)


def test_non_finite_rejected():
    with pytest.raises(NonFiniteEntry):
        from_rows([[1, float("inf")], [0, 0]])
    with pytest.raises(NonFiniteEntry):
        NonnegMatrix(np.array([[np.nan]]))


def test_entries_are_read_only():
    with pytest.raises(ValueError):
        A.entries[0, 0] = 5.0


def test_hadamard_product_examples():
    B = from_rows([[2, 0], [1, 1]])
    assert hadamard_product(A, B) == from_rows([[2, 0], [3, 4]])
    assert hadamard_product(A, ones(2)) == A
    assert hadamard_product(A, zeros(2)) == zeros(2)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        hadamard_product(A, identity(3))
    with pytest.raises(DimensionMismatch):
        matmul(A, identity(3))


def test_hadamard_power_examples():
    assert hadamard_power(from_rows([[4, 9], [0, 1]]), 0.5) == from_rows([[2, 3], [0, 1]])
    assert hadamard_power(A, 1) == A
    # 0^0 = 1
    assert hadamard_power(from_rows([[0, 2], [1, 0]]), 0) == ones(2)


def test_matmul_examples():
    assert matmul(identity(2), A) == A
    N = from_rows([[0, 1], [0, 0]])
    assert matmul(N, N) == zeros(2)
    assert matmul(ones(2), ones(2)) == from_rows([[2, 2], [2, 2]])
    assert product([A, identity(2), A]) == matmul(A, A)


def test_matpow_examples():
    assert matpow(A, 1) == A
    with pytest.raises(ValueError):
        matpow(A, 0)
    assert matpow(P3, 3) == identity(3)
    assert matpow(from_rows([[1, 1], [0, 1]]), 4) == from_rows([[1, 4], [0, 1]])


def test_transpose_examples():
    S = from_rows([[2, 1], [1, 2]])
    assert transpose(S) == S
    assert transpose(from_rows([[0, 1], [0, 0]])) == from_rows([[0, 0], [1, 0]])


def test_linear_comb_examples():
    assert linear_comb([1], [A]) == A
    assert linear_comb([0.5, 0.5], [A, A]) == A
    assert linear_comb([1, 1], [identity(2), identity(2)]) == diag([2, 2])


def test_entrywise_leq_examples():
    c = entrywise_leq(A, A, 0, 0)
    assert c.holds and c.worst_gap == 0
    assert entrywise_leq(zeros(2), A, 0, 0).holds
    c = entrywise_leq(from_rows([[2]]), from_rows([[1]]), 0, 0)
    assert not c.holds and c.worst_gap == 1 and c.worst_index == (1, 1)


def test_entrywise_leq_slack_semantics():
    b = from_rows([[1e6]])
    a = from_rows([[1e6 * (1 + 5e-10)]])
    assert entrywise_leq(a, b).holds
    assert not entrywise_leq(a, b, rtol=1e-10, atol=0).holds


def test_max_entry_examples():
    assert max_entry(A) == 4
    assert max_entry(zeros(3)) == 0
    assert max_entry(identity(3)) == 1


def test_permutation():
    p = Permutation((2, 3, 1))
    assert p(1) == 2 and p.n == 3
    # P e_j = e_{p(j)}
    assert p.matrix().entries[1, 0] == 1
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))


def test_weights():
    w = Weights((1.0, 1.0))
    assert w.s_n == 2 and w.betas == (0.5, 0.5) and w.beta_scale_exponent == 1
    assert Weights.uniform(4).is_convex()
    with pytest.raises(ValueError):
        Weights((-0.1, 1.1))


# --------------------------------------------------------------------------
# properties


def _close(X, Y, rel=1e-12):
    return np.allclose(X.entries, Y.entries, rtol=rel, atol=0)


@given(st.data())
def test_hadamard_product_commutative_associative(data):
    n = data.draw(st.integers(1, 5))
    X, Y, Z = (data.draw(matrices(n=n)) for _ in range(3))
    assert hadamard_product(X, Y) == hadamard_product(Y, X)
    assert _close(
        hadamard_product(hadamard_product(X, Y), Z), hadamard_product(X, hadamard_product(Y, Z))
    )


@given(matrices(positive=True), st.floats(0, 3), st.floats(0, 3))
def test_hadamard_power_adds_exponents(X, s, t):
    assert _close(
        hadamard_product(hadamard_power(X, s), hadamard_power(X, t)), hadamard_power(X, s + t)
    )


@given(matrices(positive=True), st.floats(0.1, 3), st.floats(0.1, 3))
def test_hadamard_power_composes(X, t, u):
    assert _close(hadamard_power(hadamard_power(X, t), u), hadamard_power(X, t * u))


@given(st.data())
def test_entrywise_leq_partial_order(data):
    n = data.draw(st.integers(1, 4))
    X, Y, Z = (data.draw(matrices(n=n)) for _ in range(3))
    assert entrywise_leq(X, X, 0, 0).holds
    if entrywise_leq(X, Y, 0, 0).holds and entrywise_leq(Y, X, 0, 0).holds:
        assert X == Y
    lo = NonnegMatrix(np.minimum(X.entries, Y.entries))
    hi = NonnegMatrix(np.maximum(Y.entries, Z.entries))
    assert entrywise_leq(lo, Y, 0, 0).holds and entrywise_leq(Y, hi, 0, 0).holds
    assert entrywise_leq(lo, hi, 0, 0).holds


@given(st.data())
def test_max_entry_submultiplicative_under_hadamard(data):
    n = data.draw(st.integers(1, 5))
    X, Y = data.draw(matrices(n=n)), data.draw(matrices(n=n))
    assert max_entry(hadamard_product(X, Y)) <= max_entry(X) * max_entry(Y)


@given(st.data())
def test_powers_of_product_dominate_product_of_powers(data):
    n = data.draw(st.integers(1, 4))
    k = data.draw(st.integers(1, 3))
    Ks = [data.draw(matrices(n=n, positive=True)) for _ in range(k)]
    t = data.draw(st.floats(1, 3))
    lhs = product([hadamard_power(K, t) for K in Ks])
    rhs = hadamard_power(product(Ks), t)
    assert entrywise_leq(lhs, rhs).holds


@given(arrays())
def test_transpose_involution(a):
    X = NonnegMatrix(a)
    assert transpose(transpose(X)) == X
