import math

import numpy as np
import oracles
import pytest
from conftest import matrices
from hypothesis import given
from hypothesis import strategies as st

from hspec.errors import NotConverged
from hspec.matcore import NonnegMatrix, Permutation, from_rows, identity, ones, scale, transpose
from hspec.spectral import (
    CertifiedValue,
    Functional,
    certified,
    evaluate,
    numerical_radius,
    op_norm,
    spectral_radius,
)

A = from_rows([[1, 2], [3, 4]])
ALL = list(Functional)


def slack(*cvs, rel=1e-9):
    return sum(c.width for c in cvs) + rel * max(c.value for c in cvs) + 1e-12


def test_identity_and_nilpotent():
    cv = spectral_radius(identity(3))
    assert cv.lo <= 1 <= cv.hi and cv.converged
    cv = spectral_radius(from_rows([[0, 1], [0, 0]]))
    assert cv.value == 0 and cv.hi == 0


def test_two_by_two_closed_form():
    cv = spectral_radius(A)
    exact = float(oracles.r2(A.tolist()))
    assert exact == pytest.approx((5 + math.sqrt(33)) / 2, rel=1e-15)
    assert cv.lo <= exact <= cv.hi
    assert cv.width <= max(1e-10 * exact, 1e-14)


def test_operator_norms():
    assert op_norm(A, 1) == 6
    assert op_norm(A, math.inf) == 7
    assert op_norm(A, 2) == pytest.approx(math.sqrt((30 + math.sqrt(884)) / 2), rel=1e-12)
    assert op_norm(A, 2) == pytest.approx(float(oracles.op2_2(A.tolist())), rel=1e-12)


def test_numerical_radius():
    assert numerical_radius(from_rows([[0, 1], [0, 0]])) == pytest.approx(0.5, rel=1e-12)
    assert numerical_radius(from_rows([[2, 1], [1, 2]])) == pytest.approx(3, rel=1e-12)
    assert numerical_radius(A) == pytest.approx((5 + math.sqrt(34)) / 2, rel=1e-12)


def test_evaluate_dispatch():
    assert evaluate("max-entry", from_rows([[1, 5], [0, 2]])) == 5
    assert evaluate(Functional.SPECTRAL_RADIUS, identity(2)) == pytest.approx(1)
    assert evaluate("op2", ones(3)) == pytest.approx(3, rel=1e-12)


def test_functional_parse():
    assert Functional.parse("r") is Functional.SPECTRAL_RADIUS
    assert Functional.parse("opinf") is Functional.OP_NORM_INF
    assert Functional.parse("numerical-radius").short == "w"
    with pytest.raises(ValueError):
        Functional.parse("nope")


def test_reducible_block_triangular():
    # eigenvalues 2 and 5 in separate components
    K = from_rows([[2, 7, 1], [0, 5, 0], [0, 3, 0]])
    cv = spectral_radius(K)
    assert cv.lo <= 5 <= cv.hi


def test_periodic_matrix():
    cv = spectral_radius(from_rows([[0, 4], [1, 0]]))
    assert cv.lo <= 2 <= cv.hi and cv.width < 1e-9


def test_wide_dynamic_range():
    K = from_rows([[1e-6, 1e6, 0], [1e-6, 0, 1e5], [1e6, 1e-6, 1e-3]])
    cv = spectral_radius(K)
    exact = float(oracles.r3(K.tolist()))
    assert cv.lo <= exact <= cv.hi


def test_not_converged_is_soft_unless_strict():
    K = NonnegMatrix(np.random.default_rng(0).random((6, 6)))
    cv = spectral_radius(K, rtol=1e-300, atol=1e-300, max_iter=1, eps_rounds=0)
    assert cv.lo <= cv.value <= cv.hi
    if not cv.converged:
        with pytest.raises(NotConverged):
            spectral_radius(K, rtol=1e-300, atol=1e-300, max_iter=1, eps_rounds=0, strict=True)


def test_certified_value_arithmetic():
    x = CertifiedValue(2.0, 1.9, 2.1)
    y = x * 3
    assert y.lo <= 5.7 and y.hi >= 6.3
    with pytest.raises(ValueError):
        x * -1
    with pytest.raises(ValueError):
        x**-1
    assert (x**0.5).lo <= math.sqrt(1.9)


# --------------------------------------------------------------------------
# properties


@given(st.data())
def test_monotone_under_entrywise_order(data):
    n = data.draw(st.integers(1, 5))
    X = data.draw(matrices(n=n))
    Y = NonnegMatrix(X.entries + data.draw(matrices(n=n)).entries)
    for f in ALL:
        a, b = certified(f, X), certified(f, Y)
        assert a.value <= b.value + slack(a, b)


@given(matrices(), st.floats(0, 1e3))
def test_homogeneous(X, c):
    for f in ALL:
        a, b = certified(f, X), certified(f, scale(X, c))
        assert abs(b.value - c * a.value) <= 1e-10 * c * a.value + b.width + c * a.width + 1e-300


@given(matrices())
def test_transpose_symmetries(X):
    T = transpose(X)
    for f in ("r", "op2", "w"):
        a, b = certified(f, X), certified(f, T)
        assert abs(a.value - b.value) <= slack(a, b)
    assert evaluate("op1", T) == evaluate("opinf", X)


@given(matrices())
def test_functional_ordering(X):
    r, w, o2 = certified("r", X), certified("w", X), certified("op2", X)
    assert r.value <= w.value + slack(r, w)
    assert w.value <= o2.value + slack(w, o2)
    m = evaluate("maxentry", X)
    for f in ("op1", "op2", "opinf"):
        c = certified(f, X)
        assert m <= c.value + slack(c)
    o1, oi = evaluate("op1", X), evaluate("opinf", X)
    assert o2.value <= math.sqrt(o1 * oi) * (1 + 1e-9) + o2.width + 1e-12


@given(st.data())
def test_permutation_similarity(data):
    X = data.draw(matrices())
    img = data.draw(st.permutations(list(range(1, X.n + 1))))
    P = Permutation(tuple(img)).matrix().entries
    Y = NonnegMatrix(P @ X.entries @ P.T)
    a, b = spectral_radius(X), spectral_radius(Y)
    assert abs(a.value - b.value) <= slack(a, b)


@given(matrices())
def test_op2_squared_is_gram_radius(X):
    o = certified("op2", X)
    g = spectral_radius(NonnegMatrix(X.entries.T @ X.entries))
    assert abs(o.value**2 - g.value) <= 2 * o.value * o.width + g.width + 1e-9 * g.value + 1e-300


@given(matrices(n=2))
def test_bracket_contains_2x2_oracle(X):
    cv = spectral_radius(X)
    exact = float(oracles.r2(X.tolist()))
    assert cv.lo <= cv.value <= cv.hi
    assert cv.lo <= exact <= cv.hi


@given(matrices(n=3))
def test_bracket_contains_3x3_oracle(X):
    cv = spectral_radius(X)
    # doubles lo <= v <= hi imply lo <= round(v) <= hi
    exact = float(oracles.r3(X.tolist()))
    assert cv.lo <= cv.value <= cv.hi
    assert cv.lo <= exact <= cv.hi


@given(matrices(n=2))
def test_op2_and_w_match_2x2_oracles(X):
    for f, oracle in (("op2", oracles.op2_2), ("w", oracles.w2)):
        cv = certified(f, X)
        exact = float(oracle(X.tolist()))
        assert abs(cv.value - exact) <= 1e-12 * exact + cv.width + 1e-300
