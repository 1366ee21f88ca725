"""Derived matrices: Hadamard weighted geometric means, C-matrices,
weighted geometric symmetrizations, grid bundles, dyadic refinement
sequences, alpha-profiles and the product families built from permutations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DepthOverflow,
    EmptyList,
    ExponentDomain,
    MissingPermutation,
    OddM,
    WeightsNotConvex,
    WeightsTooSmall,
)
from .matcore import (
    NonnegMatrix,
    Permutation,
    Weights,
    _same_dim,
    _wrap,
    hadamard_power,
    max_entry,
    product,
    transpose,
)
from .spectral import CertifiedValue, Functional, certified, spectral_radius

EXPONENT_TOL = 1e-12
_BIG = 1e150
_SMALL = 1e-150


def _as_weights(w) -> Weights:
    return w if isinstance(w, Weights) else Weights(tuple(w))


def weighted_gmean(Ks: Sequence[NonnegMatrix], w: Weights | Sequence[float]) -> NonnegMatrix:
    """Hadamard weighted geometric mean ``K_1^(a_1) o ... o K_n^(a_n)``.

    Factors with zero weight are dropped, consistent with ``0**0 == 1``.
    The weights need not sum to one; callers that require convexity check it.
    """
    w = _as_weights(w)
    if not Ks:
        raise EmptyList("weighted_gmean of an empty list")
    if len(w) != len(Ks):
        raise ValueError(f"{len(w)} weights for {len(Ks)} matrices")
    n = _same_dim(*Ks)
    acc = np.ones((n, n))
    for K, a in zip(Ks, w.alphas):
        if a == 0:
            continue
        acc = acc * (K.entries if a == 1 else np.power(K.entries, a))
    return _wrap(acc)


def c_matrix(Ks: Sequence[NonnegMatrix], w: Weights | Sequence[float]) -> NonnegMatrix:
    """Off-diagonal geometric mean, diagonal arithmetic mean (convex weights)."""
    w = _as_weights(w)
    if not w.is_convex(EXPONENT_TOL):
        raise WeightsNotConvex(f"C-matrix needs weights summing to 1, got {w.s_n!r}")
    g = weighted_gmean(Ks, w).entries.copy()
    d = np.zeros(Ks[0].n)
    for K, a in zip(Ks, w.alphas):
        d = d + a * np.diagonal(K.entries)
    np.fill_diagonal(g, d)
    return _wrap(g)


def sym(K: NonnegMatrix, alpha: float, beta: float | None = None) -> NonnegMatrix:
    """``K^(alpha) o (K^T)^(beta)``; ``beta`` defaults to ``1 - alpha``.

    ``sym(K, 0.5)`` is the geometric symmetrization with entries
    ``sqrt(k_ij k_ji)``.
    """
    if beta is None:
        if not -EXPONENT_TOL <= alpha <= 1 + EXPONENT_TOL:
            raise ExponentDomain(f"alpha must lie in [0, 1] when beta is omitted, got {alpha}")
        alpha = min(max(alpha, 0.0), 1.0)
        beta = 1.0 - alpha
    if alpha < 0 or beta < 0 or alpha + beta < 1 - EXPONENT_TOL:
        raise ExponentDomain(f"need alpha, beta >= 0 and alpha + beta >= 1, got ({alpha}, {beta})")
    a = K.entries
    left = a if alpha == 1 else np.power(a, alpha)
    right = a.T if beta == 1 else np.power(a.T, beta)
    return _wrap(left * right)


# --------------------------------------------------------------------------
# grid bundle


@dataclass(frozen=True)
class GridBundle:
    H: NonnegMatrix
    H_list: tuple[NonnegMatrix, ...]
    M: float
    beta: float
    weights: Weights
    delta: float

    def mean(self, exponents: Sequence[float] | None = None) -> NonnegMatrix:
        """``H_1^(e_1) o ... o H_n^(e_n)``; defaults to the alphas."""
        e = self.weights.alphas if exponents is None else tuple(exponents)
        return weighted_gmean(self.H_list, Weights(e))


def grid_bundle(grid: Sequence[Sequence[NonnegMatrix]], w: Weights | Sequence[float]) -> GridBundle:
    """Row-wise Hadamard means multiplied together, plus the column products.

    ``grid[k][i]`` is ``K_{k+1, i+1}``; ``H = prod_k (o_i K_{ki}^(a_i))`` and
    ``H_i = K_{1i} ... K_{li}``.
    """
    w = _as_weights(w)
    if w.s_n < 1 - EXPONENT_TOL:
        raise WeightsTooSmall(f"grid bundle needs s_n >= 1, got {w.s_n!r}")
    if not grid or not grid[0]:
        raise EmptyList("empty grid")
    ncols = len(grid[0])
    if any(len(row) != ncols for row in grid):
        raise ValueError("ragged grid")
    if ncols != len(w):
        raise ValueError(f"{len(w)} weights for {ncols} grid columns")
    _same_dim(*[K for row in grid for K in row])
    H = product([weighted_gmean(row, w) for row in grid])
    H_list = tuple(product([row[i] for row in grid]) for i in range(ncols))
    M = max(max_entry(Hi) for Hi in H_list)
    s = w.s_n
    beta = 1.0 if s - 1 == 0 else M ** (s - 1)  # 0**0 == 1
    return GridBundle(H, H_list, M, beta, w, max(M**s, 1.0))


# --------------------------------------------------------------------------
# dyadic refinement sequence


@dataclass(frozen=True)
class RefinementSequence:
    values: tuple[float, ...]
    cap: float
    functional: Functional
    params: tuple  # (alpha, beta or None, depth)
    terms: tuple[CertifiedValue, ...]
    cap_term: CertifiedValue
    caps: tuple[CertifiedValue, ...]  # every available cap; cap is their min


def _cv_min(values: Sequence[CertifiedValue]) -> CertifiedValue:
    best = min(values, key=lambda c: c.value)
    return CertifiedValue(
        best.value,
        min(c.lo for c in values),
        min(c.hi for c in values),
        sum(c.iterations for c in values),
        all(c.converged for c in values),
    )


def refinement_sequence(
    K: NonnegMatrix,
    alpha: float,
    beta: float | None = None,
    depth: int = 3,
    f: Functional | str = Functional.SPECTRAL_RADIUS,
    **spectral_kw,
) -> RefinementSequence:
    """``rho_n = r(S_{alpha,beta}(K^(2^n)))^(2^-n)`` for ``n = 0..depth``.

    Powers are formed by repeated squaring.  When entries leave
    ``[1e-150, 1e150]`` the power is rescaled by its max entry and the scale
    is reapplied through homogeneity (``S_{a,b}(cP) = c^(a+b) S_{a,b}(P)``).
    """
    f = Functional.parse(f)
    if f is not Functional.SPECTRAL_RADIUS:
        raise ValueError("refinement sequences are defined for the spectral radius only")
    if depth < 0 or int(depth) != depth:
        raise ValueError(f"depth must be a nonnegative integer, got {depth}")
    sym(K, alpha, beta)  # validates the exponents
    s_ab = 1.0 if beta is None else alpha + beta

    P = K.entries
    support = (P > 0).astype(float)
    log_scale = 0.0
    terms = []
    for n in range(depth + 1):
        if n > 0:
            P = P @ P
            log_scale *= 2.0
            support = ((support @ support) > 0).astype(float)
            if not np.isfinite(P).all() or not np.array_equal(P > 0, support > 0):
                raise DepthOverflow(f"K^(2^{n}) left floating-point range")
            m = float(P.max())
            if m > _BIG or 0 < m < _SMALL:
                P = P / m
                log_scale += math.log(m)
        S = sym(_wrap(P), alpha, beta)
        root = 2.0**-n
        rho = spectral_radius(S, **spectral_kw) ** root
        terms.append(rho * math.exp(s_ab * log_scale * root))

    r_K = spectral_radius(K, **spectral_kw)
    if beta is None:
        caps = (r_K,)
    else:
        m = float(P.max())
        log_norm = (math.log(m) + log_scale) if m > 0 else -math.inf
        norm_factor = math.exp(log_norm * (s_ab - 1) / 2.0**depth) if m > 0 else (1.0 if s_ab == 1 else 0.0)
        caps = (r_K ** s_ab, r_K * norm_factor)
    cap = _cv_min(caps)
    return RefinementSequence(
        tuple(t.value for t in terms),
        cap.value,
        f,
        (alpha, beta, depth),
        tuple(terms),
        cap,
        caps,
    )


# --------------------------------------------------------------------------
# alpha profile


@dataclass(frozen=True)
class AlphaProfile:
    grid: tuple[float, ...]
    values: tuple[float, ...]
    functional: Functional
    terms: tuple[CertifiedValue, ...]


PROFILE_FUNCTIONALS = (
    Functional.SPECTRAL_RADIUS,
    Functional.OP_NORM_2,
    Functional.NUMERICAL_RADIUS,
)


def alpha_profile(
    K: NonnegMatrix, f: Functional | str, gridsize: int, **spectral_kw
) -> AlphaProfile:
    """Sample ``alpha -> f(S_alpha(K))`` on a uniform odd-sized grid over [0, 1]."""
    f = Functional.parse(f)
    if f not in PROFILE_FUNCTIONALS:
        raise ValueError(f"alpha profiles support r, op2 and w, not {f.value}")
    if gridsize < 3 or gridsize % 2 == 0:
        raise ValueError(f"gridsize must be odd and >= 3, got {gridsize}")
    grid = tuple(i / (gridsize - 1) for i in range(gridsize))
    terms = tuple(certified(f, sym(K, a, 1.0 - a), **spectral_kw) for a in grid)
    return AlphaProfile(grid, tuple(t.value for t in terms), f, terms)


# --------------------------------------------------------------------------
# permutation product families


def pair_family(
    Hs: Sequence[NonnegMatrix],
    tau: Permutation,
    nu: Permutation | None = None,
    kind: str = "A",
) -> list[NonnegMatrix]:
    """The families ``A_j``, ``B_j`` (m even) or ``Q_j`` built from ``H_1..H_m``.

    * A: ``A_j = H_tau(2j-1)^T H_tau(2j)``, ``A_{m/2+j} = A_j^T``
    * B: ``B_j = H_tau(2j-1) H_tau(2j)^T``, ``B_{m/2+j} = B_j^T``
    * Q: with ``F_j = H_tau(j)^T H_nu(j)``, ``Q_j = F_j ... F_m F_1 ... F_{j-1}``
    """
    m = len(Hs)
    kind = kind.upper()
    if tau is None:
        raise MissingPermutation("tau is required")
    if tau.n != m:
        raise ValueError(f"tau permutes {tau.n} items but there are {m} matrices")
    _same_dim(*Hs)
    H = lambda j: Hs[j - 1]  # noqa: E731 - 1-based access keeps the index algebra legible
    if kind in ("A", "B"):
        if nu is not None:
            raise ValueError(f"kind {kind} takes no second permutation")
        if m % 2:
            raise OddM(f"kind {kind} needs an even number of matrices, got {m}")
        half = []
        for j in range(1, m // 2 + 1):
            a, b = H(tau(2 * j - 1)), H(tau(2 * j))
            half.append(product([transpose(a), b]) if kind == "A" else product([a, transpose(b)]))
        return half + [transpose(X) for X in half]
    if kind == "Q":
        if nu is None:
            raise MissingPermutation("kind Q needs nu")
        if nu.n != m:
            raise ValueError(f"nu permutes {nu.n} items but there are {m} matrices")
        factors = [product([transpose(H(tau(j))), H(nu(j))]) for j in range(1, m + 1)]
        return [product(factors[j:] + factors[:j]) for j in range(m)]
    raise ValueError(f"unknown family kind {kind!r}")


def cyclic_products(As: Sequence[NonnegMatrix], nu: Permutation | None = None) -> list[NonnegMatrix]:
    """``P_i = A_nu(i) ... A_nu(k) A_nu(1) ... A_nu(i-1)`` for ``i = 1..k``."""
    k = len(As)
    if k == 0:
        raise EmptyList("no matrices")
    nu = nu or Permutation.identity(k)
    if nu.n != k:
        raise ValueError(f"nu permutes {nu.n} items but there are {k} matrices")
    order = [As[nu(i) - 1] for i in range(1, k + 1)]
    return [product(order[i:] + order[:i]) for i in range(k)]
