"""Registry of the inequality chains and a uniform evaluator.

Every law is a list of labelled terms plus the links ``(i, j)`` asserting
``term_i <= term_j``.  Scalar laws compare certified values; entrywise laws
compare matrices entry by entry.  Adjoints are transposes throughout, since
all matrices are real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .constructions import (
    c_matrix,
    cyclic_products,
    grid_bundle,
    pair_family,
    refinement_sequence,
    alpha_profile,
    sym,
    weighted_gmean,
)
from .errors import InputShapeMismatch, UnknownLaw
from .matcore import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    NonnegMatrix,
    Permutation,
    Weights,
    _wrap,
    entrywise_leq,
    hadamard_power,
    linear_comb,
    matpow,
    max_entry,
    product,
    transpose,
)
from .spectral import (
    MAX_ITER,
    SPECTRAL_ATOL,
    SPECTRAL_RTOL,
    CertifiedValue,
    Functional,
    certified,
    op_norm_certified,
    spectral_radius,
)

F = Functional
R, OP1, OP2, OPINF, W = (
    F.SPECTRAL_RADIUS,
    F.OP_NORM_1,
    F.OP_NORM_2,
    F.OP_NORM_INF,
    F.NUMERICAL_RADIUS,
)
SCALAR = "scalar-chain"
ENTRYWISE = "entrywise"
EXPONENT_TOL = 1e-12


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class Tolerances:
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL
    spectral_rtol: float = SPECTRAL_RTOL
    spectral_atol: float = SPECTRAL_ATOL
    max_iter: int = MAX_ITER

    def __post_init__(self):
        for name in ("rtol", "atol", "spectral_rtol", "spectral_atol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def tightened(self, factor: float = 10.0) -> Tolerances:
        """Same verdict tolerances, spectral brackets ``factor`` times tighter."""
        return replace(
            self,
            spectral_rtol=self.spectral_rtol / factor,
            spectral_atol=self.spectral_atol / factor,
            max_iter=self.max_iter * 2,
        )

    @property
    def spectral_kw(self) -> dict:
        return dict(rtol=self.spectral_rtol, atol=self.spectral_atol, max_iter=self.max_iter)


@dataclass(frozen=True)
class InputShape:
    """What a law needs; the generator and the validator both read this.

    ``matrices`` is an inclusive count range for the flat list, ``grid_rows``
    a row-count range for grid inputs (columns follow ``grid_cols``).
    ``weights`` is one of None, "convex" (positive, sum 1), "convex0"
    (nonnegative, sum 1), "super" (positive, sum >= 1) or "convex|super"
    (sum >= 1, but sum 1 when the functional is the numerical radius).
    ``exponents`` maps names to domain tags understood by
    :func:`exponent_ok`.
    """

    matrices: tuple[int, int] | None = None
    grid_rows: tuple[int, int] | None = None
    grid_cols: tuple[int, int] = (1, 4)
    weights: str | None = None
    exponents: tuple[tuple[str, str], ...] = ()
    parity: str | None = None  # of the matrix count
    perms: str | None = None  # "tau" or "tau,nu"
    diag: bool = False
    filter: str | None = None

    def describe(self) -> str:
        parts = []
        if self.matrices:
            lo, hi = self.matrices
            cnt = str(lo) if lo == hi else f"{lo}-{hi}"
            if self.parity:
                cnt += f" ({self.parity})"
            parts.append(f"matrices={cnt}")
        if self.grid_rows:
            parts.append(f"grid={self.grid_rows[0]}-{self.grid_rows[1]}x{self.grid_cols[0]}-{self.grid_cols[1]}")
        if self.weights:
            parts.append(f"weights={self.weights}")
        for name, dom in self.exponents:
            parts.append(f"{name}:{dom}")
        if self.perms:
            parts.append(f"perms={self.perms}")
        if self.diag:
            parts.append("diag-perturbations")
        if self.filter:
            parts.append(f"filter={self.filter}")
        return " ".join(parts)


@dataclass(frozen=True)
class LawInput:
    matrices: tuple[NonnegMatrix, ...] = ()
    grid: tuple[tuple[NonnegMatrix, ...], ...] | None = None
    weights: Weights | None = None
    tau: Permutation | None = None
    nu: Permutation | None = None
    exponents: Mapping[str, float] = field(default_factory=dict)
    functional: Functional | None = None
    diag_perturbations: tuple[tuple[float, ...], ...] | None = None

    @property
    def dim(self) -> int:
        if self.matrices:
            return self.matrices[0].n
        if self.grid:
            return self.grid[0][0].n
        return 0

    def all_matrices(self) -> list[NonnegMatrix]:
        out = list(self.matrices)
        if self.grid:
            out += [K for row in self.grid for K in row]
        return out


@dataclass(frozen=True)
class LawSpec:
    id: str
    anchor: tuple[str, str]  # (topic, statement in formula form)
    input_shape: InputShape
    functionals: tuple[Functional, ...]  # empty for entrywise laws
    mode: str
    evaluator: Callable = field(repr=False, compare=False)

    @property
    def functional_keys(self) -> tuple[str, ...]:
        """Campaign keys: functional values, or ``"entrywise"``."""
        return tuple(f.value for f in self.functionals) or (ENTRYWISE,)


@dataclass(frozen=True)
class LawReport:
    law_id: str
    functional: str
    mode: str
    labels: tuple[str, ...]
    values: tuple[float, ...]
    widths: tuple[float, ...]
    links: tuple[tuple[int, int], ...]
    gaps: tuple[float, ...]  # per link: lhs - rhs (entrywise: at the worst entry)
    refs: tuple[float, ...]  # per link: the rhs the relative slack scales with
    slack_used: float
    slack_ratio: float  # max over links of positive gap / allowed slack
    verdict: str
    failing_link: int | None
    worst_gap: float
    converged: bool = True

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


# --------------------------------------------------------------------------
# verdicts


def _allowance(rep_widths, link, ref, rtol, atol) -> float:
    i, j = link
    return rtol * abs(ref) + atol + rep_widths[i] + rep_widths[j]


def _judge(widths, links, gaps, refs, rtol, atol):
    failing = None
    ratio = 0.0
    for k, (link, gap, ref) in enumerate(zip(links, gaps, refs)):
        allow = _allowance(widths, link, ref, rtol, atol)
        if gap > allow and failing is None:
            failing = k
        if gap > 0:
            ratio = max(ratio, gap / allow if allow > 0 else math.inf)
    return failing, ratio


def check_report(rep: LawReport, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> str:
    """Re-derive the verdict from the stored gaps, references and widths."""
    failing, _ = _judge(rep.widths, rep.links, rep.gaps, rep.refs, rtol, atol)
    return "pass" if failing is None else "fail"


def _scalar_report(law_id, f, labels, terms: Sequence[CertifiedValue], links, tol) -> LawReport:
    values = tuple(float(t.value) for t in terms)
    widths = tuple(float(t.hi - t.lo) for t in terms)
    gaps = tuple(values[i] - values[j] for i, j in links)
    refs = tuple(values[j] for _, j in links)
    failing, ratio = _judge(widths, links, gaps, refs, tol.rtol, tol.atol)
    positive = [g for g in gaps if g > 0]
    return LawReport(
        law_id=law_id,
        functional=f,
        mode=SCALAR,
        labels=tuple(labels),
        values=values,
        widths=widths,
        links=tuple(links),
        gaps=gaps,
        refs=refs,
        slack_used=math.fsum(widths) + (max(positive) if positive else 0.0),
        slack_ratio=ratio,
        verdict="pass" if failing is None else "fail",
        failing_link=failing,
        worst_gap=max(gaps) if gaps else 0.0,
        converged=all(t.converged for t in terms),
    )


def _entrywise_report(law_id, labels, mats: Sequence[NonnegMatrix], links, tol) -> LawReport:
    gaps, refs, worst = [], [], []
    for i, j in links:
        cmp = entrywise_leq(mats[i], mats[j], tol.rtol, tol.atol)
        gaps.append(cmp.excess_gap)
        refs.append(cmp.excess_ref)
        worst.append(cmp.worst_gap)
    widths = (0.0,) * len(mats)
    failing, ratio = _judge(widths, links, gaps, refs, tol.rtol, tol.atol)
    return LawReport(
        law_id=law_id,
        functional=ENTRYWISE,
        mode=ENTRYWISE,
        labels=tuple(labels),
        values=tuple(max_entry(m) for m in mats),
        widths=widths,
        links=tuple(links),
        gaps=tuple(gaps),
        refs=tuple(refs),
        slack_used=max([0.0] + [g for g in gaps if g > 0]),
        slack_ratio=ratio,
        verdict="pass" if failing is None else "fail",
        failing_link=failing,
        worst_gap=max(worst),
    )


# --------------------------------------------------------------------------
# evaluation helpers


class _Ctx:
    def __init__(self, inp: LawInput, f: Functional | None, tol: Tolerances):
        self.inp = inp
        self.f = f
        self.kw = tol.spectral_kw
        self.e = inp.exponents

    def rho(self, X: NonnegMatrix) -> CertifiedValue:
        return certified(self.f, X, **self.kw)

    def r(self, X: NonnegMatrix) -> CertifiedValue:
        return spectral_radius(X, **self.kw)

    def op2(self, X: NonnegMatrix) -> CertifiedValue:
        return op_norm_certified(X, 2, **self.kw)

    @property
    def fs(self) -> str:
        return self.f.short if self.f else "?"


def _gm(mats: Sequence[NonnegMatrix], exps: Sequence[float]) -> NonnegMatrix:
    return weighted_gmean(mats, Weights(tuple(exps)))


def _prod_cv(values: Sequence[CertifiedValue], exps: Sequence[float]) -> CertifiedValue:
    acc = CertifiedValue.exact(1.0)
    for v, e in zip(values, exps):
        if e:
            acc = acc * (v**e)
    return acc


def _sum_cv(values: Sequence[CertifiedValue], coeffs: Sequence[float]) -> CertifiedValue:
    acc = CertifiedValue.exact(0.0)
    for v, c in zip(values, coeffs):
        acc = acc + v * c
    return acc


def _sum(mats: Sequence[NonnegMatrix]) -> NonnegMatrix:
    return linear_comb([1.0] * len(mats), mats)


def _chain(n: int) -> list[tuple[int, int]]:
    return [(k, k + 1) for k in range(n - 1)]


def _rev(mats):
    return list(reversed(mats))


def _pos(x: float) -> float:
    """Power guard for exponents computed in floating point (never below 0)."""
    return max(x, 0.0)


# --------------------------------------------------------------------------
# the laws; each returns (labels, terms, links)


def _L01(c: _Ctx):
    Ks, a = c.inp.matrices, c.inp.weights.alphas
    return (
        [f"{c.fs}(o K_i^(a_i))", f"prod {c.fs}(K_i)^a_i"],
        [c.rho(_gm(Ks, a)), _prod_cv([c.rho(K) for K in Ks], a)],
        None,
    )


def _grid_terms(c: _Ctx):
    b = grid_bundle(c.inp.grid, c.inp.weights)
    return b, b.mean()


def _L02(c: _Ctx):
    b, mean = _grid_terms(c)
    return ["H", "o_i (K_1i...K_li)^(a_i)"], [b.H, mean], None


def _L03(c: _Ctx):
    b, mean = _grid_terms(c)
    a = b.weights.alphas
    return (
        [f"{c.fs}(H)", f"{c.fs}(o H_i^(a_i))", f"prod {c.fs}(H_i)^a_i"],
        [c.rho(b.H), c.rho(mean), _prod_cv([c.rho(Hi) for Hi in b.H_list], a)],
        None,
    )


def _L04(c: _Ctx):
    (K,) = c.inp.matrices
    return ["max k(i,j)", f"{c.fs}(K)"], [CertifiedValue.exact(max_entry(K)), c.rho(K)], None


def _L05(c: _Ctx):
    t = c.e["t"]
    Ks = c.inp.matrices
    lhs = product([hadamard_power(K, t) for K in Ks])
    rhs = hadamard_power(product(Ks), t)
    return ["K_1^(t)...K_n^(t)", "(K_1...K_n)^(t)"], [lhs, rhs], None


def _L06(c: _Ctx):
    t = c.e["t"]
    Ks = c.inp.matrices
    lhs = product([hadamard_power(K, t) for K in Ks])
    return (
        [f"{c.fs}(K_1^(t)...K_n^(t))", f"{c.fs}(K_1...K_n)^t"],
        [c.rho(lhs), c.rho(product(Ks)) ** t],
        None,
    )


def _L07(c: _Ctx):
    Ks, w = c.inp.matrices, c.inp.weights
    return (
        ["o K_i^(a_i)", "C(K, a)", "sum a_i K_i"],
        [weighted_gmean(Ks, w), c_matrix(Ks, w), linear_comb(w.alphas, Ks)],
        None,
    )


def _L08(c: _Ctx):
    Ks, w = c.inp.matrices, c.inp.weights
    return (
        ["r(C(K, a))", "sum a_i r(K_i)"],
        [c.r(c_matrix(Ks, w)), _sum_cv([c.r(K) for K in Ks], w.alphas)],
        None,
    )


def perturbed(K: NonnegMatrix, d: Sequence[float]) -> NonnegMatrix:
    """``K + diag(d)``; ``d`` may be negative wherever the sum stays >= 0."""
    a = np.array(K.entries)
    idx = np.arange(K.n)
    a[idx, idx] = a[idx, idx] + np.asarray(d, dtype=float)
    return NonnegMatrix(a)


def _L09(c: _Ctx):
    (K,) = c.inp.matrices
    a = c.inp.weights.alphas
    Ks = [perturbed(K, d) for d in c.inp.diag_perturbations]
    return (
        ["r(sum a_i (K + D_i))", "sum a_i r(K + D_i)"],
        [c.r(linear_comb(a, Ks)), _sum_cv([c.r(X) for X in Ks], a)],
        None,
    )


def _L10(c: _Ctx):
    al, be = c.e["alpha"], c.e["beta"]
    fs, gs = c.inp.grid
    lhs = _sum([_gm([f, g], [al, be]) for f, g in zip(fs, gs)])
    rhs = _gm([_sum(fs), _sum(gs)], [al, be])
    return ["sum f_i^a g_i^b", "(sum f_i)^a (sum g_i)^b"], [lhs, rhs], None


def _grid_chain_head(c: _Ctx):
    b = grid_bundle(c.inp.grid, c.inp.weights)
    w = b.weights
    beta = b.beta
    mean_a = b.mean()
    mean_b = b.mean(w.betas)
    rhos = [c.rho(Hi) for Hi in b.H_list]
    head_labels = [f"{c.fs}(H)", f"{c.fs}(o H_i^(a_i))", f"beta {c.fs}(o H_i^(b_i))"]
    head = [c.rho(b.H), c.rho(mean_a), c.rho(mean_b) * beta]
    return b, w, beta, rhos, head_labels, head


def _L11(c: _Ctx):
    b, w, beta, rhos, labels, terms = _grid_chain_head(c)
    labels += [
        f"beta prod {c.fs}(H_i)^b_i",
        f"beta sum b_i {c.fs}(H_i)",
        f"beta sum a_i {c.fs}(H_i)",
    ]
    terms += [
        _prod_cv(rhos, w.betas) * beta,
        _sum_cv(rhos, w.betas) * beta,
        _sum_cv(rhos, w.alphas) * beta,
    ]
    return labels, terms, None


def _L12(c: _Ctx):
    b, w, beta, rhos, labels, terms = _grid_chain_head(c)
    labels += [f"beta {c.fs}(C(H, b))", f"beta sum b_i {c.fs}(H_i)"]
    terms += [c.rho(c_matrix(b.H_list, Weights(w.betas))) * beta, _sum_cv(rhos, w.betas) * beta]
    return labels, terms, None


def _L13(c: _Ctx):
    b, w, beta, rhos, labels, terms = _grid_chain_head(c)
    labels += [
        f"beta {c.fs}(C(H, b))",
        f"beta {c.fs}(sum b_i H_i)",
        f"beta sum b_i {c.fs}(H_i)",
    ]
    terms += [
        c.rho(c_matrix(b.H_list, Weights(w.betas))) * beta,
        c.rho(linear_comb(w.betas, b.H_list)) * beta,
        _sum_cv(rhos, w.betas) * beta,
    ]
    return labels, terms, None


def _L14(c: _Ctx):
    b = grid_bundle(c.inp.grid, c.inp.weights)
    mean = b.mean()
    if np.diagonal(mean.entries).any():
        raise InputShapeMismatch("the Hadamard mean of the column products must have zero diagonal")
    m = mean.n
    return (
        ["r(H)", "r(o H_i^(a_i))", "(m-1) delta"],
        [c.r(b.H), c.r(mean), CertifiedValue.exact((m - 1) * b.delta)],
        None,
    )


def _prod_mixed(Ks, a, b):
    """``(K_1...K_n)^(a) o ((K_n...K_1)^T)^(b)``."""
    fwd = product(Ks)
    bwd = transpose(product(_rev(Ks)))
    return _gm([fwd, bwd], [a, b]), fwd, product(_rev(Ks))


def _L15(c: _Ctx):
    a = c.e["alpha"]
    Ks = c.inp.matrices
    mixed, fwd, bwd = _prod_mixed(Ks, a, 1 - a)
    return (
        [
            f"{c.fs}(S_a(K_1)...S_a(K_n))",
            f"{c.fs}((K_1...K_n)^(a) o ((K_n...K_1)^T)^(1-a))",
            f"{c.fs}(K_1...K_n)^a {c.fs}(K_n...K_1)^(1-a)",
        ],
        [
            c.rho(product([sym(K, a) for K in Ks])),
            c.rho(mixed),
            (c.rho(fwd) ** a) * (c.rho(bwd) ** _pos(1 - a)),
        ],
        None,
    )


def _L16(c: _Ctx):
    a = c.e["alpha"]
    Ks = c.inp.matrices
    total = _sum(Ks)
    return (
        [f"{c.fs}(sum S_a(K_i))", f"{c.fs}(S_a(sum K_i))", f"{c.fs}(sum K_i)"],
        [c.rho(_sum([sym(K, a) for K in Ks])), c.rho(sym(total, a)), c.rho(total)],
        None,
    )


def _L17(c: _Ctx):
    a = c.e["alpha"]
    (K,) = c.inp.matrices
    return [f"{c.fs}(S_a(K))", f"{c.fs}(K)"], [c.rho(sym(K, a)), c.rho(K)], None


def _L18(c: _Ctx):
    a = c.e["alpha"]
    K1, K2 = c.inp.matrices
    mixed, fwd, _ = _prod_mixed([K1, K2], a, 1 - a)
    return (
        ["r(S_a(K_1) S_a(K_2))", "r((K_1K_2)^(a) o ((K_2K_1)^T)^(1-a))", "r(K_1K_2)"],
        [c.r(product([sym(K1, a), sym(K2, a)])), c.r(mixed), c.r(fwd)],
        None,
    )


def _ab(c: _Ctx):
    a, b = c.e["alpha"], c.e["beta"]
    return a, b, a + b


def _L19(c: _Ctx):
    a, b, _ = _ab(c)
    Ks = c.inp.matrices
    mixed, fwd, bwd = _prod_mixed(Ks, a, b)
    return (
        [
            f"{c.fs}(S_ab(K_1)...S_ab(K_n))",
            f"{c.fs}((K_1...K_n)^(a) o ((K_n...K_1)^T)^(b))",
            f"{c.fs}(K_1...K_n)^a {c.fs}(K_n...K_1)^b",
        ],
        [
            c.rho(product([sym(K, a, b) for K in Ks])),
            c.rho(mixed),
            (c.rho(fwd) ** a) * (c.rho(bwd) ** b),
        ],
        None,
    )


def _L20(c: _Ctx):
    a, b, s = _ab(c)
    (K,) = c.inp.matrices
    return [f"{c.fs}(S_ab(K))", f"{c.fs}(K)^(a+b)"], [c.rho(sym(K, a, b)), c.rho(K) ** s], None


def _L21(c: _Ctx):
    a, b, s = _ab(c)
    Ks = c.inp.matrices
    total = _sum(Ks)
    return (
        [f"{c.fs}(sum S_ab(K_i))", f"{c.fs}(S_ab(sum K_i))", f"{c.fs}(sum K_i)^(a+b)"],
        [c.rho(_sum([sym(K, a, b) for K in Ks])), c.rho(sym(total, a, b)), c.rho(total) ** s],
        None,
    )


def _L22(c: _Ctx):
    a, b, s = _ab(c)
    K1, K2 = c.inp.matrices
    return (
        ["r(S_ab(K_1) S_ab(K_2))", "r(K_1K_2)^(a+b)"],
        [c.r(product([sym(K1, a, b), sym(K2, a, b)])), c.r(product([K1, K2])) ** s],
        None,
    )


def _L23(c: _Ctx):
    a, b, s = _ab(c)
    Ks = c.inp.matrices
    mixed, fwd, bwd = _prod_mixed(Ks, a, b)
    mixed_n, _, _ = _prod_mixed(Ks, a / s, b / s)
    delta = max(max_entry(fwd), max_entry(bwd)) ** (s - 1)
    return (
        [
            f"{c.fs}(S_ab(K_1)...S_ab(K_n))",
            f"{c.fs}((K_1...K_n)^(a) o ((K_n...K_1)^T)^(b))",
            f"delta {c.fs}((K_1...K_n)^(a/s) o ((K_n...K_1)^T)^(b/s))",
            f"delta {c.fs}(K_1...K_n)^(a/s) {c.fs}(K_n...K_1)^(b/s)",
        ],
        [
            c.rho(product([sym(K, a, b) for K in Ks])),
            c.rho(mixed),
            c.rho(mixed_n) * delta,
            (c.rho(fwd) ** (a / s)) * (c.rho(bwd) ** (b / s)) * delta,
        ],
        None,
    )


def _L24(c: _Ctx):
    a, b, s = _ab(c)
    (K,) = c.inp.matrices
    scale = max_entry(K) ** (s - 1)
    return (
        [f"{c.fs}(S_ab(K))", f"|K|_inf^(a+b-1) {c.fs}(S_(a/s)(K))", f"|K|_inf^(a+b-1) {c.fs}(K)"],
        [c.rho(sym(K, a, b)), c.rho(sym(K, min(a / s, 1.0))) * scale, c.rho(K) * scale],
        None,
    )


def _L25(c: _Ctx):
    a, b, s = _ab(c)
    Ks = c.inp.matrices
    total = _sum(Ks)
    scale = max_entry(total) ** (s - 1)
    return (
        [
            f"{c.fs}(sum S_ab(K_i))",
            f"{c.fs}(S_ab(sum K_i))",
            f"|sum K_i|_inf^(a+b-1) {c.fs}(S_(a/s)(sum K_i))",
            f"|sum K_i|_inf^(a+b-1) {c.fs}(sum K_i)",
        ],
        [
            c.rho(_sum([sym(K, a, b) for K in Ks])),
            c.rho(sym(total, a, b)),
            c.rho(sym(total, min(a / s, 1.0))) * scale,
            c.rho(total) * scale,
        ],
        None,
    )


def _L26(c: _Ctx):
    a, b, s = _ab(c)
    K1, K2 = c.inp.matrices
    mixed, fwd, bwd = _prod_mixed([K1, K2], a, b)
    mixed_n, _, _ = _prod_mixed([K1, K2], a / s, b / s)
    delta = max(max_entry(fwd), max_entry(bwd)) ** (s - 1)
    return (
        [
            "r(S_ab(K_1) S_ab(K_2))",
            "r((K_1K_2)^(a) o ((K_2K_1)^T)^(b))",
            "delta r((K_1K_2)^(a/s) o ((K_2K_1)^T)^(b/s))",
            "delta r(K_1K_2)",
        ],
        [
            c.r(product([sym(K1, a, b), sym(K2, a, b)])),
            c.r(mixed),
            c.r(mixed_n) * delta,
            c.r(fwd) * delta,
        ],
        None,
    )


def _L27(c: _Ctx):
    a, b = c.e["alpha"], c.e["beta"]
    (K,) = c.inp.matrices
    K2 = product([K, K])
    Sa, Sab = sym(K, a), sym(K, a, b)
    return (
        ["S_a(K)^2", "S_a(K^2)", "S_ab(K)^2", "S_ab(K^2)"],
        [product([Sa, Sa]), sym(K2, a), product([Sab, Sab]), sym(K2, a, b)],
        [(0, 1), (2, 3)],
    )


def _L28(c: _Ctx):
    a = c.e["alpha"]
    b = c.e.get("beta")
    depth = int(c.e["depth"])
    (K,) = c.inp.matrices
    seq = refinement_sequence(K, a, b, depth, R, **c.kw)
    labels = [f"rho_{n}" for n in range(depth + 1)] + ["cap"]
    return labels, list(seq.terms) + [seq.cap_term], None


def _L29(c: _Ctx):
    a = c.e["alpha"]
    m = int(c.e["m"])
    (K,) = c.inp.matrices
    Km = matpow(K, m)
    rK = c.rho(K)
    return (
        [
            f"{c.fs}(S(K))",
            f"{c.fs}(S_a(K))",
            f"{c.fs}(K)",
            f"{c.fs}(S(K^m))^(1/m)",
            f"{c.fs}(S_a(K^m))^(1/m)",
            f"{c.fs}(K)",
        ],
        [
            c.rho(sym(K, 0.5)),
            c.rho(sym(K, a)),
            rK,
            c.rho(sym(Km, 0.5)) ** (1 / m),
            c.rho(sym(Km, a)) ** (1 / m),
            rK,
        ],
        [(0, 1), (1, 2), (3, 4), (4, 5)],
    )


def _L30(c: _Ctx):
    g = int(c.e["gridsize"])
    (K,) = c.inp.matrices
    prof = alpha_profile(K, c.f, g, **c.kw)
    mid = g // 2
    links = [(k + 1, k) for k in range(mid)] + [(k, k + 1) for k in range(mid, g - 1)]
    labels = [f"{c.fs}(S_{x:.6g}(K))" for x in prof.grid]
    return labels, list(prof.terms), links


def _powers(Ks, k):
    return [matpow(K, k) for K in Ks]


def _L31(c: _Ctx):
    m = int(c.e["m"])
    Ks, a = c.inp.matrices, c.inp.weights.alphas
    return (
        ["r(o K_i^(a_i))", "r(o (K_i^m)^(a_i))^(1/m)", "prod r(K_i)^a_i"],
        [
            c.r(_gm(Ks, a)),
            c.r(_gm(_powers(Ks, m), a)) ** (1 / m),
            _prod_cv([c.r(K) for K in Ks], a),
        ],
        None,
    )


def _L32(c: _Ctx):
    m, l = int(c.e["m"]), int(c.e["l"])
    Ks, a = c.inp.matrices, c.inp.weights.alphas
    return (
        [
            "r(o K_i^(a_i))",
            "r(o (K_i^m)^(a_i))^(1/m)",
            "r(o (K_i^ml)^(a_i))^(1/ml)",
            "prod r(K_i)^a_i",
        ],
        [
            c.r(_gm(Ks, a)),
            c.r(_gm(_powers(Ks, m), a)) ** (1 / m),
            c.r(_gm(_powers(Ks, m * l), a)) ** (1 / (m * l)),
            _prod_cv([c.r(K) for K in Ks], a),
        ],
        None,
    )


def _L33(c: _Ctx):
    m, l = int(c.e["m"]), int(c.e["l"])
    Ks, w = c.inp.matrices, c.inp.weights
    M = max(max_entry(K) for K in Ks)
    beta = 1.0 if w.s_n == 1 else M ** (w.s_n - 1)
    bt = w.betas
    return (
        [
            "r(o K_i^(a_i))",
            "beta r(o K_i^(b_i))",
            "beta r(o (K_i^m)^(b_i))^(1/m)",
            "beta r(o (K_i^ml)^(b_i))^(1/ml)",
            "beta prod r(K_i)^b_i",
        ],
        [
            c.r(_gm(Ks, w.alphas)),
            c.r(_gm(Ks, bt)) * beta,
            (c.r(_gm(_powers(Ks, m), bt)) ** (1 / m)) * beta,
            (c.r(_gm(_powers(Ks, m * l), bt)) ** (1 / (m * l))) * beta,
            _prod_cv([c.r(K) for K in Ks], bt) * beta,
        ],
        None,
    )


def _L34(c: _Ctx):
    m, l = int(c.e["m"]), int(c.e["l"])
    Ks, w = c.inp.matrices, c.inp.weights
    a, bt, s = w.alphas, w.betas, w.s_n
    Kml = _powers(Ks, m * l)
    return (
        [
            "r(o K_i^(a_i))",
            "r(o (K_i^m)^(a_i))^(1/m)",
            "r(o (K_i^ml)^(a_i))^(1/ml)",
            "r(o (K_i^ml)^(b_i))^(s/ml)",
            "prod r(K_i)^a_i",
        ],
        [
            c.r(_gm(Ks, a)),
            c.r(_gm(_powers(Ks, m), a)) ** (1 / m),
            c.r(_gm(Kml, a)) ** (1 / (m * l)),
            c.r(_gm(Kml, bt)) ** (s / (m * l)),
            _prod_cv([c.r(K) for K in Ks], a),
        ],
        None,
    )


def _L35(c: _Ctx):
    m, l = int(c.e["m"]), int(c.e["l"])
    Ks, w = c.inp.matrices, c.inp.weights
    a, bt, s = w.alphas, w.betas, w.s_n
    Km = _powers(Ks, m)
    return (
        [
            "r(o K_i^(a_i))",
            "r(o (K_i^m)^(a_i))^(1/m)",
            "r(o (K_i^m)^(b_i))^(s/m)",
            "r(o (K_i^ml)^(b_i))^(s/ml)",
            "prod r(K_i)^a_i",
        ],
        [
            c.r(_gm(Ks, a)),
            c.r(_gm(Km, a)) ** (1 / m),
            c.r(_gm(Km, bt)) ** (s / m),
            c.r(_gm(_powers(Ks, m * l), bt)) ** (s / (m * l)),
            _prod_cv([c.r(K) for K in Ks], a),
        ],
        None,
    )


def _hmean_norm(c: _Ctx):
    a = c.e["alpha"]
    Hs = c.inp.matrices
    return a, Hs, c.op2(_gm(Hs, [a] * len(Hs)))


def _L36(c: _Ctx):
    a, Hs, norm = _hmean_norm(c)
    m = len(Hs)
    A = pair_family(Hs, c.inp.tau, None, "A")
    P = cyclic_products(A, c.inp.nu)
    nu_order = [A[c.inp.nu(i) - 1] for i in range(1, m + 1)]
    return (
        [
            "|o H_i^(a)|",
            "r(o A_j^(a))^(1/2)",
            "r(o P_i^(a))^(1/(2m))",
            "r(A_nu(1)...A_nu(m))^(a/2)",
        ],
        [
            norm,
            c.r(_gm(A, [a] * m)) ** 0.5,
            c.r(_gm(P, [a] * m)) ** (1 / (2 * m)),
            c.r(product(nu_order)) ** (a / 2),
        ],
        None,
    )


def _L37(c: _Ctx):
    a, Hs, norm = _hmean_norm(c)
    mix = c.e["mix"]
    m = len(Hs)
    A = pair_family(Hs, c.inp.tau, None, "A")
    B = pair_family(Hs, c.inp.tau, None, "B")
    rA = c.r(_gm(A, [a] * m))
    rB = c.r(_gm(B, [a] * m))
    return (
        ["|o H_i^(a)|", "r(o B_j^(a))^(1/2)", "r(o A_j^(a))^(mix/2) r(o B_j^(a))^((1-mix)/2)"],
        [norm, rB**0.5, (rA ** (mix / 2)) * (rB ** _pos((1 - mix) / 2))],
        [(0, 1), (0, 2)],
    )


def _half_chain(c: _Ctx, fam):
    """Terms of the half-family chain for family ``fam`` (A or B)."""
    a = c.e["alpha"]
    m = len(c.inp.matrices)
    h = m // 2
    X = pair_family(c.inp.matrices, c.inp.tau, None, fam)
    full = c.r(_gm(X, [a] * m))
    half = c.r(_gm(X[:h], [a] * h))
    S = cyclic_products(X[:h])
    rs = c.r(_gm(S, [a] * h))
    last = c.r(product(X[:h]))
    return full, half, rs, last


def _L38(c: _Ctx):
    a, Hs, norm = _hmean_norm(c)
    m = len(Hs)
    full, half, rs, last = _half_chain(c, "A")
    return (
        [
            "|o H_i^(a)|",
            "r(o_{j<=m} A_j^(a))^(1/2)",
            "r(o_{j<=m/2} A_j^(a))",
            "r(o S_i^(a))^(2/m)",
            "r(A_1...A_{m/2})^a",
        ],
        [norm, full**0.5, half, rs ** (2 / m), last**a],
        None,
    )


def _L39(c: _Ctx):
    a, Hs, norm = _hmean_norm(c)
    m = len(Hs)
    mix = c.e["mix"]
    nm = _pos(1 - mix)
    fa, ha, sa, la = _half_chain(c, "A")
    fb, hb, sb, lb = _half_chain(c, "B")
    return (
        [
            "|o H_i^(a)|",
            "r(o A_j^(a))^(mix/2) r(o B_j^(a))^((1-mix)/2)",
            "r(o_{j<=m/2} A_j^(a))^mix r(o_{j<=m/2} B_j^(a))^(1-mix)",
            "r(o S_i^(a))^(2 mix/m) r(o T_i^(a))^(2(1-mix)/m)",
            "r(A_1...A_{m/2})^(a mix) r(B_1...B_{m/2})^(a(1-mix))",
        ],
        [
            norm,
            (fa ** (mix / 2)) * (fb ** (nm / 2)),
            (ha**mix) * (hb**nm),
            (sa ** (2 * mix / m)) * (sb ** (2 * nm / m)),
            (la ** (a * mix)) * (lb ** (a * nm)),
        ],
        None,
    )


def _q_terms(c: _Ctx, Hs, tau: Permutation, nu: Permutation, with_q: bool):
    a = c.e["alpha"]
    m = len(Hs)
    norm = c.op2(_gm(Hs, [a] * m))
    Fs = [product([transpose(Hs[tau(j) - 1]), Hs[nu(j) - 1]]) for j in range(1, m + 1)]
    terms = [norm, c.r(_gm(Fs, [a] * m)) ** 0.5]
    if with_q:
        Q = pair_family(Hs, tau, nu, "Q")
        terms.append(c.r(_gm(Q, [a] * m)) ** (1 / (2 * m)))
    terms.append(c.r(product(Fs)) ** (a / 2))
    return terms


def _L40(c: _Ctx):
    terms = _q_terms(c, c.inp.matrices, c.inp.tau, c.inp.nu, True)
    return (
        [
            "|o H_i^(a)|",
            "r(o (H_tau(j)^T H_nu(j))^(a))^(1/2)",
            "r(o Q_j^(a))^(1/(2m))",
            "r(H_tau(1)^T H_nu(1)...H_tau(m)^T H_nu(m))^(a/2)",
        ],
        terms,
        None,
    )


def odd_permutations(m: int) -> tuple[Permutation, Permutation]:
    """The pairings ``H_1^T H_2, H_3^T H_4, ..., H_m^T H_1, H_2^T H_3, ...`` for odd m."""
    if m % 2 == 0:
        raise InputShapeMismatch("odd pairing needs an odd number of matrices")
    h = (m + 1) // 2
    tau = [2 * j - 1 for j in range(1, h + 1)] + [2 * (j - h) for j in range(h + 1, m + 1)]
    nu = [2 * j for j in range(1, h)] + [2 * (j - (m - 1) // 2) - 1 for j in range(h, m + 1)]
    return Permutation(tuple(tau)), Permutation(tuple(nu))


def _L41(c: _Ctx):
    tau, nu = odd_permutations(len(c.inp.matrices))
    terms = _q_terms(c, c.inp.matrices, tau, nu, False)
    return (
        [
            "|o H_i^(a)|",
            "r((H_1^T H_2)^(a) o ... o (H_m^T H_1)^(a) o (H_2^T H_3)^(a) o ...)^(1/2)",
            "r(H_1^T H_2 ... H_m^T H_1 H_2^T H_3 ... H_{m-1}^T H_m)^(a/2)",
        ],
        terms,
        None,
    )


def _L42(c: _Ctx):
    A, B = c.inp.matrices
    a = c.e["alpha"]
    tau, nu = odd_permutations(3)
    terms = _q_terms(c, (A, transpose(B), A), tau, nu, True)
    # r(A^T B^T A^T A B A)^(a/2) = |ABA|^a
    return (
        [
            "|A^(a) o (B^T)^(a) o A^(a)|",
            "r((A^T B^T)^(a) o (A^T A)^(a) o (BA)^(a))^(1/2)",
            "r((A^T B^T A^T A B A)^(a) o (A^T A B A A^T B^T)^(a) o (B A A^T B^T A^T A)^(a))^(1/6)",
            "|ABA|^a",
        ],
        terms[:3] + [c.op2(product([A, B, A])) ** a],
        None,
    )


def _L43(c: _Ctx):
    a = c.e["alpha"]
    (C,) = c.inp.matrices
    Ca = hadamard_power(C, a)
    return (
        ["r(C^(a) o (C^T)^(a))", "r(C^(a) o C^(a))", "r(C)^(2a)"],
        [c.r(_gm([Ca, transpose(Ca)], [1, 1])), c.r(hadamard_power(C, 2 * a)), c.r(C) ** (2 * a)],
        None,
    )


def _L44(c: _Ctx):
    a = c.e["alpha"]
    A, B = c.inp.matrices
    AtB = product([transpose(A), B])
    BtA = product([transpose(B), A])
    return (
        [
            "|A^(a) o B^(a)|",
            "r((A^T B)^(a) o (B^T A)^(a))^(1/2)",
            "r((A^T B)^(a) o (A^T B)^(a))^(1/2)",
            "r(A^T B)^a",
        ],
        [
            c.op2(_gm([A, B], [a, a])),
            c.r(_gm([AtB, BtA], [a, a])) ** 0.5,
            c.r(hadamard_power(AtB, 2 * a)) ** 0.5,
            c.r(AtB) ** a,
        ],
        None,
    )


# --------------------------------------------------------------------------
# catalog

_ALL = (R, OP1, OP2, OPINF)
_SYM = (R, OP2, W)
_NORMS = (OP1, OP2, OPINF)


def _spec(id_, topic, statement, shape, functionals, mode, ev):
    return LawSpec(id_, (topic, statement), shape, tuple(functionals), mode, ev)


_MANY = (1, 4)
_ONE = (1, 1)
_TWO = (2, 2)
_GRID = dict(grid_rows=(1, 3), grid_cols=(1, 4))

_CATALOG: tuple[LawSpec, ...] = (
    _spec("L01", "weighted geometric mean bound", "rho(o K_i^(a_i)) <= prod rho(K_i)^a_i",
          InputShape(matrices=_MANY, weights="convex|super"), _ALL + (W,), SCALAR, _L01),
    _spec("L02", "grid product domination", "H <= o_i (K_1i...K_li)^(a_i)",
          InputShape(**_GRID, weights="convex|super"), (), ENTRYWISE, _L02),
    _spec("L03", "grid product spectral chain",
          "rho(H) <= rho(o_i (K_1i...K_li)^(a_i)) <= prod rho(K_1i...K_li)^a_i",
          InputShape(**_GRID, weights="convex|super"), _ALL + (W,), SCALAR, _L03),
    _spec("L04", "entries bounded by the norm", "k(i,j) <= |K|",
          InputShape(matrices=_ONE), _NORMS, SCALAR, _L04),
    _spec("L05", "Hadamard power of a product", "K_1^(t)...K_n^(t) <= (K_1...K_n)^(t), t >= 1",
          InputShape(matrices=_MANY, exponents=(("t", "t"),)), (), ENTRYWISE, _L05),
    _spec("L06", "Hadamard power spectral bound", "rho(K_1^(t)...K_n^(t)) <= rho(K_1...K_n)^t",
          InputShape(matrices=_MANY, exponents=(("t", "t"),)), _ALL, SCALAR, _L06),
    _spec("L07", "C-matrix sandwich", "o K_i^(a_i) <= C(K, a) <= sum a_i K_i",
          InputShape(matrices=_MANY, weights="convex0"), (), ENTRYWISE, _L07),
    _spec("L08", "diagonal convexity of the spectral radius", "r(C(K, a)) <= sum a_i r(K_i)",
          InputShape(matrices=_MANY, weights="convex0"), (R,), SCALAR, _L08),
    _spec("L09", "same off-diagonal part", "r(sum a_i (K + D_i)) <= sum a_i r(K + D_i)",
          InputShape(matrices=_ONE, weights="convex0", diag=True), (R,), SCALAR, _L09),
    _spec("L10", "Hoelder-type sum inequality", "sum f_i^a g_i^b <= (sum f_i)^a (sum g_i)^b, a+b >= 1",
          InputShape(grid_rows=(2, 2), grid_cols=(1, 4), exponents=(("alpha", "ab"), ("beta", "ab"))),
          (), ENTRYWISE, _L10),
    _spec("L11", "rescaled grid chain",
          "rho(H) <= rho(o H_i^(a_i)) <= beta rho(o H_i^(b_i)) <= beta prod rho(H_i)^b_i"
          " <= beta sum b_i rho(H_i) <= beta sum a_i rho(H_i)",
          InputShape(**_GRID, weights="super"), _ALL + (W,), SCALAR, _L11),
    _spec("L12", "rescaled grid chain through C",
          "rho(H) <= rho(o H_i^(a_i)) <= beta rho(o H_i^(b_i)) <= beta rho(C(H, b)) <= beta sum b_i rho(H_i)",
          InputShape(**_GRID, weights="super"), _ALL + (W,), SCALAR, _L12),
    _spec("L13", "rescaled grid norm chain",
          "d(H) <= d(o H_i^(a_i)) <= beta d(o H_i^(b_i)) <= beta d(C(H, b)) <= beta d(sum b_i H_i)"
          " <= beta sum b_i d(H_i)",
          InputShape(**_GRID, weights="super"), _NORMS + (W,), SCALAR, _L13),
    _spec("L14", "zero-diagonal mean bound", "r(H) <= r(o H_i^(a_i)) <= (m-1) max(M^s, 1)",
          InputShape(**_GRID, weights="super", filter="zero-diagonal-mean"), (R,), SCALAR, _L14),
    _spec("L15", "weighted symmetrization of a product",
          "rho(S_a(K_1)...S_a(K_n)) <= rho((K_1...K_n)^(a) o ((K_n...K_1)^T)^(1-a))"
          " <= rho(K_1...K_n)^a rho(K_n...K_1)^(1-a)",
          InputShape(matrices=_MANY, exponents=(("alpha", "unit"),)), _SYM, SCALAR, _L15),
    _spec("L16", "weighted symmetrization of a sum",
          "rho(sum S_a(K_i)) <= rho(S_a(sum K_i)) <= rho(sum K_i)",
          InputShape(matrices=_MANY, exponents=(("alpha", "unit"),)), _SYM, SCALAR, _L16),
    _spec("L17", "weighted symmetrization bound", "rho(S_a(K)) <= rho(K)",
          InputShape(matrices=_ONE, exponents=(("alpha", "unit"),)), _SYM, SCALAR, _L17),
    _spec("L18", "symmetrized two-factor product",
          "r(S_a(K_1) S_a(K_2)) <= r((K_1K_2)^(a) o ((K_2K_1)^T)^(1-a)) <= r(K_1K_2)",
          InputShape(matrices=_TWO, exponents=(("alpha", "unit"),)), (R,), SCALAR, _L18),
    _spec("L19", "two-exponent symmetrization of a product",
          "rho(S_ab(K_1)...S_ab(K_n)) <= rho((K_1...K_n)^(a) o ((K_n...K_1)^T)^(b))"
          " <= rho(K_1...K_n)^a rho(K_n...K_1)^b",
          InputShape(matrices=_MANY, exponents=(("alpha", "ab"), ("beta", "ab"))), (R, OP2), SCALAR, _L19),
    _spec("L20", "two-exponent symmetrization bound", "rho(S_ab(K)) <= rho(K)^(a+b)",
          InputShape(matrices=_ONE, exponents=(("alpha", "ab"), ("beta", "ab"))), (R, OP2), SCALAR, _L20),
    _spec("L21", "two-exponent symmetrization of a sum",
          "rho(sum S_ab(K_i)) <= rho(S_ab(sum K_i)) <= rho(sum K_i)^(a+b)",
          InputShape(matrices=_MANY, exponents=(("alpha", "ab"), ("beta", "ab"))), (R, OP2), SCALAR, _L21),
    _spec("L22", "two-exponent symmetrized pair", "r(S_ab(K_1) S_ab(K_2)) <= r(K_1K_2)^(a+b)",
          InputShape(matrices=_TWO, exponents=(("alpha", "ab"), ("beta", "ab"))), (R,), SCALAR, _L22),
    _spec("L23", "max-entry rescaled product chain",
          "rho(S_ab(K_1)...S_ab(K_n)) <= rho((K_1...K_n)^(a) o ((K_n...K_1)^T)^(b))"
          " <= delta rho((K_1...K_n)^(a/s) o ((K_n...K_1)^T)^(b/s))"
          " <= delta rho(K_1...K_n)^(a/s) rho(K_n...K_1)^(b/s)",
          InputShape(matrices=_MANY, exponents=(("alpha", "ab"), ("beta", "ab"))), _SYM, SCALAR, _L23),
    _spec("L24", "max-entry rescaled symmetrization",
          "rho(S_ab(K)) <= |K|_inf^(a+b-1) rho(S_(a/(a+b))(K)) <= |K|_inf^(a+b-1) rho(K)",
          InputShape(matrices=_ONE, exponents=(("alpha", "ab"), ("beta", "ab"))), _SYM, SCALAR, _L24),
    _spec("L25", "max-entry rescaled sum",
          "rho(sum S_ab(K_i)) <= rho(S_ab(sum K_i)) <= |sum K_i|_inf^(a+b-1) rho(S_(a/(a+b))(sum K_i))"
          " <= |sum K_i|_inf^(a+b-1) rho(sum K_i)",
          InputShape(matrices=_MANY, exponents=(("alpha", "ab"), ("beta", "ab"))), _SYM, SCALAR, _L25),
    _spec("L26", "max-entry rescaled pair",
          "r(S_ab(K_1)S_ab(K_2)) <= r((K_1K_2)^(a) o ((K_2K_1)^T)^(b))"
          " <= delta r((K_1K_2)^(a/s) o ((K_2K_1)^T)^(b/s)) <= delta r(K_1K_2)",
          InputShape(matrices=_TWO, exponents=(("alpha", "ab"), ("beta", "ab"))), (R,), SCALAR, _L26),
    _spec("L27", "symmetrization of a square", "S_a(K)^2 <= S_a(K^2) and S_ab(K)^2 <= S_ab(K^2)",
          InputShape(matrices=_ONE, exponents=(("alpha", "unit"), ("beta", "ab-complement"))),
          (), ENTRYWISE, _L27),
    _spec("L28", "dyadic refinement sequence",
          "rho_0 <= rho_1 <= ... <= rho_d <= cap, rho_n = r(S(K^(2^n)))^(2^-n)",
          InputShape(matrices=_ONE, exponents=(("alpha", "unit-or-ab"), ("beta", "optional"), ("depth", "depth"))),
          (R,), SCALAR, _L28),
    _spec("L29", "geometric symmetrization is smallest",
          "rho(S(K)) <= rho(S_a(K)) <= rho(K); rho(S(K^m))^(1/m) <= rho(S_a(K^m))^(1/m) <= rho(K)",
          InputShape(matrices=_ONE, exponents=(("alpha", "unit"), ("m", "power"))), _SYM, SCALAR, _L29),
    _spec("L30", "unimodal alpha-profile",
          "a -> rho(S_a(K)) nonincreasing on [0, 1/2], nondecreasing on [1/2, 1]",
          InputShape(matrices=_ONE, exponents=(("gridsize", "gridsize"),)), _SYM, SCALAR, _L30),
    _spec("L31", "power refinement", "r(o K_i^(a_i)) <= r(o (K_i^m)^(a_i))^(1/m) <= prod r(K_i)^a_i",
          InputShape(matrices=_MANY, weights="convex", exponents=(("m", "power"),)), (R,), SCALAR, _L31),
    _spec("L32", "iterated power refinement",
          "r(o K_i^(a_i)) <= r(o (K_i^m)^(a_i))^(1/m) <= r(o (K_i^ml)^(a_i))^(1/ml) <= prod r(K_i)^a_i",
          InputShape(matrices=_MANY, weights="convex", exponents=(("m", "power"), ("l", "power"))),
          (R,), SCALAR, _L32),
    _spec("L33", "rescaled power refinement",
          "r(o K_i^(a_i)) <= beta r(o K_i^(b_i)) <= beta r(o (K_i^m)^(b_i))^(1/m)"
          " <= beta r(o (K_i^ml)^(b_i))^(1/ml) <= beta prod r(K_i)^b_i",
          InputShape(matrices=_MANY, weights="super", exponents=(("m", "power"), ("l", "power"))),
          (R,), SCALAR, _L33),
    _spec("L34", "power refinement for exponent sums >= 1",
          "r(o K_i^(a_i)) <= r(o (K_i^m)^(a_i))^(1/m) <= r(o (K_i^ml)^(a_i))^(1/ml)"
          " <= r(o (K_i^ml)^(b_i))^(s/ml) <= prod r(K_i)^a_i",
          InputShape(matrices=_MANY, weights="super", exponents=(("m", "power"), ("l", "power"))),
          (R,), SCALAR, _L34),
    _spec("L35", "normalized power refinement for exponent sums >= 1",
          "r(o K_i^(a_i)) <= r(o (K_i^m)^(a_i))^(1/m) <= r(o (K_i^m)^(b_i))^(s/m)"
          " <= r(o (K_i^ml)^(b_i))^(s/ml) <= prod r(K_i)^a_i",
          InputShape(matrices=_MANY, weights="super", exponents=(("m", "power"), ("l", "power"))),
          (R,), SCALAR, _L35),
    _spec("L36", "norm of an even Hadamard mean via paired products",
          "|o H_i^(a)| <= r(o A_j^(a))^(1/2) <= r(o P_i^(a))^(1/(2m)) <= r(A_nu(1)...A_nu(m))^(a/2), a >= 1/m",
          InputShape(matrices=(2, 4), parity="even", perms="tau,nu", exponents=(("alpha", "per-m"),)),
          (OP2,), SCALAR, _L36),
    _spec("L37", "adjoint-swapped paired products",
          "|o H_i^(a)| <= r(o B_j^(a))^(1/2); |o H_i^(a)| <= r(o A_j^(a))^(mix/2) r(o B_j^(a))^((1-mix)/2)",
          InputShape(matrices=(2, 4), parity="even", perms="tau",
                     exponents=(("alpha", "per-m"), ("mix", "unit"))),
          (OP2,), SCALAR, _L37),
    _spec("L38", "half-family chain",
          "|o H_i^(a)| <= r(o A_j^(a))^(1/2) <= r(o_{j<=m/2} A_j^(a)) <= r(o S_i^(a))^(2/m)"
          " <= r(H_tau(1)^T H_tau(2)...H_tau(m-1)^T H_tau(m))^a, a >= 2/m",
          InputShape(matrices=(2, 4), parity="even", perms="tau", exponents=(("alpha", "per-m-2"),)),
          (OP2,), SCALAR, _L38),
    _spec("L39", "mixed half-family chain",
          "|o H_i^(a)| <= r(o A_j^(a))^(mix/2) r(o B_j^(a))^((1-mix)/2) <= ... "
          "<= r(A_1...A_{m/2})^(a mix) r(B_1...B_{m/2})^(a(1-mix))",
          InputShape(matrices=(2, 4), parity="even", perms="tau",
                     exponents=(("alpha", "per-m-2"), ("mix", "unit"))),
          (OP2,), SCALAR, _L39),
    _spec("L40", "two-permutation cyclic chain",
          "|o H_i^(a)| <= r(o (H_tau(j)^T H_nu(j))^(a))^(1/2) <= r(o Q_j^(a))^(1/(2m))"
          " <= r(H_tau(1)^T H_nu(1)...H_tau(m)^T H_nu(m))^(a/2)",
          InputShape(matrices=(1, 4), perms="tau,nu", exponents=(("alpha", "per-m"),)),
          (OP2,), SCALAR, _L40),
    _spec("L41", "odd-count chain",
          "|o H_i^(a)| <= r((H_1^T H_2)^(a) o ... o (H_m^T H_1)^(a) o ... o (H_{m-1}^T H_m)^(a))^(1/2)"
          " <= r(H_1^T H_2...H_m^T H_1 H_2^T H_3...H_{m-1}^T H_m)^(a/2)",
          InputShape(matrices=(3, 5), parity="odd", exponents=(("alpha", "per-m"),)),
          (OP2,), SCALAR, _L41),
    _spec("L42", "Jordan triple product",
          "|A^(a) o (B^T)^(a) o A^(a)| <= ... <= |ABA|^a, a >= 1/3",
          InputShape(matrices=_TWO, exponents=(("alpha", "third"),)), (OP2,), SCALAR, _L42),
    _spec("L43", "Hadamard square of a matrix",
          "r(C^(a) o (C^T)^(a)) <= r(C^(a) o C^(a)) <= r(C)^(2a), a >= 1/2",
          InputShape(matrices=_ONE, exponents=(("alpha", "half"),)), (R,), SCALAR, _L43),
    _spec("L44", "two-matrix Hadamard mean norm",
          "|A^(a) o B^(a)| <= r((A^T B)^(a) o (B^T A)^(a))^(1/2) <= r((A^T B)^(a) o (A^T B)^(a))^(1/2)"
          " <= r(A^T B)^a, a >= 1/2",
          InputShape(matrices=_TWO, exponents=(("alpha", "half"),)), (OP2,), SCALAR, _L44),
)

_BY_ID = {law.id: law for law in _CATALOG}


def catalog() -> list[LawSpec]:
    return list(_CATALOG)


def get_law(law_id: str, registry: Mapping[str, LawSpec] | None = None) -> LawSpec:
    table = _BY_ID if registry is None else registry
    try:
        return table[law_id]
    except KeyError:
        raise UnknownLaw(law_id) from None


# --------------------------------------------------------------------------
# input validation


def exponent_ok(domain: str, name: str, e: Mapping[str, float], inp: LawInput) -> bool:
    """Whether exponent ``name`` satisfies its domain tag."""
    tol = EXPONENT_TOL
    if domain == "optional" and name not in e:
        return True
    if name not in e:
        return False
    x = e[name]
    if not math.isfinite(x):
        return False
    m = len(inp.matrices)
    if domain == "t":
        return x >= 1 - tol
    if domain in ("power", "depth", "gridsize"):
        if int(x) != x:
            return False
        if domain == "power":
            return x >= 1
        if domain == "depth":
            return x >= 0
        return x >= 3 and int(x) % 2 == 1
    if domain == "unit":
        return -tol <= x <= 1 + tol
    if domain == "ab":
        a, b = e.get("alpha", -1), e.get("beta", -1)
        return a >= 0 and b >= 0 and a + b >= 1 - tol
    if domain == "ab-complement":
        return x >= 0 and e.get("alpha", 0) + x >= 1 - tol
    if domain == "unit-or-ab":
        b = e.get("beta")
        if b is None:
            return -tol <= x <= 1 + tol
        return x >= 0 and b >= 0 and x + b >= 1 - tol
    if domain == "optional":
        return x >= 0 and e.get("alpha", 0) + x >= 1 - tol
    if domain == "per-m":
        return x >= 1 / m - tol
    if domain == "per-m-2":
        return x >= 2 / m - tol
    if domain == "third":
        return x >= 1 / 3 - tol
    if domain == "half":
        return x >= 0.5 - tol
    raise ValueError(f"unknown exponent domain {domain!r}")


def validate_input(law: LawSpec, inp: LawInput, f: Functional | None) -> None:
    """Raise ``InputShapeMismatch`` unless ``inp`` satisfies the law's hypotheses."""
    sh = law.input_shape

    def bad(msg):
        raise InputShapeMismatch(f"{law.id}: {msg}")

    if law.mode == ENTRYWISE:
        if f is not None:
            bad("entrywise laws take no functional")
    elif f not in law.functionals:
        bad(f"functional {f.value if f else None} not admissible (allowed: "
            f"{', '.join(x.short for x in law.functionals)})")
    mats = inp.all_matrices()
    if not mats:
        bad("no matrices")
    n = mats[0].n
    if any(K.n != n for K in mats):
        bad("matrices differ in dimension")
    count = None
    if sh.matrices:
        count = len(inp.matrices)
        lo, hi = sh.matrices
        if not lo <= count <= hi or inp.grid:
            bad(f"expected {lo}..{hi} matrices in a flat list, got {count}")
        if sh.parity == "even" and count % 2:
            bad("needs an even number of matrices")
        if sh.parity == "odd" and count % 2 == 0:
            bad("needs an odd number of matrices")
    if sh.grid_rows:
        if not inp.grid or inp.matrices:
            bad("expects a grid of matrices")
        lo, hi = sh.grid_rows
        if not lo <= len(inp.grid) <= hi:
            bad(f"expected {lo}..{hi} grid rows")
        count = len(inp.grid[0])
        if count < 1 or any(len(row) != count for row in inp.grid):
            bad("ragged grid")
    if sh.weights:
        w = inp.weights
        if w is None:
            bad("weights required")
        expected = count if not sh.diag else len(inp.diag_perturbations or ())
        if len(w) != expected:
            bad(f"{len(w)} weights for {expected} items")
        convex = w.is_convex(EXPONENT_TOL)
        positive = all(a > 0 for a in w.alphas)
        kind = sh.weights
        if kind == "convex|super" and f is W:
            kind = "convex"
        if kind == "convex" and not (convex and positive):
            bad("needs positive weights summing to 1")
        if kind == "convex0" and not convex:
            bad("needs nonnegative weights summing to 1")
        if kind in ("super", "convex|super") and not (positive and w.s_n >= 1 - EXPONENT_TOL):
            bad("needs positive weights with sum >= 1")
    if sh.diag:
        ds = inp.diag_perturbations
        if not ds:
            bad("diagonal perturbations required")
        K = inp.matrices[0]
        for d in ds:
            if len(d) != n or not all(math.isfinite(x) for x in d):
                bad("diagonal perturbation has the wrong length")
            if any(K.entries[i, i] + d[i] < 0 for i in range(n)):
                bad("K + D_i must stay nonnegative")
    for name, dom in sh.exponents:
        if not exponent_ok(dom, name, inp.exponents, inp):
            bad(f"exponent {name}={inp.exponents.get(name)!r} outside its domain ({dom})")
    if sh.perms:
        need = sh.perms.split(",")
        for p in need:
            perm = getattr(inp, p)
            if perm is None or perm.n != count:
                bad(f"permutation {p} of size {count} required")
    if sh.filter == "zero-diagonal-mean":
        b = grid_bundle(inp.grid, inp.weights)
        if np.diagonal(b.mean().entries).any():
            bad("the Hadamard mean of the column products must have zero diagonal")


# --------------------------------------------------------------------------
# evaluation


def evaluate_law(
    law_id: str,
    inp: LawInput,
    tol: Tolerances | None = None,
    registry: Mapping[str, LawSpec] | None = None,
) -> LawReport:
    """Compute every term of the law's chain and judge each link."""
    tol = tol or Tolerances()
    law = get_law(law_id, registry)
    f = inp.functional
    if f is None and law.mode == SCALAR and len(law.functionals) == 1:
        f = law.functionals[0]
    f = Functional.parse(f) if f is not None else None
    validate_input(law, inp, f)
    ctx = _Ctx(inp, f, tol)
    labels, terms, links = law.evaluator(ctx)
    links = links or _chain(len(terms))
    if law.mode == ENTRYWISE:
        return _entrywise_report(law.id, labels, terms, links, tol)
    return _scalar_report(law.id, f.value, labels, terms, links, tol)
