"""Seeded generation of law inputs, fuzz campaigns and counterexample shrinking.

Every trial draws from its own random stream, keyed by
``(seed, law, functional, trial index)``, so a campaign's outcome does not
depend on execution order or on how many worker processes run it.
"""

from __future__ import annotations

import hashlib
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import DepthOverflow, HspecError, InputShapeMismatch, Unsatisfiable
from .laws import (
    ENTRYWISE,
    W,
    LawInput,
    LawReport,
    LawSpec,
    Tolerances,
    catalog,
    evaluate_law,
    get_law,
    validate_input,
)
from .matcore import NonnegMatrix, Permutation, Weights, _wrap
from .spectral import Functional

ENTRY_MODELS = ("loguniform", "uniform01", "smallint")
STRUCTURED = ("zero", "identity", "permutation", "rank-one", "diagonal", "nilpotent")
MAX_ATTEMPTS = 1000


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    min_dim: int = 1
    max_dim: int = 8
    entry_model: str = "loguniform"
    zero_density: float = 0.2
    structured_injection_rate: float = 0.1

    def __post_init__(self):
        if not 1 <= self.min_dim <= self.max_dim <= 64:
            raise ValueError("need 1 <= min_dim <= max_dim <= 64")
        if self.entry_model not in ENTRY_MODELS:
            raise ValueError(f"entry_model must be one of {ENTRY_MODELS}")
        for name in ("zero_density", "structured_injection_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def trial_rng(seed: int, law_id: str, functional: str, index: int) -> np.random.Generator:
    """Independent stream for one trial, derived by hashing its key."""
    key = f"{seed}|{law_id}|{functional}|{index}".encode()
    digest = hashlib.blake2b(key, digest_size=16).digest()
    return np.random.default_rng(np.random.SeedSequence(int.from_bytes(digest, "little")))


# --------------------------------------------------------------------------
# matrices


def _entries(cfg: GenConfig, rng: np.random.Generator, shape) -> np.ndarray:
    if cfg.entry_model == "loguniform":
        a = np.exp(rng.uniform(math.log(1e-6), math.log(1e6), size=shape))
    elif cfg.entry_model == "uniform01":
        a = rng.uniform(0.0, 1.0, size=shape)
    else:
        a = rng.integers(0, 10, size=shape).astype(float)
    return a


def _structured(kind: str, cfg: GenConfig, rng: np.random.Generator, n: int) -> np.ndarray:
    if kind == "zero":
        return np.zeros((n, n))
    if kind == "identity":
        return np.eye(n)
    if kind == "permutation":
        return np.eye(n)[rng.permutation(n)]
    if kind == "rank-one":
        return np.outer(_entries(cfg, rng, n), _entries(cfg, rng, n))
    if kind == "diagonal":
        return np.diag(_entries(cfg, rng, n))
    return np.triu(_entries(cfg, rng, (n, n)), k=1)  # nilpotent


def gen_matrix(cfg: GenConfig, rng: np.random.Generator, n: int | None = None) -> NonnegMatrix:
    """Random matrix from the entry model, sometimes a structured special case."""
    if n is None:
        n = int(rng.integers(cfg.min_dim, cfg.max_dim + 1))
    if rng.random() < cfg.structured_injection_rate:
        a = _structured(STRUCTURED[int(rng.integers(len(STRUCTURED)))], cfg, rng, n)
    else:
        a = _entries(cfg, rng, (n, n))
        if cfg.zero_density > 0:
            a[rng.random((n, n)) < cfg.zero_density] = 0.0
    return _wrap(a)


# --------------------------------------------------------------------------
# law inputs


def _perm(rng, m) -> Permutation:
    return Permutation(tuple(int(x) + 1 for x in rng.permutation(m)))


def _convex(rng, k, allow_zero=False) -> tuple[float, ...]:
    if rng.random() < 0.1:
        a = np.ones(k)
    else:
        a = rng.dirichlet(np.ones(k))
    if allow_zero and k > 1 and rng.random() < 0.3:
        keep = rng.random(k) < 0.6
        keep[int(rng.integers(k))] = True
        a = np.where(keep, a, 0.0)
    a = a / a.sum()
    a[a < 1e-12] = 0.0 if allow_zero else 1e-12
    return tuple(float(x) for x in a / math.fsum(a))


def _weights(kind: str, rng, k: int, f: Functional | None) -> Weights:
    if kind == "convex|super":
        kind = "convex" if f is W or rng.random() < 0.5 else "super"
    if kind == "convex0":
        return Weights(_convex(rng, k, allow_zero=True))
    a = _convex(rng, k)
    if kind == "super":
        s = 1.0 if rng.random() < 0.2 else float(rng.uniform(1.0, 3.0))
        a = tuple(x * s for x in a)
    return Weights(a)


def _pick(rng, lo, hi, p_edge=0.15, edges=None):
    edges = edges if edges is not None else (lo,)
    if rng.random() < p_edge:
        return float(edges[int(rng.integers(len(edges)))])
    return float(rng.uniform(lo, hi))


def _exponents(shape, rng, m: int) -> dict:
    e: dict = {}
    doms = dict(shape.exponents)
    for name, dom in shape.exponents:
        if name in e:
            continue
        if dom == "t":
            e[name] = _pick(rng, 1.0, 4.0)
        elif dom == "power":
            e[name] = int(rng.integers(1, 4))
        elif dom == "depth":
            e[name] = int(rng.integers(0, 5))
        elif dom == "gridsize":
            e[name] = int(rng.choice([3, 5, 7, 9, 11, 21]))
        elif dom == "unit":
            e[name] = _pick(rng, 0.0, 1.0, 0.2, (0.0, 0.5, 1.0))
        elif dom == "ab" or (dom == "unit-or-ab" and doms.get("beta") == "optional"):
            if dom == "unit-or-ab" and rng.random() < 0.5:
                e[name] = _pick(rng, 0.0, 1.0, 0.2, (0.0, 0.5, 1.0))
                continue
            s = _pick(rng, 1.0, 3.0, 0.2)
            u = _pick(rng, 0.0, 1.0, 0.1, (0.0, 1.0))
            e["alpha"], e["beta"] = s * u, s - s * u
        elif dom == "ab-complement":
            base = max(0.0, 1.0 - e["alpha"])
            e[name] = base + _pick(rng, 0.0, 2.0, 0.2)
        elif dom == "optional":
            pass
        elif dom == "per-m":
            e[name] = _pick(rng, 1.0, 3.0, 0.25) / m
        elif dom == "per-m-2":
            e[name] = _pick(rng, 2.0, 4.0, 0.25) / m
        elif dom == "third":
            e[name] = _pick(rng, 1 / 3, 2.0, 0.2)
        elif dom == "half":
            e[name] = _pick(rng, 0.5, 2.0, 0.2)
        else:
            raise ValueError(f"unknown exponent domain {dom!r}")
    return e


def _zero_mean_diagonal(grid, rng) -> tuple:
    """Zero a diagonal support in one column per index so the mean's diagonal vanishes."""
    rows = [[np.array(K.entries) for K in row] for row in grid]
    n = rows[0][0].shape[0]
    ncols = len(rows[0])
    for i in range(n):
        j = int(rng.integers(ncols))
        if len(rows) == 1:
            rows[0][j][i, i] = 0.0
        else:
            rows[0][j][i, :] = 0.0
    return tuple(tuple(_wrap(a) for a in row) for row in rows)


def _count(rng, lo, hi, parity) -> int:
    choices = [k for k in range(lo, hi + 1) if parity is None or (k % 2 == 0) == (parity == "even")]
    return int(choices[int(rng.integers(len(choices)))])


def gen_law_input(
    law: LawSpec, cfg: GenConfig, rng: np.random.Generator, functional: Functional | str | None
) -> LawInput:
    """Draw an input that satisfies the law's hypotheses (``Unsatisfiable`` if none found)."""
    f = None if functional in (None, ENTRYWISE) else Functional.parse(functional)
    sh = law.input_shape
    for _ in range(MAX_ATTEMPTS):
        n = int(rng.integers(cfg.min_dim, cfg.max_dim + 1))
        mats, grid, weights, diag = (), None, None, None
        count = 1
        if sh.matrices:
            count = _count(rng, *sh.matrices, sh.parity)
            mats = tuple(gen_matrix(cfg, rng, n) for _ in range(count))
        if sh.grid_rows:
            rows = int(rng.integers(sh.grid_rows[0], sh.grid_rows[1] + 1))
            count = int(rng.integers(sh.grid_cols[0], sh.grid_cols[1] + 1))
            grid = tuple(tuple(gen_matrix(cfg, rng, n) for _ in range(count)) for _ in range(rows))
        if sh.diag:
            count = int(rng.integers(1, 5))
            kd = np.diagonal(mats[0].entries)
            diag = []
            for _ in range(count):
                # shift each diagonal entry anywhere in [-k_ii, k_ii + entry]
                d = _entries(cfg, rng, n) * (rng.random(n) < 0.7) - kd * rng.uniform(0, 1, n)
                exact = rng.random(n) < 0.2
                d[exact] = -kd[exact]
                diag.append(tuple(float(x) for x in d))
            diag = tuple(diag)
        if sh.weights:
            weights = _weights(sh.weights, rng, count, f)
        exps = _exponents(sh, rng, count)
        tau = nu = None
        if sh.perms:
            tau = _perm(rng, count)
            if "nu" in sh.perms:
                nu = _perm(rng, count)
        if sh.filter == "zero-diagonal-mean":
            grid = _zero_mean_diagonal(grid, rng)
        inp = LawInput(mats, grid, weights, tau, nu, exps, f, diag)
        try:
            validate_input(law, inp, f)
        except InputShapeMismatch:
            continue
        return inp
    raise Unsatisfiable(f"{law.id}: no valid input in {MAX_ATTEMPTS} attempts")


# --------------------------------------------------------------------------
# shrinking


@dataclass(frozen=True)
class Counterexample:
    law_id: str
    input: LawInput
    report: LawReport
    shrink_steps: int = 0
    trial_index: int | None = None

    @property
    def dim(self) -> int:
        return self.input.dim


def _fails(law_id, inp, tol, registry) -> LawReport | None:
    try:
        rep = evaluate_law(law_id, inp, tol, registry)
        if rep.passed:
            return None
        rep2 = evaluate_law(law_id, inp, tol.tightened(), registry)
    except (HspecError, ValueError, ArithmeticError):
        return None
    return rep2 if not rep2.passed else None


def _drop_perm(p: Permutation | None, k: int) -> Permutation | None:
    if p is None:
        return None
    return Permutation(tuple(x - (x > k) for x in p.image if x != k))


def _drop_weight(w: Weights | None, k: int) -> Weights | None:
    if w is None or len(w) < 2:
        return w
    rest = [a for i, a in enumerate(w.alphas) if i != k]
    total = math.fsum(rest)
    if total <= 0:
        return None
    return Weights(tuple(a * w.s_n / total for a in rest))


def _delete_index(K: NonnegMatrix, i: int) -> NonnegMatrix:
    keep = [j for j in range(K.n) if j != i]
    return _wrap(K.entries[np.ix_(keep, keep)].copy())


def _map_matrices(inp: LawInput, fn) -> LawInput:
    mats = tuple(fn(K) for K in inp.matrices)
    grid = tuple(tuple(fn(K) for K in row) for row in inp.grid) if inp.grid else None
    return replace(inp, matrices=mats, grid=grid)


def _round3(K: NonnegMatrix) -> NonnegMatrix:
    return _wrap(np.array([float(f"{x:.3g}") for x in K.entries.ravel()]).reshape(K.entries.shape))


def _candidates(inp: LawInput) -> Iterator[LawInput]:
    # remove one matrix (or one grid column / row, or one perturbation)
    if len(inp.matrices) > 1:
        for k in range(len(inp.matrices)):
            yield replace(
                inp,
                matrices=inp.matrices[:k] + inp.matrices[k + 1 :],
                weights=_drop_weight(inp.weights, k),
                tau=_drop_perm(inp.tau, k + 1),
                nu=_drop_perm(inp.nu, k + 1),
            )
        # even-count families lose a pair at a time
        for k in range(len(inp.matrices) - 1):
            yield replace(
                inp,
                matrices=inp.matrices[:k] + inp.matrices[k + 2 :],
                weights=_drop_weight(_drop_weight(inp.weights, k), k),
                tau=_drop_perm(_drop_perm(inp.tau, k + 1), k + 1),
                nu=_drop_perm(_drop_perm(inp.nu, k + 1), k + 1),
            )
    if inp.grid:
        if len(inp.grid[0]) > 1:
            for k in range(len(inp.grid[0])):
                yield replace(
                    inp,
                    grid=tuple(row[:k] + row[k + 1 :] for row in inp.grid),
                    weights=_drop_weight(inp.weights, k),
                )
        if len(inp.grid) > 1:
            for k in range(len(inp.grid)):
                yield replace(inp, grid=inp.grid[:k] + inp.grid[k + 1 :])
    if inp.diag_perturbations and len(inp.diag_perturbations) > 1:
        ds = inp.diag_perturbations
        for k in range(len(ds)):
            yield replace(inp, diag_perturbations=ds[:k] + ds[k + 1 :], weights=_drop_weight(inp.weights, k))
    # delete an index from every matrix
    n = inp.dim
    if n > 1:
        for i in range(n):
            cand = _map_matrices(inp, lambda K: _delete_index(K, i))
            if inp.diag_perturbations:
                cand = replace(
                    cand,
                    diag_perturbations=tuple(d[:i] + d[i + 1 :] for d in inp.diag_perturbations),
                )
            yield cand
    # zero one entry of one matrix
    mats = inp.all_matrices()
    for idx, K in enumerate(mats):
        for i, j in zip(*np.nonzero(K.entries)):
            def zero(M, target=K, i=i, j=j):
                if M is not target:
                    return M
                a = np.array(M.entries)
                a[i, j] = 0.0
                return _wrap(a)

            yield _map_matrices(inp, zero)
    # round one matrix to three significant digits
    for K in mats:
        R3 = _round3(K)
        if R3 != K:
            yield _map_matrices(inp, lambda M, K=K, R3=R3: R3 if M is K else M)


def shrink(
    c: Counterexample,
    tol: Tolerances | None = None,
    registry: Mapping[str, LawSpec] | None = None,
    max_evals: int = 5000,
) -> Counterexample:
    """Greedy local minimization: keep any reduction that still fails."""
    tol = tol or Tolerances()
    inp, rep, steps, evals = c.input, c.report, c.shrink_steps, 0
    progress = True
    while progress and evals < max_evals:
        progress = False
        for cand in _candidates(inp):
            evals += 1
            new = _fails(c.law_id, cand, tol, registry)
            if new is not None:
                inp, rep, steps = cand, new, steps + 1
                progress = True
                break
            if evals >= max_evals:
                break
    return replace(c, input=inp, report=rep, shrink_steps=steps)


# --------------------------------------------------------------------------
# campaigns


@dataclass(frozen=True)
class LawStats:
    law_id: str
    functional: str
    trials: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    rechecked: int = 0  # failures that passed at tighter spectral tolerance
    max_slack_consumed: float = 0.0


@dataclass(frozen=True)
class CampaignReport:
    seed: int
    trials: int
    config: GenConfig
    tolerances: Tolerances
    rows: tuple[LawStats, ...]
    counterexamples: tuple[Counterexample, ...]
    wall_time: float = field(default=0.0, compare=False)

    @property
    def total_failures(self) -> int:
        return sum(r.failed for r in self.rows)

    @property
    def passed(self) -> bool:
        return not self.counterexamples


def _run_chunk(args):
    law_id, fkey, indices, cfg, tol, do_shrink, registry = args
    law = get_law(law_id, registry)
    f = None if fkey == ENTRYWISE else Functional.parse(fkey)
    passed = failed = skipped = rechecked = 0
    slack = 0.0
    cexs = []
    for i in indices:
        rng = trial_rng(cfg.seed, law_id, fkey, i)
        try:
            inp = gen_law_input(law, cfg, rng, f)
            rep = evaluate_law(law_id, inp, tol, registry)
        except (Unsatisfiable, DepthOverflow):
            skipped += 1
            continue
        if not rep.passed:
            again = evaluate_law(law_id, inp, tol.tightened(), registry)
            if again.passed:
                rechecked += 1
                rep = again
            else:
                failed += 1
                cex = Counterexample(law_id, inp, again, 0, i)
                if do_shrink:
                    cex = shrink(cex, tol, registry)
                cexs.append(cex)
                continue
        passed += 1
        if math.isfinite(rep.slack_ratio):
            slack = max(slack, rep.slack_ratio)
    return law_id, fkey, passed, failed, skipped, rechecked, slack, cexs


def default_workers() -> int:
    env = os.environ.get("HSPEC_WORKERS")
    if env:
        w = int(env)
        if w < 1:
            raise ValueError("HSPEC_WORKERS must be >= 1")
        return w
    return 1


def run_campaign(
    laws: Sequence[str] | None,
    trials: int,
    cfg: GenConfig,
    tol: Tolerances | None = None,
    workers: int | None = None,
    functionals: Sequence[str] | None = None,
    do_shrink: bool = True,
    registry: Mapping[str, LawSpec] | None = None,
    chunk: int = 250,
) -> CampaignReport:
    """Evaluate ``trials`` inputs for every (law, admissible functional) pair."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol = tol or Tolerances()
    workers = workers or default_workers()
    table = registry if registry is not None else {law.id: law for law in catalog()}
    ids = sorted(table) if laws is None else list(laws)
    wanted = None if functionals is None else {Functional.parse(f).value for f in functionals}
    jobs = []
    for law_id in ids:
        law = get_law(law_id, registry)
        for fkey in law.functional_keys:
            if wanted is not None and fkey != ENTRYWISE and fkey not in wanted:
                continue
            for start in range(0, trials, chunk):
                idx = range(start, min(trials, start + chunk))
                jobs.append((law_id, fkey, idx, cfg, tol, do_shrink, registry))
    t0 = time.perf_counter()
    if workers == 1 or len(jobs) == 1:
        results = [_run_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    stats: dict[tuple[str, str], list] = {}
    cexs = []
    for law_id, fkey, p, fl, sk, rc, sl, cx in results:
        acc = stats.setdefault((law_id, fkey), [0, 0, 0, 0, 0.0])
        acc[0] += p
        acc[1] += fl
        acc[2] += sk
        acc[3] += rc
        acc[4] = max(acc[4], sl)
        cexs.extend(cx)
    rows = tuple(
        LawStats(law_id, fkey, p + fl + sk, p, fl, sk, rc, sl)
        for (law_id, fkey), (p, fl, sk, rc, sl) in sorted(stats.items())
    )
    cexs.sort(key=lambda c: (c.law_id, c.report.functional, c.trial_index or 0))
    return CampaignReport(
        cfg.seed, trials, cfg, tol, rows, tuple(cexs), wall_time=time.perf_counter() - t0
    )
