"""Certified spectral radius and the other functionals the bounds range over.

The spectral radius of a nonnegative matrix is bracketed with
Collatz-Wielandt quotients: for any ``x >= 0, x != 0``,
``min_{x_i>0} (Ax)_i/x_i <= r(A)``, and for ``x > 0``,
``r(A) <= max_i (Ax)_i/x_i``.  The matrix is split into its strongly
connected blocks first (``r(A)`` is the largest block radius), so every block
is irreducible and has a strictly positive Perron vector.  Quotients are
widened outward by a rounding-error bound, so the bracket holds for the
floating-point matrix actually passed in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import NotConverged
from .matcore import NonnegMatrix, max_entry

SPECTRAL_RTOL = 1e-10
SPECTRAL_ATOL = 1e-14
MAX_ITER = 100_000
EPS_ROUNDS = 40

_U = np.finfo(float).eps / 2
_OUT = 4 * _U  # outward widening for derived brackets (a few ulps)


class Functional(str, Enum):
    SPECTRAL_RADIUS = "spectral-radius"
    OP_NORM_1 = "op-norm-1"
    OP_NORM_2 = "op-norm-2"
    OP_NORM_INF = "op-norm-inf"
    NUMERICAL_RADIUS = "numerical-radius"
    MAX_ENTRY = "max-entry"

    @property
    def short(self) -> str:
        return _SHORT[self]

    @classmethod
    def parse(cls, name: str | Functional) -> Functional:
        if isinstance(name, Functional):
            return name
        key = str(name).strip().lower()
        for f in cls:
            if key in (f.value, _SHORT[f]):
                return f
        aliases = {"op-inf": cls.OP_NORM_INF, "op∞": cls.OP_NORM_INF, "max": cls.MAX_ENTRY}
        if key in aliases:
            return aliases[key]
        raise ValueError(f"unknown functional {name!r}")


_SHORT = {
    Functional.SPECTRAL_RADIUS: "r",
    Functional.OP_NORM_1: "op1",
    Functional.OP_NORM_2: "op2",
    Functional.OP_NORM_INF: "opinf",
    Functional.NUMERICAL_RADIUS: "w",
    Functional.MAX_ENTRY: "maxentry",
}


def _down(x: float) -> float:
    return x * (1 - _OUT) if x > 0 else x


def _up(x: float) -> float:
    return x * (1 + _OUT) if x > 0 else x


@dataclass(frozen=True)
class CertifiedValue:
    """A nonnegative scalar with an enclosing interval ``[lo, hi]``.

    Supports the monotone arithmetic the inequality chains need (products,
    sums, nonnegative powers, nonnegative scaling); brackets propagate
    endpoint-wise and are widened by a few ulps per operation.
    """

    value: float
    lo: float
    hi: float
    iterations: int = 0
    converged: bool = True

    def __post_init__(self):
        for name in ("value", "lo", "hi"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def exact(cls, x: float) -> CertifiedValue:
        x = float(x)
        return cls(x, x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def _combine(self, other, op) -> CertifiedValue:
        if not isinstance(other, CertifiedValue):
            other = CertifiedValue.exact(other)
        return CertifiedValue(
            op(self.value, other.value),
            _down(op(self.lo, other.lo)),
            _up(op(self.hi, other.hi)),
            self.iterations + other.iterations,
            self.converged and other.converged,
        )

    def __mul__(self, other) -> CertifiedValue:
        if not isinstance(other, CertifiedValue) and other < 0:
            raise ValueError("only nonnegative scaling preserves the bracket order")
        return self._combine(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __add__(self, other) -> CertifiedValue:
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __pow__(self, p: float) -> CertifiedValue:
        if p < 0:
            raise ValueError("negative powers reverse the bracket")
        if p == 1:
            return self
        return CertifiedValue(
            self.value**p,
            _down(self.lo**p),
            _up(self.hi**p),
            self.iterations,
            self.converged,
        )

    def sqrt(self) -> CertifiedValue:
        return self**0.5


# --------------------------------------------------------------------------
# spectral radius


def _blocks(a: np.ndarray) -> list[np.ndarray]:
    """Index sets of the strongly connected components of the support graph."""
    n = a.shape[0]
    pattern = a > 0
    if pattern.all():
        return [np.arange(n)]
    ncomp, labels = connected_components(pattern, directed=True, connection="strong")
    if ncomp == 1:
        return [np.arange(n)]
    order = np.argsort(labels, kind="stable")
    cuts = np.flatnonzero(np.diff(labels[order])) + 1
    return np.split(order, cuts)


def _eig_start(b: np.ndarray) -> tuple[float, np.ndarray]:
    try:
        w, v = np.linalg.eig(b)
    except np.linalg.LinAlgError:
        return float("nan"), np.ones(b.shape[0])
    i = int(np.argmax(w.real))
    x = np.abs(v[:, i])
    m = x.max()
    if not (np.isfinite(m) and m > 0):
        return float(w[i].real), np.ones(b.shape[0])
    return float(w[i].real), x / m


def _block_radius(b: np.ndarray, rtol: float, atol: float, max_iter: int, eps_rounds: int):
    k = b.shape[0]
    # |fl((Bx)_i / x_i) - (Bx)_i / x_i| <= gamma_{k+1} (Bx)_i / x_i for nonnegative data
    g = 2 * (k + 2) * _U
    lo_f, hi_f = 1 - g, 1 + g

    est, x = _eig_start(b)
    rows = b.sum(axis=1)
    lo, hi = float(rows.min()) * lo_f, float(rows.max()) * hi_f
    # the shift must stay comparable to r(B) or it slows convergence to a crawl
    bound = min(float(rows.max()), float(b.sum(axis=0).max()))
    shift = 0.1 * (est if math.isfinite(est) and 0 < est <= bound else bound)
    shift = max(shift, 1e-300)
    eps = 1e-8 * max(float(b.max()), 1.0)
    round_len = max(1, max_iter // max(eps_rounds, 1))
    ident = np.eye(k)
    iters = 0

    def tight():
        return hi - lo <= max(rtol * hi, atol)

    def quotients(x, y):
        nonlocal lo, hi
        pos = x > 0
        if pos.all():
            q = y / x
            lo = max(lo, float(q.min()) * lo_f)
            hi = min(hi, float(q.max()) * hi_f)
            return True
        if pos.any():
            lo = max(lo, float((y[pos] / x[pos]).min()) * lo_f)
        return False

    def power_step(x, y):
        nonlocal eps
        # small shift: aperiodic, and each component is mostly rebuilt from
        # its neighbours, which repairs poorly resolved tiny components
        z = y + shift * x
        if not (z > 0).all():
            # lost positivity (underflow): irreducibilize with eps*J, halving per round
            z = z + eps * x.sum()
            if iters % round_len == 0:
                eps *= 0.5
        m = z.max()
        return z / m if m > 0 else np.ones(k)

    y = b @ x
    positive = quotients(x, y)
    inverse = True
    while not tight() and iters < max_iter:
        iters += 1
        if inverse and positive and math.isfinite(hi) and hi > 0:
            # inverse iteration keeps positivity: (mu I - B)^{-1} >= 0 for mu > r(B).
            # Its solve error swamps tiny components, so once it stops paying
            # off the power steps below finish the job alone.
            before = hi - lo
            mu = hi + max(hi - lo, 1e-7 * hi)
            try:
                z = np.linalg.solve(mu * ident - b, x)
            except np.linalg.LinAlgError:
                z = None
            if z is not None and np.isfinite(z).all() and (z > 0).all():
                x = z / z.max()
                y = b @ x
                positive = quotients(x, y)
                if tight():
                    break
            if z is None or hi - lo > 0.5 * before:
                inverse = False
        for _ in range(2):
            x = power_step(x, y)
            y = b @ x
            positive = quotients(x, y)

    value = min(max(est, lo), hi) if math.isfinite(est) else 0.5 * (lo + hi)
    return value, lo, hi, iters, tight()


def spectral_radius(
    A: NonnegMatrix,
    rtol: float = SPECTRAL_RTOL,
    atol: float = SPECTRAL_ATOL,
    max_iter: int = MAX_ITER,
    *,
    eps_rounds: int = EPS_ROUNDS,
    strict: bool = False,
) -> CertifiedValue:
    """Spectral radius ``r(A)`` with a certified Collatz-Wielandt bracket.

    A bracket that misses ``max(rtol*hi, atol)`` comes back with
    ``converged=False``; pass ``strict=True`` to raise ``NotConverged``.
    """
    if not (rtol > 0 and atol > 0):
        raise ValueError("rtol and atol must be positive")
    a = A.entries
    lo = hi = value = 0.0
    iters = 0
    blocks = _blocks(a)
    for idx in blocks:
        if len(blocks) == 1 and len(idx) > 1:
            bval, blo, bhi, iters, _ = _block_radius(a, rtol, atol, max_iter, eps_rounds)
        elif len(idx) == 1:
            v = float(a[idx[0], idx[0]])
            blo = bhi = bval = v
        else:
            bval, blo, bhi, it, _ = _block_radius(
                a[np.ix_(idx, idx)], rtol, atol, max_iter, eps_rounds
            )
            iters += it
        lo, hi, value = max(lo, blo), max(hi, bhi), max(value, bval)
    value = min(max(value, lo), hi)
    converged = bool(hi - lo <= max(rtol * hi, atol))
    result = CertifiedValue(float(value), float(lo), float(hi), int(iters), converged)
    if strict and not converged:
        raise NotConverged(result)
    return result


# --------------------------------------------------------------------------
# norms and numerical radius


def op_norm(A: NonnegMatrix, p, **spectral_kw) -> float:
    """Induced operator norm on l1, l2 or l-infinity."""
    return op_norm_certified(A, p, **spectral_kw).value


def op_norm_certified(A: NonnegMatrix, p, **spectral_kw) -> CertifiedValue:
    key = str(p).lower()
    a = A.entries
    if key == "1":
        return CertifiedValue.exact(a.sum(axis=0).max())
    if key in ("inf", "infinity", "∞"):
        return CertifiedValue.exact(a.sum(axis=1).max())
    if key == "2":
        # ||H|| = r(H* H)^{1/2}, on H / max(H) so the Gram matrix cannot overflow
        s = float(a.max())
        if s == 0:
            return CertifiedValue.exact(0.0)
        b = a / s
        g = b.T @ b
        g.setflags(write=False)
        gram = NonnegMatrix.__new__(NonnegMatrix)
        object.__setattr__(gram, "entries", g)
        return spectral_radius(gram, **spectral_kw).sqrt() * s
    raise ValueError(f"p must be one of 1, 2, inf; got {p!r}")


def numerical_radius(A: NonnegMatrix, **spectral_kw) -> float:
    return numerical_radius_certified(A, **spectral_kw).value


def numerical_radius_certified(A: NonnegMatrix, **spectral_kw) -> CertifiedValue:
    """``w(A) = r((A + A^T)/2)``, valid because ``A`` is entrywise nonnegative."""
    a = A.entries
    h = (a + a.T) * 0.5
    h.setflags(write=False)
    sym_part = NonnegMatrix.__new__(NonnegMatrix)
    object.__setattr__(sym_part, "entries", h)
    return spectral_radius(sym_part, **spectral_kw)


def certified(f: Functional | str, A: NonnegMatrix, **spectral_kw) -> CertifiedValue:
    """Evaluate functional ``f`` on ``A`` as a bracketed value."""
    f = Functional.parse(f)
    if f is Functional.SPECTRAL_RADIUS:
        return spectral_radius(A, **spectral_kw)
    if f is Functional.OP_NORM_1:
        return op_norm_certified(A, 1)
    if f is Functional.OP_NORM_INF:
        return op_norm_certified(A, "inf")
    if f is Functional.OP_NORM_2:
        return op_norm_certified(A, 2, **spectral_kw)
    if f is Functional.NUMERICAL_RADIUS:
        return numerical_radius_certified(A, **spectral_kw)
    return CertifiedValue.exact(max_entry(A))


def evaluate(f: Functional | str, A: NonnegMatrix, **spectral_kw) -> float:
    return certified(f, A, **spectral_kw).value
