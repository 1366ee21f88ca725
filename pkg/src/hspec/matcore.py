"""Dense nonnegative square matrices and the Hadamard (Schur) calculus.

Every ``NonnegMatrix`` is validated once at construction; the functions in
this module assume the invariants and never re-check them on input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    LengthMismatch,
    NegativeEntry,
    NegativeExponent,
    NonFiniteEntry,
    NonSquare,
)

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class NonnegMatrix:
    """Square matrix with finite nonnegative entries, stored dense row-major."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=float, order="C")
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise NonSquare(f"expected a non-empty square array, got shape {a.shape}")
        _validate(a)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def tolist(self) -> list[list[float]]:
        return self.entries.tolist()

    def __eq__(self, other):
        if not isinstance(other, NonnegMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash((self.n, self.entries.tobytes()))

    def __repr__(self):
        return f"NonnegMatrix({self.tolist()!r})"


def _validate(a: np.ndarray) -> None:
    finite = np.isfinite(a)
    if not finite.all():
        i, j = np.argwhere(~finite)[0]
        raise NonFiniteEntry((int(i) + 1, int(j) + 1), float(a[i, j]))
    neg = a < 0
    if neg.any():
        i, j = np.argwhere(neg)[0]
        raise NegativeEntry((int(i) + 1, int(j) + 1), float(a[i, j]))


def _wrap(a: np.ndarray) -> NonnegMatrix:
    # Results of closed operations: only finiteness can be lost (overflow).
    if not np.isfinite(a).all():
        i, j = np.argwhere(~np.isfinite(a))[0]
        raise NonFiniteEntry((int(i) + 1, int(j) + 1), float(a[i, j]))
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    m = object.__new__(NonnegMatrix)
    object.__setattr__(m, "entries", a)
    return m


def from_rows(rows: Sequence[Sequence[float]]) -> NonnegMatrix:
    """Build a validated matrix from a list of rows."""
    rows = [list(r) for r in rows]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise NonSquare(
            f"rows do not form a square array (lengths {[len(r) for r in rows]})"
        )
    return NonnegMatrix(np.array(rows, dtype=float))


def identity(n: int) -> NonnegMatrix:
    return _wrap(np.eye(n))


def zeros(n: int) -> NonnegMatrix:
    return _wrap(np.zeros((n, n)))


def ones(n: int) -> NonnegMatrix:
    return _wrap(np.ones((n, n)))


def diag(values: Sequence[float]) -> NonnegMatrix:
    return NonnegMatrix(np.diag(np.asarray(values, dtype=float)))


def scale(A: NonnegMatrix, c: float) -> NonnegMatrix:
    if c < 0:
        raise NegativeExponent(f"scale factor must be nonnegative, got {c}")
    return _wrap(A.entries * c)


def _same_dim(*mats: NonnegMatrix) -> int:
    n = mats[0].n
    for m in mats[1:]:
        if m.n != n:
            raise DimensionMismatch(f"dimensions differ: {n} vs {m.n}")
    return n


def hadamard_product(A: NonnegMatrix, B: NonnegMatrix) -> NonnegMatrix:
    _same_dim(A, B)
    return _wrap(A.entries * B.entries)


def _hpow(a: np.ndarray, t: float) -> np.ndarray:
    if t == 1:
        return a
    # numpy already gives 0.0**0 == 1.0
    return np.power(a, t)


def hadamard_power(A: NonnegMatrix, t: float) -> NonnegMatrix:
    """Entrywise ``a(i,j) ** t`` with the convention ``0 ** 0 == 1``."""
    if not t >= 0:
        raise NegativeExponent(f"Hadamard exponent must be >= 0, got {t}")
    return _wrap(_hpow(A.entries, t))


def matmul(A: NonnegMatrix, B: NonnegMatrix) -> NonnegMatrix:
    _same_dim(A, B)
    return _wrap(A.entries @ B.entries)


def product(mats: Sequence[NonnegMatrix]) -> NonnegMatrix:
    """Ordinary product ``M_1 M_2 ... M_k`` (left to right)."""
    if not mats:
        raise LengthMismatch("product of an empty list")
    _same_dim(*mats)
    acc = mats[0].entries
    for m in mats[1:]:
        acc = acc @ m.entries
    return _wrap(acc)


def matpow(A: NonnegMatrix, k: int) -> NonnegMatrix:
    """``A**k`` by repeated squaring, ``k >= 1``."""
    if k < 1 or int(k) != k:
        raise ValueError(f"matrix power must be a positive integer, got {k}")
    k = int(k)
    result = None
    base = A.entries
    while True:
        if k & 1:
            result = base if result is None else result @ base
        k >>= 1
        if not k:
            break
        base = base @ base
    return _wrap(result)


def transpose(A: NonnegMatrix) -> NonnegMatrix:
    return _wrap(A.entries.T.copy())


def linear_comb(coeffs: Sequence[float], mats: Sequence[NonnegMatrix]) -> NonnegMatrix:
    """``sum_i c_i M_i`` for nonnegative coefficients."""
    if len(coeffs) != len(mats):
        raise LengthMismatch(f"{len(coeffs)} coefficients for {len(mats)} matrices")
    if not mats:
        raise LengthMismatch("empty linear combination")
    n = _same_dim(*mats)
    acc = np.zeros((n, n))
    for c, m in zip(coeffs, mats):
        if not c >= 0:
            raise NegativeExponent(f"coefficients must be nonnegative, got {c}")
        acc = acc + c * m.entries
    return _wrap(acc)


def max_entry(A: NonnegMatrix) -> float:
    """The max-entry norm ``sup k(i,j)``."""
    return float(A.entries.max())


class EntrywiseComparison(NamedTuple):
    holds: bool
    worst_gap: float  # max(a - b) over all entries
    worst_index: tuple[int, int]  # 1-based location of worst_gap
    excess: float  # max(a - b(1+rtol) - atol); holds iff excess <= 0
    excess_gap: float  # a - b at the excess location
    excess_ref: float  # b at the excess location


def entrywise_leq(
    A: NonnegMatrix,
    B: NonnegMatrix,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> EntrywiseComparison:
    """Check ``a(i,j) <= b(i,j)*(1+rtol) + atol`` for every entry."""
    _same_dim(A, B)
    a, b = A.entries, B.entries
    diff = a - b
    k = int(np.argmax(diff))
    over = diff - (rtol * b + atol)
    e = int(np.argmax(over))
    n = A.n
    return EntrywiseComparison(
        holds=bool(over.flat[e] <= 0),
        worst_gap=float(diff.flat[k]),
        worst_index=(k // n + 1, k % n + 1),
        excess=float(over.flat[e]),
        excess_gap=float(diff.flat[e]),
        excess_ref=float(b.flat[e]),
    )


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..n}; ``image[j-1]`` is the image of ``j``."""

    image: tuple[int, ...]

    def __post_init__(self):
        img = tuple(int(i) for i in self.image)
        if sorted(img) != list(range(1, len(img) + 1)):
            raise ValueError(f"not a permutation of 1..{len(img)}: {img}")
        object.__setattr__(self, "image", img)

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, j: int) -> int:
        return self.image[j - 1]

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    def matrix(self) -> NonnegMatrix:
        """Permutation matrix P with P e_j = e_{image(j)}."""
        p = np.zeros((self.n, self.n))
        for j, i in enumerate(self.image):
            p[i - 1, j] = 1.0
        return _wrap(p)


@dataclass(frozen=True)
class Weights:
    """Exponent vector with its sum ``s_n`` and the rescaled ``betas``."""

    alphas: tuple[float, ...]
    s_n: float = field(init=False)
    betas: tuple[float, ...] = field(init=False)
    beta_scale_exponent: float = field(init=False)

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas:
            raise LengthMismatch("weights must be non-empty")
        for a in alphas:
            if not (math.isfinite(a) and a >= 0):
                raise NegativeExponent(f"weights must be finite and >= 0, got {a}")
        s = math.fsum(alphas)
        betas = tuple(a / s for a in alphas) if s > 0 else alphas
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "s_n", s)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "beta_scale_exponent", s - 1.0)

    def __len__(self):
        return len(self.alphas)

    def is_convex(self, tol: float = 1e-12) -> bool:
        return abs(self.s_n - 1.0) <= tol

    @classmethod
    def uniform(cls, n: int) -> Weights:
        return cls(tuple([1.0 / n] * n))
