"""The combinatorial ensemble M_{n,d} and the i.i.d. Bernoulli comparison model.

A matrix of the combinatorial model is stored by its row supports: row ``i``
holds ones exactly at the ``d`` column indices ``supports[i]``.  Indices are
0-based in memory and 1-based in the on-disk ``rcm`` text format.

Dense matrices are plain ``numpy`` arrays (``complex128`` where a complex
shift may follow).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .rng import MASK64, make_rng


@dataclass(frozen=True)
class ModelParams:
    n: int
    d: int
    m: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.m is None:
            object.__setattr__(self, "m", self.n)
        if self.n < 1 or self.m < 1:
            raise ValueError(f"n and m must be positive, got n={self.n}, m={self.m}")
        if not 1 <= self.d <= self.n:
            raise ValueError(f"need 1 <= d <= n, got d={self.d}, n={self.n}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class RowSupportMatrix:
    """An m x n 0/1 matrix whose rows each contain exactly d ones."""

    n: int
    d: int
    supports: np.ndarray = field(repr=False)

    def __post_init__(self):
        sup = np.array(self.supports, dtype=np.int64, copy=True)
        if sup.ndim != 2:
            sup = sup.reshape(-1, self.d)
        if sup.shape[1] != self.d:
            raise ValueError(f"each support must have length d={self.d}")
        if sup.size:
            if sup.min() < 0 or sup.max() >= self.n:
                raise ValueError("support index out of range")
            if self.d > 1 and not np.all(np.diff(sup, axis=1) > 0):
                raise ValueError("support indices must be strictly increasing")
        sup.setflags(write=False)
        object.__setattr__(self, "supports", sup)

    @property
    def m(self) -> int:
        return self.supports.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    def to_dense(self, dtype=np.float64) -> np.ndarray:
        out = np.zeros((self.m, self.n), dtype=dtype)
        if self.d:
            out[np.arange(self.m)[:, None], self.supports] = 1
        return out

    def column_sums(self) -> np.ndarray:
        return np.bincount(self.supports.ravel(), minlength=self.n)

    def __eq__(self, other):
        if not isinstance(other, RowSupportMatrix):
            return NotImplemented
        return self.n == other.n and self.d == other.d and np.array_equal(self.supports, other.supports)

    def __hash__(self):
        return hash((self.n, self.d, self.supports.tobytes()))

    @classmethod
    def from_dense(cls, a) -> "RowSupportMatrix":
        a = np.asarray(a)
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("dense matrix must have 0/1 entries")
        sums = a.sum(axis=1).astype(int)
        if len(set(sums.tolist())) > 1:
            raise ValueError("rows do not share a common sum")
        d = int(sums[0]) if sums.size else 0
        sup = np.nonzero(a)[1].reshape(a.shape[0], d)
        return cls(n=a.shape[1], d=d, supports=sup)


def sample_rows(n: int, d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` independent uniform d-subsets of range(n), sorted per row.

    Partial Fisher-Yates run in lockstep over all rows: step j swaps
    position j with a uniform position in [j, n).
    """
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    perm = np.tile(np.arange(n, dtype=np.int64), (count, 1))
    rows = np.arange(count)
    for j in range(min(d, n - 1)):
        k = rng.integers(j, n, size=count)
        held = perm[rows, j].copy()
        perm[rows, j] = perm[rows, k]
        perm[rows, k] = held
    return np.sort(perm[:, :d], axis=1)


def sample_combinatorial(params: ModelParams, rng: np.random.Generator | None = None) -> RowSupportMatrix:
    """Sample M uniformly from M_{n,d} (m independent uniform rows)."""
    if rng is None:
        rng = make_rng(params.seed)
    return RowSupportMatrix(n=params.n, d=params.d, supports=sample_rows(params.n, params.d, params.m, rng))


def sample_bernoulli(n: int, p: float, rng: np.random.Generator, m: int | None = None) -> np.ndarray:
    """An m x n matrix of i.i.d. Bernoulli(p) entries (as float 0/1)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    m = n if m is None else m
    return (rng.random((m, n)) < p).astype(np.float64)


def normalization_scale(n: int, d: int) -> float:
    """1 / sqrt(d (1 - d/n))."""
    var = d * (1.0 - d / n)
    if var <= 0:
        raise ValueError(f"normalization undefined for d={d}, n={n} (zero variance)")
    return 1.0 / math.sqrt(var)


def normalize(M: RowSupportMatrix) -> np.ndarray:
    return M.to_dense(np.complex128) * normalization_scale(M.n, M.d)


def shift(a, z: complex = 0.0) -> np.ndarray:
    """Return a - z I for a square matrix."""
    a = np.asarray(a.to_dense() if isinstance(a, RowSupportMatrix) else a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"shift needs a square matrix, got shape {a.shape}")
    out = a.astype(np.complex128, copy=True)
    out[np.diag_indices_from(out)] -= z
    return out


def expectation_matrix(n: int, m: int, d: int) -> np.ndarray:
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    return np.full((m, n), d / n, dtype=np.complex128)


def complement(M: RowSupportMatrix) -> RowSupportMatrix:
    """E - M: each support replaced by its complement in range(n)."""
    mask = np.ones((M.m, M.n), dtype=bool)
    if M.d:
        mask[np.arange(M.m)[:, None], M.supports] = False
    sup = np.nonzero(mask)[1].reshape(M.m, M.n - M.d)
    return RowSupportMatrix(n=M.n, d=M.n - M.d, supports=sup)


def transpose(M: RowSupportMatrix) -> np.ndarray:
    return M.to_dense().T.copy()


def write_rcm(M: RowSupportMatrix, path) -> None:
    """Write the text format: header ``rcm n m d`` then one 1-based support per line."""
    lines = [f"rcm {M.n} {M.m} {M.d}"]
    lines.extend(" ".join(str(int(j) + 1) for j in row) for row in M.supports)
    Path(path).write_text("\n".join(lines) + "\n")


def read_rcm(path) -> RowSupportMatrix:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError("empty rcm file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "rcm":
        raise ValueError(f"bad rcm header: {lines[0]!r}")
    n, m, d = (int(t) for t in head[1:])
    body = lines[1:1 + m]
    if len(body) != m:
        raise ValueError(f"expected {m} rows, found {len(body)}")
    sup = np.array([[int(t) - 1 for t in line.split()] for line in body], dtype=np.int64).reshape(m, d)
    return RowSupportMatrix(n=n, d=d, supports=sup)


def export_dense_csv(a, path) -> None:
    """Dense export: one CSV row per matrix row, each entry as a ``real,imag`` pair."""
    a = np.asarray(a, dtype=np.complex128)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in a:
            w.writerow([repr(float(v)) for z in row for v in (z.real, z.imag)])


def import_dense_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(t) for t in r] for r in csv.reader(fh) if r]
    arr = np.array(rows, dtype=np.float64)
    return arr[:, 0::2] + 1j * arr[:, 1::2]
