"""Combinatorial and operator diagnostics of a sampled matrix.

Matrices are :class:`~rcmlab.model.RowSupportMatrix` instances or dense
0/1 arrays (for transposes and other non-fixed-row-sum inputs).  Index
sets are 0-based.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg as sla

from .model import RowSupportMatrix, sample_rows


def _incidence(M) -> np.ndarray:
    if isinstance(M, RowSupportMatrix):
        return M.to_dense(np.int64)
    a = np.asarray(M)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return a


def _index_set(J, size: int) -> np.ndarray:
    J = np.unique(np.asarray(sorted(J), dtype=np.int64))
    if J.size and (J.min() < 0 or J.max() >= size):
        raise ValueError(f"index set has entries outside [0, {size})")
    return J


# -- column sums and the restricted norm ------------------------------------

def column_sum_event(M, tau: float) -> tuple[bool, int]:
    """Whether every column sum is at most (1 + tau) m d / n; also the max sum."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    a = _incidence(M)
    m, n = a.shape
    d = M.d if isinstance(M, RowSupportMatrix) else a.sum() / m
    top = int(a.sum(axis=0).max())
    return bool(top <= (1 + tau) * m * d / n * (1 + 1e-12)), top


def column_sum_failure_bound(n: int, m: int, d: int, tau: float) -> float:
    """n exp(-m d tau^2 / (3n)), the complement probability bound."""
    return n * math.exp(-m * d * tau * tau / (3 * n))


def restricted_norm(M) -> float:
    """||M - EM||, the top singular value of M - (d/n) J."""
    a = _incidence(M).astype(np.float64)
    m, n = a.shape
    d = M.d if isinstance(M, RowSupportMatrix) else a.sum(axis=1).mean()
    c = a - d / n
    if min(m, n) <= 400:
        return float(sla.svdvals(c, check_finite=False)[0])
    g = c @ c.T if m <= n else c.T @ c
    top = sla.eigvalsh(g, subset_by_index=[g.shape[0] - 1, g.shape[0] - 1], check_finite=False)
    return math.sqrt(max(float(top[0]), 0.0))


def restricted_norm_lower(n: int, d: int) -> float:
    """sqrt(d (n - d) / n): the norm of one centered row, a deterministic floor."""
    return math.sqrt(d * (n - d) / n)


def tall_norm_bound(n: int, m: int, d: int, beta: float = 1.0, gamma: float = 4.0, C: float = 1.0) -> float:
    """C beta sqrt(k) sqrt(min(d, n - d) + gamma log n) with k = ceil(m/n)."""
    k = math.ceil(m / n)
    return C * beta * math.sqrt(k) * math.sqrt(min(d, n - d) + gamma * math.log(n))


# -- neighbourhoods and expansion ----------------------------------------------

def in_out_neighbors(M, J) -> tuple[frozenset, frozenset]:
    """(S(J, M), S(J, M^T)) for a square matrix.

    S(J, M) are the rows whose support meets the column set J; S(J, M^T) are
    the columns hit by the rows in J.
    """
    a = _incidence(M)
    J = _index_set(J, a.shape[1])
    s_in = np.nonzero(a[:, J].any(axis=1))[0]
    s_out = np.nonzero(a[J].any(axis=0))[0] if a.shape[0] == a.shape[1] else np.array([], dtype=np.int64)
    return frozenset(s_in.tolist()), frozenset(s_out.tolist())


@dataclass
class ExpansionReport:
    k: int
    eps: float
    holds_in: bool
    holds_out: bool
    worst_J: tuple
    worst_value: int
    mode: str = "exhaustive"
    sets_checked: int = 0
    in_regime: bool = True

    def to_dict(self) -> dict:
        return {
            "k": self.k, "eps": self.eps, "holds_in": self.holds_in, "holds_out": self.holds_out,
            "worst_J": list(self.worst_J), "worst_value": self.worst_value, "mode": self.mode,
            "sets_checked": self.sets_checked, "in_regime": self.in_regime,
        }


def _set_chunks(n: int, k: int, mode: str, samples: int, rng, chunk: int = 2048):
    if mode == "exhaustive":
        it = itertools.combinations(range(n), k)
        while True:
            block = list(itertools.islice(it, chunk))
            if not block:
                return
            yield np.array(block, dtype=np.int64)
    else:
        done = 0
        while done < samples:
            b = min(chunk, samples - done)
            yield sample_rows(n, k, b, rng)
            done += b


def expansion_check(M, k: int, eps: float, mode: str = "auto", samples: int = 10_000,
                    rng: np.random.Generator | None = None, max_exhaustive: int = 10 ** 6) -> ExpansionReport:
    """Test (1-eps)kd <= |S(J,M)| <= (1+eps)kd and |S(J,M^T)| >= (1-eps)kd over |J| = k.

    In sampled mode a reported failure is a certificate; a pass only means no
    violation was observed.
    """
    a = _incidence(M).astype(bool)
    n = a.shape[1]
    if a.shape[0] != n:
        raise ValueError("expansion needs a square matrix")
    d = M.d if isinstance(M, RowSupportMatrix) else int(round(a.sum(axis=1).mean()))
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got {k}")
    if mode == "auto":
        mode = "exhaustive" if math.comb(n, k) <= max_exhaustive else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "sampled" and rng is None:
        raise ValueError("sampled mode needs an rng")

    lo, hi = (1 - eps) * k * d, (1 + eps) * k * d
    holds_in = holds_out = True
    worst_slack, worst_J, worst_value, checked = math.inf, (), 0, 0
    for block in _set_chunks(n, k, mode, samples, rng):
        s_in = a[:, block].any(axis=2).sum(axis=0)          # (B,)
        s_out = a[block].any(axis=1).sum(axis=1)            # (B,)
        checked += block.shape[0]
        holds_in &= bool(np.all((s_in >= lo - 1e-9) & (s_in <= hi + 1e-9)))
        holds_out &= bool(np.all(s_out >= lo - 1e-9))
        slack_in = np.minimum(s_in - lo, hi - s_in)
        slack_out = s_out - lo
        slack = np.minimum(slack_in, slack_out)
        i = int(np.argmin(slack))
        if slack[i] < worst_slack:
            worst_slack = float(slack[i])
            worst_J = tuple(int(j) for j in block[i])
            worst_value = int(s_in[i] if slack_in[i] <= slack_out[i] else s_out[i])
    return ExpansionReport(k=k, eps=eps, holds_in=holds_in, holds_out=holds_out, worst_J=worst_J,
                           worst_value=worst_value, mode=mode, sets_checked=checked,
                           in_regime=k <= eps * n / d)


def expected_in_neighbors(n: int, d: int, k: int) -> float:
    """E|S(J, M)| = n (1 - C(n-k, d)/C(n, d))."""
    return n * (1 - math.comb(n - k, d) / math.comb(n, d))


def i_ell_i_r(M, J_ell, J_r) -> tuple[frozenset, frozenset]:
    """Rows meeting J_ell exactly once and missing J_r, and vice versa."""
    a = _incidence(M)
    n = a.shape[1]
    Jl, Jr = _index_set(J_ell, n), _index_set(J_r, n)
    if np.intersect1d(Jl, Jr).size:
        raise ValueError("J_ell and J_r must be disjoint")
    hit_l = a[:, Jl].sum(axis=1)
    hit_r = a[:, Jr].sum(axis=1)
    I_l = np.nonzero((hit_l == 1) & (hit_r == 0))[0]
    I_r = np.nonzero((hit_r == 1) & (hit_l == 0))[0]
    return frozenset(I_l.tolist()), frozenset(I_r.tolist())


# -- discrepancy ------------------------------------------------------------------

def edge_count(M, S, T) -> int:
    a = _incidence(M)
    S, T = _index_set(S, a.shape[0]), _index_set(T, a.shape[1])
    return int(a[np.ix_(S, T)].sum())


def _dp_clause(e, s, t, n, delta, k1, k2):
    """Vectorized clause evaluation: 1, 2, or 0 for failure."""
    e = np.asarray(e, dtype=np.float64)
    ratio = e / (delta * s * t)
    big = np.maximum(s, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs2 = np.where(e > 0, e * np.log(np.where(ratio > 0, ratio, 1.0)), 0.0)
    rhs2 = k2 * big * np.log(math.e * n / big)
    return np.where(ratio <= k1, 1, np.where(lhs2 <= rhs2, 2, 0))


DP_DEFAULT_BETA = 1.0


def dp_defaults(n: int, d: int, beta: float = DP_DEFAULT_BETA) -> tuple[float, float, float]:
    """(delta, kappa1, kappa2) = (d/n, e^2, 2(4 + beta))."""
    return d / n, math.e ** 2, 2 * (4 + beta)


def discrepancy_check(M, S, T, delta: float, k1: float, k2: float) -> str:
    """``"case1"``, ``"case2"`` or ``"fail"`` for one block S x T."""
    if len(S) == 0 or len(T) == 0:
        raise ValueError("S and T must be nonempty")
    a = _incidence(M)
    e = edge_count(a, S, T)
    code = int(_dp_clause(e, len(set(S)), len(set(T)), a.shape[1], delta, k1, k2))
    return {1: "case1", 2: "case2", 0: "fail"}[code]


def _indicator(sets, size) -> np.ndarray:
    out = np.zeros((len(sets), size), dtype=np.float64)
    for i, s in enumerate(sets):
        out[i, list(s)] = 1.0
    return out


def dp_scan(M, delta: float, k1: float, k2: float, max_exhaustive_size: int = 2,
            random_pairs: int = 10_000, rng: np.random.Generator | None = None, batch: int = 1000) -> dict:
    """Scan all S, T of size <= max_exhaustive_size plus random larger pairs.

    Returns failure counts; a zero count over random pairs is "no violation
    observed", not a proof of DP.
    """
    a = _incidence(M).astype(np.float64)
    m, n = a.shape
    rows = [c for s in range(1, max_exhaustive_size + 1) for c in itertools.combinations(range(m), s)]
    cols = [c for s in range(1, max_exhaustive_size + 1) for c in itertools.combinations(range(n), s)]
    RS, CT = _indicator(rows, m), _indicator(cols, n)
    E = RS @ a @ CT.T
    codes = _dp_clause(E, RS.sum(axis=1)[:, None], CT.sum(axis=1)[None, :], n, delta, k1, k2)
    small_fail = int(np.sum(codes == 0))
    random_fail = 0
    if random_pairs and rng is not None:
        lo = max_exhaustive_size + 1
        for start in range(0, random_pairs, batch):
            b = min(batch, random_pairs - start)
            s = rng.integers(min(lo, m), m + 1, size=b)
            t = rng.integers(min(lo, n), n + 1, size=b)
            # uniform s-subset: the s smallest of m i.i.d. uniform keys
            RS = (np.argsort(np.argsort(rng.random((b, m)), axis=1), axis=1) < s[:, None]).astype(np.float64)
            CT = (np.argsort(np.argsort(rng.random((b, n)), axis=1), axis=1) < t[:, None]).astype(np.float64)
            e = np.einsum("bi,ij,bj->b", RS, a, CT)
            random_fail += int(np.sum(_dp_clause(e, s, t, n, delta, k1, k2) == 0))
    return {"exhaustive_pairs": int(E.size), "exhaustive_failures": small_fail,
            "random_pairs": int(random_pairs if rng is not None else 0), "random_failures": random_fail}


# -- intersections with a fixed set ---------------------------------------------

def hypergeom_pmf(n: int, d: int, k: int) -> list[Fraction]:
    """P(|Supp R ∩ J| = s) = C(k,s) C(n-k,d-s) / C(n,d) for s = 0..min(k,d)."""
    total = math.comb(n, d)
    return [Fraction(math.comb(k, s) * math.comb(n - k, d - s), total) for s in range(min(k, d) + 1)]


@dataclass
class IntersectionHistogram:
    sizes: np.ndarray
    counts: np.ndarray
    exact_pmf: np.ndarray = field(repr=False)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["size", "count", "exact_pmf"])
            for s, c, p in zip(self.sizes, self.counts, self.exact_pmf):
                w.writerow([int(s), int(c), repr(float(p))])


def intersection_sizes(M, J) -> np.ndarray:
    a = _incidence(M)
    J = _index_set(J, a.shape[1])
    return a[:, J].sum(axis=1)


def intersection_histogram(M: RowSupportMatrix, J) -> IntersectionHistogram:
    k = len(set(J))
    sizes = intersection_sizes(M, J)
    top = min(k, M.d)
    counts = np.bincount(sizes, minlength=top + 1)[: top + 1]
    pmf = np.array([float(p) for p in hypergeom_pmf(M.n, M.d, k)])
    return IntersectionHistogram(sizes=np.arange(top + 1), counts=counts, exact_pmf=pmf)


def heavy_column_count(M, J, A: float) -> int:
    """#{columns i : |Supp R_i(M^T) ∩ J| >= A k d / n} for a row set J of size k."""
    a = _incidence(M)
    J = _index_set(J, a.shape[0])
    m, n = a.shape
    d = M.d if isinstance(M, RowSupportMatrix) else a.sum(axis=1).mean()
    hits = a[J].sum(axis=0)
    return int(np.sum(hits >= A * J.size * d / n))


# -- negative association ---------------------------------------------------------

def na_covariance(n: int, d: int) -> Fraction:
    """Exact Cov(M_ij, M_ik), j != k, within one row: -d(n-d) / (n^2 (n-1))."""
    if n < 2 or not 0 <= d <= n:
        raise ValueError("need n >= 2 and 0 <= d <= n")
    return Fraction(d * (d - 1), n * (n - 1)) - Fraction(d * d, n * n)


def na_covariance_empirical(n: int, d: int, rows: int, rng: np.random.Generator,
                            pair: tuple[int, int] = (0, 1)) -> tuple[float, float]:
    """Sample covariance of two fixed columns over ``rows`` independent rows, with its standard error."""
    j, k = pair
    sup = sample_rows(n, d, rows, rng)
    x = (sup == j).any(axis=1).astype(np.float64)
    y = (sup == k).any(axis=1).astype(np.float64)
    mx, my = x.mean(), y.mean()
    psi = (x - mx) * (y - my)
    est = float(psi.mean())
    se = float(psi.std(ddof=1) / math.sqrt(rows))
    return est, se


# -- Bennett inequality under negative association --------------------------------

def bennett_h(u):
    """h(u) = (1 + u) log(1 + u) - u."""
    u = np.asarray(u, dtype=np.float64)
    out = (1 + u) * np.log1p(u) - u
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BennettBound:
    mu: float
    sigma2: float
    bound: float
    bernstein: float


def bennett_na_bound(Q, d: int, n: int, t: float, K: float) -> BennettBound:
    """Tail bound for f_Q(M) - mu on either side, Q an m x n matrix with entries in [0, K]."""
    Q = np.asarray(Q, dtype=np.float64)
    if K <= 0:
        raise ValueError("K must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if Q.size and (Q.min() < 0 or Q.max() > K):
        raise ValueError("Q entries must lie in [0, K]")
    if Q.ndim != 2 or Q.shape[1] != n:
        raise ValueError(f"Q must be m x {n}")
    mu = d / n * float(Q.sum())
    sigma2 = d / n * float((Q * Q).sum())
    if t == 0:
        return BennettBound(mu, sigma2, 1.0, 1.0)
    if sigma2 == 0:
        return BennettBound(mu, sigma2, 0.0, 0.0)
    bound = math.exp(-sigma2 / K ** 2 * bennett_h(K * t / sigma2))
    bern = math.exp(-3 * t * t / (6 * sigma2 + 2 * K * t))
    return BennettBound(mu, sigma2, bound, bern)


def f_Q(M: RowSupportMatrix, Q) -> float:
    """sum_ij Q_ij M_ij."""
    Q = np.asarray(Q, dtype=np.float64)
    return float(Q[np.arange(M.m)[:, None], M.supports].sum())


def f_Q_samples(Q, d: int, count: int, rng: np.random.Generator, chunk_rows: int = 40_000) -> np.ndarray:
    """f_Q over ``count`` independent matrices with rows drawn uniformly from M_{n,d}."""
    Q = np.asarray(Q, dtype=np.float64)
    m, n = Q.shape
    per = max(1, chunk_rows // m)
    out = np.empty(count)
    done = 0
    while done < count:
        b = min(per, count - done)
        sup = sample_rows(n, d, b * m, rng).reshape(b, m, d)
        out[done:done + b] = Q[np.arange(m)[None, :, None], sup].sum(axis=(1, 2))
        done += b
    return out
