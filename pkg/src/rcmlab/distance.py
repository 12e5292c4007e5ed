"""Distances from random 0/1 vectors to fixed subspaces.

r = dist(delta + u, V) for a Bernoulli(p) or fixed-sum random vector delta;
D(p) = sqrt(p(1-p)(n-k) + dist(u + p 1, V)^2) brackets E r from both sides
and equals sqrt(E r^2) in the Bernoulli case.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import RowSupportMatrix, sample_rows, shift
from .spectral import row_distances, span_basis
from .vectors import is_almost_constant_exact


def random_frame(n: int, k: int, rng: np.random.Generator, contain_ones: bool = False) -> np.ndarray:
    """k orthonormal rows spanning a random k-dimensional complex subspace.

    With ``contain_ones`` the first row is the unit all-ones vector and the
    remaining k - 1 directions are random; then dist(u + p 1, V) = dist(u, V).
    """
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    if contain_ones:
        g[:, 0] = 1.0
    q, _ = np.linalg.qr(g)
    return q.T.copy()


def rows_frame(rows) -> np.ndarray:
    """Orthonormal rows spanning the span of ``rows``."""
    return span_basis(rows).T.copy()


@dataclass(frozen=True, eq=False)
class DistanceExperiment:
    n: int
    p: float
    V: np.ndarray = field(repr=False)
    u: np.ndarray | None = field(default=None, repr=False)
    trials: int = 1000

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.V, dtype=np.complex128))
        if V.shape[1] != self.n:
            raise ValueError(f"basis rows must have length n={self.n}")
        if not np.allclose(V @ V.conj().T, np.eye(V.shape[0]), atol=1e-10, rtol=0):
            raise ValueError("basis rows are not orthonormal within 1e-10")
        if not 1 <= V.shape[0] < self.n:
            raise ValueError("need 1 <= k < n")
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        u = np.zeros(self.n, dtype=np.complex128) if self.u is None else np.asarray(self.u, dtype=np.complex128)
        if u.shape != (self.n,):
            raise ValueError("shift u must have length n")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "u", u)

    @property
    def k(self) -> int:
        return self.V.shape[0]

    @property
    def in_regime(self) -> bool:
        return self.p * (1 - self.p) * (self.n - self.k) >= 1

    def project_perp(self, w: np.ndarray) -> np.ndarray:
        """Rows of ``w`` projected onto the orthogonal complement of V."""
        w = np.asarray(w, dtype=np.complex128)
        return w - (w @ self.V.conj().T) @ self.V

    def d_uprime(self) -> float:
        return float(np.linalg.norm(self.project_perp(self.u + self.p)))

    def D(self) -> float:
        return D_p(self.p, self.n, self.k, self.d_uprime())


def D_p(p: float, n: int, k: int, d_uprime: float) -> float:
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    if d_uprime < 0:
        raise ValueError("d_uprime must be nonnegative")
    return math.sqrt(p * (1 - p) * (n - k) + d_uprime ** 2)


def sample_deltas(n: int, count: int, rng: np.random.Generator, model: str = "bernoulli",
                  p: float | None = None, d: int | None = None) -> np.ndarray:
    if model == "bernoulli":
        return (rng.random((count, n)) < p).astype(np.float64)
    if model == "fixed_sum":
        out = np.zeros((count, n))
        out[np.arange(count)[:, None], sample_rows(n, d, count, rng)] = 1.0
        return out
    raise ValueError(f"unknown model {model!r}")


def distance_samples(exp: DistanceExperiment, rng: np.random.Generator, model: str = "bernoulli",
                     d: int | None = None, trials: int | None = None, batch: int = 500) -> np.ndarray:
    """``trials`` independent draws of r = dist(delta + u, V).

    The fixed-sum model draws delta uniformly with exactly d ones; the
    experiment's p should then be d/n.
    """
    trials = exp.trials if trials is None else trials
    if model == "fixed_sum" and d is None:
        raise ValueError("fixed_sum model needs d")
    out = np.empty(trials)
    for s in range(0, trials, batch):
        b = min(batch, trials - s)
        w = sample_deltas(exp.n, b, rng, model, exp.p, d) + exp.u
        out[s:s + b] = np.linalg.norm(exp.project_perp(w), axis=1)
    return out


def distance_trial(exp: DistanceExperiment, rng: np.random.Generator, model: str = "bernoulli",
                   d: int | None = None) -> float:
    return float(distance_samples(exp, rng, model, d, trials=1)[0])


def distance_decomposition(exp: DistanceExperiment, delta) -> tuple[float, float]:
    """(r^2, ||Px||^2 + 2 Re<Px, Pu'> + ||Pu'||^2) with x = delta - p 1, u' = u + p 1."""
    delta = np.asarray(delta, dtype=np.float64)
    r2 = float(np.linalg.norm(exp.project_perp(delta + exp.u)) ** 2)
    px = exp.project_perp(delta - exp.p)
    pu = exp.project_perp(exp.u + exp.p)
    rhs = float(np.vdot(px, px).real + 2 * np.vdot(pu, px).real + np.vdot(pu, pu).real)
    return r2, rhs


def tail_frequencies(r, t_grid) -> np.ndarray:
    """Fraction of samples with |r - mean(r)| >= t for each t."""
    r = np.asarray(r, dtype=np.float64)
    dev = np.abs(r - r.mean())
    return np.array([float(np.mean(dev >= t)) for t in t_grid])


def distance_tail_profile(exp: DistanceExperiment, rng: np.random.Generator, t_grid,
                          model: str = "bernoulli", d: int | None = None) -> np.ndarray:
    if exp.trials < 100:
        raise ValueError("tail profile needs at least 100 trials")
    return tail_frequencies(distance_samples(exp, rng, model, d), t_grid)


def write_distance_csv(r, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "r", "r_squared"])
        for i, v in enumerate(np.asarray(r, dtype=np.float64)):
            w.writerow([i, repr(float(v)), repr(float(v * v))])


def conditioning_ratio(n: int, d: int) -> tuple[float, float]:
    """(C(n,d) (d/n)^d (1-d/n)^(n-d), (1/4) sqrt(1/(pi d))).

    The first value is P(Binomial(n, d/n) = d), evaluated exactly in
    rationals before rounding.
    """
    if not 1 <= d <= n / 2:
        raise ValueError(f"need 1 <= d <= n/2, got d={d}, n={n}")
    exact = Fraction(math.comb(n, d) * d ** d * (n - d) ** (n - d), n ** n)
    return float(exact), 0.25 * math.sqrt(1 / (math.pi * d))


@dataclass
class InvertibilityReport:
    distances: np.ndarray = field(repr=False)
    s_min: float
    min_distance: float
    relation_holds: bool
    left_vector: np.ndarray = field(repr=False)


def invertibility_via_distance_check(A, method: str = "qr") -> InvertibilityReport:
    """All row distances dist(R_k, H_k), s_min(A), and s_min <= min_k dist(R_k, H_k)."""
    if isinstance(A, RowSupportMatrix):
        A = A.to_dense()
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("square matrix required")
    u, s, _ = np.linalg.svd(A)
    dists = row_distances(A, method=method)
    smin, dmin = float(s[-1]), float(dists.min())
    return InvertibilityReport(distances=dists, s_min=smin, min_distance=dmin,
                               relation_holds=smin <= dmin * (1 + 1e-9) + 1e-12, left_vector=u[:, -1])


def invertibility_via_distance_mc(n: int, d: int, trials: int, rng: np.random.Generator,
                                  z: complex = 0.0, delta: float = 0.5, rho: float = 0.5,
                                  eps: float | None = None, eps_quantile: float = 0.1) -> dict:
    """Monte Carlo comparison of both sides of invertibility via distance.

    Left side: frequency of {s_min(A) <= eps rho / sqrt(n) and the minimizing
    left singular vector is not in Cons(delta, rho)} (exact disk-cover test),
    a sub-event of the infimum event.  Right side: (1/(delta n)) times the
    mean number of rows with dist(R_k, H_k) <= eps.  When ``eps`` is None it
    is set to the ``eps_quantile`` quantile of all pooled distances.
    """
    smins, lefts, dists = [], [], []
    for _ in range(trials):
        sup = sample_rows(n, d, n, rng)
        A = shift(RowSupportMatrix(n=n, d=d, supports=sup), z)
        rep = invertibility_via_distance_check(A, method="inverse")
        smins.append(rep.s_min)
        lefts.append(rep.left_vector)
        dists.append(rep.distances)
    dists = np.array(dists)
    if eps is None:
        eps = float(np.quantile(dists, eps_quantile))
    thr = eps * rho / math.sqrt(n)
    lhs_ind = np.array([
        s <= thr and not is_almost_constant_exact(v, delta, rho) for s, v in zip(smins, lefts)
    ], dtype=np.float64)
    rhs_terms = np.sum(dists <= eps, axis=1) / (delta * n)
    diff = lhs_ind - rhs_terms
    return {
        "eps": eps, "threshold": thr, "lhs": float(lhs_ind.mean()), "rhs": float(rhs_terms.mean()),
        "diff_mean": float(diff.mean()), "diff_se": float(diff.std(ddof=1) / math.sqrt(trials)),
        "relation_violations": int(sum(s > dm.min() * (1 + 1e-9) + 1e-12 for s, dm in zip(smins, dists))),
    }
