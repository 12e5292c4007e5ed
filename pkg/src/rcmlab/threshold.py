"""Monte Carlo sweeps in d around the log n threshold: zero columns and singularity."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import RowSupportMatrix, sample_rows
from .rng import trial_rng
from .spectral import singular_values


@dataclass(frozen=True)
class ThresholdSweep:
    n: int
    d_values: tuple
    trials: int
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "d_values", tuple(int(d) for d in self.d_values))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for d in self.d_values:
            if not 1 <= d <= self.n:
                raise ValueError(f"d={d} outside [1, n]")

    def in_regime(self, d: int) -> bool:
        return d <= self.n / 2


def zero_columns(sup: np.ndarray, n: int) -> int:
    return int(n - np.count_nonzero(np.bincount(sup.ravel(), minlength=n)))


def _sample(sweep: ThresholdSweep, d: int, t: int) -> np.ndarray:
    return sample_rows(sweep.n, d, sweep.n, trial_rng(sweep.master_seed, d, t))


def formula_EX(n: int, d: int) -> float:
    return n * (1 - d / n) ** n


def EX2_upper(n: int, d: int) -> float:
    q = formula_EX(n, d)
    return q + (n - 1) / n * q * q


def paley_zygmund_bound(EX, EX2, lam=0):
    """(1 - lam)^2 (E X)^2 / E X^2, a lower bound on P(X > lam E X)."""
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    if EX2 <= 0:
        raise ValueError("E X^2 must be positive")
    if isinstance(EX, Fraction) or isinstance(EX2, Fraction):
        return (1 - Fraction(lam)) ** 2 * Fraction(EX) ** 2 / Fraction(EX2)
    return (1 - lam) ** 2 * EX * EX / EX2


@dataclass
class ZeroColumnPoint:
    d: int
    trials: int
    freq: float
    mean_X: float
    formula_EX: float
    se_freq: float
    se_mean: float
    pz_lower: float
    X: np.ndarray = field(repr=False)


def zero_column_frequency(sweep: ThresholdSweep) -> list[ZeroColumnPoint]:
    out = []
    for d in sweep.d_values:
        X = np.array([zero_columns(_sample(sweep, d, t), sweep.n) for t in range(sweep.trials)], dtype=np.float64)
        freq = float(np.mean(X >= 1))
        q = formula_EX(sweep.n, d)
        pz = paley_zygmund_bound(q, EX2_upper(sweep.n, d), 0) if q > 0 else 0.0
        se_mean = float(X.std(ddof=1) / math.sqrt(X.size)) if X.size > 1 else math.inf
        out.append(ZeroColumnPoint(d=d, trials=sweep.trials, freq=freq, mean_X=float(X.mean()), formula_EX=q,
                                   se_freq=math.sqrt(freq * (1 - freq) / sweep.trials), se_mean=se_mean,
                                   pz_lower=pz, X=X))
    return out


@dataclass
class SingularityPoint:
    d: int
    trials: int
    threshold: float
    freq: float
    s_min: np.ndarray = field(repr=False)
    hits: list = field(default_factory=list)


def singularity_frequency(sweep: ThresholdSweep, s_threshold: float | None = None) -> list[SingularityPoint]:
    """Per d, the fraction of trials with s_min(M) <= threshold (default n^-9).

    Each hit records its trial index and support array for inspection.
    """
    thr = sweep.n ** -9.0 if s_threshold is None else s_threshold
    out = []
    for d in sweep.d_values:
        smins, hits = [], []
        for t in range(sweep.trials):
            sup = _sample(sweep, d, t)
            s = float(singular_values(RowSupportMatrix(n=sweep.n, d=d, supports=sup).to_dense())[-1])
            smins.append(s)
            if s <= thr:
                hits.append((t, sup))
        smins = np.array(smins)
        out.append(SingularityPoint(d=d, trials=sweep.trials, threshold=thr,
                                    freq=float(np.mean(smins <= thr)), s_min=smins, hits=hits))
    return out


def poisson_zero_column_estimate(mean_X: float) -> float:
    """1 - exp(-mean_X): Poisson approximation to P(X >= 1)."""
    return 1.0 - math.exp(-mean_X)


def write_sweep_csv(zero: list[ZeroColumnPoint], sing: list[SingularityPoint], path) -> None:
    by_d = {p.d: p for p in sing}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "trials", "freq_zero_col", "mean_X", "formula_EX", "freq_singular"])
        for z in zero:
            s = by_d.get(z.d)
            w.writerow([z.d, z.trials, repr(z.freq), repr(z.mean_X), repr(z.formula_EX),
                        repr(s.freq) if s else ""])
