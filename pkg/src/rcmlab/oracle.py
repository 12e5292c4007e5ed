"""Exhaustive enumeration of M_{n,d} for tiny n: exact probabilities as fractions.

Nothing here touches floating point.  Determinants use Bareiss fraction-free
elimination over Python integers.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class EnumerationBudget:
    max_states: int = 10 ** 7

    def check(self, n: int, d: int) -> int:
        states = math.comb(n, d) ** n
        if states > self.max_states:
            raise BudgetExceeded(f"C({n},{d})^{n} = {states} exceeds budget {self.max_states}")
        return states


DEFAULT_BUDGET = EnumerationBudget()


def enumerate_matrices(n: int, d: int, budget: EnumerationBudget = DEFAULT_BUDGET):
    """Every member of M_{n,d} once, as a tuple of 0-based row supports, in lexicographic order."""
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    budget.check(n, d)
    return itertools.product(itertools.combinations(range(n), d), repeat=n)


def dense_rows(supports, n: int) -> list[list[int]]:
    rows = []
    for sup in supports:
        row = [0] * n
        for j in sup:
            row[j] = 1
        rows.append(row)
    return rows


def bareiss_det(a) -> int:
    """Exact determinant of a square integer matrix."""
    m = [list(map(int, row)) for row in a]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("square matrix required")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def _zero_columns(supports, n: int) -> int:
    used = set()
    for sup in supports:
        used.update(sup)
    return n - len(used)


def exact_singularity_probability(n: int, d: int, budget: EnumerationBudget = DEFAULT_BUDGET) -> Fraction:
    total = budget.check(n, d)
    singular = sum(1 for sups in enumerate_matrices(n, d, budget) if bareiss_det(dense_rows(sups, n)) == 0)
    return Fraction(singular, total)


def zero_column_mean(n: int, d: int) -> Fraction:
    """E X = n (1 - d/n)^n for the number X of zero columns."""
    return n * Fraction(n - d, n) ** n


def zero_column_pair_probability(n: int, d: int) -> Fraction:
    """P(two given columns are both zero) = ((n-d)(n-d-1) / (n(n-1)))^n."""
    return Fraction((n - d) * (n - d - 1), n * (n - 1)) ** n


def zero_column_second_moment_upper(n: int, d: int) -> Fraction:
    """q + ((n-1)/n) q^2 with q = E X."""
    q = zero_column_mean(n, d)
    return q + Fraction(n - 1, n) * q * q


def exact_zero_column_moments(n: int, d: int, budget: EnumerationBudget = DEFAULT_BUDGET) -> tuple[Fraction, Fraction]:
    """(E X, E X^2) by enumeration."""
    dist = zero_column_distribution(n, d, budget)
    ex = sum(x * p for x, p in dist.items())
    ex2 = sum(x * x * p for x, p in dist.items())
    return Fraction(ex), Fraction(ex2)


def zero_column_distribution(n: int, d: int, budget: EnumerationBudget = DEFAULT_BUDGET) -> dict[int, Fraction]:
    total = budget.check(n, d)
    counts = Counter(_zero_columns(s, n) for s in enumerate_matrices(n, d, budget))
    return {x: Fraction(c, total) for x, c in sorted(counts.items())}


@dataclass(frozen=True)
class EventProbabilities:
    P_zero_col: Fraction
    P_dup_rows: Fraction
    P_dup_cols: Fraction
    P_singular: Fraction
    containment_ok: bool

    def to_json(self) -> str:
        return json.dumps({
            "P_zero_col": str(self.P_zero_col), "P_dup_rows": str(self.P_dup_rows),
            "P_dup_cols": str(self.P_dup_cols), "P_singular": str(self.P_singular),
            "containment_ok": self.containment_ok,
        })


def exact_event_probabilities(n: int, d: int, budget: EnumerationBudget = DEFAULT_BUDGET) -> EventProbabilities:
    """Exact probabilities of a zero column, two equal rows, two equal columns, singularity."""
    total = budget.check(n, d)
    zc = dr = dc = sing = 0
    contained = True
    for sups in enumerate_matrices(n, d, budget):
        rows = dense_rows(sups, n)
        cols = list(zip(*rows))
        z = _zero_columns(sups, n) > 0
        r = len(set(sups)) < n
        c = len(set(cols)) < n
        s = bareiss_det(rows) == 0
        zc, dr, dc, sing = zc + z, dr + r, dc + c, sing + s
        if (z or r or c) and not s:
            contained = False
    return EventProbabilities(Fraction(zc, total), Fraction(dr, total), Fraction(dc, total),
                              Fraction(sing, total), contained)


def expansion_hit_probability(n: int, d: int, k: int) -> Fraction:
    """q = 1 - C(n-k, d)/C(n, d): probability that a row meets a fixed k-set."""
    return 1 - Fraction(math.comb(n - k, d), math.comb(n, d))


def exact_expansion_distribution(n: int, d: int, k: int) -> list[Fraction]:
    """pmf of |S(J, M)| for |J| = k: Binomial(n, q)."""
    q = expansion_hit_probability(n, d, k)
    return [math.comb(n, s) * q ** s * (1 - q) ** (n - s) for s in range(n + 1)]


def enumerated_expansion_distribution(n: int, d: int, J, budget: EnumerationBudget = DEFAULT_BUDGET) -> list[Fraction]:
    total = budget.check(n, d)
    J = set(J)
    counts = Counter(sum(1 for sup in sups if J.intersection(sup)) for sups in enumerate_matrices(n, d, budget))
    return [Fraction(counts.get(s, 0), total) for s in range(n + 1)]


def fraction_json(values: dict) -> str:
    """Serialize exact results as fraction strings, never floats."""
    def conv(v):
        if isinstance(v, Fraction):
            return str(v)
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        if isinstance(v, dict):
            return {k: conv(x) for k, x in v.items()}
        return v
    return json.dumps(conv(values))
