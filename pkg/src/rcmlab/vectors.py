"""Vector classes used to split the sphere for smallest-singular-value bounds.

Covers the nonincreasing modulus rearrangement, the parameter cascade
(eps0, ell0, n1, n2, n3, r, norm constants), almost-constant vectors,
steep-vector classification, the d-weighted triple norm and the rate
functions theta, omega, alpha.

Order statistics are 1-based throughout to match ``x*_k`` notation:
``xstar(k)`` is the k-th largest modulus.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

DEFAULT_CONSTANTS = {"a1": 0.009, "a2": 0.0003, "a3": 0.00001}
#: desk-scale exploration constants; they violate a3 <= a2/30 <= a1/900
RELAXED_CONSTANTS = {"a1": 0.1, "a2": 0.01, "a3": 0.001}


@dataclass(frozen=True, eq=False)
class VectorProfile:
    x: np.ndarray
    xstar: np.ndarray
    sigma: np.ndarray

    def star(self, k: int) -> float:
        """x*_k with 1-based k."""
        if not 1 <= k <= self.xstar.size:
            raise IndexError(f"order statistic index {k} outside [1, {self.xstar.size}]")
        return float(self.xstar[k - 1])


def rearrangement(x) -> VectorProfile:
    """Moduli sorted nonincreasing; ties keep the smaller original index first."""
    x = np.asarray(x, dtype=np.complex128).ravel()
    if x.size == 0:
        raise ValueError("empty vector")
    mod = np.abs(x)
    sigma = np.argsort(-mod, kind="stable")
    return VectorProfile(x=x, xstar=mod[sigma], sigma=sigma)


@dataclass(frozen=True)
class ClassParams:
    n: int
    d: int
    a1: float
    a2: float
    a3: float
    eps0: float
    ell0: int
    n1: int
    n2: int
    n3: int
    r: int | None
    delta: float
    rho: float
    BT2: float
    BT3: float
    BT: float
    relaxed: bool = False

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "ClassParams":
        return cls(**json.loads(text))


def _le(a: float, b: float) -> bool:
    return a <= b * (1 + 1e-12)


def norm_constants(n: int, d: int, n1: int, r: int | None) -> tuple[float, float, float]:
    """(B(T2), B(T3), B_T) for the two branches n1 > 1 and n1 = 1."""
    if n1 <= 1:
        return math.sqrt(n), math.sqrt(2 * n), math.sqrt(2 * n)
    logq = math.log(n) ** 0.25
    top = (6 * d) ** (r + 1)
    return (top * d ** 0.25 / (26 * logq), top * d / (26 * logq), (6 * d) ** (r + 2) / (36 * logq))


def rho_upper(n: int, d: int, BT: float) -> float:
    """Intersection of the two admissible rho ranges."""
    return min(math.sqrt(n) / (BT * d ** 0.75), math.sqrt(n) / (5 * BT))


def class_params(n: int, d: int, a1: float | None = None, a2: float | None = None,
                 a3: float | None = None, delta: float = 0.01, rho: float | None = None,
                 relaxed: bool = False, check_regime: bool = True) -> ClassParams:
    """Evaluate the parameter cascade for (n, d).

    ``relaxed`` lifts the a3 <= a2/30 <= a1/900 chain (and selects the
    relaxed constants when none are given); ``check_regime=False`` lifts
    the 2 <= d <= n/2 requirement for pure formula evaluation.
    """
    base = RELAXED_CONSTANTS if relaxed else DEFAULT_CONSTANTS
    a1 = base["a1"] if a1 is None else a1
    a2 = base["a2"] if a2 is None else a2
    a3 = base["a3"] if a3 is None else a3
    if min(a1, a2, a3) <= 0:
        raise ValueError("constants a1, a2, a3 must be positive")
    if not relaxed and not (_le(a3, a2 / 30) and _le(a2 / 30, a1 / 900)):
        raise ValueError(f"constants violate a3 <= a2/30 <= a1/900: {a1}, {a2}, {a3}")
    if n < 3:
        raise ValueError("need n >= 3 (log n must exceed 1)")
    if check_regime and not 2 <= d <= n / 2:
        raise ValueError(f"need 2 <= d <= n/2, got d={d}, n={n}")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")

    eps0 = math.sqrt(48 * math.log(n) / d)
    ell0 = math.floor(1 / (100 * eps0))
    n1 = math.ceil(a1 * eps0 * n / d)
    n2 = math.floor(a2 * n / d ** 0.75)
    n3 = math.floor(a3 * n)
    r = None
    if n1 > 1:
        if ell0 < 2:
            raise ValueError(f"n1={n1} > 1 but ell0={ell0} < 2: the ell0-adic ladder is undefined")
        r = 0
        while ell0 ** (r + 1) < n1:
            r += 1
    BT2, BT3, BT = norm_constants(n, d, n1, r)
    if rho is None:
        rho = min(0.5, rho_upper(n, d, BT))
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    return ClassParams(n=n, d=d, a1=a1, a2=a2, a3=a3, eps0=eps0, ell0=ell0, n1=n1, n2=n2, n3=n3,
                       r=r, delta=delta, rho=rho, BT2=BT2, BT3=BT3, BT=BT, relaxed=relaxed)


def _coverage_counts(x: np.ndarray, centers: np.ndarray, radius: float, chunk: int = 256) -> np.ndarray:
    counts = np.empty(centers.size, dtype=np.int64)
    for s in range(0, centers.size, chunk):
        c = centers[s:s + chunk]
        counts[s:s + chunk] = np.sum(np.abs(x[None, :] - c[:, None]) <= radius, axis=1)
    return counts


def is_almost_constant(x, delta: float, rho: float) -> tuple[bool, complex | None]:
    """Coordinate-centered test for membership in Cons(delta, rho).

    Candidate centers are the coordinates of ``x`` and 0.  ``True`` comes
    with a witness and is a genuine membership certificate.  ``False`` only
    certifies that ``x`` is not in Cons(delta, rho/2): any disk of radius
    rho/2 holding the required points has one of them as a center of a
    radius-rho disk holding them all.
    """
    x = np.asarray(x, dtype=np.complex128).ravel()
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise ValueError("zero vector")
    n = x.size
    radius = rho * nrm / math.sqrt(n)
    centers = np.append(x, 0.0)
    counts = _coverage_counts(x, centers, radius)
    best = int(np.argmax(counts))
    if counts[best] > (1 - delta) * n:
        return True, complex(centers[best])
    return False, None


def max_disk_cover(x, radius: float) -> int:
    """Largest number of coordinates inside one closed disk of the given radius.

    Exact (cubic) reference: an optimal disk can be moved until it is
    centered on a point or has two points on its boundary.
    """
    x = np.asarray(x, dtype=np.complex128).ravel()
    tol = radius * 1e-12 + 1e-300
    best = int(_coverage_counts(x, x, radius + tol).max())
    i, j = np.triu_indices(x.size, 1)
    gap = np.abs(x[i] - x[j])
    keep = (gap > 0) & (gap <= 2 * radius)
    i, j, gap = i[keep], j[keep], gap[keep]
    if i.size == 0:
        return best
    mid = (x[i] + x[j]) / 2
    h = np.sqrt(np.maximum(radius ** 2 - (gap / 2) ** 2, 0.0))
    perp = 1j * (x[j] - x[i]) / gap
    centers = np.concatenate([mid + h * perp, mid - h * perp])
    return max(best, int(_coverage_counts(x, centers, radius + tol).max()))


def is_almost_constant_exact(x, delta: float, rho: float) -> bool:
    """Exact membership in Cons(delta, rho); intended for n <= 500."""
    x = np.asarray(x, dtype=np.complex128).ravel()
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise ValueError("zero vector")
    n = x.size
    return max_disk_cover(x, rho * nrm / math.sqrt(n)) > (1 - delta) * n


def _check_indices(params: ClassParams, n: int):
    if params.n != n:
        raise ValueError(f"vector length {n} does not match params.n={params.n}")
    for name in ("n1", "n2", "n3"):
        k = getattr(params, name)
        if not 1 <= k <= n:
            raise ValueError(f"{name}={k} is not a valid order-statistic index for n={n}")


def classify_steep(x, params: ClassParams) -> str:
    """First matching class among T1_0..T1_r, T2, T3; ``"none"`` otherwise."""
    prof = x if isinstance(x, VectorProfile) else rearrangement(x)
    _check_indices(params, prof.xstar.size)
    s = prof.star
    d, ell0, n1 = params.d, params.ell0, params.n1
    if n1 > 1:
        r = params.r
        if s(1) > 6 * d * s(min(ell0, n1)):
            return "T1_0"
        for i in range(1, r):
            if s(ell0 ** i) > 6 * d * s(ell0 ** (i + 1)):
                return f"T1_{i}"
        if r >= 1 and s(ell0 ** r) > 6 * d * s(n1):
            return f"T1_{r}"
    if s(n1) > d ** 0.75 * s(params.n2):
        return "T2"
    if s(params.n2) > 4 * s(params.n3):
        return "T3"
    return "none"


def triple_norm(x, d: float) -> float:
    """sqrt(||P_{e-perp} x||^2 + d ||P_e x||^2) with e the unit all-ones direction."""
    x = np.asarray(x, dtype=np.complex128).ravel()
    along = abs(x.sum()) ** 2 / x.size
    total = float(np.vdot(x, x).real)
    return math.sqrt(max(total - along, 0.0) + d * along)


def t1_norm_factor(n: int, d: int, j: int) -> float:
    return max(d ** 0.25 * (6 * d) ** j / (15 * math.log(n) ** 0.25), math.sqrt(2 * n))


def class_norm_bound_check(x, label: str, params: ClassParams) -> tuple[float, float, bool]:
    """(||x||_2, class bound, holds) for a vector of the given class.

    ``label`` is a :func:`classify_steep` output; ``"none"`` stands for the
    complement of the steep classes.
    """
    prof = x if isinstance(x, VectorProfile) else rearrangement(x)
    _check_indices(params, prof.xstar.size)
    lhs = float(np.linalg.norm(prof.x))
    if label == "T2":
        rhs = params.BT2 * prof.star(params.n1)
    elif label == "T3":
        rhs = params.BT3 * prof.star(params.n2)
    elif label in ("none", "Tc"):
        rhs = params.BT * prof.star(params.n3)
    elif label.startswith("T1_"):
        j = int(label[3:])
        if params.n1 <= 1 or params.r is None or not 0 <= j <= params.r:
            raise ValueError(f"label {label} impossible for these params")
        rhs = t1_norm_factor(params.n, params.d, j) * prof.star(params.ell0 ** j)
    else:
        raise ValueError(f"unknown class label {label!r}")
    return lhs, rhs, lhs <= rhs * (1 + 1e-12)


def alpha_exponent(n: float, d: float, C2: float = 1.0) -> float:
    """2 log(6d) / log(d / (C2 log n))."""
    arg = d / (C2 * math.log(n))
    if arg <= 1:
        raise ValueError(f"d/(C2 log n) = {arg} must exceed 1")
    return 2 * math.log(6 * d) / math.log(arg)


def alpha_lower_bound(n: float, d: float, alpha: float) -> float:
    """d^(3 alpha - 5.5) / (n^(2 alpha) (log n)^(alpha - 1/2)), evaluated in log space."""
    ln = math.log(n)
    return math.exp((3 * alpha - 5.5) * math.log(d) - 2 * alpha * ln - (alpha - 0.5) * math.log(ln))


def rate_functions(n: float, d: float, params: ClassParams | None = None,
                   C2: float = 1.0, c1: float = 1.0) -> dict:
    """theta, omega, alpha, beta = 2 alpha and the alpha(n, d) singular value floor.

    Without ``params`` (or with n1 = 1) the steep classes reduce to T2, T3 and
    theta = c1 (log n / d)^(1/4); omega is then ``None`` since T1 is empty.
    """
    ln = math.log(n)
    if params is not None and params.n1 > 1:
        r, ell0 = params.r, params.ell0
        first = math.sqrt(d) / (4 * math.sqrt(n))
        second = 5 * ell0 ** (r / 2) * (d * ln) ** 0.25 / (6 * d) ** r
        third = 54 * ln ** 0.25 * math.sqrt(n) / (6 * d) ** (r + 2)
        theta = min(first, second, third)
        omega = min(first, second)
    else:
        theta = c1 * (ln / d) ** 0.25
        omega = None
    alpha = alpha_exponent(n, d, C2)
    return {
        "theta": theta,
        "omega": omega,
        "alpha": alpha,
        "beta": 2 * alpha,
        "alpha_lower_bound": alpha_lower_bound(n, d, alpha),
    }
