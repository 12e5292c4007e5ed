"""Reference limit laws on the complex plane and distances from an empirical spectrum.

Two-dimensional uniformity is judged by a pair of one-dimensional
Kolmogorov-Smirnov statistics: the radial one against the reference
measure's radial CDF and the angular one against the uniform law on
[-pi, pi).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .model import RowSupportMatrix, normalization_scale, shift


@dataclass(frozen=True)
class ReferenceMeasure:
    kind: str = "circular"
    d: int | None = None

    def __post_init__(self):
        if self.kind not in ("circular", "oriented_km"):
            raise ValueError(f"unknown reference measure {self.kind!r}")
        if self.kind == "oriented_km" and (self.d is None or self.d < 2):
            raise ValueError("oriented Kesten-McKay law needs an integer d >= 2")

    @property
    def radius(self) -> float:
        return 1.0 if self.kind == "circular" else math.sqrt(self.d)

    def density(self, z):
        """Lebesgue density on C."""
        r2 = np.abs(np.asarray(z)) ** 2
        if self.kind == "circular":
            return np.where(r2 <= 1.0, 1.0 / math.pi, 0.0)
        d = self.d
        with np.errstate(divide="ignore"):
            val = d * d * (d - 1) / (math.pi * (d * d - r2) ** 2)
        return np.where(r2 <= d, val, 0.0)


CIRCULAR = ReferenceMeasure("circular")


def radial_cdf(measure: ReferenceMeasure, r):
    """P(|Z| <= r) under the reference measure."""
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    if measure.kind == "circular":
        out = np.minimum(r * r, 1.0)
    else:
        d = measure.d
        rr = np.minimum(r * r, d)
        out = np.where(r * r >= d, 1.0, (d - 1) * rr / (d * d - rr))
    return out if out.ndim else float(out)


def _ks_sorted(sample: np.ndarray, cdf_values: np.ndarray) -> float:
    # sup |F_n - F| is attained at a sample point or its left limit
    n = sample.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf_values), np.max(cdf_values - (i - 1) / n)))


def ks_radial(eigs, measure: ReferenceMeasure = CIRCULAR) -> float:
    eigs = np.asarray(eigs)
    if eigs.size == 0:
        raise ValueError("empty eigenvalue list")
    r = np.sort(np.abs(eigs.ravel()))
    return _ks_sorted(r, np.asarray(radial_cdf(measure, r)))


def angular_ks(eigs, zero_tol: float = 1e-9) -> float:
    """KS distance of arg(lambda) (for |lambda| > zero_tol) from uniform on [-pi, pi)."""
    eigs = np.asarray(eigs).ravel()
    eigs = eigs[np.abs(eigs) > zero_tol]
    if eigs.size == 0:
        raise ValueError("all eigenvalues are at the origin")
    theta = np.angle(eigs)
    theta = np.where(theta >= math.pi, -math.pi, theta)
    theta = np.sort(theta)
    return _ks_sorted(theta, (theta + math.pi) / (2 * math.pi))


def disk_coverage(eigs, tol: float = 0.0) -> float:
    """Fraction of eigenvalues with modulus at most 1 + tol."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    eigs = np.asarray(eigs).ravel()
    if eigs.size == 0:
        return 1.0
    return float(np.mean(np.abs(eigs) <= 1.0 + tol))


def metric_report(eigs, measure: ReferenceMeasure = CIRCULAR, tol: float = 0.1) -> dict:
    return {
        "ks_radial": ks_radial(eigs, measure),
        "ks_angular": angular_ks(eigs),
        "coverage": {"tol": tol, "frac": disk_coverage(eigs, tol)},
    }


def metric_report_json(eigs, measure: ReferenceMeasure = CIRCULAR, tol: float = 0.1) -> str:
    return json.dumps(metric_report(eigs, measure, tol))


def _normalized_logabsdet(a, scale: float, z: complex) -> float:
    sign, logdet = np.linalg.slogdet(shift(np.asarray(a) * scale, z))
    if sign == 0 or not np.isfinite(logdet):
        return -math.inf
    return float(logdet)


def replacement_gap(M, B, z: complex, d: int | None = None) -> float:
    """(1/n) log|det(M~ - zI)| - (1/n) log|det(B~ - zI)| on normalized matrices.

    Both matrices are scaled by 1/sqrt(d(1 - d/n)).  ``math.inf`` marks a
    singular factor.
    """
    if isinstance(M, RowSupportMatrix):
        d = M.d if d is None else d
        M = M.to_dense()
    if isinstance(B, RowSupportMatrix):
        d = B.d if d is None else d
        B = B.to_dense()
    M, B = np.asarray(M), np.asarray(B)
    if M.shape != B.shape or M.shape[0] != M.shape[1]:
        raise ValueError(f"dimension mismatch: {M.shape} vs {B.shape}")
    if d is None:
        raise ValueError("d is required when both inputs are dense")
    n = M.shape[0]
    scale = normalization_scale(n, d)
    lm = _normalized_logabsdet(M, scale, z)
    lb = _normalized_logabsdet(B, scale, z)
    if math.isinf(lm) or math.isinf(lb):
        return math.inf
    return (lm - lb) / n
