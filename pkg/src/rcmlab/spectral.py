"""Dense spectra, singular values and the row-distance identities.

Eigenvalues and singular values are delegated to LAPACK through scipy
(``geev`` with balancing/Hessenberg/shifted QR, and ``gesdd``).  LAPACK
convergence failures surface as :class:`NumericalBackendError`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .model import RowSupportMatrix, shift

#: relative threshold (times s_1) below which a singular value counts as zero
SINGULAR_RTOL = 1e-12
#: relative rank threshold (times the largest column norm) for span bases
RANK_RTOL = 1e-10


class NumericalBackendError(RuntimeError):
    """The dense linear-algebra backend failed to converge."""


def _dense(a) -> np.ndarray:
    if isinstance(a, RowSupportMatrix):
        return a.to_dense()
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def eigenvalues(a) -> np.ndarray:
    """All n eigenvalues (with multiplicity) of a square matrix, unordered."""
    a = _dense(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"eigenvalues need a square matrix, got {a.shape}")
    # real input goes through the real driver so the spectrum comes back exactly conjugate-symmetric
    if np.iscomplexobj(a) and not np.any(a.imag):
        a = a.real
    try:
        w = sla.eigvals(a, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalBackendError(f"eigenvalue iteration failed: {exc}") from exc
    return np.asarray(w, dtype=np.complex128)


def singular_values(a) -> np.ndarray:
    """min(rows, cols) singular values in nonincreasing order."""
    a = _dense(a)
    try:
        s = sla.svdvals(a, check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        try:
            s = sla.svd(a, compute_uv=False, lapack_driver="gesvd", check_finite=False)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericalBackendError(f"SVD failed: {exc}") from exc
    return np.sort(np.asarray(s, dtype=np.float64))[::-1]


def smallest_singular_value(a, z: complex = 0.0) -> float:
    return float(singular_values(shift(a, z))[-1])


def is_numerically_singular(svals, rtol: float = SINGULAR_RTOL) -> bool:
    svals = np.asarray(svals)
    return bool(svals[-1] <= rtol * svals[0]) if svals[0] > 0 else True


def log_potential(a, z: complex = 0.0) -> float:
    """-(1/n) sum log s_i(A - zI); ``math.inf`` when A - zI is singular."""
    s = singular_values(shift(a, z))
    if s[-1] == 0.0 or is_numerically_singular(s):
        return math.inf
    return float(-np.sum(np.log(s)) / s.size)


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    eigenvalues: np.ndarray
    singular_values: np.ndarray
    s_min: float
    n: int

    def to_json(self) -> str:
        return json.dumps({
            "eigs": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "svals": [float(s) for s in self.singular_values],
            "smin": float(self.s_min),
        })

    @classmethod
    def from_json(cls, text: str) -> "SpectralSummary":
        obj = json.loads(text)
        eigs = np.array([complex(re, im) for re, im in obj["eigs"]], dtype=np.complex128)
        svals = np.array(obj["svals"], dtype=np.float64)
        return cls(eigenvalues=eigs, singular_values=svals, s_min=float(obj["smin"]), n=eigs.size)


def summarize(a, z: complex = 0.0) -> SpectralSummary:
    """Spectrum of ``a`` and singular values of ``a - zI``."""
    a = _dense(a)
    s = singular_values(shift(a, z))
    return SpectralSummary(eigenvalues=eigenvalues(a), singular_values=s, s_min=float(s[-1]), n=a.shape[0])


def span_basis(rows, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of ``rows``.

    Householder QR with column pivoting; columns whose |R_kk| falls below
    ``rtol`` times the largest input norm are treated as dependent.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.complex128))
    if rows.size == 0:
        return np.zeros((rows.shape[-1], 0), dtype=np.complex128)
    cols = rows.T
    scale = np.max(np.linalg.norm(cols, axis=0))
    if scale == 0:
        return np.zeros((cols.shape[0], 0), dtype=np.complex128)
    q, r, _ = sla.qr(cols, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > rtol * scale))
    return q[:, :rank]


def dist_to_span(v, rows, rtol: float = RANK_RTOL) -> float:
    """Euclidean distance from ``v`` to the linear span of ``rows``."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    rows = np.atleast_2d(np.asarray(rows, dtype=np.complex128))
    if rows.size and rows.shape[1] != v.size:
        raise ValueError(f"dimension mismatch: vector {v.size}, rows {rows.shape[1]}")
    q = span_basis(rows, rtol)
    resid = v - q @ (q.conj().T @ v)
    # one re-projection pass guards against loss of orthogonality
    resid = resid - q @ (q.conj().T @ resid)
    return float(np.linalg.norm(resid))


def row_distances(a, method: str = "qr") -> np.ndarray:
    """dist(R_k, H_k) for every row, H_k the span of the other rows.

    ``method="qr"`` projects each row separately (O(n^4) total).
    ``method="inverse"`` uses dist(R_k, H_k) = 1/||A^{-1} e_k|| and is only
    valid for square nonsingular A; singular input falls back to "qr".
    """
    a = np.asarray(_dense(a), dtype=np.complex128)
    if method == "inverse" and a.shape[0] == a.shape[1]:
        s = singular_values(a)
        if not is_numerically_singular(s, 1e-10):
            inv = sla.inv(a, check_finite=False)
            return 1.0 / np.linalg.norm(inv, axis=0)
    elif method not in ("qr", "inverse"):
        raise ValueError(f"unknown method {method!r}")
    return np.array([dist_to_span(a[k], np.delete(a, k, axis=0)) for k in range(a.shape[0])])


def negative_second_moment_check(a) -> tuple[float, float]:
    """(sum s_i^-2, sum dist(R_i, W_i)^-2) for a full-row-rank k x n matrix."""
    a = np.asarray(_dense(a), dtype=np.complex128)
    s = singular_values(a)
    if s.size < a.shape[0] or is_numerically_singular(s, 1e-10):
        raise ValueError("negative second moment identity needs full row rank")
    dists = row_distances(a)
    if np.any(dists == 0):
        raise ValueError("rank-deficient input: a row lies in the span of the others")
    return float(np.sum(s ** -2.0)), float(np.sum(dists ** -2.0))


def cauchy_interlacing_check(a, m: int, rtol: float = 1e-9) -> tuple[bool, float]:
    """Check s_{i+m}(A) <= s_i(A') <= s_i(A) where A' drops the last m rows.

    Returns (holds, largest violation); tolerance is ``rtol * s_1(A)``.
    """
    a = _dense(a)
    n = a.shape[0]
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    s = singular_values(a)
    # pad A' singular values with zeros so indices line up with s
    sp = np.zeros(n)
    sub = singular_values(a[: n - m])
    sp[: sub.size] = sub
    k = n - m
    upper = sp[:k] - s[:k]
    lower = s[m:m + k] - sp[:k]
    worst = float(max(upper.max(), lower.max(), 0.0))
    return worst <= rtol * s[0], worst
