"""Quality criteria for a fitted loading matrix.

Explained variance is measured on an orthonormal basis of the loadings'
span, so overlapping loadings never double-count variance; orthogonality
summarizes the off-diagonal mass of the loadings' Gram matrix; the
pattern records per-loading support sizes.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import UndefinedForSingleLoading
from .linalg import orthonormal_range

RANK_DROP_TOL = 1e-10


@dataclass
class QualityReport:
    cpev: float
    orthogonality: float
    nz: int
    sp: float
    pattern: list = field(default_factory=list)
    elapsed_seconds: float = None


def cpev(source, Z):
    """Cumulative proportion of explained variance of span(Z).

    Orthonormalizes Z (dropping dependent columns) and returns
    trace(W^T A W) / trace(A), evaluated through the data factor so the
    dense covariance is never formed.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if Z.shape[0] == 1:
        Z = Z.T
    W = orthonormal_range(Z, diag_tol=RANK_DROP_TOL)
    if W.shape[1] == 0:
        return 0.0
    F = source.factor
    return float(np.linalg.norm(F @ W) ** 2) / source.total_variance()


def total_orthogonality(Z):
    """1 minus the average absolute off-diagonal of Z^T Z.

    Equals 1 exactly when the Gram matrix is diagonal and 0 when all
    loadings coincide; reported unclamped.
    """
    Z = np.asarray(Z, dtype=float)
    r = Z.shape[1]
    if r < 2:
        raise UndefinedForSingleLoading("need at least two loadings")
    G = Z.T @ Z
    off = float(np.abs(G).sum() - np.trace(np.abs(G)))
    return 1.0 - off / (r * (r - 1))


def loading_pattern(Z):
    """(total nonzeros, total sparsity, per-loading nonzero counts)."""
    Z = np.asarray(Z)
    pattern = [int(c) for c in np.count_nonzero(Z, axis=0)]
    nz = int(sum(pattern))
    d, r = Z.shape
    return nz, 1.0 - nz / (r * d), pattern


def evaluate(source, Z, elapsed_seconds=None):
    """Assemble the full quality report for a loading matrix."""
    nz, sp, pattern = loading_pattern(Z)
    try:
        orth = total_orthogonality(Z)
    except UndefinedForSingleLoading:
        orth = None
    return QualityReport(
        cpev=cpev(source, Z),
        orthogonality=orth,
        nz=nz,
        sp=sp,
        pattern=pattern,
        elapsed_seconds=elapsed_seconds,
    )
