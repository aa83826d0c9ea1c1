"""Dataset generators and ingestion.

A ``DataSource`` wraps either a centered raw data matrix X (samples by
variables) or a symmetric PSD covariance/correlation matrix together with
a pseudo-data square-root factor F satisfying F^T F = A, so every
algorithm can work through matrix-vector products against a factor and
never needs the dense d x d Gram when the data are wide.
"""

import csv
import hashlib
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .exceptions import AssetCorrupt, ParseError, RaggedRows
from .linalg import symmetric_eigen

RAW = "raw"
COVARIANCE = "covariance"

PITPROPS_SHA256 = "7b61bf481549734b73aa1ca0e89ca52f6e94cadfa9847b7ab2bdec9d28fa9881"

# three-factor synthetic model: latent variances and the mixing of the
# third factor from the first two
_H1_VAR = 290.0
_H2_VAR = 300.0
_H3_W1 = -0.3
_H3_W2 = 0.925
_NOISE_VAR = 1.0
_BLOCKS = (slice(0, 4), slice(4, 8), slice(8, 10))


@dataclass
class DataSource:
    """Either raw centered data or a covariance matrix with a factor.

    ``factor`` always satisfies factor^T factor = A (the covariance): it
    is X itself in raw mode and the transposed square root in covariance
    mode.
    """

    kind: str
    matrix: np.ndarray
    pseudo_factor: np.ndarray = None
    label: str = ""

    @classmethod
    def from_raw(cls, X, center=True, label="raw"):
        X = np.array(X, dtype=float)
        if X.ndim != 2:
            raise ValueError(f"raw data must be 2-D, got shape {X.shape}")
        if center:
            X = X - X.mean(axis=0)
        return cls(RAW, X, label=label)

    @classmethod
    def from_covariance(cls, A, label="covariance"):
        A = np.array(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"covariance must be square, got shape {A.shape}")
        scale = np.linalg.norm(A)
        if scale > 0 and np.max(np.abs(A - A.T)) > 1e-10 * scale:
            raise ValueError("covariance matrix is not symmetric")
        eig = symmetric_eigen(A)
        clipped = np.clip(eig.eigenvalues, 0.0, None)
        # pseudo-data: rows are sqrt(eigenvalue)-scaled eigenvectors, so
        # F^T F reproduces A exactly (up to the PSD clip)
        factor = (np.sqrt(clipped)[:, None] * eig.eigenvectors.T)
        if np.linalg.norm(factor.T @ factor - A) > 1e-8 * max(scale, 1e-300):
            raise ValueError("covariance is not PSD within tolerance")
        return cls(COVARIANCE, A, pseudo_factor=factor, label=label)

    @property
    def n_features(self):
        return self.matrix.shape[1]

    @property
    def n_samples(self):
        """Row count of the sampleable factor (actual samples in raw mode)."""
        return self.factor.shape[0]

    @property
    def factor(self):
        return self.matrix if self.kind == RAW else self.pseudo_factor

    def gram_product(self, v):
        """Covariance-vector (or matrix) product A @ v through the factor."""
        F = self.factor
        return F.T @ (F @ v)

    def total_variance(self):
        return float(np.linalg.norm(self.factor) ** 2)

    def covariance(self):
        """Dense covariance; only sensible for small feature counts."""
        if self.kind == COVARIANCE:
            return self.matrix
        return self.matrix.T @ self.matrix


def _rng(seed):
    # PCG64 pinned for cross-platform reproducibility of every sample
    return np.random.Generator(np.random.PCG64(seed))


def synthetic_covariance():
    """Population covariance of the three-factor synthetic model."""
    h3_var = _H3_W1 ** 2 * _H1_VAR + _H3_W2 ** 2 * _H2_VAR + _NOISE_VAR
    A = np.zeros((10, 10))
    b1, b2, b3 = _BLOCKS
    A[b1, b1] = _H1_VAR
    A[b2, b2] = _H2_VAR
    A[b3, b3] = h3_var
    A[b1, b3] = A[b3, b1] = _H3_W1 * _H1_VAR
    A[b2, b3] = A[b3, b2] = _H3_W2 * _H2_VAR
    np.fill_diagonal(A, A.diagonal() + _NOISE_VAR)
    return A


def synthetic_source(n=0, seed=0):
    """Three-factor synthetic data: two independent blocks plus a mixed one.

    ``n > 0`` samples that many observations of the ten variables and
    centers them (raw mode).  ``n = 0`` returns the analytic population
    covariance (covariance mode), which makes downstream runs fully
    deterministic.
    """
    if n == 0:
        return DataSource.from_covariance(synthetic_covariance(), label="synthetic")
    g = _rng(seed)
    h1 = g.normal(0.0, np.sqrt(_H1_VAR), size=n)
    h2 = g.normal(0.0, np.sqrt(_H2_VAR), size=n)
    h3 = _H3_W1 * h1 + _H3_W2 * h2 + g.normal(0.0, 1.0, size=n)
    X = np.empty((n, 10))
    X[:, _BLOCKS[0]] = h1[:, None] + g.normal(0.0, 1.0, size=(n, 4))
    X[:, _BLOCKS[1]] = h2[:, None] + g.normal(0.0, 1.0, size=(n, 4))
    X[:, _BLOCKS[2]] = h3[:, None] + g.normal(0.0, 1.0, size=(n, 2))
    return DataSource.from_raw(X, label=f"synthetic:n={n}")


def pitprops_source():
    """The classical 13-variable pitprops correlation matrix."""
    blob = resources.files("spcasp").joinpath("data/pitprops.txt").read_bytes()
    if hashlib.sha256(blob).hexdigest() != PITPROPS_SHA256:
        raise AssetCorrupt("pitprops.txt failed its checksum")
    A = np.array([[float(x) for x in line.split()]
                  for line in blob.decode().strip().splitlines()])
    return DataSource.from_covariance(A, label="pitprops")


def gaussian_source(n, d, seed=0):
    """Seeded standard-normal data, columns centered."""
    if n < 1 or d < 1:
        raise ValueError(f"need n, d >= 1, got {n}, {d}")
    X = _rng(seed).standard_normal((n, d))
    return DataSource.from_raw(X, label=f"random:n={n},d={d}")


def load_csv(path, has_header=False):
    """Rectangular numeric CSV -> centered raw source; rows are samples."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for i, row in enumerate(reader):
            if i == 0 and has_header:
                continue
            if not row:
                continue
            parsed = []
            for j, cell in enumerate(row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"non-numeric cell at row {i + 1}, column {j + 1}: {cell!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ParseError(f"no data rows in {path}")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRows(
                f"row {i + 1} has {len(row)} cells, expected {width}")
    return DataSource.from_raw(np.array(rows), label=str(path))
