"""Initial subspace construction.

Randomized mode samples rows of the data (or pseudo-data) factor with
probability proportional to their squared norm, rescales them so the
sketch Gram is an unbiased estimate of the covariance, and converts the
sketch's eigenpairs into an orthonormal d x m basis.  Exact mode derives
the same basis from a full eigendecomposition instead.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import RankDeficient, Unreachable, ZeroMatrix
from .linalg import orthonormal_range, symmetric_eigen

RANDOMIZED = "randomized"
EXACT_SVD = "exact-svd"

# eigenvalues at or below this fraction of the largest count as zero rank
RANK_RTOL = 1e-12


@dataclass(frozen=True)
class SketchConfig:
    """Sample count ``c``, subspace dimension ``m``, seed and mode."""

    c: int
    m: int
    seed: int = 0
    mode: str = RANDOMIZED

    def validate(self, n_samples, n_features):
        if self.mode not in (RANDOMIZED, EXACT_SVD):
            raise ValueError(f"unknown sketch mode {self.mode!r}")
        bound = min(n_samples, n_features)
        if self.mode == RANDOMIZED:
            if not 1 <= self.m <= self.c <= bound:
                raise ValueError(
                    f"need 1 <= m <= c <= min(n, d) = {bound}, "
                    f"got m={self.m}, c={self.c}")
        elif not 1 <= self.m <= bound:
            raise ValueError(
                f"need 1 <= m <= min(n, d) = {bound}, got m={self.m}")


@dataclass
class Projection:
    """Orthonormal d x m subspace basis plus a note on how it was built."""

    basis: np.ndarray
    origin: str

    @property
    def width(self):
        return self.basis.shape[1]


def row_probabilities(X):
    """Squared-row-norm sampling distribution over the rows of X."""
    X = np.asarray(X, dtype=float)
    norms = np.einsum("ij,ij->i", X, X)
    total = norms.sum()
    if total == 0.0:
        raise ZeroMatrix("cannot sample rows of a zero matrix")
    return norms / total


def sample_sketch(X, cfg):
    """Draw ``cfg.c`` rescaled rows of X with replacement.

    Row t is ``x_i / sqrt(c p_i)`` for the drawn index i, which makes
    E[sketch^T sketch] equal X^T X.  Sampling is inverse-CDF over the
    cumulative probabilities with a PCG64 stream seeded by ``cfg.seed``,
    so a seed pins the sketch bit for bit.
    """
    X = np.asarray(X, dtype=float)
    p = row_probabilities(X)
    gen = np.random.Generator(np.random.PCG64(cfg.seed))
    u = gen.random(cfg.c)
    idx = np.searchsorted(np.cumsum(p), u, side="right")
    idx = np.minimum(idx, X.shape[0] - 1)  # guard the u ~ 1.0 edge
    return X[idx] / np.sqrt(cfg.c * p[idx])[:, None]


def _usable_pairs(gram, need):
    """Eigenpairs of a small Gram matrix above the rank cutoff."""
    eig = symmetric_eigen(gram)
    lam_max = max(float(eig.eigenvalues[0]), 0.0)
    usable = int(np.sum(eig.eigenvalues > RANK_RTOL * max(lam_max, np.finfo(float).tiny)))
    if usable < need:
        raise RankDeficient(
            f"sketch spans {usable} directions, need {need}; "
            "reduce m or raise c")
    return eig


def _right_directions(F, gram_eig, count):
    """Top right singular directions from left eigenpairs of F F^T."""
    sigmas = np.sqrt(gram_eig.eigenvalues[:count])
    return (F.T @ gram_eig.eigenvectors[:, :count]) / sigmas


def initial_projection(source, cfg):
    """Build the starting subspace for the deflation loop.

    Randomized mode goes through the row sketch; exact mode through the
    full eigendecomposition of the thinner Gram matrix.  Columns are
    re-orthonormalized before returning, so the Projection invariant
    holds even when trailing singular values are small.
    """
    F = source.factor
    n, d = F.shape
    cfg.validate(n, d)
    if cfg.mode == RANDOMIZED:
        Xc = sample_sketch(F, cfg)
        eig = _usable_pairs(Xc @ Xc.T, cfg.m)
        P = _right_directions(Xc, eig, cfg.m)
        origin = f"sketch(c={cfg.c}, m={cfg.m}, seed={cfg.seed})"
    else:
        if n <= d:
            eig = _usable_pairs(F @ F.T, cfg.m)
            P = _right_directions(F, eig, cfg.m)
        else:
            eig = _usable_pairs(F.T @ F, cfg.m)
            P = eig.eigenvectors[:, :cfg.m]
        origin = f"exact-svd(m={cfg.m})"
    basis = orthonormal_range(P)
    if basis.shape[1] < cfg.m:
        raise RankDeficient(
            f"projection collapsed to {basis.shape[1]} columns, need {cfg.m}")
    return Projection(basis, origin)


def select_dimension(source, cpev_target, cfg):
    """Smallest subspace dimension whose trace ratio clears the target.

    Eigen-directions are added one at a time; each direction p adds
    ||F p||^2 of explained variance.  Raises Unreachable when even the
    largest admissible dimension stays below the target.
    """
    if not 0.0 < cpev_target < 1.0:
        raise ValueError(f"target must lie in (0, 1), got {cpev_target}")
    F = source.factor
    n, d = F.shape
    limit = cfg.c if cfg.mode == RANDOMIZED else min(n, d)
    probe = SketchConfig(cfg.c, 1, cfg.seed, cfg.mode)
    probe.validate(n, d)
    if cfg.mode == RANDOMIZED:
        Xc = sample_sketch(F, probe)
        eig = _usable_pairs(Xc @ Xc.T, 1)
        lam_max = eig.eigenvalues[0]
        usable = int(np.sum(eig.eigenvalues > RANK_RTOL * lam_max))
        P_all = _right_directions(Xc, eig, min(limit, usable))
    else:
        if n <= d:
            eig = _usable_pairs(F @ F.T, 1)
            lam_max = eig.eigenvalues[0]
            usable = int(np.sum(eig.eigenvalues > RANK_RTOL * lam_max))
            P_all = _right_directions(F, eig, min(limit, usable))
        else:
            eig = _usable_pairs(F.T @ F, 1)
            lam_max = eig.eigenvalues[0]
            usable = int(np.sum(eig.eigenvalues > RANK_RTOL * lam_max))
            P_all = eig.eigenvectors[:, :min(limit, usable)]
    total = source.total_variance()
    explained = 0.0
    for m in range(1, P_all.shape[1] + 1):
        explained += float(np.linalg.norm(F @ P_all[:, m - 1]) ** 2)
        if explained / total > cpev_target:
            return m
    raise Unreachable(
        f"target {cpev_target} unreachable with c={cfg.c} in mode {cfg.mode}; "
        "raise c or switch modes")
