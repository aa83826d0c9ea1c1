"""Truncation operators that zero small loading entries.

Three rules: drop a fixed count of smallest-magnitude entries, drop an
ascending prefix holding at most a given energy fraction, or drop every
entry below a magnitude threshold.  Truncation never renormalizes; the
caller decides what to do with the shortened vector.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import AllEntriesTruncated, ZeroVector

BY_SPARSITY = "sparsity"
BY_ENERGY = "energy"
HARD_THRESHOLD = "threshold"


@dataclass(frozen=True)
class TruncationRule:
    """Tagged choice of truncation operator.

    kind:
      * ``sparsity``  -- zero exactly ``value`` smallest-|z| entries
        (``value = 0`` disables truncation);
      * ``energy``    -- zero the longest ascending-|z| prefix whose
        energy is at most ``value * ||z||^2`` (0 < value < 1);
      * ``threshold`` -- zero every entry with |z_i| strictly below
        ``value`` (value > 0).
    """

    kind: str
    value: float

    @classmethod
    def by_sparsity(cls, count):
        return cls(BY_SPARSITY, int(count))

    @classmethod
    def by_energy(cls, fraction):
        return cls(BY_ENERGY, float(fraction))

    @classmethod
    def hard_threshold(cls, threshold):
        return cls(HARD_THRESHOLD, float(threshold))

    def validate(self, dim):
        if self.kind == BY_SPARSITY:
            k = self.value
            if k != int(k) or not 0 <= int(k) < dim:
                raise ValueError(
                    f"sparsity count must be an integer in [0, {dim}), got {k!r}")
        elif self.kind == BY_ENERGY:
            if not 0.0 < self.value < 1.0:
                raise ValueError(f"energy fraction must lie in (0, 1), got {self.value!r}")
        elif self.kind == HARD_THRESHOLD:
            if not self.value > 0.0:
                raise ValueError(f"threshold must be positive, got {self.value!r}")
        else:
            raise ValueError(f"unknown truncation kind {self.kind!r}")

    def describe(self):
        return f"{self.kind}:{self.value:g}"


def truncate(z, rule):
    """Apply a truncation rule; returns a new vector, entries zeroed.

    Ties on |z_i| are broken toward zeroing the smaller index first, so
    results are deterministic.  Raises AllEntriesTruncated when a hard
    threshold removes everything.
    """
    z = np.asarray(z, dtype=float)
    d = z.size
    rule.validate(d)
    out = z.copy()
    if rule.kind == BY_SPARSITY:
        k = int(rule.value)
        if k == 0:
            return out
        order = np.argsort(np.abs(z), kind="stable")
        out[order[:k]] = 0.0
        return out
    if rule.kind == BY_ENERGY:
        order = np.argsort(np.abs(z), kind="stable")
        energies = z[order] ** 2
        budget = rule.value * float(z @ z)
        # largest prefix of the ascending sort with cumulative energy <= budget;
        # the total always exceeds the budget, so at least one entry survives
        i_star = int(np.searchsorted(np.cumsum(energies), budget, side="right"))
        out[order[:i_star]] = 0.0
        return out
    mask = np.abs(z) < rule.value
    if mask.all():
        raise AllEntriesTruncated(
            f"threshold {rule.value:g} removed all {d} entries")
    out[mask] = 0.0
    return out


def sparsity(z):
    """Fraction of exactly-zero entries: 1 - ||z||_0 / d."""
    z = np.asarray(z)
    return 1.0 - np.count_nonzero(z) / z.size


def orthogonality_measure(a, b):
    """1 - |cos angle(a, b)|: one for orthogonal vectors, zero for parallel."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("orthogonality is undefined for a zero vector")
    return 1.0 - min(abs(float(a @ b)) / (na * nb), 1.0)
