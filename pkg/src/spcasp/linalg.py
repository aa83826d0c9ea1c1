"""Dense linear-algebra kernels.

Householder QR (incremental, via a persistent reflector stack, and as a
one-shot factorization), a cyclic Jacobi eigensolver for symmetric
matrices, and the power method for the dominant eigenpair.  Everything is
deterministic: the same inputs always produce bitwise-identical outputs.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch, NotSymmetric, StackFull, ZeroMatrix

# Column tails below this fraction of the column norm are treated as exact
# zeros; callers detect rank deficiency from the resulting R diagonal.
ZERO_COLUMN_RTOL = 1e-14

# Above this order the symmetric eigensolver dispatches to LAPACK; the
# from-scratch Jacobi sweep is kept for small problems and as an oracle.
JACOBI_MAX_DIM = 128


@dataclass(frozen=True)
class HouseholderReflector:
    """The orthogonal involution I - 2 v v^T.

    ``v`` is a unit vector whose first ``offset`` coordinates are zero, so
    the reflector acts only on coordinates ``offset:``.  A zero ``v``
    encodes the identity (used for numerically zero columns).
    """

    v: np.ndarray
    offset: int

    @property
    def is_identity(self):
        return self.v.size == 0

    def apply(self, x):
        """Reflect a vector or the columns of a matrix, in place-free form."""
        y = np.array(x, dtype=float)
        if self.is_identity:
            return y
        o = self.offset
        v = self.v
        if y.ndim == 1:
            y[o:] -= (2.0 * (v @ y[o:])) * v
        else:
            y[o:] -= 2.0 * np.outer(v, v @ y[o:])
        return y


class ReflectorStack:
    """Householder reflectors accumulated one annihilated column at a time.

    The k-th reflector (0-based, counting from ``start``) zeroes the
    entries of its transformed column below position ``start + k``.  The
    composite of all pushed reflectors, applied in push order, is Q^T of
    the QR factorization of the pushed column sequence.

    Parameters
    ----------
    dim : int
        Ambient dimension of the vectors the stack acts on.
    start : int
        Offset of the first reflector; nonzero when the stack continues a
        factorization whose leading rows are already triangular.
    """

    def __init__(self, dim, start=0):
        if dim <= 0:
            raise DimensionMismatch(f"stack dimension must be positive, got {dim}")
        self.dim = int(dim)
        self.start = int(start)
        self.reflectors = []

    def __len__(self):
        return len(self.reflectors)

    @property
    def next_offset(self):
        return self.start + len(self.reflectors)

    def push_column(self, col):
        """Absorb one column; returns its upper-triangular image.

        Applies the existing reflectors to ``col``, appends one new
        reflector annihilating everything below the next diagonal
        position, and returns the resulting R column.  The diagonal entry
        of the returned column is non-negative (sign convention).
        """
        col = np.asarray(col, dtype=float)
        if col.shape != (self.dim,):
            raise DimensionMismatch(
                f"column of length {col.shape} pushed onto stack of dim {self.dim}")
        if self.next_offset >= self.dim:
            raise StackFull(
                f"stack already holds {self.next_offset} reflectors "
                f"in dimension {self.dim}")
        return self._push_transformed(self.apply_q(col, adjoint=True))

    def _push_transformed(self, y):
        """Append a reflector for a column already run through the stack."""
        k = self.next_offset
        if k >= self.dim:
            raise StackFull(
                f"stack already holds {k} reflectors in dimension {self.dim}")
        tail = y[k:]
        norm_tail = float(np.linalg.norm(tail))
        r_col = y.copy()
        r_col[k + 1:] = 0.0
        # reflectors are orthogonal, so ||y|| equals the original column norm
        scale = max(float(np.linalg.norm(y)), np.finfo(float).tiny)
        if norm_tail <= ZERO_COLUMN_RTOL * scale:
            # numerically zero tail: identity reflector, zero diagonal
            self.reflectors.append(HouseholderReflector(np.empty(0), k))
            r_col[k] = 0.0
            return r_col
        lead = tail[0]
        rest_sq = float(tail[1:] @ tail[1:])
        if rest_sq == 0.0 and lead > 0.0:
            # already triangular with the right sign
            self.reflectors.append(HouseholderReflector(np.empty(0), k))
            r_col[k] = norm_tail
            return r_col
        v = tail.copy()
        # v = tail - ||tail|| e_0, with the cancellation-prone case rewritten
        v[0] = -rest_sq / (lead + norm_tail) if lead > 0.0 else lead - norm_tail
        v /= np.linalg.norm(v)
        self.reflectors.append(HouseholderReflector(v, k))
        r_col[k] = norm_tail
        return r_col

    def apply_q(self, x, adjoint=False):
        """Apply Q (or Q^T with ``adjoint=True``) to a vector or matrix.

        Q^T applies the reflectors in push order, Q in reverse order.
        Column j of Q is ``apply_q(e_j)``.
        """
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.dim:
            raise DimensionMismatch(
                f"operand of leading dimension {x.shape[0]} on stack of dim {self.dim}")
        y = x.copy()
        seq = self.reflectors if adjoint else reversed(self.reflectors)
        for h in seq:
            if h.is_identity:
                continue
            o, v = h.offset, h.v
            if y.ndim == 1:
                y[o:] -= (2.0 * (v @ y[o:])) * v
            else:
                y[o:] -= 2.0 * np.outer(v, v @ y[o:])
        return y


def qr_factor(A):
    """Householder QR of a tall matrix: A = Q R.

    Q is square orthogonal (rows x rows), R upper triangular with a
    non-negative diagonal.  Serves as the one-shot oracle for the
    incremental stack and supplies orthonormal bases elsewhere.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < A.shape[1]:
        raise DimensionMismatch(f"qr_factor expects rows >= cols, got {A.shape}")
    n, m = A.shape
    stack = ReflectorStack(n)
    R = np.zeros((n, m))
    for j in range(m):
        R[:, j] = stack.push_column(A[:, j])
    Q = stack.apply_q(np.eye(n), adjoint=False)
    return Q, R


def orthonormal_range(A, diag_tol=1e-10):
    """Orthonormal basis of the column span of A.

    Columns whose triangular diagonal would fall at or below ``diag_tol``
    (dependent columns) are skipped, so the basis width equals the
    numerical rank.
    """
    A = np.asarray(A, dtype=float)
    n, m = A.shape
    stack = ReflectorStack(n)
    for j in range(m):
        if stack.next_offset >= n:
            break
        y = stack.apply_q(A[:, j], adjoint=True)
        if np.linalg.norm(y[stack.next_offset:]) > diag_tol:
            stack.push_column(A[:, j])
    k = stack.next_offset
    if k == 0:
        return np.zeros((n, 0))
    return stack.apply_q(np.eye(n)[:, :k], adjoint=False)


@dataclass
class SymmetricEigen:
    """Full eigendecomposition of a symmetric matrix.

    Eigenvalues sorted descending; ``eigenvectors[:, j]`` matches
    ``eigenvalues[j]`` and has its largest-magnitude entry positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    converged: bool = True
    offdiag_residual: float = 0.0
    sweeps: int = 0


def _check_symmetric(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got {A.shape}")
    scale = np.linalg.norm(A)
    if scale > 0 and np.max(np.abs(A - A.T)) > 1e-10 * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-10 of its norm")
    return A, scale


def _sign_fix_columns(V):
    idx = np.argmax(np.abs(V), axis=0)
    flips = np.sign(V[idx, range(V.shape[1])])
    flips[flips == 0] = 1.0
    return V * flips


def jacobi_eigen(A, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps Givens rotations over all index pairs until the off-diagonal
    Frobenius norm falls below ``tol`` times the input norm (or the sweep
    budget runs out, in which case ``converged`` is False and the residual
    is reported).
    """
    A, scale = _check_symmetric(A)
    n = A.shape[0]
    B = A.copy()
    V = np.eye(n)
    if scale == 0.0 or n == 1:
        return SymmetricEigen(np.diag(B).copy(), V)
    # pivots below this threshold contribute < tol*scale to the residual
    skip = tol * scale / (2.0 * n)
    converged = False
    sweeps = 0
    offdiag = _offdiag_norm(B)
    for sweeps in range(1, max_sweeps + 1):
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = B[p, q]
                if abs(apq) <= skip:
                    continue
                tau = (B[q, q] - B[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                bp, bq = B[:, p].copy(), B[:, q].copy()
                B[:, p] = c * bp - s * bq
                B[:, q] = s * bp + c * bq
                bp, bq = B[p, :].copy(), B[q, :].copy()
                B[p, :] = c * bp - s * bq
                B[q, :] = s * bp + c * bq
                B[p, q] = B[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        offdiag = _offdiag_norm(B)
        if offdiag <= tol * scale:
            converged = True
            break
    order = np.argsort(np.diag(B))[::-1]
    values = np.diag(B)[order].copy()
    vectors = _sign_fix_columns(V[:, order])
    return SymmetricEigen(values, vectors, converged, float(offdiag), sweeps)


def _offdiag_norm(B):
    d = np.diag(B)
    return float(np.sqrt(max(np.linalg.norm(B) ** 2 - d @ d, 0.0)))


def symmetric_eigen(A):
    """Symmetric eigendecomposition with the package's conventions.

    Uses the from-scratch Jacobi sweep up to ``JACOBI_MAX_DIM`` and LAPACK
    beyond it (same descending order and column sign convention), keeping
    large sketches fast without changing any contract.
    """
    A, _ = _check_symmetric(A)
    if A.shape[0] <= JACOBI_MAX_DIM:
        return jacobi_eigen(A)
    values, vectors = np.linalg.eigh(A)
    order = np.argsort(values)[::-1]
    return SymmetricEigen(values[order].copy(), _sign_fix_columns(vectors[:, order]))


@dataclass
class PowerResult:
    """Dominant eigenpair estimate from power iteration."""

    vector: np.ndarray
    value: float
    iterations: int
    converged: bool
    rayleigh_history: list = field(default_factory=list)


# fixed fallback seed for the last-resort random restart of the power method
_RESTART_SEED = 0x5BCA


def power_iteration(matvec, dim, tol=1e-10, max_iter=5000):
    """Power method on an abstract symmetric PSD operator.

    Starts from the normalized all-ones vector; if the operator kills that
    start it falls back to e_1, then to a fixed seeded random direction.
    Stops when successive iterates differ by at most ``tol`` in norm.
    """
    starts = [np.full(dim, 1.0 / np.sqrt(dim))]

    def _e1():
        e = np.zeros(dim)
        e[0] = 1.0
        return e

    def _rand():
        g = np.random.Generator(np.random.PCG64(_RESTART_SEED))
        v = g.standard_normal(dim)
        return v / np.linalg.norm(v)

    starts += [_e1(), _rand()]
    v = None
    for cand in starts:
        if np.linalg.norm(matvec(cand)) > 0.0:
            v = cand
            break
    if v is None:
        raise ZeroMatrix("operator annihilates every probe direction")
    fallbacks = iter([_e1(), _rand()])
    history = []
    iterations = 0
    converged = False
    value = 0.0
    for iterations in range(1, max_iter + 1):
        w = matvec(v)
        value = float(v @ w)
        history.append(value)
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            # iterate fell into the kernel; restart from the next fallback
            v = next(fallbacks, None)
            if v is None:
                break
            continue
        w /= norm_w
        if np.linalg.norm(w - v) <= tol:
            v = w
            converged = True
            break
        v = w
    w = matvec(v)
    value = float(v @ w)
    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        v = -v
    return PowerResult(v, value, iterations, converged, history)


def power_method(C, tol=1e-10, max_iter=5000):
    """Dominant eigenpair of a dense symmetric PSD matrix."""
    C, _ = _check_symmetric(C)
    return power_iteration(lambda x: C @ x, C.shape[0], tol=tol, max_iter=max_iter)
