"""Matrix primitives shared by every other module.

Dense matrices are numpy arrays (column-major where we allocate them),
sparse matrices are ``scipy.sparse.csr_matrix`` with sorted, duplicate-free
column indices.
"""
import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .rng import SeededRng, as_rng

# cap on a single dense allocation (entries); guards against size overflow
MAX_DENSE_ENTRIES = 1 << 34


class ConvergenceError(RuntimeError):
    """An iterative method stopped before meeting its tolerance."""

    def __init__(self, msg, last=None, residual=None):
        super().__init__(msg)
        self.last = last
        self.residual = residual


class CapacityError(MemoryError):
    pass


def check_finite(X, name="X"):
    data = X.data if sp.issparse(X) else np.asarray(X)
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{name} contains non-finite entries")


def as_csr(X) -> sp.csr_matrix:
    """Coerce to canonical CSR (sorted indices, no duplicates, float64)."""
    A = sp.csr_matrix(X, dtype=np.float64, copy=True)
    A.sum_duplicates()
    A.sort_indices()
    return A


def as_dense(X) -> np.ndarray:
    if sp.issparse(X):
        return np.asfortranarray(X.toarray())
    return np.asarray(X, dtype=np.float64)


def orthonormal_basis(X, tol=None) -> np.ndarray:
    """Orthonormal basis for range(X) via column-pivoted Householder QR.

    The numerical rank is the number of |R_ii| above ``tol`` (default
    ``1e-10 * ||X||_F``).  An all-zero input gives an ``n x 0`` result.
    """
    X = as_dense(X)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("X must be a nonempty 2-D matrix")
    check_finite(X)
    fro = np.linalg.norm(X)
    if tol is None:
        tol = 1e-10 * fro
    elif tol <= 0:
        raise ValueError("tol must be positive")
    if fro == 0.0:
        return np.zeros((X.shape[0], 0), order="F")
    Q, R, _ = la.qr(X, mode="economic", pivoting=True)
    r = int(np.count_nonzero(np.abs(np.diag(R)) > tol))
    return np.asfortranarray(Q[:, :r])


def spectral_norm(A, max_iters=10000, tol=1e-10, seed=0) -> float:
    """Largest singular value by power iteration on A^T A.

    Stops once the Rayleigh residual ``||A^T A v - mu v||`` drops below
    ``tol * mu``; the start vector is drawn from ``SeededRng(seed)``.
    """
    A = as_dense(A) if not sp.issparse(A) else A
    if A.shape[0] == 0 or A.shape[1] == 0:
        raise ValueError("A must be nonempty")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    v = SeededRng(seed).normal(A.shape[1])
    v /= np.linalg.norm(v)
    mu = 0.0
    res = np.inf
    for _ in range(max_iters):
        Av = A @ v
        w = A.T @ Av
        mu = float(Av @ Av)
        if mu == 0.0:
            # v is in the null space; only possible for A = 0 with a generic start
            if not np.any(A.data if sp.issparse(A) else A):
                return 0.0
            v = SeededRng(seed + 1).normal(A.shape[1])
            v /= np.linalg.norm(v)
            continue
        res = float(np.linalg.norm(w - mu * v))
        if res <= tol * mu:
            return float(np.sqrt(mu))
        v = w / np.linalg.norm(w)
    raise ConvergenceError(
        f"power iteration did not converge in {max_iters} iterations "
        f"(residual {res:.3e})", last=v, residual=res)


def gaussian_matrix(rows, cols, rng) -> np.ndarray:
    """rows x cols matrix of i.i.d. N(0,1); draws fill column-major order."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    if rows * cols > MAX_DENSE_ENTRIES:
        raise CapacityError(f"{rows}x{cols} exceeds the dense size limit")
    rng = as_rng(rng)
    return rng.normal(rows * cols).reshape((rows, cols), order="F")


def spmm(A, B) -> np.ndarray:
    """Sparse (CSR) times dense.

    Each output row accumulates the row's nonzeros in ascending column order.
    """
    A = A if sp.isspmatrix_csr(A) and A.has_sorted_indices else as_csr(A)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"inner dimensions differ: {A.shape} x {B.shape}")
    return np.asfortranarray(A @ B)


def gemm(A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"inner dimensions differ: {A.shape} x {B.shape}")
    return np.asfortranarray(A @ B)
