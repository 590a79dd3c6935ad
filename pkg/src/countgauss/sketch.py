"""CountSketch, CountGauss, and subsampled randomized Hadamard transforms.

A CountSketch ``S`` (B x n) is stored as one bucket index and one sign per
input coordinate; it is applied in O(nnz) and only materialized on request.
The CountGauss transform ``T = G S`` is applied in two stages,
``G @ (S @ X)``, and never formed explicitly.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .linalg import as_csr, gaussian_matrix
from .rng import SeededRng, as_rng

DEFAULT_BUCKET_FACTOR = 5


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CountSketchMap:
    buckets: int
    input_dim: int
    hash: np.ndarray = field(repr=False)
    sign: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        h = _frozen(self.hash, np.int64)
        s = _frozen(self.sign, np.int64)
        if self.buckets < 1 or self.input_dim < 1:
            raise ValueError("buckets and input_dim must be >= 1")
        if h.shape != (self.input_dim,) or s.shape != (self.input_dim,):
            raise ValueError("need exactly one (hash, sign) pair per input coordinate")
        if h.min() < 0 or h.max() >= self.buckets:
            raise ValueError("hash values must lie in [0, buckets)")
        if not np.all(np.abs(s) == 1):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "hash", h)
        object.__setattr__(self, "sign", s)

    @property
    def shape(self):
        return (self.buckets, self.input_dim)

    def to_sparse(self) -> sp.csr_matrix:
        n = self.input_dim
        return sp.csr_matrix(
            (self.sign.astype(np.float64), (self.hash, np.arange(n))),
            shape=self.shape)

    def materialize(self) -> np.ndarray:
        S = np.zeros(self.shape, order="F")
        S[self.hash, np.arange(self.input_dim)] = self.sign
        return S


def countsketch_new(B, n, rng, injective=False) -> CountSketchMap:
    """Draw a B x n CountSketch.

    Buckets are one 64-bit draw per column reduced modulo B; signs come from
    the top bit of a second, independent block of draws.  With
    ``injective=True`` (requires B >= n) the buckets are the first n entries
    of a random permutation of range(B), so S^T S = I.
    """
    if B < 1 or n < 1:
        raise ValueError("B and n must be >= 1")
    rng = as_rng(rng)
    seed = rng.seed
    if injective:
        if B < n:
            raise ValueError("injective CountSketch needs B >= n")
        h = rng.permutation(B)[:n]
    else:
        h = rng.integers(B, n)
    s = rng.signs(n)
    return CountSketchMap(int(B), int(n), h, s, seed)


def countsketch_from_hash(hash, sign, B) -> CountSketchMap:
    hash = np.asarray(hash)
    return CountSketchMap(int(B), len(hash), hash, sign, 0)


# entries of X processed per block; keeps the temporaries inside L2 so the
# per-entry cost does not depend on nnz(X)
APPLY_BLOCK = 1 << 15


def _row_blocks(indptr, block):
    n = len(indptr) - 1
    lo = 0
    while lo < n:
        hi = int(np.searchsorted(indptr, indptr[lo] + block, side="right")) - 1
        hi = min(max(hi, lo + 1), n)
        yield lo, hi
        lo = hi


def countsketch_apply(S: CountSketchMap, X) -> np.ndarray:
    """S @ X for dense or sparse X (n x d), returning a dense B x d matrix.

    Work is one multiply-add per stored entry of X, done in row blocks of
    about APPLY_BLOCK entries.  The summation order for each output entry is
    fixed by (X's sparsity pattern, APPLY_BLOCK), so results are reproducible.
    """
    if not sp.issparse(X) and np.ndim(X) == 1:
        return countsketch_apply(S, np.asarray(X).reshape(-1, 1))[:, 0]
    n, d = X.shape
    if n != S.input_dim:
        raise ValueError(f"X has {n} rows, sketch expects {S.input_dim}")
    B = S.buckets
    out = np.zeros(B * d)
    if sp.issparse(X):
        A = X if sp.isspmatrix_csr(X) and X.has_sorted_indices else as_csr(X)
        indptr = A.indptr
        hd = S.hash * d
        sg = S.sign.astype(np.float64)
        for lo, hi in _row_blocks(indptr, APPLY_BLOCK):
            a, b = indptr[lo], indptr[hi]
            if a == b:
                continue
            counts = np.diff(indptr[lo:hi + 1])
            flat = np.repeat(hd[lo:hi], counts)
            flat += A.indices[a:b]
            w = np.repeat(sg[lo:hi], counts)
            w *= A.data[a:b]
            out += np.bincount(flat, weights=w, minlength=B * d)
    else:
        A = np.asarray(X, dtype=np.float64)
        cols = np.arange(d)
        step = max(1, APPLY_BLOCK // max(d, 1))
        for lo in range(0, n, step):
            hi = min(n, lo + step)
            flat = (S.hash[lo:hi, None] * d + cols[None, :]).ravel()
            w = (S.sign[lo:hi, None] * A[lo:hi]).ravel()
            out += np.bincount(flat, weights=w, minlength=B * d)
    return np.asfortranarray(out.reshape(B, d))


@dataclass(frozen=True)
class CountGaussTransform:
    cs: CountSketchMap
    g: np.ndarray = field(repr=False)
    m: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.g.shape != (self.m, self.cs.buckets):
            raise ValueError("g must be m x B")

    @property
    def shape(self):
        return (self.m, self.cs.input_dim)

    def materialize(self) -> np.ndarray:
        # test/diagnostic use only; the apply path never forms G S
        return self.g @ self.cs.materialize()


def countgauss_new(m, B, n, rng) -> CountGaussTransform:
    """T = G S with G (m x B) Gaussian; B defaults to 5m when None."""
    if B is None:
        B = DEFAULT_BUCKET_FACTOR * m
    if m < 1 or B < 1 or n < 1:
        raise ValueError("m, B and n must be >= 1")
    rng = as_rng(rng)
    seed = rng.seed
    cs = countsketch_new(B, n, SeededRng(rng.next_seed()))
    g = gaussian_matrix(m, B, SeededRng(rng.next_seed()))
    g.setflags(write=False)
    return CountGaussTransform(cs, g, int(m), seed)


def countgauss_apply(T: CountGaussTransform, X) -> np.ndarray:
    """G @ (S @ X): m x d."""
    if X.shape[0] != T.cs.input_dim:
        raise ValueError(f"X has {X.shape[0]} rows, transform expects {T.cs.input_dim}")
    return np.asfortranarray(T.g @ countsketch_apply(T.cs, X))


@dataclass(frozen=True)
class SrhtSpec:
    m: int
    d: int
    selected_rows: np.ndarray
    signs: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.d & (self.d - 1):
            raise ValueError(f"d={self.d} is not a power of two")
        rows = _frozen(self.selected_rows, np.int64)
        signs = _frozen(self.signs, np.int64)
        if rows.shape != (self.m,) or self.m > self.d:
            raise ValueError("need m <= d selected rows")
        if len(np.unique(rows)) != self.m or rows.min(initial=0) < 0 or rows.max(initial=0) >= self.d:
            raise ValueError("selected rows must be distinct indices in [0, d)")
        if signs.shape != (self.d,) or not np.all(np.abs(signs) == 1):
            raise ValueError("need d signs in {-1, +1}")
        object.__setattr__(self, "selected_rows", rows)
        object.__setattr__(self, "signs", signs)


def srht_new(m, d, rng) -> SrhtSpec:
    rng = as_rng(rng)
    seed = rng.seed
    rows = np.sort(rng.permutation(d)[:m])
    return SrhtSpec(int(m), int(d), rows, rng.signs(d), seed)


def srht_rows(spec: SrhtSpec) -> np.ndarray:
    """Rows of P H D / sqrt(d), Sylvester-ordered Hadamard H."""
    H = la.hadamard(spec.d, dtype=np.float64)
    return np.asfortranarray(H[spec.selected_rows] * spec.signs / np.sqrt(spec.d))
