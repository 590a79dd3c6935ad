"""Timing harness for the two-stage CountGauss multiply against a dense
Gaussian multiply, across a doubling grid of nnz(X)."""
import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .linalg import gaussian_matrix
from .rng import SeededRng, mix64
from .sketch import countgauss_apply, countgauss_new, countsketch_apply

REPEATS = 5
WARMUP = 1
# stage-1 time may grow at most this much per doubling of nnz
STAGE1_RATIO_LIMIT = 2.5


# each timed repetition loops the call until at least this long
MIN_BATCH_SECONDS = 0.1


def batch_size(fn, min_batch=MIN_BATCH_SECONDS):
    """Smallest power of two such that that many calls take >= ``min_batch`` s."""
    number = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        if time.perf_counter() - t0 >= min_batch or number >= 1 << 20:
            return number
        number *= 2


def _time_batch(fn, number):
    t0 = time.perf_counter()
    for _ in range(number):
        fn()
    return (time.perf_counter() - t0) / number


def median_times(fns, repeats=REPEATS, warmup=WARMUP, min_batch=MIN_BATCH_SECONDS):
    """Median per-call wall time for each function in ``fns``.

    After ``warmup`` untimed calls each, the timed batches are interleaved
    round-robin (fn0, fn1, ..., fn0, fn1, ...) so that slow periods of the
    machine are spread over all functions rather than hitting one of them.
    """
    for fn in fns:
        for _ in range(warmup):
            fn()
    numbers = [batch_size(fn, min_batch) for fn in fns]
    times = [[] for _ in fns]
    for _ in range(repeats):
        for i, fn in enumerate(fns):
            times[i].append(_time_batch(fn, numbers[i]))
    return [float(np.median(t)) for t in times]


def median_time(fn, repeats=REPEATS, warmup=WARMUP, min_batch=MIN_BATCH_SECONDS):
    return median_times([fn], repeats, warmup, min_batch)[0]


def sparse_fixed_rows(n, d, per_row, rng) -> sp.csr_matrix:
    """n x d CSR with exactly ``per_row`` entries per row (consecutive columns
    mod d from a random start), values N(0, 1)."""
    if not 1 <= per_row <= d:
        raise ValueError("need 1 <= per_row <= d")
    start = rng.integers(d, n)
    cols = (start[:, None] + np.arange(per_row)[None, :]) % d
    cols.sort(axis=1)
    vals = rng.normal(n * per_row)
    indptr = np.arange(0, n * per_row + 1, per_row)
    return sp.csr_matrix((vals, cols.ravel(), indptr), shape=(n, d))


@dataclass
class BenchRow:
    n: int
    nnz: int
    stage1: float
    stage2: float
    dense: float

    @property
    def total(self):
        return self.stage1 + self.stage2

    @property
    def speedup(self):
        return self.dense / self.total if self.total > 0 else float("inf")


@dataclass
class BenchReport:
    m: int
    B: int
    d: int
    per_row: int
    rows: list

    def stage1_ratios(self):
        return [b.stage1 / a.stage1 for a, b in zip(self.rows, self.rows[1:])]

    def dense_ratios(self):
        return [b.dense / a.dense for a, b in zip(self.rows, self.rows[1:])]

    @property
    def passed(self):
        return all(r <= STAGE1_RATIO_LIMIT for r in self.stage1_ratios())


def nnz_scaling(m=16, B=None, d=64, per_row=8, n0=1 << 14, points=4, seed=0,
                repeats=REPEATS) -> BenchReport:
    """Times stage 1 (S X), stage 2 (G (S X)) and a dense m x n Gaussian times X
    for n = n0, 2 n0, ... (nnz doubles at each step)."""
    if points < 2:
        raise ValueError("need at least 2 grid points")
    B = 5 * m if B is None else B
    s1, s2, dense, sizes = [], [], [], []
    for p in range(points):
        n = n0 << p
        rng = SeededRng(mix64(seed, p))
        X = sparse_fixed_rows(n, d, per_row, rng)
        T = countgauss_new(m, B, n, rng)
        GT = np.ascontiguousarray(gaussian_matrix(m, n, rng).T)
        SX = countsketch_apply(T.cs, X)
        s1.append(lambda T=T, X=X: countsketch_apply(T.cs, X))
        s2.append(lambda T=T, SX=SX: T.g @ SX)
        # G X as (X^T G^T)^T with X^T in CSC form: G^T is read once, in order,
        # at m multiply-adds per nonzero
        dense.append(lambda X=X, GT=GT: X.T @ GT)
        sizes.append((n, int(X.nnz)))
    t1 = median_times(s1, repeats)
    t2 = median_times(s2, repeats)
    td = median_times(dense, repeats)
    rows = [BenchRow(n, nnz, a, b, c) for (n, nnz), a, b, c in zip(sizes, t1, t2, td)]
    return BenchReport(m, B, d, per_row, rows)


def bench_table(rep: BenchReport):
    header = ["n", "nnz", "stage1_s", "stage2_s", "countgauss_s", "dense_s", "speedup",
              "stage1_ratio", "dense_ratio"]
    s1 = [None] + rep.stage1_ratios()
    dr = [None] + rep.dense_ratios()
    out = []
    for i, r in enumerate(rep.rows):
        out.append([r.n, r.nnz, r.stage1, r.stage2, r.total, r.dense, r.speedup, s1[i], dr[i]])
    return header, out


def check_countgauss_matches(m=16, d=64, per_row=8, n=4096, seed=0):
    """Relative difference between countgauss_apply and the dense product (G S) X."""
    rng = SeededRng(seed)
    X = sparse_fixed_rows(n, d, per_row, rng)
    T = countgauss_new(m, None, n, rng)
    a = countgauss_apply(T, X)
    b = T.materialize() @ X.toarray()
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
