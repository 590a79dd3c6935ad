"""Anchor (extreme column) selection for separable NMF.

Random-projection methods look at ``Z = T X`` for an m x d random ``T`` and
keep, for each row of ``Z``, the column indices attaining the maximum and the
minimum.  A linear functional over a polytope is extremized at a vertex, so
on noiseless separable data every selected index is an anchor.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from ..linalg import as_dense, check_finite, gaussian_matrix
from ..rng import SeededRng, as_rng
from ..sketch import DEFAULT_BUCKET_FACTOR, countgauss_apply, countgauss_new
from .nnls import nnls_solve


@dataclass
class AnchorSet:
    i_max: list
    i_min: list
    union: list
    # number of projection rows (max or min) that picked each index
    counts: dict = field(default_factory=dict, repr=False)

    def ranked(self):
        """Union ordered by selection count (desc), ties by index."""
        return sorted(self.union, key=lambda j: (-self.counts.get(j, 0), j))


def _anchor_set(Z) -> AnchorSet:
    # np.argmax / np.argmin return the lowest index among ties
    hi = np.argmax(Z, axis=1)
    lo = np.argmin(Z, axis=1)
    counts = {}
    for j in np.concatenate([hi, lo]).tolist():
        counts[j] = counts.get(j, 0) + 1
    i_max = sorted(set(hi.tolist()))
    i_min = sorted(set(lo.tolist()))
    return AnchorSet(i_max, i_min, sorted(set(i_max) | set(i_min)), counts)


def _check_input(X, m):
    if m < 1:
        raise ValueError("m must be >= 1")
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    check_finite(X)


def cg_nmf(X, m, B=None, rng=None) -> AnchorSet:
    """Anchor candidates from a CountGauss projection (B defaults to 5m)."""
    _check_input(X, m)
    if B is None:
        B = DEFAULT_BUCKET_FACTOR * m
    if B < 1:
        raise ValueError("B must be >= 1")
    T = countgauss_new(m, B, X.shape[0], as_rng(rng))
    return _anchor_set(countgauss_apply(T, X))


def gp_nmf(X, m, rng=None) -> AnchorSet:
    """Anchor candidates from a dense m x d Gaussian projection."""
    _check_input(X, m)
    G = gaussian_matrix(m, X.shape[0], as_rng(rng))
    Z = (X.T @ G.T).T if sp.issparse(X) else G @ np.asarray(X, dtype=np.float64)
    return _anchor_set(np.asarray(Z))


class IncompleteSelection(ValueError):
    def __init__(self, msg, found):
        super().__init__(msg)
        self.found = found


def spa(X, k, tol=1e-12) -> list:
    """Successive projection: pick the column of largest residual norm, then
    project every column onto the orthogonal complement of it."""
    R = np.array(as_dense(X), dtype=np.float64)
    d, n = R.shape
    if not 1 <= k <= min(d, n):
        raise ValueError(f"need 1 <= k <= min(d, n), got k={k}")
    norms = np.sum(R * R, axis=0)
    floor = tol * max(norms.max(), np.finfo(float).tiny)
    found = []
    for _ in range(k):
        j = int(np.argmax(norms))
        if norms[j] <= floor:
            raise IncompleteSelection(
                f"residual vanished after {len(found)} selections: {found}", found)
        found.append(j)
        u = R[:, j] / np.sqrt(norms[j])
        R -= np.outer(u, u @ R)
        norms = np.sum(R * R, axis=0)
    return found


class XrayResult(NamedTuple):
    indices: list
    truncated: bool


def xray(X, k, tol=1e-10, nnls_tol=1e-8) -> XrayResult:
    """Greedy conic expansion.

    At each step take the residual column r of largest norm and add the
    column maximizing r^T x_j / 1^T x_j (a linear-fractional score, so the
    maximizer is an extreme ray of the data cone); then refit H >= 0 on the
    enlarged anchor set and recompute R = X - X_A H. Ties go to the lowest
    column index.
    """
    X = as_dense(X)
    if np.any(X < 0):
        raise ValueError("xray requires a nonnegative X")
    d, n = X.shape
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}")
    colsum = X.sum(axis=0)
    live = colsum > 0
    xnorm = np.linalg.norm(X)
    R = X.copy()
    found = []
    while len(found) < k:
        rn = np.sum(R * R, axis=0)
        if np.sqrt(rn.sum()) <= tol * xnorm:
            return XrayResult(found, True)
        r = R[:, int(np.argmax(rn))]
        score = np.full(n, -np.inf)
        score[live] = (r @ X[:, live]) / colsum[live]
        score[found] = -np.inf
        best = float(np.max(score))
        # ties (within rounding of the blocked product) go to the lowest index
        j = int(np.argmax(score >= best - 1e-12 * abs(best)))
        if not score[j] > 0:
            return XrayResult(found, True)
        found.append(j)
        A = X[:, found]
        H = nnls_solve(A, X, tol=nnls_tol)
        R = X - A @ H
    return XrayResult(found, False)


def relative_error(X, anchors, H) -> float:
    """||X - X_I H||_F / ||X||_F."""
    X = as_dense(X)
    H = np.asarray(H, dtype=np.float64)
    anchors = list(anchors)
    if H.shape != (len(anchors), X.shape[1]):
        raise ValueError(f"H must be {len(anchors)} x {X.shape[1]}")
    nx = np.linalg.norm(X)
    if nx == 0:
        raise ValueError("relative error undefined for X = 0")
    return float(np.linalg.norm(X - X[:, anchors] @ H) / nx)


def error_curve(X, ranked_anchors):
    """Relative NNLS reconstruction error using the first j anchors, j = 1..len."""
    X = as_dense(X)
    out = []
    for j in range(1, len(ranked_anchors) + 1):
        A = ranked_anchors[:j]
        out.append(relative_error(X, A, nnls_solve(X[:, A], X)))
    return out
