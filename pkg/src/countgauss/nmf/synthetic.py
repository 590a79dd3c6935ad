"""Synthetic separable NMF instances."""
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ..rng import as_rng


@dataclass
class SeparableInstance:
    X: np.ndarray = field(repr=False)
    anchors: list
    H_true: np.ndarray | None = field(default=None, repr=False)
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        n = self.X.shape[1]
        if len(set(self.anchors)) != len(self.anchors):
            raise ValueError("anchors must be distinct")
        if any(not 0 <= a < n for a in self.anchors):
            raise ValueError("anchor index out of range")

    @property
    def k(self):
        return len(self.anchors)


def generate_separable(d, n, k, rng) -> SeparableInstance:
    """X = U V^T with U ~ Unif[0,1]^{d x k} and V (n x k) whose first k rows
    are the identity and remaining rows are Unif[0,1]^k.  Rows of V are
    scaled to unit l1 norm, so every column of X is a convex combination of
    the first k columns, which are the anchors."""
    if not 1 <= k <= min(d, n):
        raise ValueError(f"need 1 <= k <= min(d, n), got k={k}, d={d}, n={n}")
    rng = as_rng(rng)
    seed = rng.seed
    U = rng.uniform((d, k))
    V = np.vstack([np.eye(k), rng.uniform((n - k, k))])
    V /= V.sum(axis=1, keepdims=True)
    H = np.ascontiguousarray(V.T)
    X = np.asfortranarray(U @ H)
    return SeparableInstance(X, list(range(k)), H, 0.0, seed)


def generate_noisy_polytope(d, k, sigma, rng) -> SeparableInstance:
    """k uniform vertices plus the k(k-1)/2 pairwise midpoints, then additive
    N(0, sigma^2) noise on every entry."""
    if d < k:
        raise ValueError("need d >= k")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    rng = as_rng(rng)
    seed = rng.seed
    W = rng.uniform((d, k))
    pairs = list(combinations(range(k), 2))
    n = k + len(pairs)
    H = np.zeros((k, n))
    H[:, :k] = np.eye(k)
    for c, (i, j) in enumerate(pairs, start=k):
        H[i, c] = H[j, c] = 0.5
    X = W @ H
    if sigma > 0:
        X = X + sigma * rng.normal((d, n))
    return SeparableInstance(np.asfortranarray(X), list(range(k)), H, float(sigma), seed)
