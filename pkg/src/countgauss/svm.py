"""Linear SVM without intercept, solved in the dual, and the margin-preservation
check for random projections of the data.

The dual is  max_{0 <= a <= C}  1^T a - 1/2 a^T Y X X^T Y a ; at the optimum
the margin is gamma = 1 / sqrt(2 Z).
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import ConvergenceError, as_dense, orthonormal_basis, spectral_norm
from .rng import SeededRng, as_rng
from .sketch import countgauss_new, countsketch_new


@dataclass
class SvmProblem:
    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    C: float = 1.0

    def __post_init__(self):
        self.X = as_dense(self.X)
        self.y = np.asarray(self.y, dtype=np.float64).ravel()
        if self.X.ndim != 2 or self.X.shape[0] < 1:
            raise ValueError("X must be a nonempty N x d matrix")
        if len(self.y) != self.X.shape[0]:
            raise ValueError("one label per row of X required")
        if not np.all(np.abs(self.y) == 1):
            raise ValueError("labels must be -1 or +1")
        if not self.C > 0:
            raise ValueError("C must be positive")

    @property
    def one_class(self):
        return len(np.unique(self.y)) < 2


@dataclass
class SvmSolution:
    alpha: np.ndarray = field(repr=False)
    objective: float
    gamma: float
    w: np.ndarray = field(repr=False)
    passes: int = 0
    violation: float = 0.0
    objective_trace: list = field(default_factory=list, repr=False)


def dual_objective(alpha, yX):
    w = yX.T @ alpha
    return float(alpha.sum() - 0.5 * (w @ w))


# passes between active-set polishing attempts
POLISH_EVERY = 20


def _polish_step(Q, alpha, C):
    free = np.flatnonzero((alpha > 0) & (alpha < C))
    if len(free) == 0:
        return None, False
    cur = alpha[free]
    Qf = Q[np.ix_(free, free)]
    g = 1.0 - Q[free] @ alpha
    Pg = np.linalg.pinv(Qf, hermitian=True) @ g
    r = g - Qf @ Pg
    if np.linalg.norm(r) > 1e-9 * (1.0 + np.linalg.norm(g)):
        # g has a component the free block cannot absorb: the objective rises
        # linearly along it until some coordinate reaches a bound
        d, t = r, np.inf
    else:
        d, t = Pg, 1.0
    if not np.any(d):
        return None, False
    block, target = -1, 0.0
    with np.errstate(divide="ignore"):
        room = np.where(d < 0, -cur / d, np.where(d > 0, (C - cur) / d, np.inf))
    j = int(np.argmin(room))
    if room[j] < t:
        t, block, target = float(room[j]), j, (0.0 if d[j] < 0 else C)
    if not np.isfinite(t) or t <= 0:
        return None, False
    out = alpha.copy()
    out[free] = np.clip(cur + t * d, 0.0, C)
    if block >= 0:
        out[free[block]] = target
    return out, block >= 0


def _polish(Q, alpha, C):
    """Active-set steps over the free coordinates (0 < a < C, others fixed),
    g the free gradient: the Newton step pinv(Q_FF) g when g lies in the
    range of Q_FF, else a climb along the null-space part of g. Steps are cut
    at the box; a coordinate that hits a bound is pinned there and the step
    repeats. None if there is nothing to do."""
    out = None
    for _ in range(len(alpha) + 1):
        nxt, blocked = _polish_step(Q, alpha if out is None else out, C)
        if nxt is None:
            break
        out = nxt
        if not blocked:
            break
    return out


def svm_dual_solve(p: SvmProblem, tol=1e-10, max_passes=100000) -> SvmSolution:
    """Dual coordinate ascent, cyclic in ascending index order.

    Stops when the largest projected-gradient (KKT) violation is <= tol.
    Every POLISH_EVERY passes an active-set step moves the free coordinates
    toward their exact maximizer with the others fixed, cut at the box; it
    is kept only if it does not lower the objective. This rescues the slow
    linear rate of coordinate ascent on rank-deficient Gram matrices.
    """
    yX = p.y[:, None] * p.X
    Q = yX @ yX.T
    N = len(p.y)
    diag = np.diag(Q).copy()
    alpha = np.zeros(N)
    Qa = np.zeros(N)
    C = float(p.C)
    trace = [0.0]
    viol = np.inf
    for passes in range(1, max_passes + 1):
        viol = 0.0
        for i in range(N):
            g = 1.0 - Qa[i]
            a = alpha[i]
            if (a < C and g > 0) or (a > 0 and g < 0):
                viol = max(viol, abs(g))
                new = C if diag[i] == 0.0 else min(max(a + g / diag[i], 0.0), C)
                delta = new - a
                if delta != 0.0:
                    alpha[i] = new
                    Qa += delta * Q[:, i]
        trace.append(float(alpha.sum() - 0.5 * alpha @ Qa))
        if viol <= tol:
            break
        if passes % POLISH_EVERY == 0:
            cand = _polish(Q, alpha, C)
            if cand is not None:
                Qc = Q @ cand
                if cand.sum() - 0.5 * cand @ Qc >= trace[-1]:
                    alpha, Qa = cand, Qc
                    trace.append(float(alpha.sum() - 0.5 * alpha @ Qa))
                    continue
            # refresh the running product to stop rounding drift
            Qa = Q @ alpha
    else:
        raise ConvergenceError(
            f"dual coordinate ascent did not converge in {max_passes} passes "
            f"(max KKT violation {viol:.3e})", last=alpha, residual=viol)
    w = yX.T @ alpha
    Z = dual_objective(alpha, yX)
    gamma = 1.0 / math.sqrt(2.0 * Z) if Z > 0 else math.inf
    return SvmSolution(alpha, Z, gamma, w, passes, viol, trace)


def embedding_error(X, R) -> float:
    """|| I - V^T R R^T V ||_2 with V an orthonormal basis of the row space of X."""
    X = as_dense(X)
    R = as_dense(R)
    if X.shape[1] != R.shape[0]:
        raise ValueError(f"R must have {X.shape[1]} rows")
    V = orthonormal_basis(X.T)
    if V.shape[1] == 0:
        raise ValueError("embedding error undefined for X = 0")
    VR = V.T @ R
    E = np.eye(V.shape[1]) - VR @ VR.T
    if not np.any(E):
        return 0.0
    return spectral_norm(E, max_iters=100000)


class PreconditionError(ValueError):
    pass


@dataclass
class MarginReport:
    embedding_error: float
    gamma: float
    gamma_proj: float
    Z: float
    Z_proj: float
    lower: float
    upper: float
    passed: bool
    statement_passed: bool
    solution: SvmSolution = field(repr=False, default=None)
    solution_proj: SvmSolution = field(repr=False, default=None)

    def to_dict(self):
        return {k: getattr(self, k) for k in (
            "embedding_error", "gamma", "gamma_proj", "Z", "Z_proj", "lower", "upper",
            "passed", "statement_passed")}


# relative slack on the bound comparison for solver round-off
BOUND_RTOL = 1e-9


def margin_preservation_check(p: SvmProblem, R, tol=1e-10, max_passes=100000,
                              solution=None) -> MarginReport:
    """Solve the SVM on X and on XR and test
    (1 - e/(1-e)) gamma^2 <= gamma_proj^2 <= gamma^2 / (1-e),  e = embedding_error.

    Refuses when e >= 1/2: both factors need 1 - e > e.
    """
    R = as_dense(R)
    e = embedding_error(p.X, R)
    if e >= 0.5:
        raise PreconditionError(f"embedding error {e:.4f} >= 1/2; the margin bound needs e < 1/2")
    sol = solution if solution is not None else svm_dual_solve(p, tol, max_passes)
    proj = svm_dual_solve(SvmProblem(p.X @ R, p.y, p.C), tol, max_passes)
    g2, h2 = sol.gamma ** 2, proj.gamma ** 2
    lower = (1.0 - e / (1.0 - e)) * g2
    upper = g2 / (1.0 - e)
    ok = lower <= h2 * (1 + BOUND_RTOL) and h2 <= upper * (1 + BOUND_RTOL)
    stmt = (1 - e) * g2 <= h2 * (1 + BOUND_RTOL) and h2 <= (1 + e) * g2 * (1 + BOUND_RTOL)
    return MarginReport(e, sol.gamma, proj.gamma, sol.objective, proj.objective,
                        lower, upper, bool(ok), bool(stmt), sol, proj)


PROJECTIONS = ("countsketch", "countgauss", "gaussian")


def projection_matrix(kind, d, r, rng, B=None) -> np.ndarray:
    """A d x r projection R, scaled so that E[R R^T] = I_d.

    countsketch: S^T for an r x d CountSketch; countgauss: (G S)^T / sqrt(r)
    with B = 5r buckets unless given; gaussian: G^T / sqrt(r).
    """
    rng = as_rng(rng)
    if kind == "countsketch":
        return countsketch_new(r, d, rng).materialize().T
    if kind == "countgauss":
        T = countgauss_new(r, B, d, rng)
        return T.materialize().T / math.sqrt(r)
    if kind == "gaussian":
        return rng.normal((r, d)).T / math.sqrt(r)
    raise ValueError(f"unknown projection {kind!r}")


def two_blobs(N, d, rng, sep=3.0, density=1.0, rank=None):
    """Two Gaussian classes at +/- mu, optionally sparsified (entries kept with
    probability ``density``) or confined to a random ``rank``-dimensional subspace."""
    rng = as_rng(rng)
    y = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    k = d if rank is None else rank
    mu = np.zeros(k)
    mu[0] = sep / 2
    Z = rng.normal((N, k)) + y[:, None] * mu
    if rank is not None:
        basis = orthonormal_basis(rng.normal((d, k)))
        X = Z @ basis.T
    else:
        X = Z
    if density < 1.0:
        X = X * (rng.uniform((N, d)) < density)
    return X, y
