"""Checks that a CountGauss projection behaves like a Gaussian one.

The quantities here all revolve around ``M = U^T S^T S U`` for a CountSketch
``S`` and an orthonormal ``U``: the per-row covariance of ``G S U``.
Monte-Carlo trials use per-trial seeds ``mix64(master, t)`` and are reduced in
ascending trial order, so results do not depend on the thread count.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as la
from scipy.spatial.distance import cdist

from .rng import SeededRng, as_rng, mix64, stream_bits
from .sketch import CountSketchMap, countsketch_apply, countsketch_new

ORTHO_TOL = 1e-8
CHUNK = 2048


def check_orthonormal(U, tol=ORTHO_TOL):
    U = np.asarray(U, dtype=np.float64)
    if U.ndim != 2 or U.shape[1] == 0:
        raise ValueError("U must be a 2-D matrix with at least one column")
    err = np.linalg.norm(U.T @ U - np.eye(U.shape[1]))
    if err > tol:
        raise ValueError(f"U is not orthonormal: ||U^T U - I||_F = {err:.3e} > {tol:g}")
    return U


@dataclass
class GramDeviation:
    M: np.ndarray = field(repr=False)
    fro_sq: float
    trace_dev: float
    op_norm: float


def gram_deviation(S: CountSketchMap, U) -> GramDeviation:
    """M = (SU)^T (SU) and its distance from the identity."""
    U = check_orthonormal(U)
    SU = countsketch_apply(S, U)
    M = SU.T @ SU
    D = np.eye(U.shape[1]) - M
    return GramDeviation(
        M=M,
        fro_sq=float(np.sum(D * D)),
        trace_dev=float(np.trace(D)),
        op_norm=float(np.max(np.abs(np.linalg.eigvalsh((D + D.T) / 2)))),
    )


def trial_seeds(master, start, stop):
    return np.array([mix64(master, t) for t in range(start, stop)], dtype=np.uint64)


def batched_sketch(U, B, seeds):
    """S_t @ U for a batch of CountSketches, shape (len(seeds), B, d).

    Trial ``t`` uses the same draws as ``countsketch_new(B, n, SeededRng(seeds[t]))``:
    n bucket draws followed by n sign draws.
    """
    n, d = U.shape
    T = len(seeds)
    bits = stream_bits(seeds, 2 * n)
    h = (bits[:, :n] % np.uint64(B)).astype(np.int64)
    s = 1.0 - 2.0 * (bits[:, n:] >> np.uint64(63)).astype(np.float64)
    flat = ((np.arange(T)[:, None, None] * B + h[:, :, None]) * d
            + np.arange(d)[None, None, :])
    w = s[:, :, None] * U[None, :, :]
    out = np.bincount(flat.ravel(), weights=w.ravel(), minlength=T * B * d)
    return out.reshape(T, B, d)


def _map_chunks(fn, total, threads):
    bounds = [(a, min(a + CHUNK, total)) for a in range(0, total, CHUNK)]
    if threads and threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: fn(*b), bounds))
    else:
        parts = [fn(*b) for b in bounds]
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def _mean_se(v):
    v = np.asarray(v, dtype=np.float64)
    se = float(np.std(v, ddof=1) / math.sqrt(len(v))) if len(v) > 1 else float("nan")
    return float(np.mean(v)), se


def _within(est, bound, se):
    # est <= bound * (1 + 3 * relative stderr)
    if est <= 0.0:
        return True
    return est <= bound * (1.0 + 3.0 * se / est)


def in_typical_set(x, U, C):
    """Directly checkable conditions for x to be a 'typical' Gaussian point:
    ||x||_inf <= C sqrt(ln n) and |(Ux)_a| <= C sqrt(ln n) ||U_a|| for all a."""
    n = U.shape[0]
    lim = C * math.sqrt(math.log(n)) if n > 1 else 0.0
    if np.max(np.abs(x)) > lim:
        return False
    Ux = U @ x
    row_norms = np.linalg.norm(U, axis=1)
    return bool(np.all(np.abs(Ux) <= lim * row_norms + 1e-12))


@dataclass
class MomentReport:
    trials: int
    n: int
    d: int
    B: int
    seed: int
    est1: float
    est2: float | None
    est3: float | None
    est4: float | None
    est5: float
    se1: float
    se2: float | None
    se3: float | None
    se4: float | None
    se5: float
    trace_mean: float
    trace_se: float
    bound1: float
    bound5: float
    pass1: bool
    pass5: bool
    trace_zero_mean: bool
    implied2: float | None = None
    implied3: float | None = None
    implied4: float | None = None

    @property
    def passed(self):
        return self.pass1 and self.pass5 and self.trace_zero_mean

    def to_record(self):
        r = asdict(self)
        return {
            "op": "moment_suite",
            "params": {k: r[k] for k in ("trials", "n", "d", "B", "seed")},
            "estimates": {k: r[k] for k in ("est1", "est2", "est3", "est4", "est5", "trace_mean",
                                            "implied2", "implied3", "implied4")},
            "bounds": {"bound1": self.bound1, "bound5": self.bound5},
            "stderr": {k: r[k] for k in ("se1", "se2", "se3", "se4", "se5", "trace_se")},
            "pass": {"pass1": self.pass1, "pass5": self.pass5,
                     "trace_zero_mean": self.trace_zero_mean},
        }


def moment_suite(U, x, B, trials, rng, C=1.0, threads=1) -> MomentReport:
    """Monte-Carlo means of the CountSketch moment quantities.

    est1 = E ||I-M||_F^2, est2 = E x^T (I-M)^2 x, est3 = E (x^T (I-M) x)^2,
    est4 = E (x^T (I-M) x) Tr(I-M), est5 = E Tr(I-M)^2.  Items 2-4 need ``x``
    (else None) and are reported with their implied O(.) constants only;
    items 1 and 5 are checked against 2 d^2/B and d^2/B.
    """
    U = check_orthonormal(U)
    if trials < 100:
        raise ValueError("moment_suite needs at least 100 trials for stderr estimates")
    if B < 1:
        raise ValueError("B must be >= 1")
    n, d = U.shape
    if x is not None:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (d,):
            raise ValueError(f"x must have length {d}")
        if not in_typical_set(x, U, C):
            raise ValueError(f"x violates the typical-set conditions with C={C}")
    master = as_rng(rng).seed
    eye = np.eye(d)

    def chunk(a, b):
        SU = batched_sketch(U, B, trial_seeds(master, a, b))
        D = eye[None] - np.einsum("tbi,tbj->tij", SU, SU)
        tr = np.einsum("tii->t", D)
        out = {"fro": np.einsum("tij,tij->t", D, D), "tr": tr}
        if x is not None:
            v = D @ x
            q = v @ x
            out["x2"] = np.einsum("ti,ti->t", v, v)
            out["x3"] = q * q
            out["x4"] = q * tr
        return out

    vals = _map_chunks(chunk, trials, threads)
    est1, se1 = _mean_se(vals["fro"])
    est5, se5 = _mean_se(vals["tr"] ** 2)
    tmean, tse = _mean_se(vals["tr"])
    bound1 = 2.0 * d * d / B
    bound5 = d * d / B
    rep = MomentReport(
        trials=trials, n=n, d=d, B=B, seed=master,
        est1=est1, est2=None, est3=None, est4=None, est5=est5,
        se1=se1, se2=None, se3=None, se4=None, se5=se5,
        trace_mean=tmean, trace_se=tse, bound1=bound1, bound5=bound5,
        pass1=_within(est1, bound1, se1), pass5=_within(est5, bound5, se5),
        trace_zero_mean=abs(tmean) <= 4.0 * tse if tse > 0 else tmean == 0.0,
    )
    if x is not None:
        rep.est2, rep.se2 = _mean_se(vals["x2"])
        rep.est3, rep.se3 = _mean_se(vals["x3"])
        rep.est4, rep.se4 = _mean_se(vals["x4"])
        logn = math.log(n) if n > 1 else 0.0
        if logn > 0:
            scale = B / (d * d)
            rep.implied2 = rep.est2 * scale / logn ** 2
            rep.implied3 = rep.est3 * scale / logn ** 2
            rep.implied4 = rep.est4 * scale / logn
    return rep


def kl_gaussian_vs_identity(Sigma) -> float:
    """KL(N(0, I) || N(0, Sigma)) = 1/2 Tr(Sigma^-1 - I) + 1/2 ln det Sigma."""
    Sigma = np.atleast_2d(np.asarray(Sigma, dtype=np.float64))
    d = Sigma.shape[0]
    if Sigma.shape != (d, d):
        raise ValueError("Sigma must be square")
    if not np.allclose(Sigma, Sigma.T, rtol=0, atol=1e-10 * max(1.0, np.abs(Sigma).max())):
        raise ValueError("Sigma must be symmetric")
    try:
        L = np.linalg.cholesky(Sigma)
    except np.linalg.LinAlgError as e:
        raise ValueError("Sigma is not positive definite") from e
    Linv = la.solve_triangular(L, np.eye(d), lower=True)
    tr_inv = float(np.sum(Linv * Linv))
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    return 0.5 * (tr_inv - d) + 0.5 * logdet


def pinsker_tv_bound(kl) -> float:
    if kl < 0:
        raise ValueError("KL divergence must be nonnegative")
    return math.sqrt(kl / 2.0)


def _ceil(x):
    r = round(x)
    return int(r) if math.isclose(x, r, rel_tol=1e-12, abs_tol=1e-12) else math.ceil(x)


def _check_bound_args(d, m, delta, C):
    if d < 1 or m < 1:
        raise ValueError("d and m must be >= 1")
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if C <= 0:
        raise ValueError("C must be positive")


def bound_B_simple(d, m, delta, C=1.0) -> int:
    """ceil(C d^2 m / delta^2)."""
    _check_bound_args(d, m, delta, C)
    return _ceil(C * d * d * m / (delta * delta))


def bound_B_main(n, d, m, delta, C=1.0, log=math.log) -> int:
    """ceil(C (log n)^4 d^2 sqrt(m) / delta), natural log by default.

    Only defined for m <= n^4: beyond that, B would already make the
    CountSketch an isometry with high probability.
    """
    _check_bound_args(d, m, delta, C)
    if m > n ** 4:
        raise ValueError(f"m={m} exceeds n^4={n ** 4}; the bound is restricted to 1 <= m <= n^4")
    return _ceil(C * log(n) ** 4 * d * d * math.sqrt(m) / delta)


def energy_statistic(D, k):
    """Two-sample energy statistic from a pooled distance matrix (first k rows = sample 1)."""
    N = D.shape[0]
    a = np.zeros(N)
    a[:k] = 1.0
    return _energy_from_indicator(D, D.sum(axis=1), a, k)


def _energy_from_indicator(D, rowsum, a, k):
    N = D.shape[0]
    l = N - k
    Da = D @ a
    sxx = a @ Da
    sxy = a @ rowsum - sxx
    syy = rowsum.sum() - 2.0 * (a @ rowsum) + sxx
    e = 2.0 * sxy / (k * l) - sxx / (k * k) - syy / (l * l)
    return k * l / N * e


@dataclass
class ComparisonReport:
    n: int
    d: int
    m: int
    B: int
    samples: int
    seed: int
    mean_gaussian: list
    mean_countgauss: list
    cov_gaussian: list
    cov_countgauss: list
    maxdev_gaussian: float
    maxdev_countgauss: float
    energy: float
    energy_null_q99: float
    energy_pvalue: float
    kl_mean: float
    tv_bound: float

    def to_record(self):
        return {
            "op": "row_distribution_compare",
            "params": {k: getattr(self, k) for k in ("n", "d", "m", "B", "samples", "seed")},
            "estimates": {k: getattr(self, k) for k in (
                "mean_gaussian", "mean_countgauss", "cov_gaussian", "cov_countgauss",
                "maxdev_gaussian", "maxdev_countgauss", "energy", "energy_null_q99",
                "energy_pvalue", "kl_mean")},
            "bounds": {"tv_bound": self.tv_bound},
            "stderr": {},
            "pass": {},
        }


def row_distribution_compare(U, m, B, samples, rng, permutations=200, energy_max=1000,
                             injective=False) -> ComparisonReport:
    """Compare rows of G~ U against rows of g S U (fresh S per row).

    Reports moments of both populations, an energy-distance permutation test
    on up to ``energy_max`` rows of each, and a Pinsker bound on the TV
    distance for ``m`` rows sharing one S: by convexity of KL,
    KL(p^m || E_S q_S^m) <= m E_S KL(p || q_S).
    """
    U = check_orthonormal(U)
    n, d = U.shape
    if d == 0:
        raise ValueError("d must be >= 1")
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    rng = as_rng(rng)
    master = rng.seed
    g_rng = SeededRng(mix64(master, 0))
    true_rows = g_rng.normal((samples, n)) @ U

    cs_master = mix64(master, 1)
    gs_rng = SeededRng(mix64(master, 2))
    cg_rows = np.empty((samples, d))
    kls = np.empty(samples)
    for a in range(0, samples, CHUNK):
        b = min(a + CHUNK, samples)
        seeds = trial_seeds(cs_master, a, b)
        if injective:
            SU = np.stack([countsketch_apply(_injective(B, n, s), U) for s in seeds])
        else:
            SU = batched_sketch(U, B, seeds)
        g = gs_rng.normal((b - a, B))
        cg_rows[a:b] = np.einsum("sb,sbd->sd", g, SU)
        for i, M in enumerate(np.einsum("sbi,sbj->sij", SU, SU)):
            try:
                kls[a + i] = kl_gaussian_vs_identity((M + M.T) / 2)
            except ValueError:
                kls[a + i] = np.inf

    def moments(rows):
        mu = rows.mean(axis=0)
        cov = np.cov(rows, rowvar=False).reshape(d, d)
        return mu, cov, float(np.max(np.abs(cov - np.eye(d))))

    mu_g, cov_g, dev_g = moments(true_rows)
    mu_c, cov_c, dev_c = moments(cg_rows)

    k = min(samples, energy_max)
    pooled = np.vstack([true_rows[:k], cg_rows[:k]])
    D = cdist(pooled, pooled)
    rowsum = D.sum(axis=1)
    obs = energy_statistic(D, k)
    perm_rng = SeededRng(mix64(master, 3))
    null = np.empty(permutations)
    for p in range(permutations):
        a = np.zeros(2 * k)
        a[perm_rng.permutation(2 * k)[:k]] = 1.0
        null[p] = _energy_from_indicator(D, rowsum, a, k)
    kl_mean = float(np.mean(kls))
    return ComparisonReport(
        n=n, d=d, m=int(m), B=int(B), samples=int(samples), seed=master,
        mean_gaussian=mu_g.tolist(), mean_countgauss=mu_c.tolist(),
        cov_gaussian=cov_g.tolist(), cov_countgauss=cov_c.tolist(),
        maxdev_gaussian=dev_g, maxdev_countgauss=dev_c,
        energy=float(obs), energy_null_q99=float(np.quantile(null, 0.99)),
        energy_pvalue=float((1 + np.sum(null >= obs)) / (1 + permutations)),
        kl_mean=kl_mean,
        tv_bound=min(1.0, math.sqrt(m * kl_mean / 2.0)) if np.isfinite(kl_mean) else 1.0,
    )


def _injective(B, n, seed):
    return countsketch_new(B, n, SeededRng(int(seed)), injective=True)
