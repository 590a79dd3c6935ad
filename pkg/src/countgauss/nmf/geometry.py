"""Normal cones, solid angles and the polytope condition number."""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import linprog

from ..rng import as_rng

CONE_EPS = 1e-12


@dataclass(frozen=True)
class PolytopeSpec:
    """Points in R^d given as rows of ``vertices``, each an extreme point of their hull."""
    vertices: np.ndarray

    def __post_init__(self):
        V = np.array(self.vertices, dtype=np.float64)
        if V.ndim != 2 or V.shape[0] < 1:
            raise ValueError("vertices must be a nonempty (p, d) array")
        V.setflags(write=False)
        object.__setattr__(self, "vertices", V)

    @property
    def ambient_dim(self):
        return self.vertices.shape[1]

    def validate(self):
        ext = extreme_points_bruteforce(self.vertices.T)
        if len(ext) != len(self.vertices):
            raise ValueError("some listed vertices are not extreme points")
        return self


def regular_polygon(k, radius=1.0, start=math.pi / 2, dim=2):
    """Vertices of a regular k-gon with the first vertex at angle ``start``,
    embedded in the first two coordinates of R^dim."""
    ang = start + 2 * math.pi * np.arange(k) / k
    V = np.zeros((k, dim))
    V[:, 0] = radius * np.cos(ang)
    V[:, 1] = radius * np.sin(ang)
    # exact zeros for the axis-aligned vertices
    V[np.abs(V) < 1e-15] = 0.0
    return PolytopeSpec(V)


def _cone_slack(V, idx, W):
    # max_j w^T (v_j - v_idx) for each row w of W, and a scale for the tolerance
    diff = V - V[idx]
    prod = np.atleast_2d(W) @ diff.T
    scale = np.linalg.norm(np.atleast_2d(W), axis=1) * max(np.abs(diff).max(), 1.0)
    return prod.max(axis=1), scale


def normal_cone_member(poly: PolytopeSpec, vertex_idx: int, w) -> bool:
    """True iff w^T (v_j - v_idx) <= eps for every vertex j."""
    V = poly.vertices
    if not 0 <= vertex_idx < len(V):
        raise IndexError(f"vertex index {vertex_idx} out of range")
    slack, scale = _cone_slack(V, vertex_idx, np.asarray(w, dtype=np.float64))
    return bool(slack[0] <= CONE_EPS * scale[0])


def normal_cone_members(poly: PolytopeSpec, vertex_idx: int, W) -> np.ndarray:
    slack, scale = _cone_slack(poly.vertices, vertex_idx, np.asarray(W, dtype=np.float64))
    return slack <= CONE_EPS * scale


def sphere_samples(samples, dim, rng):
    Z = as_rng(rng).normal((samples, dim))
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


class SolidAngle(NamedTuple):
    value: float
    stderr: float
    samples: int


def solid_angle_mc(poly: PolytopeSpec, vertex_idx: int, samples: int, rng) -> SolidAngle:
    """Fraction of uniform directions on the sphere that land in the vertex's normal cone."""
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    hits = normal_cone_members(poly, vertex_idx, sphere_samples(samples, poly.ambient_dim, rng))
    p = float(hits.mean())
    return SolidAngle(p, math.sqrt(max(p * (1 - p), 0.0) / samples), samples)


def solid_angles_mc(X, samples, rng):
    """Solid angle estimate for every column of X from a shared set of
    Gaussian directions: the fraction of directions whose maximizer over the
    columns is that column (ties to the lowest index)."""
    X = np.asarray(X, dtype=np.float64)
    W = as_rng(rng).normal((samples, X.shape[0]))
    winners = np.argmax(W @ X, axis=1)
    return np.bincount(winners, minlength=X.shape[1]) / samples


def condition_number(omegas, k, variant="log") -> float:
    """kappa from per-vertex solid angles.

    log:    1 / (k ln(1 / max_i(1 - 2 w_i)))
    linear: 1 / (k max_i(1 - 2 w_i))
    """
    om = np.asarray(omegas, dtype=np.float64)
    worst = float(np.max(1.0 - 2.0 * om))
    if variant == "log":
        if np.any(om >= 0.5) or np.any(om <= 0.0):
            raise ValueError("log variant needs every omega in (0, 1/2)")
        return 1.0 / (k * math.log(1.0 / worst))
    if variant == "linear":
        if worst <= 0:
            raise ValueError("max_i(1 - 2 omega_i) must be positive")
        return 1.0 / (k * worst)
    raise ValueError(f"unknown variant {variant!r}")


def projections_needed(kappa, k, delta) -> int:
    """m = ceil(kappa k ln(k / delta))."""
    return max(1, math.ceil(kappa * k * math.log(k / delta)))


def extreme_points_bruteforce(X) -> list:
    """Indices of columns of X that are not convex combinations of the others.

    Exact duplicates count as one point, reported at its lowest index.
    One LP feasibility problem per column (HiGHS); oracle scale only.
    """
    X = np.asarray(X, dtype=np.float64)
    d, n = X.shape
    if n > 200:
        raise ValueError("bruteforce oracle is limited to n <= 200 columns")
    if n == 1:
        return [0]
    scale = max(np.abs(X).max(), 1.0)
    out = []
    for j in range(n):
        same = np.all(X == X[:, [j]], axis=0)
        if np.argmax(same) < j:
            continue
        if same.all():
            out.append(j)
            continue
        others = X[:, ~same] / scale
        A_eq = np.vstack([others, np.ones((1, others.shape[1]))])
        b_eq = np.concatenate([X[:, j] / scale, [1.0]])
        res = linprog(np.zeros(others.shape[1]), A_eq=A_eq, b_eq=b_eq, bounds=(0, None),
                      method="highs")
        if res.status == 2:
            out.append(j)
        elif res.status != 0:
            raise RuntimeError(f"LP solver failed on column {j}: {res.message}")
    return out


def sin_3pi_10_exceeds(d) -> bool:
    """Exact test of sin(3 pi / 10) > 1 / sqrt(d) for a positive integer d.

    sin(3 pi / 10) = (1 + sqrt 5) / 4, so the inequality is
    d (6 + 2 sqrt 5) > 16, i.e. 2 d sqrt 5 > 16 - 6 d, decided in integers.
    """
    d = int(d)
    if d < 1:
        raise ValueError("d must be a positive integer")
    rhs = 16 - 6 * d
    return rhs < 0 or 20 * d * d > rhs * rhs


@dataclass
class CounterexampleReport:
    d: int
    vectors_checked: int
    exhaustive: bool
    in_cone: int
    threshold_exact: bool
    omega: float
    omega_stderr: float
    frac_above: float
    frac_above_stderr: float
    samples: int

    @property
    def passed(self):
        return self.in_cone == 0 and self.threshold_exact

    def to_dict(self):
        out = dict(self.__dict__)
        out["passed"] = self.passed
        return out


def srht_counterexample_check(d, samples=100_000, rng=0, random_patterns=100_000):
    """Hadamard-type rows cannot hit a narrow normal cone.

    Embeds a regular pentagon in the first two coordinates of R^d with vertex
    p = e_2 and counts sign vectors in {+-1/sqrt d}^d lying in N_C(p): all 2^d
    of them for d <= 16, ``random_patterns`` random ones above.  Also
    estimates omega(N_C(p)) (exactly 1/5, since the cone is a 72 degree sector
    times R^{d-2}) and the fraction of directions with x_2 > 1/sqrt d.
    """
    d = int(d)
    if d < 2 or d & (d - 1):
        raise ValueError("d must be a power of two, d >= 2")
    rng = as_rng(rng)
    poly = regular_polygon(5, dim=d)
    if d <= 16:
        codes = np.arange(2 ** d, dtype=np.int64)
        bits = (codes[:, None] >> np.arange(d)) & 1
        exhaustive = True
    else:
        bits = (rng.bits64(random_patterns * d).reshape(random_patterns, d)
                >> np.uint64(63)).astype(np.int64)
        exhaustive = False
    W = (1 - 2 * bits) / math.sqrt(d)
    in_cone = int(normal_cone_members(poly, 0, W).sum())
    U = sphere_samples(samples, d, rng)
    hits = normal_cone_members(poly, 0, U)
    om = float(hits.mean())
    above = float((U[:, 1] > 1 / math.sqrt(d)).mean())
    se = lambda p: math.sqrt(max(p * (1 - p), 0.0) / samples)
    return CounterexampleReport(d, len(W), exhaustive, in_cone, sin_3pi_10_exceeds(d),
                                om, se(om), above, se(above), samples)
