"""Independent reference implementations used only by the tests."""
import itertools
import math

import numpy as np
from scipy import integrate


def triple_loop_matmul(A, B):
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    n, k = A.shape
    k2, m = B.shape
    assert k == k2
    out = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            s = 0.0
            for t in range(k):
                s += A[i, t] * B[t, j]
            out[i, j] = s
    return out


def dense_countsketch(hash, sign, B):
    n = len(hash)
    S = np.zeros((B, n))
    for i in range(n):
        S[hash[i], i] = sign[i]
    return S


def jacobi_singular_values(A, sweeps=100, tol=1e-15):
    """One-sided Jacobi: rotate column pairs until mutually orthogonal."""
    U = np.array(A, dtype=np.float64)
    if U.shape[0] < U.shape[1]:
        U = U.T.copy()
    n = U.shape[1]
    for _ in range(sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                a = U[:, p] @ U[:, p]
                b = U[:, q] @ U[:, q]
                c = U[:, p] @ U[:, q]
                if abs(c) <= tol * math.sqrt(a * b) or c == 0.0:
                    continue
                off = max(off, abs(c) / math.sqrt(a * b))
                zeta = (b - a) / (2 * c)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1 + zeta * zeta))
                cs = 1 / math.sqrt(1 + t * t)
                sn = cs * t
                up = U[:, p].copy()
                U[:, p] = cs * up - sn * U[:, q]
                U[:, q] = sn * up + cs * U[:, q]
        if off <= tol:
            break
    return np.sort(np.linalg.norm(U, axis=0))[::-1]


def _logpdf_normal(x, var):
    return -0.5 * math.log(2 * math.pi * var) - x * x / (2 * var)


def kl_quadrature_1d(var):
    """KL(N(0,1) || N(0, var)) by adaptive quadrature."""
    f = lambda x: math.exp(_logpdf_normal(x, 1.0)) * (_logpdf_normal(x, 1.0) - _logpdf_normal(x, var))
    val, _ = integrate.quad(f, -np.inf, np.inf, epsabs=1e-12, epsrel=1e-12)
    return val


def kl_quadrature_2d(Sigma, lim=12.0):
    """KL(N(0,I_2) || N(0,Sigma)) by 2-D quadrature on [-lim, lim]^2."""
    Sigma = np.asarray(Sigma, dtype=np.float64)
    Si = np.linalg.inv(Sigma)
    logdet = math.log(np.linalg.det(Sigma))

    def f(y, x):
        logp = -math.log(2 * math.pi) - 0.5 * (x * x + y * y)
        q = Si[0, 0] * x * x + 2 * Si[0, 1] * x * y + Si[1, 1] * y * y
        logq = -math.log(2 * math.pi) - 0.5 * logdet - 0.5 * q
        return math.exp(logp) * (logp - logq)

    val, _ = integrate.dblquad(f, -lim, lim, -lim, lim, epsabs=1e-11, epsrel=1e-11)
    return val


def exhaustive_fro_sq(U, B):
    """E ||I - U^T S^T S U||_F^2 over all B^n hashes and 2^n signs."""
    U = np.asarray(U, dtype=np.float64)
    n, d = U.shape
    total = 0.0
    count = 0
    for h in itertools.product(range(B), repeat=n):
        for s in itertools.product((-1.0, 1.0), repeat=n):
            S = dense_countsketch(h, s, B)
            D = np.eye(d) - U.T @ S.T @ S @ U
            total += float(np.sum(D * D))
            count += 1
    return total / count, count
