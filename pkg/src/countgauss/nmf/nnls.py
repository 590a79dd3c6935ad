import numpy as np

from ..linalg import ConvergenceError, as_dense


def _proj_grad(H, G):
    return np.where(H > 0, G, np.minimum(G, 0.0))


# iterations between active-set polishing steps
POLISH_EVERY = 20


def _polish(A, Y, H):
    """Per column, least squares restricted to the current support; a
    column is replaced only if the result is feasible and no worse."""
    H = H.copy()
    changed = False
    for j in range(H.shape[1]):
        F = H[:, j] > 0
        if not F.any():
            continue
        h = np.linalg.lstsq(A[:, F], Y[:, j], rcond=None)[0]
        if np.all(h >= 0):
            old = A @ H[:, j] - Y[:, j]
            new = A[:, F] @ h - Y[:, j]
            if new @ new <= old @ old:
                H[F, j] = h
                changed = True
    return H, changed


def nnls_solve(A, Y, tol=1e-8, max_iters=5000, full_output=False):
    """Solve min ||A H - Y||_F subject to H >= 0, all columns at once.

    Projected gradient with Barzilai-Borwein steps and a backtracking
    safeguard so the objective never increases.  Every POLISH_EVERY
    iterations each column is re-solved exactly on its current support
    (kept only when feasible and no worse), which finishes the job once the
    active set is right.  Stops when the projected gradient satisfies
    ||P grad||_F <= tol * ||A^T Y||_F.

    Returns H (k x n); with ``full_output`` also a dict holding the
    objective trace, iteration count and final KKT residual.
    """
    A = as_dense(A)
    Y = as_dense(Y)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    if A.shape[0] != Y.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but Y has {Y.shape[0]}")
    if not np.any(A):
        raise ValueError("A must have a nonzero column")
    AtA = A.T @ A
    AtY = A.T @ Y
    scale = np.linalg.norm(AtY)

    def objective(H):
        R = A @ H - Y
        return 0.5 * float(np.sum(R * R))

    k, n = AtA.shape[0], AtY.shape[1]
    if scale == 0.0:
        H = np.zeros((k, n))
        info = {"iterations": 0, "residual": 0.0, "objective": [objective(H)]}
        return (H, info) if full_output else H

    H = np.maximum(np.linalg.lstsq(A, Y, rcond=None)[0], 0.0)
    G = AtA @ H - AtY
    f = objective(H)
    trace = [f]
    step = 1.0 / np.linalg.norm(AtA, 2)
    res = np.linalg.norm(_proj_grad(H, G))
    it = 0
    while res > tol * scale:
        if it >= max_iters:
            raise ConvergenceError(
                f"NNLS did not converge in {max_iters} iterations "
                f"(KKT residual {res / scale:.3e})", last=H, residual=res / scale)
        it += 1
        t = step
        for _ in range(60):
            Hn = np.maximum(H - t * G, 0.0)
            dH = Hn - H
            fn = objective(Hn)
            # sufficient decrease along the projection arc
            if fn <= f + 1e-4 * np.sum(G * dH):
                break
            t *= 0.5
        if fn > f:
            # rounding floor reached: no representable descent left
            break
        Gn = AtA @ Hn - AtY
        sy = np.sum(dH * (Gn - G))
        step = np.sum(dH * dH) / sy if sy > 0 else 2.0 * t
        H, G, f = Hn, Gn, fn
        if it % POLISH_EVERY == 0:
            Hp, changed = _polish(A, Y, H)
            fp = objective(Hp) if changed else f
            if changed and fp <= f:
                H, f = Hp, fp
                G = AtA @ H - AtY
        trace.append(f)
        res = np.linalg.norm(_proj_grad(H, G))
    if res > tol * scale and np.sqrt(2.0 * f) > 1e-12 * np.linalg.norm(Y):
        raise ConvergenceError(
            f"NNLS stalled with KKT residual {res / scale:.3e}", last=H, residual=res / scale)
    info = {"iterations": it, "residual": float(res / scale), "objective": trace}
    return (H, info) if full_output else H
