"""Dense symmetric eigensolver (cyclic Jacobi rotations) and Cholesky helpers.

Kept in-repo so node/weight construction and the spectral solves are fully
deterministic and dependency-free at desk scale (matrices up to a few hundred).
"""

import numpy as np

from .errors import ConvergenceError


def jacobi_eigh(matrix, tol=1e-15, max_sweeps=60):
    """All eigenvalues/eigenvectors of a real symmetric matrix.

    Cyclic-by-rows Jacobi with a threshold on the first sweeps.  Returns
    (eigenvalues ascending, eigenvectors as columns).  Eigenvector signs are
    fixed so the largest-magnitude component of each column is positive.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("jacobi_eigh expects a square matrix")
    n = a.shape[0]
    if not np.allclose(a, a.T, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("jacobi_eigh expects a symmetric matrix")
    a = (a + a.T) / 2.0
    v = np.eye(n)
    if n == 1:
        return np.diag(a).copy(), v

    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n), v
    for sweep in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= tol * norm:
            break
        thresh = off / n if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh or apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise ConvergenceError("Jacobi eigensolver did not converge in "
                               f"{max_sweeps} sweeps")

    eigvals = np.diag(a).copy()
    order = np.argsort(eigvals, kind="stable")
    eigvals = eigvals[order]
    v = v[:, order]
    # deterministic sign convention
    for j in range(n):
        i = int(np.argmax(np.abs(v[:, j])))
        if v[i, j] < 0.0:
            v[:, j] = -v[:, j]
    return eigvals, v


def tridiag_eigvals_bisect(diag, off, max_iter=90):
    """Eigenvalues of a symmetric tridiagonal matrix by Sturm bisection.

    Vectorized over all n targets at once; O(n^2) scalar work total, so large
    recurrence matrices stay cheap.  Deterministic; accuracy set by the
    bisection depth (the quadrature layer Newton-polishes the results).
    """
    d = np.asarray(diag, dtype=float)
    e = np.asarray(off, dtype=float)
    n = d.size
    if n == 1:
        return d.copy()
    if e.size != n - 1:
        raise ValueError("off-diagonal must have length n-1")
    e2 = e * e
    rad = np.zeros(n)
    rad[:-1] += np.abs(e)
    rad[1:] += np.abs(e)
    lo = np.full(n, np.min(d - rad))
    hi = np.full(n, np.max(d + rad))
    k = np.arange(n)
    tiny = 1e-300

    def count_below(xs):
        q = d[0] - xs
        cnt = (q < 0.0).astype(np.int64)
        for i in range(1, n):
            q = np.where(np.abs(q) < tiny, -tiny, q)
            q = d[i] - xs - e2[i - 1] / q
            cnt += q < 0.0
        return cnt

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        below = count_below(mid) <= k
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) <= 1e-14 * max(1.0, np.max(np.abs(d + rad))):
            break
    return 0.5 * (lo + hi)


def cholesky_lower(matrix):
    """Lower Cholesky factor of a symmetric positive-definite matrix."""
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - L[j, :j] @ L[j, :j]
        if d <= 0.0:
            raise np.linalg.LinAlgError("matrix not positive definite")
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def eigh_generalized(a, b):
    """Solve a v = lambda b v for symmetric a and SPD b.

    Reduction through the Cholesky factor of b, then jacobi_eigh.
    Returns (eigenvalues ascending, eigenvectors with v.T b v = I).
    """
    L = cholesky_lower(b)
    # C = L^{-1} a L^{-T}
    y = np.linalg.solve(L, np.asarray(a, dtype=float))
    c = np.linalg.solve(L, y.T).T
    c = (c + c.T) / 2.0
    w, u = jacobi_eigh(c)
    vecs = np.linalg.solve(L.T, u)
    for j in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[i, j] < 0.0:
            vecs[:, j] = -vecs[:, j]
    return w, vecs
