"""Independent reference computations used to cross-check the library.

Everything here deliberately avoids the code paths it validates: the
eigenvalue oracle reduces to tridiagonal form with its own Householder
sweep and then brackets each eigenvalue by bisection on Sturm sign counts;
the norm oracle is plain power iteration on the Gram operator; the filter
oracle sums explicit matrix powers.
"""

import numpy as np


def householder_tridiagonal(s):
    """Reduce a symmetric matrix to tridiagonal form by Householder reflections.

    Returns (diag, offdiag) of an orthogonally similar tridiagonal matrix.
    """
    a = np.array(s, dtype=float)
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        alpha = -norm_x if x[0] >= 0 else norm_x
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        block = a[k + 1:, k + 1:]
        w = block @ v
        w -= (v @ w) * v
        block -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        a[k + 1, k] = a[k, k + 1] = alpha
        a[k + 2:, k] = 0.0
        a[k, k + 2:] = 0.0
    return np.diag(a).copy(), np.diag(a, -1).copy()


def sturm_count(diag, off, shifts):
    """Number of eigenvalues of the tridiagonal matrix strictly below each shift."""
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    n = diag.shape[0]
    off_sq = off * off
    pivmin = np.finfo(float).tiny * max(1.0, float(off_sq.max()) if n > 1 else 1.0)
    count = np.zeros(shifts.shape, dtype=np.int64)
    q = diag[0] - shifts
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count += q < 0
    for i in range(1, n):
        q = (diag[i] - shifts) - off_sq[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def sturm_eigenvalues(s, tol=1e-10):
    """All eigenvalues of a symmetric matrix by bisection on Sturm counts."""
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    diag, off = householder_tridiagonal(s)
    radius = np.zeros(n)
    if n > 1:
        radius[:-1] += np.abs(off)
        radius[1:] += np.abs(off)
    lo = np.full(n, float(np.min(diag - radius)))
    hi = np.full(n, float(np.max(diag + radius)))
    scale = max(1.0, float(np.max(np.abs(lo))), float(np.max(np.abs(hi))))
    targets = np.arange(n)
    while float(np.max(hi - lo)) > tol * scale:
        mid = 0.5 * (lo + hi)
        counts = sturm_count(diag, off, mid)
        go_up = counts <= targets
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    return 0.5 * (lo + hi)


def power_iteration_norm(m, iters=5000, seed=0):
    """Spectral norm via power iteration on the Gram operator m^T m."""
    m = np.asarray(m, dtype=float)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(m.shape[1])
    x /= np.linalg.norm(x)
    for _ in range(iters):
        y = m.T @ (m @ x)
        norm_y = np.linalg.norm(y)
        if norm_y == 0.0:
            return 0.0
        x = y / norm_y
    return float(np.sqrt(x @ (m.T @ (m @ x))))


def polynomial_filter_matrix(coeffs, s):
    """Explicit power sum: sum_t h_t s^t."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    power = np.eye(s.shape[0])
    for c in coeffs:
        out += c * power
        power = power @ s
    return out


def random_symmetric(n, rng, scale=1.0):
    a = rng.standard_normal((n, n)) * scale
    return (a + a.T) / 2.0
