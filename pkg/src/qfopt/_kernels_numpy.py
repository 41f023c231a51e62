"""Pure-numpy reference versions of the hot kernels.

Every function here has a twin with the same signature in
``_kernels_numba``; :mod:`qfopt._backend` decides which one is used.
"""

import numpy as np
from scipy.signal import lfilter

NAME = "numpy"

_BIG = 1e20


def _bound(v, dv):
    neg = dv < 0.0
    if not neg.any():
        return _BIG
    return float(np.min(-v[neg] / dv[neg]))


def fn_solve(X, y, tau, tol, max_iter, step):
    """Frisch-Newton interior point for ``min sum rho_tau(y - X b)``.

    Works on the bounded dual ``max y'a  s.t.  X'a = (1-tau) X'1, 0 <= a <= 1``.

    Returns ``(coef, iterations, gap, status)`` where ``status`` is 0 on
    convergence, 1 when the iteration cap was hit and 2 when a normal-equation
    system was not positive definite.
    """
    n, d = X.shape
    c = -y
    x = np.full(n, 1.0 - tau)
    s = 1.0 - x
    b = X.T @ x
    try:
        yd = np.linalg.solve(X.T @ X, X.T @ c)
    except np.linalg.LinAlgError:
        return np.zeros(d), 0, np.inf, 2
    r = c - X @ yd
    r = r + 0.001 * (r == 0.0)
    z = np.where(r > 0.0, r, 0.0)
    w = z - r
    gap = c @ x - yd @ b + w.sum()
    it = 0
    while gap > tol and it < max_iter:
        it += 1
        q = 1.0 / (z / x + w / s)
        r = z - w
        Xq = X * q[:, None]
        aqa = X.T @ Xq
        rhs = Xq.T @ r
        try:
            dy = np.linalg.solve(aqa, rhs)
        except np.linalg.LinAlgError:
            return -yd, it, gap, 2
        dx = q * (X @ dy - r)
        ds = -dx
        dz = -z * (dx / x + 1.0)
        dw = -w * (ds / s + 1.0)
        fp = min(_bound(x, dx), _bound(s, ds))
        fd = min(_bound(w, dw), _bound(z, dz))
        if min(fp, fd) < 1.0:
            mu = z @ x + w @ s
            g = (z + fd * dz) @ (x + fp * dx) + (w + fd * dw) @ (s + fp * ds)
            mu = mu * (g / mu) ** 3 / (2.0 * n)
            xinv = 1.0 / x
            sinv = 1.0 / s
            # second-order terms scaled to keep the corrector an exact Newton step
            dxdz = dx * dz * xinv
            dsdw = ds * dw * sinv
            xi = mu * (xinv - sinv)
            rhs = rhs + X.T @ (q * (dxdz - dsdw - xi))
            try:
                dy = np.linalg.solve(aqa, rhs)
            except np.linalg.LinAlgError:
                return -yd, it, gap, 2
            dx = q * (X @ dy + xi - r - dxdz + dsdw)
            ds = -dx
            dz = mu * xinv - z - xinv * z * dx - dxdz
            dw = mu * sinv - w - sinv * w * ds - dsdw
            fp = min(_bound(x, dx), _bound(s, ds))
            fd = min(_bound(w, dw), _bound(z, dz))
        fp = min(step * fp, 1.0)
        fd = min(step * fd, 1.0)
        x += fp * dx
        s += fp * ds
        yd += fd * dy
        w += fd * dw
        z += fd * dz
        gap = c @ x - yd @ b + w.sum()
    status = 0 if gap <= tol else 1
    return -yd, it, gap, status


def ar_filter(innov, b, y0):
    """``y[0] = y0``, ``y[t] = b*y[t-1] + innov[t]`` for t >= 1."""
    out = np.empty(innov.shape[0])
    out[0] = y0
    out[1:] = lfilter([1.0], [1.0, -b], innov[1:], zi=[b * y0])[0]
    return out


def garch_path(eps, b0, b1, b2, b3, sigma2_init):
    """GARCH(1,1) recursion driven by the innovations ``eps``.

    ``sigma2[0] = sigma2_init``, ``sigma2[t] = b1 + b2*y[t-1]**2 + b3*sigma2[t-1]``
    and ``y[t] = b0 + sqrt(sigma2[t])*eps[t]``.
    """
    n = eps.shape[0]
    y = np.empty(n)
    sig2 = np.empty(n)
    cur = sigma2_init
    for t in range(n):
        if t > 0:
            cur = b1 + b2 * y[t - 1] * y[t - 1] + b3 * cur
        sig2[t] = cur
        y[t] = b0 + np.sqrt(cur) * eps[t]
    return y, sig2


def hac_bartlett(v, bandwidth):
    """Bartlett long-run variance with symmetric trimming, normalised by P."""
    p = v.shape[0]
    dm = v - v.mean()
    lo, hi = bandwidth, p - bandwidth
    core = dm[lo:hi]
    total = core @ core
    for k in range(1, bandwidth + 1):
        lam = 1.0 - k / (bandwidth + 1.0)
        total += lam * (core @ dm[lo + k:hi + k] + core @ dm[lo - k:hi - k])
    return total / p


def block_variance(panel, block_length):
    """Block-of-sums bootstrap variance for each row of ``panel`` (kappa x P).

    Blocks are consecutive runs of ``block_length`` columns; a trailing short
    block is weighted by its own length.
    """
    kappa, p = panel.shape
    dev = panel - panel.mean(axis=1, keepdims=True)
    n_full = p // block_length
    full = n_full * block_length
    sums = dev[:, :full].reshape(kappa, n_full, block_length).sum(axis=2)
    acc = (sums * sums).sum(axis=1) / block_length
    n_blocks = n_full
    if full < p:
        tail = dev[:, full:].sum(axis=1)
        acc += tail * tail / (p - full)
        n_blocks += 1
    return acc / n_blocks
