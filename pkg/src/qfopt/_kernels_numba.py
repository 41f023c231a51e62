"""Numba-compiled versions of the hot kernels (loop form).

Signatures and semantics match ``_kernels_numpy`` exactly.
"""

import numpy as np
from numba import njit

NAME = "numba"

_BIG = 1e20
_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _solve_spd(a, rhs):
    # Cholesky solve for small dense SPD systems; returns (solution, ok)
    d = a.shape[0]
    low = np.zeros((d, d))
    for j in range(d):
        acc = a[j, j]
        for k in range(j):
            acc -= low[j, k] * low[j, k]
        if not acc > 0.0:
            return np.zeros(d), False
        low[j, j] = np.sqrt(acc)
        for i in range(j + 1, d):
            acc = a[i, j]
            for k in range(j):
                acc -= low[i, k] * low[j, k]
            low[i, j] = acc / low[j, j]
    tmp = np.empty(d)
    for i in range(d):
        acc = rhs[i]
        for k in range(i):
            acc -= low[i, k] * tmp[k]
        tmp[i] = acc / low[i, i]
    out = np.empty(d)
    for i in range(d - 1, -1, -1):
        acc = tmp[i]
        for k in range(i + 1, d):
            acc -= low[k, i] * out[k]
        out[i] = acc / low[i, i]
    return out, True


@njit(**_JIT)
def _bound(v, dv):
    out = _BIG
    for i in range(v.shape[0]):
        if dv[i] < 0.0:
            cand = -v[i] / dv[i]
            if cand < out:
                out = cand
    return out


@njit(**_JIT)
def _gap(c, x, yd, b, w):
    acc = 0.0
    for i in range(c.shape[0]):
        acc += c[i] * x[i] + w[i]
    for j in range(b.shape[0]):
        acc -= yd[j] * b[j]
    return acc


@njit(**_JIT)
def _weighted_normal(X, q, r, aqa, rhs):
    n, d = X.shape
    aqa[:, :] = 0.0
    rhs[:] = 0.0
    for i in range(n):
        qi = q[i]
        for j in range(d):
            xij = X[i, j] * qi
            rhs[j] += xij * r[i]
            for k in range(j + 1):
                aqa[j, k] += xij * X[i, k]
    for j in range(d):
        for k in range(j + 1, d):
            aqa[j, k] = aqa[k, j]


@njit(**_JIT)
def fn_solve(X, y, tau, tol, max_iter, step):
    n, d = X.shape
    c = -y
    x = np.full(n, 1.0 - tau)
    s = 1.0 - x
    b = np.zeros(d)
    xtx = np.zeros((d, d))
    xtc = np.zeros(d)
    for i in range(n):
        for j in range(d):
            b[j] += X[i, j] * x[i]
            xtc[j] += X[i, j] * c[i]
            for k in range(d):
                xtx[j, k] += X[i, j] * X[i, k]
    yd, ok = _solve_spd(xtx, xtc)
    if not ok:
        return np.zeros(d), 0, np.inf, 2
    r = np.empty(n)
    z = np.empty(n)
    w = np.empty(n)
    for i in range(n):
        acc = c[i]
        for j in range(d):
            acc -= X[i, j] * yd[j]
        if acc == 0.0:
            acc = 0.001
        r[i] = acc
        z[i] = acc if acc > 0.0 else 0.0
        w[i] = z[i] - acc
    gap = _gap(c, x, yd, b, w)

    q = np.empty(n)
    dx = np.empty(n)
    ds = np.empty(n)
    dz = np.empty(n)
    dw = np.empty(n)
    aqa = np.zeros((d, d))
    rhs = np.zeros(d)
    extra = np.empty(n)
    it = 0
    while gap > tol and it < max_iter:
        it += 1
        for i in range(n):
            q[i] = 1.0 / (z[i] / x[i] + w[i] / s[i])
            r[i] = z[i] - w[i]
        _weighted_normal(X, q, r, aqa, rhs)
        dy, ok = _solve_spd(aqa, rhs)
        if not ok:
            return -yd, it, gap, 2
        for i in range(n):
            acc = -r[i]
            for j in range(d):
                acc += X[i, j] * dy[j]
            dx[i] = q[i] * acc
            ds[i] = -dx[i]
            dz[i] = -z[i] * (dx[i] / x[i] + 1.0)
            dw[i] = -w[i] * (ds[i] / s[i] + 1.0)
        fp = min(_bound(x, dx), _bound(s, ds))
        fd = min(_bound(w, dw), _bound(z, dz))
        if min(fp, fd) < 1.0:
            mu = 0.0
            g = 0.0
            for i in range(n):
                mu += z[i] * x[i] + w[i] * s[i]
                g += (z[i] + fd * dz[i]) * (x[i] + fp * dx[i])
                g += (w[i] + fd * dw[i]) * (s[i] + fp * ds[i])
            mu = mu * (g / mu) ** 3 / (2.0 * n)
            rhs2 = rhs.copy()
            for i in range(n):
                dxdz = dx[i] * dz[i] / x[i]
                dsdw = ds[i] * dw[i] / s[i]
                xi = mu * (1.0 / x[i] - 1.0 / s[i])
                extra[i] = xi - dxdz + dsdw
                v = q[i] * (dxdz - dsdw - xi)
                for j in range(d):
                    rhs2[j] += X[i, j] * v
            dy, ok = _solve_spd(aqa, rhs2)
            if not ok:
                return -yd, it, gap, 2
            for i in range(n):
                acc = extra[i] - r[i]
                for j in range(d):
                    acc += X[i, j] * dy[j]
                dxi = q[i] * acc
                xinv = 1.0 / x[i]
                sinv = 1.0 / s[i]
                dxdz = dx[i] * dz[i] * xinv
                dsdw = ds[i] * dw[i] * sinv
                dx[i] = dxi
                ds[i] = -dxi
                dz[i] = mu * xinv - z[i] - xinv * z[i] * dxi - dxdz
                dw[i] = mu * sinv - w[i] + sinv * w[i] * dxi - dsdw
            fp = min(_bound(x, dx), _bound(s, ds))
            fd = min(_bound(w, dw), _bound(z, dz))
        fp = min(step * fp, 1.0)
        fd = min(step * fd, 1.0)
        for i in range(n):
            x[i] += fp * dx[i]
            s[i] += fp * ds[i]
            w[i] += fd * dw[i]
            z[i] += fd * dz[i]
        for j in range(d):
            yd[j] += fd * dy[j]
        gap = _gap(c, x, yd, b, w)
    status = 0 if gap <= tol else 1
    return -yd, it, gap, status


@njit(**_JIT)
def ar_filter(innov, b, y0):
    n = innov.shape[0]
    out = np.empty(n)
    out[0] = y0
    for t in range(1, n):
        out[t] = b * out[t - 1] + innov[t]
    return out


@njit(**_JIT)
def garch_path(eps, b0, b1, b2, b3, sigma2_init):
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


@njit(**_JIT)
def hac_bartlett(v, bandwidth):
    p = v.shape[0]
    mean = 0.0
    for t in range(p):
        mean += v[t]
    mean /= p
    total = 0.0
    for t in range(bandwidth, p - bandwidth):
        dt = v[t] - mean
        acc = dt * dt
        for k in range(1, bandwidth + 1):
            lam = 1.0 - k / (bandwidth + 1.0)
            acc += lam * dt * ((v[t + k] - mean) + (v[t - k] - mean))
        total += acc
    return total / p


@njit(**_JIT)
def block_variance(panel, block_length):
    kappa, p = panel.shape
    out = np.empty(kappa)
    n_blocks = (p + block_length - 1) // block_length
    for s in range(kappa):
        mean = 0.0
        for t in range(p):
            mean += panel[s, t]
        mean /= p
        acc = 0.0
        for k in range(n_blocks):
            lo = k * block_length
            hi = min(lo + block_length, p)
            part = 0.0
            for t in range(lo, hi):
                part += panel[s, t] - mean
            acc += part * part / (hi - lo)
        out[s] = acc / n_blocks
    return out
