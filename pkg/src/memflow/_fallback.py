"""Pure numpy versions of the recursions in ``_core.pyx``.

Same arithmetic, same argument conventions; used when the extension is not
built or when ``MEMFLOW_BACKEND=python``.
"""

import numpy as np


def relaxation_recursion(k, mu, dt):
    k = np.ascontiguousarray(k, dtype=np.float64)
    npts = k.shape[0]
    k0 = k[0]
    pre = 2.0 * dt / (2.0 + k0 * dt)
    diag = 1.0 / dt - mu + 0.5 * k0
    src = 0.5 * dt * mu
    s = np.empty(npts)
    ds = np.zeros(npts)
    s[0] = 1.0
    for n in range(npts - 1):
        # sum_{j=1}^{n-1} k[n-j] * ds[j]
        acc = np.dot(k[n - 1:0:-1], ds[1:n]) if n > 1 else 0.0
        s[n + 1] = pre * (s[n] * diag + src * k[n] - acc)
        ds[n] = s[n + 1] - s[n]
    return s


def resolvent_recursion(k, dt):
    k = np.ascontiguousarray(k, dtype=np.float64)
    npts = k.shape[0]
    denom = 1.0 + 0.5 * dt * k[0]
    b = np.empty(npts)
    b[0] = 1.0
    for n in range(1, npts):
        acc = 0.5 * k[n] * b[0]
        if n > 1:
            acc += np.dot(k[n - 1:0:-1], b[1:n])
        b[n] = (1.0 - dt * acc) / denom
    return b


def trapezoid_convolution(f, g, dt):
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    npts = f.shape[0]
    full = np.convolve(f, g)[:npts]
    out = dt * (full - 0.5 * (f * g[0] + f[0] * g))
    out[0] = 0.0
    return out
