# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled O(N^2) recursions for the Volterra solvers.

Each history sum has the form sum_j k[n - j] * x[j]. The kernel is stored
reversed once so that sum runs forward over two contiguous arrays, and the
dot product keeps four partial sums to break the floating-point add chain.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double _dot(const double* a, const double* b, Py_ssize_t m) noexcept nogil:
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t i = 0
    while i + 4 <= m:
        s0 += a[i] * b[i]
        s1 += a[i + 1] * b[i + 1]
        s2 += a[i + 2] * b[i + 2]
        s3 += a[i + 3] * b[i + 3]
        i += 4
    while i < m:
        s0 += a[i] * b[i]
        i += 1
    return (s0 + s1) + (s2 + s3)


def relaxation_recursion(const double[::1] k, double mu, double dt):
    cdef Py_ssize_t npts = k.shape[0]
    cdef Py_ssize_t n, last = npts - 1
    cdef double k0 = k[0]
    cdef double pre = 2.0 * dt / (2.0 + k0 * dt)
    cdef double diag = 1.0 / dt - mu + 0.5 * k0
    cdef double src = 0.5 * dt * mu
    cdef double acc
    s_arr = np.empty(npts, dtype=np.float64)
    ds_arr = np.zeros(npts, dtype=np.float64)
    kr_arr = np.ascontiguousarray(np.asarray(k)[::-1])
    cdef double[::1] s = s_arr
    cdef double[::1] ds = ds_arr
    cdef const double[::1] kr = kr_arr
    s[0] = 1.0
    with nogil:
        for n in range(npts - 1):
            # sum_{j=1}^{n-1} k[n-j] ds[j];  k[n-j] == kr[last-n+j]
            acc = _dot(&kr[last - n + 1], &ds[1], n - 1) if n > 1 else 0.0
            s[n + 1] = pre * (s[n] * diag + src * k[n] - acc)
            ds[n] = s[n + 1] - s[n]
    return s_arr


def resolvent_recursion(const double[::1] k, double dt):
    cdef Py_ssize_t npts = k.shape[0]
    cdef Py_ssize_t n, last = npts - 1
    cdef double denom = 1.0 + 0.5 * dt * k[0]
    cdef double acc
    b_arr = np.empty(npts, dtype=np.float64)
    kr_arr = np.ascontiguousarray(np.asarray(k)[::-1])
    cdef double[::1] b = b_arr
    cdef const double[::1] kr = kr_arr
    b[0] = 1.0
    with nogil:
        for n in range(1, npts):
            acc = 0.5 * k[n] * b[0]
            if n > 1:
                acc += _dot(&kr[last - n + 1], &b[1], n - 1)
            b[n] = (1.0 - dt * acc) / denom
    return b_arr


def trapezoid_convolution(const double[::1] f, const double[::1] g, double dt):
    cdef Py_ssize_t npts = f.shape[0]
    cdef Py_ssize_t n, last = npts - 1
    cdef double acc
    out_arr = np.zeros(npts, dtype=np.float64)
    fr_arr = np.ascontiguousarray(np.asarray(f)[::-1])
    cdef double[::1] out = out_arr
    cdef const double[::1] fr = fr_arr
    with nogil:
        for n in range(1, npts):
            acc = 0.5 * (f[n] * g[0] + f[0] * g[n])
            if n > 1:
                acc += _dot(&fr[last - n + 1], &g[1], n - 1)
            out[n] = dt * acc
    return out_arr
