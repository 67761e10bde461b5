# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; semantics match ``_kernels_py`` exactly except for
floating-point summation order."""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt, log1p, pow
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

NAME = "cython"

SQUARE, ABS, HUBER, L1L2, FAIR, POWER = range(6)

DEF MAX_BISECT = 64
DEF MAX_EXPAND = 2100


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = z + <uint64_t>0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


def splitmix64(x):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] arr = np.ascontiguousarray(
        np.atleast_1d(np.asarray(x, dtype=np.uint64)).ravel())
    cdef Py_ssize_t i, n = arr.shape[0]
    out = np.empty(n, dtype=np.uint64)
    cdef cnp.uint64_t[::1] o = out
    for i in range(n):
        o[i] = _mix(arr[i])
    return out.reshape(np.shape(x))


def spmv(const int64_t[::1] indptr, const int64_t[::1] indices,
         const double[::1] data, const double[::1] x):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.zeros(n)
    cdef double[::1] y = out
    cdef Py_ssize_t i, p
    cdef double acc
    with nogil:
        for i in range(n):
            acc = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                acc = acc + data[p] * x[indices[p]]
            y[i] = acc
    return out


def countsketch(const int64_t[::1] indptr, const int64_t[::1] indices,
                const double[::1] data, Py_ssize_t n_cols, Py_ssize_t m, uint64_t seed):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.zeros((m, n_cols))
    cdef double[:, ::1] o = out
    cdef uint64_t key = _mix(seed), h
    cdef Py_ssize_t i, p, b
    cdef double s
    with nogil:
        for i in range(n):
            h = _mix(key ^ <uint64_t>i)
            b = <Py_ssize_t>((h >> 1) % <uint64_t>m)
            s = -1.0 if (h & 1) else 1.0
            for p in range(indptr[i], indptr[i + 1]):
                o[b, indices[p]] += s * data[p]
    return out


def symsketch(const int64_t[::1] indptr, const int64_t[::1] indices,
              const double[::1] data, Py_ssize_t n_cols, const double[::1] level_weights,
              uint64_t survive_seed, uint64_t bucket_seed, Py_ssize_t m):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t levels = level_weights.shape[0]
    out = np.zeros((m, n_cols))
    cdef double[:, ::1] o = out
    cdef uint64_t skey = _mix(survive_seed), bkey = _mix(bucket_seed), cid, h
    cdef Py_ssize_t lev, i, p, b
    cdef double s
    with nogil:
        for lev in range(levels):
            for i in range(n):
                cid = <uint64_t>lev * <uint64_t>n + <uint64_t>i
                if lev > 0:
                    h = _mix(skey ^ cid)
                    if (h >> (64 - lev)) != 0:
                        continue
                h = _mix(bkey ^ cid)
                b = <Py_ssize_t>((h >> 1) % <uint64_t>m)
                s = -level_weights[lev] if (h & 1) else level_weights[lev]
                for p in range(indptr[i], indptr[i + 1]):
                    o[b, indices[p]] += s * data[p]
    return out


cdef inline double _g(int kind, double param, double x) nogil:
    cdef double a = fabs(x), z
    if kind == 0:
        return a * a
    elif kind == 1:
        return a
    elif kind == 2:
        if a <= param:
            return 0.5 * a * a
        return param * (a - 0.5 * param)
    elif kind == 3:
        return a * a / (sqrt(1.0 + 0.5 * a * a) + 1.0)
    elif kind == 4:
        z = a / param
        if z < 1e-4:
            return param * param * z * z * (0.5 - z / 3.0 + z * z / 4.0)
        return param * param * (z - log1p(z))
    else:
        return pow(a, param)


cdef double _f(int kind, double param, const double* y, const double* w,
               bint weighted, Py_ssize_t n, double alpha) noexcept nogil:
    # one pass of sum_i w_i G(|y_i| / alpha); the kind switch sits outside
    # the loop so each branch is a tight loop the compiler can vectorise
    cdef Py_ssize_t i
    cdef double acc = 0.0, a, c = param, inv = 1.0 / alpha
    if weighted:
        for i in range(n):
            if w[i] != 0.0:
                acc = acc + w[i] * _g(kind, param, y[i] * inv)
        return acc
    if kind == 0:
        for i in range(n):
            a = y[i] * inv
            acc = acc + a * a
    elif kind == 1:
        for i in range(n):
            acc = acc + fabs(y[i] * inv)
    elif kind == 2:
        for i in range(n):
            a = fabs(y[i] * inv)
            if a <= c:
                acc = acc + 0.5 * a * a
            else:
                acc = acc + c * (a - 0.5 * c)
    else:
        for i in range(n):
            acc = acc + _g(kind, param, y[i] * inv)
    return acc


def orlicz_roots(int kind, double param, rows, weights, double rel_tol):
    cdef double[:, ::1] Y = np.ascontiguousarray(np.atleast_2d(rows), dtype=np.float64)
    cdef Py_ssize_t k = Y.shape[0], n = Y.shape[1], r, i, it
    cdef bint weighted = weights is not None
    cdef double[::1] w = (np.ascontiguousarray(weights, dtype=np.float64)
                          if weighted else np.ones(1))
    out = np.zeros(k)
    cdef double[::1] o = out
    cdef double s, a0, lo, hi, mid, wi, v
    with nogil:
        for r in range(k):
            s = 0.0
            a0 = 0.0
            for i in range(n):
                wi = w[i] if weighted else 1.0
                v = fabs(Y[r, i])
                s = s + wi * v
                if wi > 0.0 and v > a0:
                    a0 = v
            if s <= 0.0:
                continue
            lo = a0
            hi = a0
            if _f(kind, param, &Y[r, 0], &w[0], weighted, n, a0) >= 1.0:
                for it in range(MAX_EXPAND):
                    lo = hi
                    hi = hi * 2.0
                    if _f(kind, param, &Y[r, 0], &w[0], weighted, n, hi) < 1.0:
                        break
            else:
                for it in range(MAX_EXPAND):
                    hi = lo
                    lo = lo * 0.5
                    if _f(kind, param, &Y[r, 0], &w[0], weighted, n, lo) >= 1.0:
                        break
            for it in range(MAX_BISECT):
                if hi - lo <= rel_tol * hi:
                    break
                mid = 0.5 * (lo + hi)
                if _f(kind, param, &Y[r, 0], &w[0], weighted, n, mid) >= 1.0:
                    lo = mid
                else:
                    hi = mid
            o[r] = 0.5 * (lo + hi)
    return out
