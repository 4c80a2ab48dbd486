# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-pixel kernels.

Arithmetic is written in the same order as :mod:`pec._fallback` so both
backends produce bit-identical results.
"""
from cython.parallel cimport parallel, prange
from libc.stdlib cimport free, malloc


cdef enum:
    TILE = 1024


cdef void _tile_under(const double* y, double* x, double* g, Py_ssize_t m,
                      double c, const int* K, int T) noexcept nogil:
    cdef Py_ssize_t j
    cdef int t, k
    for j in range(m):
        g[j] = y[j] + c * y[j] * (1.0 - y[j])
        x[j] = g[j]
    for t in range(T):
        for k in range(K[t]):
            for j in range(m):
                x[j] = g[j] + c * x[j] * (1.0 - x[j])
        for j in range(m):
            g[j] = x[j]


cdef void _tile_over(const double* y, double* x, double* g, Py_ssize_t m,
                     double c, const int* K, int T) noexcept nogil:
    cdef Py_ssize_t j
    cdef int t, k
    for j in range(m):
        g[j] = y[j] - c * y[j] * (1.0 - y[j])
        x[j] = g[j]
    for t in range(T):
        for k in range(K[t]):
            for j in range(m):
                x[j] = g[j] - c * x[j] * (1.0 - x[j])
        for j in range(m):
            g[j] = x[j]


def correct_flat(const double[::1] y, double[::1] out, double c, bint under,
                 const int[::1] K, int threads):
    """Run the full warm-start + block schedule on a flat buffer in place."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t ntiles = (n + TILE - 1) // TILE
    cdef Py_ssize_t i, lo, m
    cdef int T = K.shape[0]
    cdef const int* kp = &K[0]
    cdef double* g
    if out.shape[0] != n:
        raise ValueError("output buffer has wrong length")
    if n == 0:
        return
    if threads < 1:
        threads = 1
    with nogil, parallel(num_threads=threads):
        g = <double*>malloc(TILE * sizeof(double))
        if g != NULL:
            for i in prange(ntiles, schedule="static"):
                lo = i * TILE
                m = n - lo
                if m > TILE:
                    m = TILE
                if under:
                    _tile_under(&y[lo], &out[lo], g, m, c, kp, T)
                else:
                    _tile_over(&y[lo], &out[lo], g, m, c, kp, T)
            free(g)
        else:
            with gil:
                raise MemoryError()


def loe_count(const double[::1] a, const double[::1] b, int threads):
    """Count ordered pairs (p, q) whose lightness order differs between a and b."""
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t p, q
    cdef long long total = 0
    cdef double ap, bp
    if b.shape[0] != m:
        raise ValueError("lightness maps differ in length")
    if threads < 1:
        threads = 1
    with nogil:
        for p in prange(m, num_threads=threads, schedule="static"):
            ap = a[p]
            bp = b[p]
            for q in range(m):
                if (ap >= a[q]) != (bp >= b[q]):
                    total += 1
    return total
