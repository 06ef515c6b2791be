# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled jet coefficient kernels.

Same contract as ``_jetcore_py``: 1-D complex128 coefficient arrays in,
new arrays of the same length out. The scalar heads (value at the base
point) go through cmath; the O(n^2) recurrences run as C loops.
"""

import cmath

import numpy as np

IMPLEMENTATION = "cython"


def mul(a, b):
    cdef double complex[::1] av = np.ascontiguousarray(a)
    cdef double complex[::1] bv = np.ascontiguousarray(b)
    cdef Py_ssize_t n = av.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t k, j
    cdef double complex acc
    for k in range(n):
        acc = 0
        for j in range(k + 1):
            acc = acc + av[j] * bv[k - j]
        ov[k] = acc
    return out


def div(a, b):
    cdef double complex[::1] av = np.ascontiguousarray(a)
    cdef double complex[::1] bv = np.ascontiguousarray(b)
    cdef Py_ssize_t n = av.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double complex b0 = bv[0]
    cdef Py_ssize_t k, j
    cdef double complex acc
    ov[0] = av[0] / b0
    for k in range(1, n):
        acc = av[k]
        for j in range(1, k + 1):
            acc = acc - bv[j] * ov[k - j]
        ov[k] = acc / b0
    return out


def exp_(a):
    cdef double complex[::1] av = np.ascontiguousarray(a)
    cdef Py_ssize_t n = av.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t k, j
    cdef double complex acc
    ov[0] = cmath.exp(complex(av[0]))
    for k in range(1, n):
        acc = 0
        for j in range(1, k + 1):
            acc = acc + j * av[j] * ov[k - j]
        ov[k] = acc / k
    return out


def log_(a):
    cdef double complex[::1] av = np.ascontiguousarray(a)
    cdef Py_ssize_t n = av.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double complex a0 = av[0]
    cdef Py_ssize_t k, j
    cdef double complex acc
    ov[0] = cmath.log(complex(a0))
    for k in range(1, n):
        acc = k * av[k]
        for j in range(1, k):
            acc = acc - j * ov[j] * av[k - j]
        ov[k] = acc / (k * a0)
    return out


def sqrt_(a):
    cdef double complex[::1] av = np.ascontiguousarray(a)
    cdef Py_ssize_t n = av.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t k, j
    cdef double complex acc, s0
    s0 = cmath.sqrt(complex(av[0]))
    ov[0] = s0
    for k in range(1, n):
        acc = av[k]
        for j in range(1, k):
            acc = acc - ov[j] * ov[k - j]
        ov[k] = acc / (2 * s0)
    return out


def powr(a, r):
    cdef double complex[::1] av = np.ascontiguousarray(a)
    cdef Py_ssize_t n = av.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double complex rr = r
    cdef double complex a0 = av[0]
    cdef Py_ssize_t k, j
    cdef double complex acc
    ov[0] = cmath.exp(complex(rr) * cmath.log(complex(a0)))
    for k in range(1, n):
        acc = 0
        for j in range(1, k + 1):
            acc = acc + ((rr + 1) * j - k) * av[j] * ov[k - j]
        ov[k] = acc / (k * a0)
    return out


def sin_cos(a):
    cdef double complex[::1] av = np.ascontiguousarray(a)
    cdef Py_ssize_t n = av.shape[0]
    s = np.empty(n, dtype=np.complex128)
    c = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] sv = s
    cdef double complex[::1] cv = c
    cdef Py_ssize_t k, j
    cdef double complex accs, accc
    sv[0] = cmath.sin(complex(av[0]))
    cv[0] = cmath.cos(complex(av[0]))
    for k in range(1, n):
        accs = 0
        accc = 0
        for j in range(1, k + 1):
            accs = accs + j * av[j] * cv[k - j]
            accc = accc + j * av[j] * sv[k - j]
        sv[k] = accs / k
        cv[k] = -accc / k
    return s, c


def sinh_cosh(a):
    cdef double complex[::1] av = np.ascontiguousarray(a)
    cdef Py_ssize_t n = av.shape[0]
    sh = np.empty(n, dtype=np.complex128)
    ch = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] sv = sh
    cdef double complex[::1] cv = ch
    cdef Py_ssize_t k, j
    cdef double complex accs, accc
    sv[0] = cmath.sinh(complex(av[0]))
    cv[0] = cmath.cosh(complex(av[0]))
    for k in range(1, n):
        accs = 0
        accc = 0
        for j in range(1, k + 1):
            accs = accs + j * av[j] * cv[k - j]
            accc = accc + j * av[j] * sv[k - j]
        sv[k] = accs / k
        cv[k] = accc / k
    return sh, ch


def compose(h, d):
    """Series composition h(d(t)) for d with zero constant term (Horner)."""
    cdef double complex[::1] hv = np.ascontiguousarray(h)
    cdef double complex[::1] dv = np.ascontiguousarray(d)
    cdef Py_ssize_t n = hv.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    tmp = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double complex[::1] tv = tmp
    cdef Py_ssize_t idx, k, j
    cdef double complex acc
    ov[0] = hv[n - 1]
    for idx in range(n - 2, -1, -1):
        for k in range(n - 1, -1, -1):
            acc = 0
            for j in range(k + 1):
                acc = acc + ov[j] * dv[k - j]
            tv[k] = acc
        for k in range(n):
            ov[k] = tv[k]
        ov[0] = ov[0] + hv[idx]
    return out
