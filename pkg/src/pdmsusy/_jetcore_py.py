"""Pure-Python jet coefficient kernels (numpy fallback).

Every function operates on 1-D complex128 arrays of truncated power-series
coefficients c[k] = f^(k)/k! and returns a new array of the same length.
Callers (``jets``) are responsible for singularity floors on leading
coefficients; these kernels assume the recurrences are well posed.
"""

import cmath

import numpy as np

IMPLEMENTATION = "python"


def mul(a, b):
    n = a.shape[0]
    return np.convolve(a, b)[:n].astype(np.complex128, copy=False)


def div(a, b):
    n = a.shape[0]
    out = np.empty(n, dtype=np.complex128)
    b0 = b[0]
    out[0] = a[0] / b0
    for k in range(1, n):
        acc = a[k] - np.dot(b[1:k + 1], out[k - 1::-1])
        out[k] = acc / b0
    return out


def exp_(a):
    n = a.shape[0]
    out = np.empty(n, dtype=np.complex128)
    out[0] = cmath.exp(a[0])
    ja = np.arange(1, n) * a[1:]
    for k in range(1, n):
        out[k] = np.dot(ja[:k], out[k - 1::-1]) / k
    return out


def log_(a):
    n = a.shape[0]
    out = np.empty(n, dtype=np.complex128)
    a0 = a[0]
    out[0] = cmath.log(a0)
    for k in range(1, n):
        acc = a[k]
        if k > 1:
            jl = np.arange(1, k) * out[1:k]
            acc -= np.dot(jl, a[k - 1:0:-1]) / k
        out[k] = acc / a0
    return out


def sqrt_(a):
    n = a.shape[0]
    out = np.empty(n, dtype=np.complex128)
    s0 = cmath.sqrt(a[0])
    out[0] = s0
    for k in range(1, n):
        acc = a[k]
        if k > 1:
            acc -= np.dot(out[1:k], out[k - 1:0:-1])
        out[k] = acc / (2.0 * s0)
    return out


def powr(a, r):
    n = a.shape[0]
    out = np.empty(n, dtype=np.complex128)
    a0 = a[0]
    out[0] = cmath.exp(r * cmath.log(a0))
    for k in range(1, n):
        acc = 0.0 + 0.0j
        for j in range(1, k + 1):
            acc += ((r + 1.0) * j - k) * a[j] * out[k - j]
        out[k] = acc / (k * a0)
    return out


def sin_cos(a):
    n = a.shape[0]
    s = np.empty(n, dtype=np.complex128)
    c = np.empty(n, dtype=np.complex128)
    s[0] = cmath.sin(a[0])
    c[0] = cmath.cos(a[0])
    ja = np.arange(1, n) * a[1:]
    for k in range(1, n):
        s[k] = np.dot(ja[:k], c[k - 1::-1]) / k
        c[k] = -np.dot(ja[:k], s[k - 1::-1]) / k
    return s, c


def sinh_cosh(a):
    n = a.shape[0]
    sh = np.empty(n, dtype=np.complex128)
    ch = np.empty(n, dtype=np.complex128)
    sh[0] = cmath.sinh(a[0])
    ch[0] = cmath.cosh(a[0])
    ja = np.arange(1, n) * a[1:]
    for k in range(1, n):
        sh[k] = np.dot(ja[:k], ch[k - 1::-1]) / k
        ch[k] = np.dot(ja[:k], sh[k - 1::-1]) / k
    return sh, ch


def compose(h, d):
    """Series composition h(d(t)) for d with zero constant term (Horner)."""
    n = h.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    out[0] = h[n - 1]
    for idx in range(n - 2, -1, -1):
        out = np.convolve(out, d)[:n]
        out[0] += h[idx]
    return out
