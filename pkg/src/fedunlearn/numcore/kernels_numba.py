"""Numba @njit build of the hot kernels.

Same function set as kernels_numpy.py. Explicit loops instead of BLAS: the
fixed per-element summation order keeps every run bit-reproducible
regardless of threading in the BLAS underneath numpy, and the fused
elementwise kernels (softmax_xent, adam_update) beat numpy's per-call
overhead at desk scale. The matmul kernels trade peak throughput for that
fixed order; benchmarks/bench_kernels.py measures both builds. First call
per process compiles; cache=True persists the compilation.
"""

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def affine(x, w, b):
    # j-outer keeps w rows contiguous for SIMD; per-element accumulation
    # order (ascending j, bias last) matches the naive triple loop bit for bit
    n, d = x.shape
    dout = w.shape[1]
    out = np.zeros((n, dout))
    for i in range(n):
        for j in range(d):
            xij = x[i, j]
            for k in range(dout):
                out[i, k] += xij * w[j, k]
        for k in range(dout):
            out[i, k] += b[k]
    return out


@njit(cache=True)
def affine_relu(x, w, b):
    n, d = x.shape
    dout = w.shape[1]
    out = np.zeros((n, dout))
    for i in range(n):
        for j in range(d):
            xij = x[i, j]
            for k in range(dout):
                out[i, k] += xij * w[j, k]
        for k in range(dout):
            s = out[i, k] + b[k]
            out[i, k] = s if s > 0.0 else 0.0
    return out


@njit(cache=True)
def matmul_tn(a, b):
    n, da = a.shape
    db = b.shape[1]
    out = np.zeros((da, db))
    for i in range(n):
        for j in range(da):
            aij = a[i, j]
            for k in range(db):
                out[j, k] += aij * b[i, k]
    return out


@njit(cache=True)
def matmul_nt(a, b):
    n, d = a.shape
    dout = b.shape[0]
    out = np.empty((n, dout))
    for i in range(n):
        for k in range(dout):
            s = 0.0
            for j in range(d):
                s += a[i, j] * b[k, j]
            out[i, k] = s
    return out


@njit(cache=True)
def colsum(a):
    n, d = a.shape
    out = np.zeros(d)
    for i in range(n):
        for j in range(d):
            out[j] += a[i, j]
    return out


@njit(cache=True)
def relu_backward(d, activated):
    n, w = d.shape
    out = np.empty((n, w))
    for i in range(n):
        for j in range(w):
            out[i, j] = d[i, j] if activated[i, j] > 0.0 else 0.0
    return out


@njit(cache=True)
def softmax_xent(logits, labels):
    n, c = logits.shape
    dlogits = np.empty((n, c))
    loss = 0.0
    for i in range(n):
        hi = logits[i, 0]
        for k in range(1, c):
            if logits[i, k] > hi:
                hi = logits[i, k]
        denom = 0.0
        for k in range(c):
            e = np.exp(logits[i, k] - hi)
            dlogits[i, k] = e
            denom += e
        loss += np.log(denom) - (logits[i, labels[i]] - hi)
        for k in range(c):
            dlogits[i, k] /= denom
        dlogits[i, labels[i]] -= 1.0
    for i in range(n):
        for k in range(c):
            dlogits[i, k] /= n
    return loss / n, dlogits


@njit(cache=True)
def adam_update(params, grad, m, v, t, lr, beta1, beta2, eps):
    size = params.shape[0]
    p2 = np.empty(size)
    m2 = np.empty(size)
    v2 = np.empty(size)
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for i in range(size):
        m2[i] = beta1 * m[i] + (1.0 - beta1) * grad[i]
        v2[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i]
        p2[i] = params[i] - lr * (m2[i] / c1) / (np.sqrt(v2[i] / c2) + eps)
    return p2, m2, v2
