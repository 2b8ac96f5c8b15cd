"""Pure-numpy build of the hot kernels.

Reference semantics for the numba build in kernels_numba.py; both expose the
same function set. Floating-point results may differ between builds at the
last ulp (BLAS vs. explicit summation order), so reproducibility guarantees
hold per backend, not across backends.
"""

import numpy as np

NAME = "numpy"


def affine(x, w, b):
    return x @ w + b


def affine_relu(x, w, b):
    return np.maximum(x @ w + b, 0.0)


def matmul_tn(a, b):
    # a.T @ b, used for weight gradients
    return a.T @ b


def matmul_nt(a, b):
    # a @ b.T, used to push gradients to the previous layer
    return a @ b.T


def colsum(a):
    return a.sum(axis=0)


def relu_backward(d, activated):
    # activated is the post-ReLU output, so activated > 0 marks active units
    return np.where(activated > 0.0, d, 0.0)


def softmax_xent(logits, labels):
    """Mean softmax cross-entropy; returns (loss, d(loss)/d(logits)).

    Max-shifted so arbitrarily large logits cannot overflow.
    """
    n = logits.shape[0]
    rows = np.arange(n)
    shifted = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    denom = expz.sum(axis=1)
    loss = float(np.mean(np.log(denom) - shifted[rows, labels]))
    dlogits = expz / denom[:, None]
    dlogits[rows, labels] -= 1.0
    dlogits /= n
    return loss, dlogits


def adam_update(params, grad, m, v, t, lr, beta1, beta2, eps):
    """One bias-corrected Adam step at step index t (1-based); returns new (params, m, v)."""
    m2 = beta1 * m + (1.0 - beta1) * grad
    v2 = beta2 * v + (1.0 - beta2) * grad * grad
    mhat = m2 / (1.0 - beta1**t)
    vhat = v2 / (1.0 - beta2**t)
    p2 = params - lr * mhat / (np.sqrt(vhat) + eps)
    return p2, m2, v2
