"""Shared oracles for the test suite.

Everything here is deliberately independent of the package internals:
plain numpy re-derivations used to cross-check the real implementations.
"""

from __future__ import annotations

import numpy as np

from fedunlearn.numcore import MlpArch, MlpModel, ce_grad, gaussian_init


def central_diff_grad(f, params: np.ndarray, indices, step: float = 1e-5) -> np.ndarray:
    """Central finite difference of scalar f at the given flat indices."""
    out = np.empty(len(indices))
    for k, i in enumerate(indices):
        p_hi = params.copy()
        p_hi[i] += step
        p_lo = params.copy()
        p_lo[i] -= step
        out[k] = (f(p_hi) - f(p_lo)) / (2.0 * step)
    return out


def rel_err(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-8)
    return np.abs(a - b) / denom


def forward_oracle(arch: MlpArch, params: np.ndarray, x: np.ndarray):
    """Plain-numpy forward pass, written independently of the kernels.
    Returns (hidden activations list, logits)."""
    sizes = arch.layer_sizes
    off = 0
    acts = []
    a = x
    for li in range(len(sizes) - 1):
        d_in, d_out = sizes[li], sizes[li + 1]
        w = params[off : off + d_in * d_out].reshape(d_in, d_out)
        off += d_in * d_out
        b = params[off : off + d_out]
        off += d_out
        a = a @ w + b
        if li < len(sizes) - 2:
            a = np.maximum(a, 0.0)
            acts.append(a)
    return acts, a


def _act_mask(arch: MlpArch, params: np.ndarray, x: np.ndarray) -> np.ndarray:
    acts, _ = forward_oracle(arch, params, x)
    return np.concatenate([(a > 0.0).ravel() for a in acts])


def kink_free(arch: MlpArch, params: np.ndarray, x: np.ndarray, indices, step: float = 1e-5):
    """Keep only coordinates whose +-step perturbation leaves every rectifier
    on the same side of zero. A central difference across a kink is not a
    derivative estimate, so such coordinates are invalid oracle points."""
    base = _act_mask(arch, params, x)
    kept = []
    for i in indices:
        p_hi = params.copy()
        p_hi[i] += step
        p_lo = params.copy()
        p_lo[i] -= step
        if np.array_equal(_act_mask(arch, p_hi, x), base) and np.array_equal(
            _act_mask(arch, p_lo, x), base
        ):
            kept.append(i)
    return np.asarray(kept, dtype=np.int64)


def random_case(rng: np.random.Generator):
    """One random (arch, params, batch, labels) gradient-check instance."""
    d_in = int(rng.integers(2, 9))
    c_out = int(rng.integers(2, 5))
    n_hidden = int(rng.integers(1, 3))
    hidden = [int(rng.integers(3, 10)) for _ in range(n_hidden)]
    arch = MlpArch((d_in, *hidden, c_out))
    params = gaussian_init(arch, rng, std=0.5)
    n = int(rng.integers(2, 7))
    x = rng.normal(size=(n, d_in))
    y = rng.integers(0, c_out, size=n)
    return arch, params, x, y


def ce_loss_of(arch: MlpArch, x: np.ndarray, y: np.ndarray):
    def f(p):
        loss, _ = ce_grad(MlpModel(arch, p), x, y)
        return loss

    return f


def softmax_xent_oracle(logits: np.ndarray, labels: np.ndarray) -> float:
    """Textbook mean cross-entropy, written independently of the kernels."""
    z = logits - logits.max(axis=1, keepdims=True)
    log_p = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    return float(-log_p[np.arange(len(labels)), labels].mean())


def adam_oracle(params, grad, m, v, t, lr, beta1, beta2, eps):
    """Reference Adam step with explicit bias correction."""
    m2 = beta1 * m + (1 - beta1) * grad
    v2 = beta2 * v + (1 - beta2) * grad * grad
    m_hat = m2 / (1 - beta1**t)
    v_hat = v2 / (1 - beta2**t)
    return params - lr * m_hat / (np.sqrt(v_hat) + eps), m2, v2
