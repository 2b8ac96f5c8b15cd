"""Dense MLP with rectifier hidden layers and hand-derived gradients.

Parameters live in one flat float64 vector in canonical order: layer by
layer, weight matrix first (row-major, shape in x out), then bias. The
penultimate activation (output of the last hidden layer) is the feature
vector consumed by the contrastive losses; the final affine map produces
logits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, InputError, UsageError
from .backend import kernels as K


@dataclass(frozen=True)
class MlpArch:
    """Layer widths [d_in, h_1, ..., h_L, c_out]; at least one hidden layer."""

    layer_sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if len(sizes) < 3:
            raise InputError(
                f"architecture needs [d_in, hidden..., c_out] with >=1 hidden layer, got {sizes}"
            )
        if any(s < 1 for s in sizes):
            raise InputError(f"all layer sizes must be >= 1, got {sizes}")

    @property
    def d_in(self) -> int:
        return self.layer_sizes[0]

    @property
    def c_out(self) -> int:
        return self.layer_sizes[-1]

    @property
    def feature_dim(self) -> int:
        return self.layer_sizes[-2]

    @property
    def num_layers(self) -> int:
        return len(self.layer_sizes) - 1

    def segments(self):
        """(offset, length, shape) for every W and b, in canonical flat order."""
        out = []
        off = 0
        for d_in, d_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            out.append((off, d_in * d_out, (d_in, d_out)))
            off += d_in * d_out
            out.append((off, d_out, (d_out,)))
            off += d_out
        return out

    def param_count(self) -> int:
        return sum(length for _, length, _ in self.segments())


def unflatten(params: np.ndarray, arch: MlpArch):
    """Views into the flat vector as [(W1, b1), (W2, b2), ...]; no copies."""
    if params.shape != (arch.param_count(),):
        raise DimensionError(
            f"expected {arch.param_count()} parameters for {arch.layer_sizes}, got {params.shape}"
        )
    layers = []
    segs = arch.segments()
    for i in range(0, len(segs), 2):
        w_off, w_len, w_shape = segs[i]
        b_off, b_len, _ = segs[i + 1]
        layers.append((params[w_off : w_off + w_len].reshape(w_shape), params[b_off : b_off + b_len]))
    return layers


def flatten(layers) -> np.ndarray:
    """Inverse of unflatten; bit-exact round trip."""
    parts = []
    for w, b in layers:
        parts.append(np.asarray(w, dtype=np.float64).reshape(-1))
        parts.append(np.asarray(b, dtype=np.float64).reshape(-1))
    return np.concatenate(parts)


def gaussian_init(arch: MlpArch, rng: np.random.Generator, std: float = 0.05) -> np.ndarray:
    """Weights ~ N(0, std^2), biases 0, as a canonical flat vector."""
    params = np.zeros(arch.param_count())
    for (off, length, shape) in arch.segments():
        if len(shape) == 2:
            params[off : off + length] = rng.normal(0.0, std, size=length)
    return params


@dataclass
class MlpModel:
    arch: MlpArch
    params: np.ndarray

    def __post_init__(self):
        self.params = np.ascontiguousarray(self.params, dtype=np.float64)
        expected = self.arch.param_count()
        if self.params.shape != (expected,):
            raise DimensionError(
                f"expected flat parameter vector of length {expected}, got shape {self.params.shape}"
            )
        if not np.all(np.isfinite(self.params)):
            raise InputError("model parameters contain NaN/Inf")


def _check_batch(model: MlpModel, batch: np.ndarray) -> np.ndarray:
    batch = np.ascontiguousarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != model.arch.d_in:
        raise DimensionError(
            f"expected batch of shape (n, {model.arch.d_in}), got {batch.shape}"
        )
    return batch


def _forward_cache(model: MlpModel, batch: np.ndarray):
    """All layer activations [x, a_1, ..., a_L] plus logits."""
    layers = unflatten(model.params, model.arch)
    acts = [batch]
    a = batch
    for w, b in layers[:-1]:
        a = K.affine_relu(a, w, b)
        acts.append(a)
    w_out, b_out = layers[-1]
    logits = K.affine(a, w_out, b_out)
    return acts, logits


def forward(model: MlpModel, batch: np.ndarray):
    """Run the batch through the net; returns (features, logits)."""
    batch = _check_batch(model, batch)
    acts, logits = _forward_cache(model, batch)
    return acts[-1], logits


def loss_ce(logits: np.ndarray, labels) -> "tuple[float, np.ndarray]":
    """Mean softmax cross-entropy over the batch and its gradient w.r.t. logits."""
    logits = np.ascontiguousarray(logits, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise DimensionError(
            f"expected logits (n, c) with labels (n,), got {logits.shape} and {labels.shape}"
        )
    c = logits.shape[1]
    if labels.size and (labels.min() < 0 or labels.max() >= c):
        raise InputError(f"labels must lie in [0, {c}), got range [{labels.min()}, {labels.max()}]")
    return K.softmax_xent(logits, labels)


def backprop(model: MlpModel, batch: np.ndarray, grad_logits=None, grad_features=None) -> np.ndarray:
    """Exact gradient w.r.t. every parameter of the scalar whose upstream
    gradient is supplied, either at the logits or at the feature output.

    Exactly one of grad_logits / grad_features must be given. The feature
    path leaves the output layer's parameters at zero gradient.
    """
    if (grad_logits is None) == (grad_features is None):
        raise UsageError("supply exactly one of grad_logits or grad_features")
    batch = _check_batch(model, batch)
    acts, logits = _forward_cache(model, batch)
    layers = unflatten(model.params, model.arch)
    segs = model.arch.segments()
    grad = np.zeros(model.arch.param_count())

    def store(layer_idx, dw, db):
        w_off, w_len, _ = segs[2 * layer_idx]
        b_off, b_len, _ = segs[2 * layer_idx + 1]
        grad[w_off : w_off + w_len] = dw.reshape(-1)
        grad[b_off : b_off + b_len] = db

    n_layers = model.arch.num_layers
    if grad_logits is not None:
        gl = np.ascontiguousarray(grad_logits, dtype=np.float64)
        if gl.shape != logits.shape:
            raise DimensionError(f"expected grad_logits {logits.shape}, got {gl.shape}")
        w_out, _ = layers[-1]
        store(n_layers - 1, K.matmul_tn(acts[-1], gl), K.colsum(gl))
        d = K.matmul_nt(gl, w_out)
    else:
        d = np.ascontiguousarray(grad_features, dtype=np.float64)
        if d.shape != acts[-1].shape:
            raise DimensionError(f"expected grad_features {acts[-1].shape}, got {d.shape}")

    # hidden layers, last to first; d arrives w.r.t. the post-ReLU output
    for li in range(n_layers - 2, -1, -1):
        d = K.relu_backward(d, acts[li + 1])
        store(li, K.matmul_tn(acts[li], d), K.colsum(d))
        if li > 0:
            w, _ = layers[li]
            d = K.matmul_nt(d, w)
    return grad


def ce_grad(model: MlpModel, batch: np.ndarray, labels) -> "tuple[float, np.ndarray]":
    """Convenience: forward + cross-entropy + backprop in one call."""
    batch = _check_batch(model, batch)
    _, logits = _forward_cache(model, batch)
    loss, dlogits = loss_ce(logits, labels)
    return loss, backprop(model, batch, grad_logits=dlogits)
