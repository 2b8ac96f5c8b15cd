"""Unlearning strategies.

The main procedure steers the trained model's feature space: mixed
forget/retain inputs are pushed toward a freshly initialized anchor
model (erasure) or held near the trained anchor (retention) by a
two-term contrastive loss, while a periodic spectral blend restores the
trained model's low-frequency parameter content. Baselines: retraining
from scratch without the erased client (the gold standard), plain
fine-tuning on the survivors, and radius-constrained gradient ascent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dataforge import Dataset, MixedBatch, build_mix_batch
from .errors import DimensionError, InputError
from .fedsim import ClientState, FederationConfig, ModelSnapshot, pretrain, recover
from .numcore import (
    AdamState,
    MlpArch,
    MlpModel,
    adam_step,
    backprop,
    ce_grad,
    cosine_sim_grad,
    forward,
    gaussian_init,
)
from .rng import derive_rng


@dataclass(frozen=True)
class UnlearnConfig:
    """Knobs for the contrastive unlearning loop and its baselines."""

    tau: float = 0.5
    alpha_mixup: float = 0.2
    p_mixup: float = 0.5
    fgmp_period: int = 10
    fgmp_low_fraction: float = 0.3
    unlearn_steps: int = 100
    unlearn_lr: float = 1e-5
    ascent_radius: float = 1.0

    def __post_init__(self):
        if not self.tau > 0:
            raise InputError(f"temperature must be positive, got {self.tau}")
        if not 0.0 <= self.fgmp_low_fraction <= 1.0:
            raise InputError(f"fgmp_low_fraction must lie in [0, 1], got {self.fgmp_low_fraction}")
        if self.unlearn_steps < 1:
            raise InputError(f"unlearn_steps must be >= 1, got {self.unlearn_steps}")
        if self.fgmp_period < 1:
            raise InputError(f"fgmp_period must be >= 1, got {self.fgmp_period}")
        if not 0.0 <= self.p_mixup <= 1.0:
            raise InputError(f"p_mixup must lie in [0, 1], got {self.p_mixup}")
        if not self.alpha_mixup > 0:
            raise InputError(f"alpha_mixup must be positive, got {self.alpha_mixup}")
        if not self.unlearn_lr > 0:
            raise InputError(f"unlearn_lr must be positive, got {self.unlearn_lr}")
        if self.ascent_radius < 0:
            raise InputError(f"ascent_radius must be >= 0, got {self.ascent_radius}")


@dataclass
class FeatureTriple:
    """One sample's features under the working, trained, and downgraded
    models. The anchor features carry no gradient; only z_mix does."""

    z_mix: np.ndarray
    z_tr: np.ndarray
    z_down: np.ndarray

    def __post_init__(self):
        self.z_mix = np.ascontiguousarray(self.z_mix, dtype=np.float64)
        self.z_tr = np.ascontiguousarray(self.z_tr, dtype=np.float64)
        self.z_down = np.ascontiguousarray(self.z_down, dtype=np.float64)
        if not (self.z_mix.ndim == 1 and self.z_mix.shape == self.z_tr.shape == self.z_down.shape):
            raise DimensionError(
                f"feature vectors must be matching 1-D, got {self.z_mix.shape}, "
                f"{self.z_tr.shape}, {self.z_down.shape}"
            )


def downgraded_init(arch: MlpArch, seed: int) -> ModelSnapshot:
    """A fresh anchor model that has never seen any data."""
    params = gaussian_init(arch, derive_rng(seed, "downgraded"))
    return ModelSnapshot(role="Downgraded", params=params, arch=arch, train_step_count=0)


def _softplus(u: float) -> float:
    # log(1 + e^u) without overflow for large |u|
    return math.log1p(math.exp(-abs(u))) + max(u, 0.0)


def _sigmoid(u: float) -> float:
    if u >= 0:
        return 1.0 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return e / (1.0 + e)


def fusion_loss(triple: FeatureTriple, tau: float, pseudo_label: int) -> "tuple[float, np.ndarray]":
    """Two-anchor contrastive loss on one mixed sample.

    With s_d, s_t the temperature-scaled cosine similarities to the
    downgraded and trained anchors, a pseudo-label of 1 treats the
    downgraded anchor as positive (pull away from trained behavior) and
    0 treats the trained anchor as positive (stay close). Returns the
    loss and its exact gradient w.r.t. z_mix.
    """
    if not tau > 0:
        raise InputError(f"temperature must be positive, got {tau}")
    if pseudo_label not in (0, 1):
        raise InputError(f"pseudo_label must be 0 or 1, got {pseudo_label!r}")
    cos_d, dcos_d = cosine_sim_grad(triple.z_mix, triple.z_down)
    cos_t, dcos_t = cosine_sim_grad(triple.z_mix, triple.z_tr)
    s_d = cos_d / tau
    s_t = cos_t / tau
    # -log softmax of the positive logit over {s_d, s_t}
    if pseudo_label == 1:
        u = s_t - s_d
        dz = (_sigmoid(u) / tau) * (dcos_t - dcos_d)
    else:
        u = s_d - s_t
        dz = (_sigmoid(u) / tau) * (dcos_d - dcos_t)
    return _softplus(u), dz


def fgmp_blend(theta_un: np.ndarray, theta_tr: np.ndarray, rho: float, arch: MlpArch) -> np.ndarray:
    """Splice the trained model's low-frequency parameter content into
    the unlearned vector, one weight matrix or bias vector at a time.

    Each segment is treated as a real signal: of its B spectral bins,
    the lowest ceil(rho * B) come from the trained model, the rest stay
    unlearned. rho=0 is an exact no-op; rho=1 reproduces the trained
    segment up to transform round-off.
    """
    theta_un = np.ascontiguousarray(theta_un, dtype=np.float64)
    theta_tr = np.ascontiguousarray(theta_tr, dtype=np.float64)
    expected = (arch.param_count(),)
    if theta_un.shape != expected or theta_tr.shape != expected:
        raise InputError(
            f"both parameter vectors must have shape {expected}, got "
            f"{theta_un.shape} and {theta_tr.shape}"
        )
    if not 0.0 <= rho <= 1.0:
        raise InputError(f"rho must lie in [0, 1], got {rho}")
    if rho == 0.0:
        return theta_un.copy()
    out = np.empty_like(theta_un)
    for off, length, _ in arch.segments():
        seg_un = theta_un[off : off + length]
        spectrum = np.fft.rfft(seg_un)
        bins = spectrum.shape[0]
        keep = math.ceil(rho * bins)
        if keep > 0:
            spectrum = spectrum.copy()
            spectrum[:keep] = np.fft.rfft(theta_tr[off : off + length])[:keep]
        out[off : off + length] = np.fft.irfft(spectrum, n=length)
    return out


def _raw_batch(x_f: np.ndarray) -> MixedBatch:
    """The no-mixup batch: forget samples as-is, erasure labels."""
    n = x_f.shape[0]
    return MixedBatch(
        x_mix=x_f.copy(),
        lam=np.ones(n),
        pseudo_label=np.ones(n, dtype=np.int64),
        forget_idx=np.arange(n, dtype=np.int64),
        retain_idx=np.full(n, -1, dtype=np.int64),
        mixed=False,
    )


def _contrastive_unlearn(m_tr: ModelSnapshot, m_down: ModelSnapshot, forget: Dataset,
                         retain_pool: "Dataset | None", cfg: UnlearnConfig,
                         rng: np.random.Generator, batch_size: int,
                         use_mixup: bool) -> ModelSnapshot:
    """Shared engine for the mixup and no-mixup variants.

    Batch selection and mixup randomness come from two independent
    child streams, so the mixup variant with its gate probability at 0
    walks the exact same batch sequence as the no-mixup variant.
    """
    if m_tr.role != "Trained":
        raise InputError(f"need a Trained starting snapshot, got {m_tr.role}")
    if m_down.role != "Downgraded":
        raise InputError(f"need a Downgraded anchor snapshot, got {m_down.role}")
    if m_tr.arch != m_down.arch:
        raise InputError("trained and downgraded snapshots disagree on architecture")
    arch = m_tr.arch
    batch_rng, mix_rng = rng.spawn(2)
    feats_f, _ = forget.arrays()
    if feats_f.shape[1] != arch.d_in:
        raise InputError(f"forget data width {feats_f.shape[1]} does not match model input {arch.d_in}")
    pool = None
    if use_mixup:
        if retain_pool is None:
            raise InputError("mixup needs a retain pool")
        pool, _ = retain_pool.arrays()
        if pool.shape[1] != feats_f.shape[1]:
            raise InputError(f"retain pool width {pool.shape[1]} does not match forget width {feats_f.shape[1]}")

    params = np.array(m_tr.params)
    state = AdamState.fresh(params.size)
    trace = []
    for step in range(1, cfg.unlearn_steps + 1):
        idx = batch_rng.integers(0, feats_f.shape[0], size=batch_size)
        x_f = feats_f[idx]
        if use_mixup:
            batch = build_mix_batch(x_f, pool, cfg.alpha_mixup, cfg.p_mixup, mix_rng)
        else:
            batch = _raw_batch(x_f)
        working = MlpModel(arch, params)
        z_mix, _ = forward(working, batch.x_mix)
        z_tr, _ = forward(m_tr.model(), batch.x_mix)
        z_down, _ = forward(m_down.model(), batch.x_mix)
        n = z_mix.shape[0]
        grad_feats = np.empty_like(z_mix)
        total = 0.0
        for i in range(n):
            loss_i, dz_i = fusion_loss(
                FeatureTriple(z_mix[i], z_tr[i], z_down[i]), cfg.tau, int(batch.pseudo_label[i])
            )
            total += loss_i
            grad_feats[i] = dz_i / n
        grad = backprop(working, batch.x_mix, grad_features=grad_feats)
        params, state = adam_step(params, grad, state, cfg.unlearn_lr)
        if step % cfg.fgmp_period == 0:
            params = fgmp_blend(params, m_tr.params, cfg.fgmp_low_fraction, arch)
        trace.append(total / n)
    return ModelSnapshot(
        role="Unlearned", params=params, arch=arch,
        train_step_count=m_tr.train_step_count + cfg.unlearn_steps,
        history=tuple(trace),
    )


def iff_unlearn(m_tr: ModelSnapshot, m_down: ModelSnapshot, forget: Dataset,
                retain_pool: Dataset, cfg: UnlearnConfig, rng: np.random.Generator,
                batch_size: int = 64) -> ModelSnapshot:
    """Mixup-fusion contrastive unlearning with periodic spectral
    memory preservation; per-step mean loss recorded as history."""
    return _contrastive_unlearn(m_tr, m_down, forget, retain_pool, cfg, rng,
                                batch_size, use_mixup=True)


def mcu_unlearn(m_tr: ModelSnapshot, m_down: ModelSnapshot, forget: Dataset,
                cfg: UnlearnConfig, rng: np.random.Generator,
                batch_size: int = 64) -> ModelSnapshot:
    """The no-mixup variant: contrastive unlearning on raw forget
    samples only (every sample carries the erasure label)."""
    return _contrastive_unlearn(m_tr, m_down, forget, None, cfg, rng,
                                batch_size, use_mixup=False)


def finetune_baseline(m_tr: ModelSnapshot, retain_clients: "list[ClientState]",
                      target_client_id: int, rounds: int = 10, local_steps: int = 20,
                      batch_size: int = 64, val: "Dataset | None" = None,
                      parallel: bool = False) -> ModelSnapshot:
    """Fine-tune the trained model on the survivors; no erasure signal."""
    return recover(m_tr, retain_clients, target_client_id, rounds=rounds,
                   local_steps=local_steps, batch_size=batch_size, val=val,
                   parallel=parallel)


def gradient_ascent_baseline(m_tr: ModelSnapshot, forget: Dataset, steps: int,
                             lr: float, delta: float, rng: np.random.Generator,
                             batch_size: int = 64) -> ModelSnapshot:
    """Maximize cross-entropy on the forget set, leashed to an L2 ball
    of radius delta around the trained parameters."""
    if delta < 0:
        raise InputError(f"ascent radius must be >= 0, got {delta}")
    if steps < 1:
        raise InputError(f"steps must be >= 1, got {steps}")
    if delta == 0.0:
        return m_tr
    feats, labels = forget.arrays()
    anchor = m_tr.params
    params = np.array(anchor)
    state = AdamState.fresh(params.size)
    trace = []
    for _ in range(steps):
        idx = rng.integers(0, feats.shape[0], size=batch_size)
        loss, grad = ce_grad(MlpModel(m_tr.arch, params), feats[idx], labels[idx])
        params, state = adam_step(params, -grad, state, lr)
        shift = params - anchor
        norm = float(np.linalg.norm(shift))
        if norm > delta:
            params = anchor + shift * (delta / norm)
        trace.append(loss)
    return ModelSnapshot(
        role="Unlearned", params=params, arch=m_tr.arch,
        train_step_count=m_tr.train_step_count + steps, history=tuple(trace),
    )


def retrain_oracle(config: FederationConfig, retain_clients: "list[ClientState]",
                   arch: MlpArch, seed: int, val: "Dataset | None" = None,
                   parallel: bool = False) -> ModelSnapshot:
    """The gold standard: pretrain from scratch with the erased client
    absent from round one."""
    snap = pretrain(replace(config, seed=seed), retain_clients, arch, val, parallel)
    return ModelSnapshot(
        role="Retrained", params=snap.params, arch=snap.arch,
        train_step_count=snap.train_step_count, history=snap.history,
    )
