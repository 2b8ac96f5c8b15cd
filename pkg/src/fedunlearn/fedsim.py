"""Federated round engine: local client training, weighted averaging,
global pretraining, and post-unlearning recovery rounds.

Determinism rules: every client draws batches from its own stream
derived from (seed, phase, round, client_id), so scheduling order can
never change results; aggregation always sums in ascending client_id
order; optimizer state is fresh for every local call (the global
broadcast invalidates stale moments).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataforge import Dataset
from .errors import ConfigError, DimensionError, InputError, IsolationError
from .numcore import AdamState, MlpArch, MlpModel, adam_step, ce_grad, forward
from .rng import derive_rng

ROLES = ("Trained", "Downgraded", "Unlearned", "Retrained")


@dataclass(frozen=True)
class FederationConfig:
    """Knobs for the federation schedule and the differential learning
    rates (the erased client trains much slower during unlearning)."""

    seed: int
    num_clients: int = 5
    pretrain_rounds: int = 30
    local_steps_per_round: int = 20
    batch_size: int = 64
    client_lr: float = 1e-4
    target_client_lr: float = 1e-5
    dirichlet_alpha: float = 1.0
    pretrain_lr: "float | None" = None

    def __post_init__(self):
        if self.num_clients < 2:
            raise ConfigError(f"a federation needs at least 2 clients, got {self.num_clients}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not (self.client_lr > 0 and self.target_client_lr > 0):
            raise ConfigError("learning rates must be positive")
        if self.pretrain_lr is not None and not self.pretrain_lr > 0:
            raise ConfigError(f"pretrain_lr must be positive, got {self.pretrain_lr}")
        if self.pretrain_rounds < 0 or self.local_steps_per_round < 1:
            raise ConfigError("pretrain_rounds must be >= 0 and local_steps_per_round >= 1")
        if not self.dirichlet_alpha > 0:
            raise ConfigError(f"dirichlet_alpha must be positive, got {self.dirichlet_alpha}")


@dataclass
class ClientState:
    """One federation participant: its shard, learning rate, and seed.

    `adam` holds the optimizer state left by the most recent local call;
    it is informational, every local call starts from fresh moments.
    """

    client_id: int
    dataset: Dataset
    lr: float
    seed: int
    adam: "AdamState | None" = None

    def __post_init__(self):
        if self.client_id < 0:
            raise InputError(f"client_id must be non-negative, got {self.client_id}")
        if not self.lr > 0:
            raise InputError(f"learning rate must be positive, got {self.lr}")


@dataclass(frozen=True)
class ModelSnapshot:
    """Immutable model state tagged with how it was produced.

    train_step_count totals the local optimizer steps behind the params;
    a Downgraded snapshot is a fresh re-initialization, so its count is
    pinned at zero.
    """

    role: str
    params: np.ndarray
    arch: MlpArch
    train_step_count: int
    history: tuple = ()

    def __post_init__(self):
        if self.role not in ROLES:
            raise InputError(f"role must be one of {ROLES}, got {self.role!r}")
        params = np.array(self.params, dtype=np.float64)
        if params.shape != (self.arch.param_count(),):
            raise DimensionError(
                f"expected {self.arch.param_count()} params for {self.arch.layer_sizes}, got {params.shape}"
            )
        if not np.all(np.isfinite(params)):
            raise InputError("snapshot params contain NaN/Inf")
        params.flags.writeable = False
        object.__setattr__(self, "params", params)
        if self.train_step_count < 0:
            raise InputError("train_step_count must be non-negative")
        if self.role == "Downgraded" and self.train_step_count != 0:
            raise InputError("a Downgraded snapshot is untrained; train_step_count must be 0")
        object.__setattr__(self, "history", tuple(self.history))

    def model(self) -> MlpModel:
        return MlpModel(self.arch, self.params)


def make_clients(parts: "list[Dataset]", config: FederationConfig) -> "list[ClientState]":
    """Wrap partition shards as clients 0..K-1 at the shared rate."""
    return [
        ClientState(client_id=cid, dataset=part, lr=config.client_lr, seed=config.seed)
        for cid, part in enumerate(parts)
    ]


def local_train(global_params: np.ndarray, client: ClientState, steps: int,
                batch_size: int, arch: MlpArch,
                rng: "np.random.Generator | None" = None,
                lr: "float | None" = None) -> "tuple[np.ndarray, int]":
    """Adam descent on the client's shard from a copy of the global params.

    Batches are drawn with replacement; the caller passes a round-scoped
    rng (defaulting to the client's own stream) so repeated calls with
    equal inputs are bit-identical. lr overrides the client's rate (used
    by pretraining, which may run hotter than recovery).
    """
    if steps < 1:
        raise InputError(f"steps must be >= 1, got {steps}")
    if client.dataset is None or client.dataset.n < 1:
        raise ConfigError(f"client {client.client_id} has no data to train on")
    if rng is None:
        rng = derive_rng(client.seed, "local", client.client_id)
    features, labels = client.dataset.arrays()
    params = np.array(global_params, dtype=np.float64)
    state = AdamState.fresh(params.size)
    step_lr = client.lr if lr is None else lr
    for _ in range(steps):
        idx = rng.integers(0, features.shape[0], size=batch_size)
        _, grad = ce_grad(MlpModel(arch, params), features[idx], labels[idx])
        params, state = adam_step(params, grad, state, step_lr)
    client.adam = state
    return params, client.dataset.n


def fedavg(contributions: "list[tuple[np.ndarray, float]]") -> np.ndarray:
    """Weighted mean of parameter vectors, summed in list order (callers
    pass ascending client_id). A single contribution returns bit-exactly."""
    if not contributions:
        raise InputError("fedavg needs at least one contribution")
    total = 0.0
    length = None
    for params, weight in contributions:
        if not weight > 0:
            raise InputError(f"contribution weights must be positive, got {weight}")
        if length is None:
            length = len(params)
        elif len(params) != length:
            raise InputError(f"contribution lengths differ: {length} vs {len(params)}")
        total += float(weight)
    out = np.zeros(length)
    for params, weight in contributions:
        out += np.asarray(params, dtype=np.float64) * (float(weight) / total)
    return out


def _run_round(global_params: np.ndarray, clients: "list[ClientState]", steps: int,
               batch_size: int, arch: MlpArch, phase: str, round_idx: int,
               parallel: bool, lr: "float | None" = None) -> np.ndarray:
    """One broadcast -> local_train on all clients -> aggregate cycle."""

    def work(client: ClientState):
        rng = derive_rng(client.seed, phase, round_idx, client.client_id)
        return local_train(global_params, client, steps, batch_size, arch, rng, lr)

    ordered = sorted(clients, key=lambda c: c.client_id)
    if parallel and len(ordered) > 1:
        with ThreadPoolExecutor(max_workers=len(ordered)) as pool:
            results = list(pool.map(work, ordered))
    else:
        results = [work(c) for c in ordered]
    return fedavg(results)


def _accuracy(params: np.ndarray, arch: MlpArch, dataset: Dataset) -> float:
    features, labels = dataset.arrays()
    _, logits = forward(MlpModel(arch, params), features)
    return float(np.mean(np.argmax(logits, axis=1) == labels))


def pretrain(config: FederationConfig, clients: "list[ClientState]", arch: MlpArch,
             val: "Dataset | None" = None, parallel: bool = False) -> ModelSnapshot:
    """Federated pretraining from a seeded gaussian init; returns the
    trained snapshot with per-round validation accuracy as history."""
    if not clients:
        raise ConfigError("pretrain needs at least one client")
    ids = [c.client_id for c in clients]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"duplicate client ids: {sorted(ids)}")
    from .numcore import gaussian_init

    params = gaussian_init(arch, derive_rng(config.seed, "init"))
    history = []
    for rnd in range(config.pretrain_rounds):
        params = _run_round(
            params, clients, config.local_steps_per_round, config.batch_size,
            arch, "pretrain", rnd, parallel, lr=config.pretrain_lr,
        )
        if val is not None:
            history.append(_accuracy(params, arch, val))
    steps = config.pretrain_rounds * config.local_steps_per_round * len(clients)
    return ModelSnapshot(
        role="Trained", params=params, arch=arch,
        train_step_count=steps, history=tuple(history),
    )


def recover(unlearned: ModelSnapshot, retain_clients: "list[ClientState]",
            target_client_id: int, rounds: int = 10, local_steps: int = 20,
            batch_size: int = 64, val: "Dataset | None" = None,
            parallel: bool = False) -> ModelSnapshot:
    """FedAvg fine-tuning over the surviving clients only.

    The erased client must not appear: its presence raises immediately,
    and the read counters let callers audit that its shard was never
    touched. rounds=0 returns the input snapshot unchanged.
    """
    for client in retain_clients:
        if client.client_id == target_client_id:
            raise IsolationError(
                f"client {target_client_id} is being erased and cannot join recovery"
            )
    if rounds == 0:
        return unlearned
    if rounds < 0:
        raise InputError(f"rounds must be >= 0, got {rounds}")
    if not retain_clients:
        raise ConfigError("recovery needs at least one retained client")
    params = unlearned.params
    history = []
    for rnd in range(rounds):
        params = _run_round(
            params, retain_clients, local_steps, batch_size,
            unlearned.arch, "recover", rnd, parallel,
        )
        if val is not None:
            history.append(_accuracy(params, unlearned.arch, val))
    steps = unlearned.train_step_count + rounds * local_steps * len(retain_clients)
    return ModelSnapshot(
        role=unlearned.role, params=params, arch=unlearned.arch,
        train_step_count=steps, history=tuple(history),
    )
