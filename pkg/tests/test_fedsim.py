"""Federation engine: descent and memorization checks for local
training, the weighted-mean aggregator against a brute-force oracle,
single-client equivalence of the whole round loop, scheduling
determinism, and the erased-client isolation contract."""

import numpy as np
import pytest

from fedunlearn import (
    ClientState,
    ConfigError,
    Dataset,
    FederationConfig,
    InputError,
    IsolationError,
    ModelSnapshot,
    SplitSpec,
    derive_rng,
    dirichlet_partition,
    fedavg,
    gen_blobs,
    local_train,
    make_clients,
    pretrain,
    recover,
    split,
)
from fedunlearn.numcore import (
    AdamState,
    MlpArch,
    MlpModel,
    adam_step,
    ce_grad,
    forward,
    gaussian_init,
    loss_ce,
)

ARCH = MlpArch((4, 16, 8, 3))


def tiny_client(seed=0, n=90, lr=1e-3, client_id=0):
    ds = gen_blobs(seed, n=n, d=4, c=3, separation=6.0)
    return ClientState(client_id=client_id, dataset=ds, lr=lr, seed=seed)


class TestLocalTrain:
    def test_loss_decreases_on_separable_blobs(self):
        client = tiny_client()
        params = gaussian_init(ARCH, derive_rng(0, "init"))
        feats, labels = client.dataset.arrays()
        loss_before, _ = loss_ce(forward(MlpModel(ARCH, params), feats)[1], labels)
        new_params, _ = local_train(params, client, steps=200, batch_size=32, arch=ARCH)
        loss_after, _ = loss_ce(forward(MlpModel(ARCH, new_params), feats)[1], labels)
        assert loss_after < loss_before

    def test_single_sample_memorized(self):
        ds = Dataset(np.array([[1.0, -2.0, 0.5, 3.0]]), np.array([2]), class_count=3)
        client = ClientState(client_id=0, dataset=ds, lr=1e-2, seed=1)
        params = gaussian_init(ARCH, derive_rng(1, "init"))
        new_params, count = local_train(params, client, steps=50, batch_size=4, arch=ARCH)
        assert count == 1
        _, logits = forward(MlpModel(ARCH, new_params), ds.features)
        assert int(np.argmax(logits[0])) == 2

    def test_deterministic(self):
        client_a = tiny_client(seed=5)
        client_b = tiny_client(seed=5)
        params = gaussian_init(ARCH, derive_rng(5, "init"))
        out_a, _ = local_train(params, client_a, steps=30, batch_size=16, arch=ARCH)
        out_b, _ = local_train(params, client_b, steps=30, batch_size=16, arch=ARCH)
        assert np.array_equal(out_a, out_b)

    def test_does_not_mutate_global_params(self):
        client = tiny_client()
        params = gaussian_init(ARCH, derive_rng(0, "init"))
        before = params.copy()
        local_train(params, client, steps=5, batch_size=8, arch=ARCH)
        assert np.array_equal(params, before)

    def test_returns_dataset_size_as_weight(self):
        client = tiny_client(n=73)
        params = gaussian_init(ARCH, derive_rng(0, "init"))
        _, weight = local_train(params, client, steps=1, batch_size=8, arch=ARCH)
        assert weight == 73

    def test_rejects_zero_steps(self):
        with pytest.raises(InputError):
            local_train(np.zeros(ARCH.param_count()), tiny_client(), 0, 8, ARCH)


class TestFedavg:
    def test_hand_weighted_mean(self):
        out = fedavg([(np.array([0.0, 2.0]), 1.0), (np.array([4.0, 6.0]), 3.0)])
        assert np.array_equal(out, [3.0, 5.0])

    def test_identical_params_equal_weights(self):
        theta = np.array([0.3, -1.7, 2.5])
        out = fedavg([(theta, 2.0), (theta, 2.0)])
        assert np.array_equal(out, theta)

    def test_single_contribution_bit_exact(self):
        theta = derive_rng(0, "single").normal(size=50)
        assert np.array_equal(fedavg([(theta, 17.0)]), theta)

    def test_matches_brute_force_oracle(self):
        rng = derive_rng(66, "avg-oracle")
        for _ in range(100):
            k = int(rng.integers(1, 8))
            dim = int(rng.integers(1, 40))
            contribs = [(rng.normal(size=dim), float(rng.uniform(0.1, 50))) for _ in range(k)]
            stacked = np.stack([p for p, _ in contribs])
            weights = np.array([w for _, w in contribs])
            oracle = (stacked * weights[:, None]).sum(axis=0) / weights.sum()
            assert np.max(np.abs(fedavg(contribs) - oracle)) < 1e-12

    def test_rejects_bad_input(self):
        with pytest.raises(InputError):
            fedavg([])
        with pytest.raises(InputError):
            fedavg([(np.zeros(2), 0.0)])
        with pytest.raises(InputError):
            fedavg([(np.zeros(2), 1.0), (np.zeros(3), 1.0)])


class TestModelSnapshot:
    def test_role_validation(self):
        with pytest.raises(InputError):
            ModelSnapshot("Fried", np.zeros(ARCH.param_count()), ARCH, 0)

    def test_downgraded_must_be_untrained(self):
        with pytest.raises(InputError):
            ModelSnapshot("Downgraded", np.zeros(ARCH.param_count()), ARCH, 5)
        snap = ModelSnapshot("Downgraded", np.zeros(ARCH.param_count()), ARCH, 0)
        assert snap.train_step_count == 0

    def test_params_frozen(self):
        snap = ModelSnapshot("Trained", np.zeros(ARCH.param_count()), ARCH, 1)
        with pytest.raises(ValueError):
            snap.params[0] = 1.0

    def test_rejects_wrong_length(self):
        from fedunlearn import DimensionError

        with pytest.raises(DimensionError):
            ModelSnapshot("Trained", np.zeros(3), ARCH, 1)


def small_federation(seed=3, num_clients=3, rounds=4, **kwargs):
    ds = gen_blobs(seed, n=600, d=4, c=3, separation=6.0)
    train, val, test = split(ds, SplitSpec(seed=seed))
    cfg = FederationConfig(
        seed=seed, num_clients=num_clients, pretrain_rounds=rounds,
        local_steps_per_round=10, batch_size=16, client_lr=1e-3, **kwargs,
    )
    parts = dirichlet_partition(train, num_clients, cfg.dirichlet_alpha, seed)
    return cfg, make_clients(parts, cfg), val


class TestPretrain:
    def test_single_client_equals_centralized_loop(self):
        ds = gen_blobs(9, n=200, d=4, c=3, separation=6.0)
        cfg = FederationConfig(seed=9, pretrain_rounds=3, local_steps_per_round=10,
                               batch_size=16, client_lr=1e-3)
        client = ClientState(client_id=0, dataset=ds, lr=cfg.client_lr, seed=cfg.seed)
        snap = pretrain(cfg, [client], ARCH)

        # independent loop: same init and per-round streams, fresh
        # optimizer moments at each round boundary, no aggregation
        feats, labels = ds.arrays()
        params = gaussian_init(ARCH, derive_rng(cfg.seed, "init"))
        for rnd in range(cfg.pretrain_rounds):
            rng = derive_rng(cfg.seed, "pretrain", rnd, 0)
            state = AdamState.fresh(params.size)
            for _ in range(cfg.local_steps_per_round):
                idx = rng.integers(0, feats.shape[0], size=cfg.batch_size)
                _, grad = ce_grad(MlpModel(ARCH, params), feats[idx], labels[idx])
                params, state = adam_step(params, grad, state, cfg.client_lr)
        assert np.array_equal(snap.params, params)

    def test_reaches_95_percent_on_separable_blobs(self):
        ds = gen_blobs(1, n=5000, d=20, c=4, separation=8.0)
        train, val, _ = split(ds, SplitSpec(seed=1))
        cfg = FederationConfig(seed=1)
        parts = dirichlet_partition(train, cfg.num_clients, cfg.dirichlet_alpha, cfg.seed)
        snap = pretrain(cfg, make_clients(parts, cfg), MlpArch((20, 64, 32, 4)), val)
        assert snap.history[-1] > 0.95
        assert len(snap.history) == cfg.pretrain_rounds

    def test_serial_parallel_bit_identical(self):
        cfg, clients, val = small_federation()
        a = pretrain(cfg, clients, ARCH, parallel=False)
        cfg2, clients2, _ = small_federation()
        b = pretrain(cfg2, clients2, ARCH, parallel=True)
        assert np.array_equal(a.params, b.params)

    def test_deterministic_across_runs(self):
        cfg, clients, _ = small_federation(seed=8)
        a = pretrain(cfg, clients, ARCH)
        cfg2, clients2, _ = small_federation(seed=8)
        b = pretrain(cfg2, clients2, ARCH)
        assert np.array_equal(a.params, b.params)

    def test_counts_total_local_steps(self):
        cfg, clients, _ = small_federation()
        snap = pretrain(cfg, clients, ARCH)
        assert snap.train_step_count == 4 * 10 * 3
        assert snap.role == "Trained"

    def test_rejects_duplicate_ids(self):
        cfg, clients, _ = small_federation()
        clients[1] = ClientState(client_id=0, dataset=clients[1].dataset,
                                 lr=clients[1].lr, seed=clients[1].seed)
        with pytest.raises(ConfigError):
            pretrain(cfg, clients, ARCH)

    def test_pretrain_lr_override_changes_result(self):
        cfg, clients, _ = small_federation()
        a = pretrain(cfg, clients, ARCH)
        cfg2, clients2, _ = small_federation(pretrain_lr=5e-3)
        b = pretrain(cfg2, clients2, ARCH)
        assert not np.array_equal(a.params, b.params)


class TestRecover:
    def setup_method(self):
        self.cfg, self.clients, self.val = small_federation(seed=12)
        self.trained = pretrain(self.cfg, self.clients, ARCH)

    def test_zero_rounds_is_identity(self):
        out = recover(self.trained, self.clients[1:], target_client_id=0, rounds=0)
        assert out is self.trained

    def test_target_presence_raises(self):
        with pytest.raises(IsolationError):
            recover(self.trained, self.clients, target_client_id=0)

    def test_target_shard_never_read(self):
        target = self.clients[0]
        before = target.dataset.read_count
        recover(self.trained, self.clients[1:], target_client_id=0,
                rounds=3, local_steps=5, batch_size=16)
        assert target.dataset.read_count == before

    def test_serial_parallel_bit_identical(self):
        a = recover(self.trained, self.clients[1:], target_client_id=0,
                    rounds=3, local_steps=5, batch_size=16, parallel=False)
        b = recover(self.trained, self.clients[1:], target_client_id=0,
                    rounds=3, local_steps=5, batch_size=16, parallel=True)
        assert np.array_equal(a.params, b.params)

    def test_preserves_role_and_accumulates_steps(self):
        out = recover(self.trained, self.clients[1:], target_client_id=0,
                      rounds=2, local_steps=5, batch_size=16)
        assert out.role == self.trained.role
        assert out.train_step_count == self.trained.train_step_count + 2 * 5 * 2

    def test_rejects_empty_retain_set(self):
        with pytest.raises(ConfigError):
            recover(self.trained, [], target_client_id=0, rounds=1)


class TestFederationConfig:
    def test_defaults_match_documented_protocol(self):
        cfg = FederationConfig(seed=0)
        assert cfg.num_clients == 5
        assert cfg.batch_size == 64
        assert cfg.client_lr == 1e-4
        assert cfg.target_client_lr == 1e-5
        assert cfg.dirichlet_alpha == 1.0

    def test_validation(self):
        with pytest.raises(ConfigError):
            FederationConfig(seed=0, num_clients=1)
        with pytest.raises(ConfigError):
            FederationConfig(seed=0, batch_size=0)
        with pytest.raises(ConfigError):
            FederationConfig(seed=0, client_lr=0.0)
        with pytest.raises(ConfigError):
            FederationConfig(seed=0, dirichlet_alpha=0.0)
        with pytest.raises(ConfigError):
            FederationConfig(seed=0, pretrain_lr=-1.0)
