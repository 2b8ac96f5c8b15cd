"""Experiment orchestration: strict YAML configuration, the full
generate/split/partition/pretrain/unlearn/recover/score pipeline,
ablation sweeps, a record/check regression harness over frozen seeds,
and the `fedunlearn` command line.

Everything downstream of the wall clock is deterministic for a given
seed and kernel backend, so result files are reproducible byte for byte
except the runtime_s column.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .dataforge import Dataset, SplitSpec, dirichlet_partition, gen_blobs, load_csv, save_csv, split
from .errors import ConfigError, FedUnlearnError, InputError, ParseError
from .evalkit import MetricsReport, RuntimeClock, full_report
from .fedsim import FederationConfig, make_clients, pretrain, recover
from .numcore import BACKEND_NAME, MlpArch
from .rng import derive_rng
from .unlearn import (
    UnlearnConfig,
    downgraded_init,
    finetune_baseline,
    gradient_ascent_baseline,
    iff_unlearn,
    mcu_unlearn,
    retrain_oracle,
)

METHODS = ("origin", "retrain", "finetune", "grad_ascent", "mcu", "iff_fcu")
TRACED_METHODS = ("grad_ascent", "mcu", "iff_fcu")
SWEEP_PARAMS = ("alpha_mixup", "p_mixup")
RESULT_COLUMNS = (
    "method", "seed", "accuracy", "f1", "error_t", "error_r", "error_f",
    "deviation_f", "runtime_s",
)
GOLDEN_SEED_COUNT = 5
GOLDEN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DatasetSpec:
    """Where the raw table comes from: seeded Gaussian blobs or a CSV."""

    source: str = "blobs"
    n: int = 5000
    d: int = 20
    c: int = 4
    separation: float = 4.0
    path: "str | None" = None

    def __post_init__(self):
        if self.source not in ("blobs", "csv"):
            raise ConfigError(f"dataset.source must be 'blobs' or 'csv', got {self.source!r}")
        if self.source == "csv" and not self.path:
            raise ConfigError("dataset.path is required when dataset.source is 'csv'")
        if self.source == "blobs" and self.path is not None:
            raise ConfigError("dataset.path only applies when dataset.source is 'csv'")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: data source, federation schedule, unlearning
    knobs, model width, method list, and output location.

    The top-level seed is the single source of randomness; the embedded
    FederationConfig must carry the same seed.
    """

    seed: int
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    federation: "FederationConfig | None" = None
    unlearn: UnlearnConfig = field(default_factory=UnlearnConfig)
    hidden: "tuple[int, ...]" = (64, 32)
    methods: "tuple[str, ...]" = METHODS
    target_client_id: int = 0
    output_dir: str = "out"
    recover_rounds: int = 10
    recover_local_steps: int = 20

    def __post_init__(self):
        if self.federation is None:
            object.__setattr__(self, "federation", FederationConfig(seed=self.seed))
        if self.federation.seed != self.seed:
            raise ConfigError(
                f"federation seed {self.federation.seed} disagrees with experiment seed {self.seed}"
            )
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if not self.hidden or any(h < 1 for h in self.hidden):
            raise ConfigError(f"model.hidden needs positive layer widths, got {list(self.hidden)}")
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.methods:
            raise ConfigError("methods must name at least one method")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown method {unknown[0]!r}; choose from {list(METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError(f"methods contains duplicates: {list(self.methods)}")
        if "retrain" not in self.methods:
            raise ConfigError("methods must include 'retrain'; it anchors deviation_f")
        if not 0 <= self.target_client_id < self.federation.num_clients:
            raise ConfigError(
                f"target_client_id must lie in [0, {self.federation.num_clients}), "
                f"got {self.target_client_id}"
            )
        if not self.output_dir:
            raise ConfigError("output_dir must be a non-empty path")
        if self.recover_rounds < 0 or self.recover_local_steps < 1:
            raise ConfigError("recovery needs rounds >= 0 and local_steps >= 1")


@dataclass(frozen=True)
class ResultRow:
    """One scored method at one seed, mirroring the results.csv columns."""

    method: str
    seed: int
    accuracy: float
    f1: float
    error_t: float
    error_r: float
    error_f: float
    deviation_f: float
    runtime_s: float

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}")
        numeric = (self.accuracy, self.f1, self.error_t, self.error_r,
                   self.error_f, self.deviation_f, self.runtime_s)
        if not all(np.isfinite(v) for v in numeric):
            raise InputError(f"non-finite metric in row for {self.method!r}")

    @classmethod
    def from_report(cls, method: str, seed: int, report: MetricsReport) -> "ResultRow":
        return cls(
            method=method, seed=seed, accuracy=report.accuracy, f1=report.macro_f1,
            error_t=report.error_t, error_r=report.error_r, error_f=report.error_f,
            deviation_f=report.deviation_f, runtime_s=report.runtime_s,
        )

    def csv_line(self) -> str:
        cells = [self.method, str(self.seed)]
        for name in RESULT_COLUMNS[2:-1]:
            cells.append(repr(float(getattr(self, name))))
        cells.append(f"{self.runtime_s:.3f}")
        return ",".join(cells)

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in RESULT_COLUMNS}
        out["runtime_s"] = round(self.runtime_s, 3)
        return out


# ---------------------------------------------------------------------------
# configuration parsing


def _check_keys(block: dict, allowed, path: str) -> None:
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        where = f"{path}.{unknown[0]}" if path else str(unknown[0])
        raise ConfigError(f"unknown configuration key '{where}'")


def _mapping(value, path: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"'{path}' must be a mapping, got {type(value).__name__}")
    return value


def _as_int(value, path: str) -> int:
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{path}' must be an integer, got {value!r}")
    return value


def _as_float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{path}' must be a number, got {value!r}")
    return float(value)


def _as_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"'{path}' must be a string, got {value!r}")
    return value


_FED_INT_FIELDS = ("num_clients", "pretrain_rounds", "local_steps_per_round", "batch_size")
_FED_FLOAT_FIELDS = ("client_lr", "target_client_lr", "dirichlet_alpha")
_UNLEARN_INT_FIELDS = ("fgmp_period", "unlearn_steps")
_UNLEARN_FLOAT_FIELDS = (
    "tau", "alpha_mixup", "p_mixup", "fgmp_low_fraction", "unlearn_lr", "ascent_radius",
)


def _parse_typed(block: dict, int_fields, float_fields, path: str, extra=()) -> dict:
    """Pull known int/float keys out of one YAML mapping, strictly."""
    _check_keys(block, int_fields + float_fields + tuple(extra), path)
    kwargs = {}
    for name in int_fields:
        if name in block:
            kwargs[name] = _as_int(block[name], f"{path}.{name}")
    for name in float_fields:
        if name in block:
            kwargs[name] = _as_float(block[name], f"{path}.{name}")
    return kwargs


def parse_config(text: str) -> ExperimentConfig:
    """Parse a YAML experiment document; unknown keys anywhere are a
    hard error naming the offending field path."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"configuration is not valid YAML: {exc}") from exc
    raw = _mapping(raw, "<config>")
    _check_keys(
        raw,
        ("dataset", "federation", "unlearn", "model", "recovery", "methods",
         "target_client_id", "seed", "output_dir"),
        "",
    )
    if "seed" not in raw:
        raise ConfigError("'seed' is required")
    seed = _as_int(raw["seed"], "seed")

    ds_block = _mapping(raw.get("dataset"), "dataset")
    _check_keys(ds_block, ("source", "n", "d", "c", "separation", "path"), "dataset")
    ds_kwargs = {}
    if "source" in ds_block:
        ds_kwargs["source"] = _as_str(ds_block["source"], "dataset.source")
    for name in ("n", "d", "c"):
        if name in ds_block:
            ds_kwargs[name] = _as_int(ds_block[name], f"dataset.{name}")
    if "separation" in ds_block:
        ds_kwargs["separation"] = _as_float(ds_block["separation"], "dataset.separation")
    if "path" in ds_block:
        ds_kwargs["path"] = _as_str(ds_block["path"], "dataset.path")
    dataset = DatasetSpec(**ds_kwargs)

    fed_block = _mapping(raw.get("federation"), "federation")
    fed_kwargs = _parse_typed(fed_block, _FED_INT_FIELDS, _FED_FLOAT_FIELDS,
                              "federation", extra=("pretrain_lr",))
    if fed_block.get("pretrain_lr") is not None:
        fed_kwargs["pretrain_lr"] = _as_float(fed_block["pretrain_lr"], "federation.pretrain_lr")
    federation = FederationConfig(seed=seed, **fed_kwargs)

    un_block = _mapping(raw.get("unlearn"), "unlearn")
    unlearn = UnlearnConfig(
        **_parse_typed(un_block, _UNLEARN_INT_FIELDS, _UNLEARN_FLOAT_FIELDS, "unlearn")
    )

    model_block = _mapping(raw.get("model"), "model")
    _check_keys(model_block, ("hidden",), "model")
    hidden = (64, 32)
    if "hidden" in model_block:
        widths = model_block["hidden"]
        if not isinstance(widths, list) or not widths:
            raise ConfigError("'model.hidden' must be a non-empty list of layer widths")
        hidden = tuple(_as_int(w, "model.hidden") for w in widths)

    rec_block = _mapping(raw.get("recovery"), "recovery")
    _check_keys(rec_block, ("rounds", "local_steps"), "recovery")
    recover_rounds = _as_int(rec_block["rounds"], "recovery.rounds") if "rounds" in rec_block else 10
    recover_local_steps = (
        _as_int(rec_block["local_steps"], "recovery.local_steps")
        if "local_steps" in rec_block else 20
    )

    methods = raw.get("methods", list(METHODS))
    if not isinstance(methods, list) or not all(isinstance(m, str) for m in methods):
        raise ConfigError("'methods' must be a list of method names")

    return ExperimentConfig(
        seed=seed,
        dataset=dataset,
        federation=federation,
        unlearn=unlearn,
        hidden=hidden,
        methods=tuple(methods),
        target_client_id=_as_int(raw.get("target_client_id", 0), "target_client_id"),
        output_dir=_as_str(raw.get("output_dir", "out"), "output_dir"),
        recover_rounds=recover_rounds,
        recover_local_steps=recover_local_steps,
    )


def load_config(path: str, seed=None, output_dir=None) -> ExperimentConfig:
    config = parse_config(Path(path).read_text(encoding="utf-8"))
    if seed is not None:
        config = with_seed(config, seed)
    if output_dir is not None:
        config = replace(config, output_dir=str(output_dir))
    return config


def with_seed(config: ExperimentConfig, seed: int) -> ExperimentConfig:
    """Re-seed the experiment and the embedded federation together."""
    return replace(config, seed=seed, federation=replace(config.federation, seed=seed))


def config_to_dict(config: ExperimentConfig) -> dict:
    """Canonical nested form: every field explicit, fixed key order."""
    dataset = {"source": config.dataset.source}
    if config.dataset.source == "blobs":
        dataset.update(n=config.dataset.n, d=config.dataset.d, c=config.dataset.c,
                       separation=config.dataset.separation)
    else:
        dataset["path"] = config.dataset.path
    federation = asdict(config.federation)
    del federation["seed"]
    return {
        "seed": config.seed,
        "dataset": dataset,
        "federation": federation,
        "unlearn": asdict(config.unlearn),
        "model": {"hidden": list(config.hidden)},
        "recovery": {"rounds": config.recover_rounds, "local_steps": config.recover_local_steps},
        "methods": list(config.methods),
        "target_client_id": config.target_client_id,
        "output_dir": config.output_dir,
    }


def config_to_yaml(config: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False)


# ---------------------------------------------------------------------------
# pipeline


def _concat(shards: "list[Dataset]") -> Dataset:
    arrays = [shard.arrays() for shard in shards]
    return Dataset(
        features=np.concatenate([a[0] for a in arrays]),
        labels=np.concatenate([a[1] for a in arrays]),
        class_count=shards[0].class_count,
    )


def prepare_data(config: ExperimentConfig):
    """Stage the experiment's data: full table -> splits -> client shards.

    Returns (clients, forget, retain_pool, val, test) where forget is the
    target client's shard and retain_pool concatenates the survivors'.
    """
    if config.dataset.source == "blobs":
        full = gen_blobs(config.seed, config.dataset.n, config.dataset.d,
                         config.dataset.c, config.dataset.separation)
    else:
        full = load_csv(config.dataset.path)
    train, val, test = split(full, SplitSpec(seed=config.seed))
    parts = dirichlet_partition(train, config.federation.num_clients,
                                config.federation.dirichlet_alpha, config.seed)
    clients = make_clients(parts, config.federation)
    forget = parts[config.target_client_id]
    retain_pool = _concat([p for cid, p in enumerate(parts) if cid != config.target_client_id])
    return clients, forget, retain_pool, val, test


def run_experiment(config: ExperimentConfig, parallel: bool = False) -> "list[ResultRow]":
    """Execute the full pipeline and write results.csv, results.json,
    and loss_trace_<method>.csv under config.output_dir.

    Every unlearning method branches from the same pretrained model and
    draws from an identically derived stream, so a p_mixup=0 run of the
    mixup method is bit-identical to the plain contrastive one.
    """
    clients, forget, retain_pool, val, test = prepare_data(config)
    arch = MlpArch((forget.d,) + config.hidden + (forget.class_count,))
    target = config.target_client_id
    retain_clients = [c for c in clients if c.client_id != target]

    origin = pretrain(config.federation, clients, arch, val=val, parallel=parallel)
    down = downgraded_init(arch, config.seed)

    snapshots, runtimes, traces = {}, {}, {}
    for method in config.methods:
        clock = RuntimeClock()
        if method == "origin":
            snapshots[method] = origin
        elif method == "retrain":
            with clock:
                snapshots[method] = retrain_oracle(
                    config.federation, retain_clients, arch, config.seed,
                    val=val, parallel=parallel,
                )
        elif method == "finetune":
            with clock:
                snapshots[method] = finetune_baseline(
                    origin, retain_clients, target,
                    rounds=config.recover_rounds, local_steps=config.recover_local_steps,
                    batch_size=config.federation.batch_size, val=val, parallel=parallel,
                )
        else:
            rng = derive_rng(config.seed, "unlearn")
            with clock:
                if method == "grad_ascent":
                    unlearned = gradient_ascent_baseline(
                        origin, forget, steps=config.unlearn.unlearn_steps,
                        lr=config.unlearn.unlearn_lr, delta=config.unlearn.ascent_radius,
                        rng=rng, batch_size=config.federation.batch_size,
                    )
                elif method == "mcu":
                    unlearned = mcu_unlearn(origin, down, forget, config.unlearn, rng,
                                            batch_size=config.federation.batch_size)
                else:
                    unlearned = iff_unlearn(origin, down, forget, retain_pool,
                                            config.unlearn, rng,
                                            batch_size=config.federation.batch_size)
                traces[method] = unlearned.history
                snapshots[method] = recover(
                    unlearned, retain_clients, target,
                    rounds=config.recover_rounds, local_steps=config.recover_local_steps,
                    batch_size=config.federation.batch_size, val=val, parallel=parallel,
                )
        runtimes[method] = clock.seconds

    reports = full_report(snapshots, test, retain_pool, forget, runtimes)
    rows = [ResultRow.from_report(m, config.seed, reports[m]) for m in config.methods]
    write_artifacts(rows, traces, config.output_dir)
    return rows


def write_artifacts(rows: "list[ResultRow]", traces: dict, output_dir: str) -> None:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "results.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(RESULT_COLUMNS) + "\n")
        for row in rows:
            fh.write(row.csv_line() + "\n")
    with open(out / "results.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump([row.as_dict() for row in rows], fh, indent=2)
        fh.write("\n")
    for method, trace in traces.items():
        with open(out / f"loss_trace_{method}.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("step,loss\n")
            for step, loss in enumerate(trace):
                fh.write(f"{step},{repr(float(loss))}\n")


# ---------------------------------------------------------------------------
# sweep


def sweep(config: ExperimentConfig, param: str, values: "list[float]",
          parallel: bool = False) -> "list[ResultRow]":
    """Re-run the mixup method across one knob's values.

    Each value runs the pipeline with methods pinned to retrain+iff_fcu
    in its own subdirectory; sweep.csv collects the iff_fcu row per
    value behind a leading param_value column.
    """
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"sweep parameter must be one of {list(SWEEP_PARAMS)}, got {param!r}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    # validate every value before any run
    for value in values:
        try:
            replace(config.unlearn, **{param: value})
        except InputError as exc:
            raise ConfigError(f"sweep value {value!r} is invalid for {param}: {exc}") from exc

    out = Path(config.output_dir)
    picked = []
    for value in values:
        run_config = replace(
            config,
            unlearn=replace(config.unlearn, **{param: value}),
            methods=("retrain", "iff_fcu"),
            output_dir=str(out / f"{param}_{value!r}"),
        )
        rows = {row.method: row for row in run_experiment(run_config, parallel=parallel)}
        picked.append((value, rows["iff_fcu"]))

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("param_value," + ",".join(RESULT_COLUMNS) + "\n")
        for value, row in picked:
            fh.write(f"{float(value)!r}," + row.csv_line() + "\n")
    return [row for _, row in picked]


# ---------------------------------------------------------------------------
# golden record/check

ORDERINGS = (
    ("retrain forgets more than origin",
     lambda by: by["retrain"].error_f > by["origin"].error_f),
    ("recovered iff_fcu forgets more than origin",
     lambda by: by["iff_fcu"].error_f > by["origin"].error_f),
    ("iff_fcu tracks the gold standard at least as closely as finetune",
     lambda by: abs(by["iff_fcu"].deviation_f) <= abs(by["finetune"].deviation_f)),
    ("gradient ascent damages retained data more than iff_fcu",
     lambda by: by["grad_ascent"].error_r > by["iff_fcu"].error_r),
)
ORDERING_METHODS = ("origin", "retrain", "finetune", "grad_ascent", "iff_fcu")
GOLDEN_FIELDS = RESULT_COLUMNS[2:-1]  # runtime is wall clock, never regressed


def _golden_rows(config: ExperimentConfig, parallel: bool = False) -> "list[ResultRow]":
    missing = [m for m in ORDERING_METHODS if m not in config.methods]
    if missing:
        raise ConfigError(f"golden runs need methods {list(ORDERING_METHODS)}; missing {missing}")
    rows = []
    for seed in range(config.seed, config.seed + GOLDEN_SEED_COUNT):
        run_config = with_seed(config, seed)
        run_config = replace(run_config, output_dir=str(Path(config.output_dir) / f"seed_{seed}"))
        rows.extend(run_experiment(run_config, parallel=parallel))
    return rows


def check_orderings(rows: "list[ResultRow]") -> "list[str]":
    """Qualitative regression: each ordering must hold on at least 4 of
    the 5 seeds. Returns failure messages, empty when all pass."""
    by_seed = {}
    for row in rows:
        by_seed.setdefault(row.seed, {})[row.method] = row
    failures = []
    for label, holds in ORDERINGS:
        good = sum(1 for methods in by_seed.values() if holds(methods))
        if good < len(by_seed) - 1:
            failures.append(f"ordering '{label}' holds on only {good}/{len(by_seed)} seeds")
    return failures


def golden_record(config: ExperimentConfig, parallel: bool = False) -> Path:
    """Freeze the frozen-seed rows; the qualitative orderings are
    asserted at check time, not here."""
    rows = _golden_rows(config, parallel=parallel)
    payload = {
        "backend": BACKEND_NAME,
        "seeds": list(range(config.seed, config.seed + GOLDEN_SEED_COUNT)),
        "rows": [
            {k: v for k, v in row.as_dict().items() if k != "runtime_s"}
            for row in rows
        ],
    }
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "golden.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return path


def golden_check(config: ExperimentConfig, parallel: bool = False) -> "list[str]":
    """Re-run the frozen seeds and diff against golden.json.

    Returns failure messages (empty means pass). A missing golden file
    raises FileNotFoundError so the CLI can exit 3.
    """
    path = Path(config.output_dir) / "golden.json"
    if not path.exists():
        raise FileNotFoundError(f"golden file not found: {path}")
    recorded = json.loads(path.read_text(encoding="utf-8"))
    if recorded.get("backend") != BACKEND_NAME:
        return [
            f"backend: recorded under {recorded.get('backend')!r}, running {BACKEND_NAME!r}"
        ]
    rows = _golden_rows(config, parallel=parallel)
    fresh = [{k: v for k, v in row.as_dict().items() if k != "runtime_s"} for row in rows]
    failures = []
    old_rows = recorded.get("rows", [])
    if len(old_rows) != len(fresh):
        failures.append(f"row count: recorded {len(old_rows)}, got {len(fresh)}")
    else:
        for old, new in zip(old_rows, fresh):
            for key in ("method", "seed"):
                if old[key] != new[key]:
                    failures.append(f"{key}: recorded {old[key]!r}, got {new[key]!r}")
                    break
            else:
                for key in GOLDEN_FIELDS:
                    if abs(old[key] - new[key]) > GOLDEN_TOLERANCE:
                        failures.append(
                            f"seed {new['seed']} method {new['method']} field {key}: "
                            f"recorded {old[key]!r}, got {new[key]!r}"
                        )
                        break
            if failures:
                break
    failures.extend(check_orderings(rows))
    return failures


# ---------------------------------------------------------------------------
# command line


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fedunlearn",
        description="Deterministic federated-unlearning experiments on tabular data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None)

    swp = sub.add_parser("sweep", help="ablate one mixup knob")
    swp.add_argument("--config", required=True)
    swp.add_argument("--param", required=True, choices=list(SWEEP_PARAMS))
    swp.add_argument("--values", required=True)
    swp.add_argument("--out", default=None)

    gold = sub.add_parser("golden", help="record or check the frozen-seed regression")
    gold.add_argument("--config", required=True)
    gold.add_argument("--mode", required=True, choices=["record", "check"])
    gold.add_argument("--out", default=None)

    gen = sub.add_parser("gen-data", help="write a blobs dataset as CSV")
    gen.add_argument("--out", required=True)
    gen.add_argument("--n", type=int, default=5000)
    gen.add_argument("--d", type=int, default=20)
    gen.add_argument("--c", type=int, default=4)
    gen.add_argument("--sep", type=float, default=4.0)
    gen.add_argument("--seed", type=int, default=1)
    return parser


def _parse_values(text: str) -> "list[float]":
    values = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            raise ConfigError(f"--values has an empty entry in {text!r}")
        try:
            values.append(float(piece))
        except ValueError:
            raise ConfigError(f"--values entry {piece!r} is not a number") from None
    return values


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = load_config(args.config, seed=args.seed, output_dir=args.out)
            rows = run_experiment(config)
            for row in rows:
                print(row.csv_line())
            return 0
        if args.command == "sweep":
            values = _parse_values(args.values)
            config = load_config(args.config, output_dir=args.out)
            sweep(config, args.param, values)
            print(f"wrote {Path(config.output_dir) / 'sweep.csv'}")
            return 0
        if args.command == "golden":
            config = load_config(args.config, output_dir=args.out)
            if args.mode == "record":
                path = golden_record(config)
                print(f"recorded {path}")
                return 0
            failures = golden_check(config)
            if failures:
                print(f"golden check failed: {failures[0]}", file=sys.stderr)
                return 1
            print("golden check passed")
            return 0
        # gen-data
        dataset = gen_blobs(args.seed, args.n, args.d, args.c, args.sep)
        save_csv(dataset, args.out)
        print(f"wrote {args.out} ({dataset.n} rows, {dataset.d} features, "
              f"{dataset.class_count} classes)")
        return 0
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ParseError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FedUnlearnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
