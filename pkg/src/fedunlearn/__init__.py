"""Deterministic simulation of federated client unlearning on tabular data.

Train a small MLP with federated averaging over a handful of clients,
then erase one client's contribution with any of several unlearning
methods and measure what was forgotten and what was preserved, all
reproducible bit-for-bit from a seed.
"""

from .dataforge import (
    Dataset,
    MixedBatch,
    SplitSpec,
    build_mix_batch,
    dirichlet_partition,
    gen_blobs,
    load_csv,
    mix_with_lambda,
    sample_beta,
    save_csv,
    split,
)
from .fedsim import (
    ClientState,
    FederationConfig,
    ModelSnapshot,
    fedavg,
    local_train,
    make_clients,
    pretrain,
    recover,
)
from .evalkit import (
    MetricsReport,
    RuntimeClock,
    evaluate,
    full_report,
    macro_f1,
)
from .expcli import (
    DatasetSpec,
    ExperimentConfig,
    ResultRow,
    config_to_dict,
    config_to_yaml,
    golden_check,
    golden_record,
    load_config,
    parse_config,
    prepare_data,
    run_experiment,
    sweep,
    with_seed,
)
from .errors import (
    ConfigError,
    DegenerateFeatureError,
    DimensionError,
    FedUnlearnError,
    InputError,
    IsolationError,
    ParseError,
    PartitionError,
    UsageError,
)
from .rng import derive_rng
from .unlearn import (
    FeatureTriple,
    UnlearnConfig,
    downgraded_init,
    fgmp_blend,
    finetune_baseline,
    fusion_loss,
    gradient_ascent_baseline,
    iff_unlearn,
    mcu_unlearn,
    retrain_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "FeatureTriple",
    "UnlearnConfig",
    "downgraded_init",
    "fgmp_blend",
    "finetune_baseline",
    "fusion_loss",
    "gradient_ascent_baseline",
    "iff_unlearn",
    "mcu_unlearn",
    "retrain_oracle",
    "ClientState",
    "FederationConfig",
    "ModelSnapshot",
    "fedavg",
    "local_train",
    "make_clients",
    "pretrain",
    "recover",
    "Dataset",
    "MixedBatch",
    "SplitSpec",
    "build_mix_batch",
    "dirichlet_partition",
    "gen_blobs",
    "load_csv",
    "mix_with_lambda",
    "sample_beta",
    "save_csv",
    "split",
    "MetricsReport",
    "RuntimeClock",
    "evaluate",
    "full_report",
    "macro_f1",
    "DatasetSpec",
    "ExperimentConfig",
    "ResultRow",
    "config_to_dict",
    "config_to_yaml",
    "golden_check",
    "golden_record",
    "load_config",
    "parse_config",
    "prepare_data",
    "run_experiment",
    "sweep",
    "with_seed",
    "ConfigError",
    "DegenerateFeatureError",
    "DimensionError",
    "FedUnlearnError",
    "InputError",
    "IsolationError",
    "ParseError",
    "PartitionError",
    "UsageError",
    "derive_rng",
    "__version__",
]
