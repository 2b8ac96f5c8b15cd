"""Datasets and samplers: synthetic Gaussian blobs, CSV ingestion,
train/val/test splitting, Dirichlet non-IID client partitioning, Beta
interpolation sampling, and mixed-batch construction.

Every Dataset counts the accesses made to its contents (`read_count`),
which lets the federation layer audit that erased clients are never
touched by the code paths that must not see them.
"""

from __future__ import annotations

import csv
import itertools
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InputError, ParseError, PartitionError
from .rng import derive_rng


@dataclass
class Dataset:
    """Feature matrix with integer class labels.

    `source_idx` traces each row back to the dataset it was carved from,
    so partitions can be checked to cover the original exactly.
    `read_count` increments on every content access (`arrays`, `take`);
    structural metadata (`n`, `d`) is free.
    """

    features: np.ndarray
    labels: np.ndarray
    class_count: int
    source_idx: "np.ndarray | None" = None
    read_count: int = field(default=0, compare=False)

    def __post_init__(self):
        # own private copies so freezing them cannot affect caller arrays
        self.features = np.array(self.features, dtype=np.float64, order="C")
        self.labels = np.array(self.labels, dtype=np.int64)
        if self.features.ndim != 2 or self.labels.shape != (self.features.shape[0],):
            raise DimensionError(
                f"features (n, d) with labels (n,) required, got {self.features.shape} and {self.labels.shape}"
            )
        if self.features.shape[0] < 1:
            raise InputError("dataset must contain at least one sample")
        if not np.all(np.isfinite(self.features)):
            raise InputError("dataset features contain NaN/Inf")
        self.class_count = int(self.class_count)
        if self.class_count < 1:
            raise InputError(f"class_count must be >= 1, got {self.class_count}")
        if self.labels.min() < 0 or self.labels.max() >= self.class_count:
            raise InputError(
                f"labels must lie in [0, {self.class_count}), got range "
                f"[{self.labels.min()}, {self.labels.max()}]"
            )
        if self.source_idx is None:
            self.source_idx = np.arange(self.features.shape[0], dtype=np.int64)
        else:
            self.source_idx = np.array(self.source_idx, dtype=np.int64)
            if self.source_idx.shape != (self.features.shape[0],):
                raise DimensionError("source_idx must have one entry per row")
        self.features.flags.writeable = False
        self.labels.flags.writeable = False
        self.source_idx.flags.writeable = False

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def arrays(self) -> "tuple[np.ndarray, np.ndarray]":
        """Content access: the full (features, labels) pair."""
        self.read_count += 1
        return self.features, self.labels

    def take(self, indices) -> "Dataset":
        """Content access: a new Dataset holding the given rows."""
        self.read_count += 1
        idx = np.ascontiguousarray(indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size < 1:
            raise InputError("take requires at least one row index")
        if idx.min() < 0 or idx.max() >= self.n:
            raise InputError(f"row indices must lie in [0, {self.n})")
        return Dataset(
            features=self.features[idx].copy(),
            labels=self.labels[idx].copy(),
            class_count=self.class_count,
            source_idx=self.source_idx[idx].copy(),
        )


@dataclass(frozen=True)
class SplitSpec:
    """Fractions for the train/val/test carve-up plus the shuffle seed."""

    seed: int
    train: float = 0.70
    val: float = 0.10
    test: float = 0.20

    def __post_init__(self):
        for name, frac in (("train", self.train), ("val", self.val), ("test", self.test)):
            if not frac > 0:
                raise InputError(f"{name} fraction must be positive, got {frac}")
        total = self.train + self.val + self.test
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"fractions must sum to 1, got {total!r}")


@dataclass
class MixedBatch:
    """Convex combinations of forget and retain samples.

    `lam` is the interpolation weight toward the forget sample; the
    pseudo-label is 1 exactly when lam > 0.5 (the sample still mostly
    carries forget-client content) and 0 otherwise. When the per-batch
    gate is off the batch is the raw forget samples (lam = 1,
    retain_idx = -1).
    """

    x_mix: np.ndarray
    lam: np.ndarray
    pseudo_label: np.ndarray
    forget_idx: np.ndarray
    retain_idx: np.ndarray
    mixed: bool

    def __post_init__(self):
        self.x_mix = np.ascontiguousarray(self.x_mix, dtype=np.float64)
        self.lam = np.ascontiguousarray(self.lam, dtype=np.float64)
        self.pseudo_label = np.ascontiguousarray(self.pseudo_label, dtype=np.int64)
        self.forget_idx = np.ascontiguousarray(self.forget_idx, dtype=np.int64)
        self.retain_idx = np.ascontiguousarray(self.retain_idx, dtype=np.int64)
        n = self.x_mix.shape[0]
        for name, arr in (
            ("lam", self.lam),
            ("pseudo_label", self.pseudo_label),
            ("forget_idx", self.forget_idx),
            ("retain_idx", self.retain_idx),
        ):
            if arr.shape != (n,):
                raise DimensionError(f"{name} must have shape ({n},), got {arr.shape}")
        if self.lam.size and (self.lam.min() < 0.0 or self.lam.max() > 1.0):
            raise InputError("interpolation weights must lie in [0, 1]")
        if not np.array_equal(self.pseudo_label, (self.lam > 0.5).astype(np.int64)):
            raise InputError("pseudo_label must equal (lam > 0.5)")


def gen_blobs(seed: int, n: int, d: int, c: int, separation: float) -> Dataset:
    """c unit-covariance Gaussian clusters with mutually distant means.

    Means sit on an integer grid scaled by `separation`, so every pair
    is at least `separation` apart. Class counts differ by at most one;
    row order is a seeded shuffle.
    """
    if c < 2 or n < c or d < 2 or not separation > 0:
        raise InputError(
            f"need n >= c >= 2, d >= 2, separation > 0; got n={n}, c={c}, d={d}, separation={separation}"
        )
    side = max(2, math.ceil(c ** (1.0 / d)))
    grid = itertools.product(range(side), repeat=d)
    means = np.array(list(itertools.islice(grid, c)), dtype=np.float64) * separation

    counts = np.full(c, n // c, dtype=np.int64)
    counts[: n % c] += 1
    rng = derive_rng(seed, "blobs")
    features = np.empty((n, d))
    labels = np.empty(n, dtype=np.int64)
    row = 0
    for k in range(c):
        m = int(counts[k])
        features[row : row + m] = means[k] + rng.normal(size=(m, d))
        labels[row : row + m] = k
        row += m
    order = rng.permutation(n)
    return Dataset(features=features[order], labels=labels[order], class_count=c)


def split(dataset: Dataset, spec: SplitSpec) -> "tuple[Dataset, Dataset, Dataset]":
    """Disjoint train/val/test cover; val and test sizes are rounded,
    train absorbs the remainder."""
    n = dataset.n
    if n < 10:
        raise InputError(f"need at least 10 samples to split, got {n}")
    n_val = round(n * spec.val)
    n_test = round(n * spec.test)
    n_train = n - n_val - n_test
    if min(n_train, n_val, n_test) < 1:
        raise InputError(f"split of {n} samples leaves an empty part")
    perm = derive_rng(spec.seed, "split").permutation(n)
    train = dataset.take(perm[:n_train])
    val = dataset.take(perm[n_train : n_train + n_val])
    test = dataset.take(perm[n_train + n_val :])
    return train, val, test


def _largest_remainder(proportions: np.ndarray, total: int) -> np.ndarray:
    """Integer allocation of `total` by proportion, conserving the sum.
    Ties go to the lowest index."""
    raw = proportions * total
    counts = np.floor(raw).astype(np.int64)
    short = total - int(counts.sum())
    if short > 0:
        frac = raw - counts
        order = np.lexsort((np.arange(len(frac)), -frac))
        counts[order[:short]] += 1
    return counts


def dirichlet_partition(train: Dataset, clients: int, alpha: float, seed: int) -> "list[Dataset]":
    """Split a dataset across clients with per-class Dirichlet proportions.

    Each class's rows are dealt to clients according to one Dirichlet
    draw, making client label histograms skewed for small alpha. Retries
    the draw (up to 100 times) until every client is non-empty.
    """
    if clients < 1:
        raise InputError(f"need at least one client, got {clients}")
    if not alpha > 0:
        raise InputError(f"concentration must be positive, got {alpha}")
    rng = derive_rng(seed, "dirichlet")
    _, labels = train.arrays()
    class_rows = [np.flatnonzero(labels == k) for k in range(train.class_count)]
    for _ in range(100):
        assigned = [[] for _ in range(clients)]
        for rows in class_rows:
            if rows.size == 0:
                continue
            rows = rng.permutation(rows)
            counts = _largest_remainder(rng.dirichlet(np.full(clients, alpha)), rows.size)
            start = 0
            for cid in range(clients):
                assigned[cid].append(rows[start : start + counts[cid]])
                start += counts[cid]
        sizes = [sum(len(a) for a in parts) for parts in assigned]
        if min(sizes) > 0:
            return [train.take(np.sort(np.concatenate(parts))) for parts in assigned]
    raise PartitionError(
        f"could not fill {clients} clients from {train.n} samples after 100 draws (alpha={alpha})"
    )


def sample_beta(alpha: float, rng: np.random.Generator) -> float:
    """One Beta(alpha, alpha) draw as a ratio of two Gamma(alpha) draws."""
    if not alpha > 0:
        raise InputError(f"shape parameter must be positive, got {alpha}")
    for _ in range(100):
        x = rng.gamma(alpha)
        y = rng.gamma(alpha)
        total = x + y
        if total > 0.0:
            lam = x / total
            if 0.0 < lam < 1.0:
                return float(lam)
    raise InputError(f"gamma draws degenerate for alpha={alpha}")


def mix_with_lambda(x_f: np.ndarray, x_r: np.ndarray, lam: np.ndarray,
                    forget_idx=None, retain_idx=None) -> MixedBatch:
    """Assemble a MixedBatch from explicit interpolation weights."""
    x_f = np.ascontiguousarray(x_f, dtype=np.float64)
    x_r = np.ascontiguousarray(x_r, dtype=np.float64)
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    if x_f.ndim != 2 or x_f.shape != x_r.shape:
        raise InputError(f"forget and retain samples must match, got {x_f.shape} and {x_r.shape}")
    n = x_f.shape[0]
    if lam.shape != (n,):
        raise DimensionError(f"need one weight per row, got {lam.shape} for {n} rows")
    x_mix = lam[:, None] * x_f + (1.0 - lam[:, None]) * x_r
    return MixedBatch(
        x_mix=x_mix,
        lam=lam,
        pseudo_label=(lam > 0.5).astype(np.int64),
        forget_idx=np.arange(n, dtype=np.int64) if forget_idx is None else forget_idx,
        retain_idx=np.arange(n, dtype=np.int64) if retain_idx is None else retain_idx,
        mixed=True,
    )


def build_mix_batch(forget_batch: np.ndarray, retain_pool: np.ndarray,
                    alpha_mixup: float, p_mixup: float,
                    rng: np.random.Generator) -> MixedBatch:
    """Interpolate a batch of forget samples toward random retain samples.

    One Bernoulli(p_mixup) gate is drawn per batch. Gate off: the batch
    passes through untouched (lam = 1, pseudo-label 1), which is exactly
    the plain contrastive-unlearning behavior. Gate on: each forget row
    gets a uniformly drawn retain partner and its own Beta(alpha, alpha)
    weight.
    """
    forget_batch = np.ascontiguousarray(forget_batch, dtype=np.float64)
    retain_pool = np.ascontiguousarray(retain_pool, dtype=np.float64)
    if forget_batch.ndim != 2 or forget_batch.shape[0] < 1:
        raise InputError(f"forget batch must be a nonempty (n, d) array, got {forget_batch.shape}")
    if retain_pool.ndim != 2 or retain_pool.shape[0] < 1:
        raise InputError(f"retain pool must be a nonempty (m, d) array, got {retain_pool.shape}")
    if forget_batch.shape[1] != retain_pool.shape[1]:
        raise InputError(
            f"feature widths differ: forget {forget_batch.shape[1]}, retain {retain_pool.shape[1]}"
        )
    if not 0.0 <= p_mixup <= 1.0:
        raise InputError(f"gate probability must lie in [0, 1], got {p_mixup}")
    n = forget_batch.shape[0]
    if rng.random() < p_mixup:
        retain_idx = rng.integers(0, retain_pool.shape[0], size=n)
        lam = np.array([sample_beta(alpha_mixup, rng) for _ in range(n)])
        return mix_with_lambda(
            forget_batch,
            retain_pool[retain_idx],
            lam,
            forget_idx=np.arange(n, dtype=np.int64),
            retain_idx=retain_idx.astype(np.int64),
        )
    return MixedBatch(
        x_mix=forget_batch.copy(),
        lam=np.ones(n),
        pseudo_label=np.ones(n, dtype=np.int64),
        forget_idx=np.arange(n, dtype=np.int64),
        retain_idx=np.full(n, -1, dtype=np.int64),
        mixed=False,
    )


def load_csv(path: str) -> Dataset:
    """Read a header-carrying CSV of the form f0,...,f{D-1},label."""
    if not os.path.isfile(path):
        raise ParseError(f"no such file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: line 1: empty file") from None
        width = len(header) - 1
        expected = [f"f{i}" for i in range(width)] + ["label"]
        if width < 1 or header != expected:
            raise ParseError(
                f"{path}: line 1: header must be f0,...,f{{D-1}},label, got {','.join(header)}"
            )
        rows, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != width + 1:
                raise ParseError(
                    f"{path}: line {lineno}: expected {width + 1} fields, got {len(row)}"
                )
            try:
                rows.append([float(v) for v in row[:-1]])
                label = int(row[-1])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
            if label < 0:
                raise ParseError(f"{path}: line {lineno}: negative label {label}")
            labels.append(label)
    if not rows:
        raise ParseError(f"{path}: line 2: no data rows")
    labels = np.array(labels, dtype=np.int64)
    return Dataset(
        features=np.array(rows),
        labels=labels,
        class_count=int(labels.max()) + 1,
    )


def save_csv(dataset: Dataset, path: str) -> None:
    """Write a Dataset in the load_csv format; floats use shortest
    exact decimal form, so a reload is bit-identical."""
    features, labels = dataset.arrays()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(dataset.d)] + ["label"])
        for row, label in zip(features, labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])
