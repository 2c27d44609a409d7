"""Datasets: CSV ingestion, feature normalisation, stratified folds, Gaussian blobs."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError

__all__ = [
    "Dataset",
    "NormalizationParams",
    "FoldPlan",
    "BlobSpec",
    "load_csv",
    "write_csv",
    "fit_normalization",
    "apply_normalization",
    "invert_normalization",
    "stratified_kfold",
    "stratified_subsample",
    "load_matrix_csv",
    "generate_blobs",
    "two_blobs",
    "NORMALIZATION_SCHEMES",
]

NORMALIZATION_SCHEMES = ("none", "minmax", "zscore")


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: list[str] | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels)
        if self.features.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {self.features.shape}")
        if self.labels.ndim != 1 or self.labels.shape[0] != self.features.shape[0]:
            raise DataError(
                f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels"
            )
        if not np.all(np.isfinite(self.features)):
            r, c = np.argwhere(~np.isfinite(self.features))[0]
            raise DataError(f"non-finite feature value at row {r}, column {c}")
        if self.feature_names is not None and len(self.feature_names) != self.features.shape[1]:
            raise DataError("feature_names length does not match feature count")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def classes(self) -> np.ndarray:
        """Distinct labels in sorted order (the canonical class order)."""
        return np.unique(self.labels)

    def label_histogram(self) -> dict[str, int]:
        values, counts = np.unique(self.labels, return_counts=True)
        return {str(v): int(c) for v, c in zip(values, counts)}

    def subset(self, index) -> "Dataset":
        return Dataset(self.features[index], self.labels[index], self.feature_names)

    def fingerprint(self) -> dict:
        return {
            "rows": self.n_samples,
            "columns": self.n_features,
            "label_histogram": self.label_histogram(),
        }


def load_csv(path, label_column: str) -> Dataset:
    """Read a header-first CSV whose non-label columns are all numeric.

    Labels are kept as strings. Any unparseable or non-finite feature cell
    raises ``DataError`` naming the file line and column.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header row expected") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header {header}")
        li = header.index(label_column)
        names = [h for i, h in enumerate(header) if i != li]
        rows: list[list[float]] = []
        labels: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                raise DataError(f"{path}:{lineno}: empty row")
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            vals = []
            for i, cell in enumerate(row):
                if i == li:
                    continue
                try:
                    x = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: column {header[i]!r}: non-numeric value {cell!r}"
                    ) from None
                if not math.isfinite(x):
                    raise DataError(f"{path}:{lineno}: column {header[i]!r}: non-finite value {cell!r}")
                vals.append(x)
            rows.append(vals)
            labels.append(row[li].strip())
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Dataset(np.array(rows, dtype=np.float64).reshape(len(rows), len(names)), np.array(labels), names)


def load_matrix_csv(path, drop_column: str | None = None) -> tuple[np.ndarray, list[str]]:
    """All-numeric CSV (header required) as a matrix, optionally ignoring one column."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise DataError(f"{path}: empty file, header row expected")
    header = [h.strip() for h in header]
    if drop_column is not None and drop_column in header:
        ds = load_csv(path, drop_column)
        return ds.features, ds.feature_names
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                raise DataError(f"{path}:{lineno}: empty row")
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            vals = []
            for name, cell in zip(header, row):
                try:
                    x = float(cell)
                except ValueError:
                    raise DataError(f"{path}:{lineno}: column {name!r}: non-numeric value {cell!r}") from None
                if not math.isfinite(x):
                    raise DataError(f"{path}:{lineno}: column {name!r}: non-finite value {cell!r}")
                vals.append(x)
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64), header


def write_csv(dataset: Dataset, path, label_column: str = "label") -> None:
    names = dataset.feature_names or [f"x{i}" for i in range(dataset.n_features)]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([*names, label_column])
        for x, y in zip(dataset.features.tolist(), dataset.labels.tolist()):
            w.writerow([*(repr(v) for v in x), y])


@dataclass
class NormalizationParams:
    """Per-feature affine map ``(x - offset) / scale``; constant features map to 0."""

    scheme: str
    offset: np.ndarray = field(default_factory=lambda: np.zeros(0))
    scale: np.ndarray = field(default_factory=lambda: np.ones(0))

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "offset": self.offset.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationParams":
        return cls(d["scheme"], np.asarray(d["offset"], dtype=float), np.asarray(d["scale"], dtype=float))


def fit_normalization(features, scheme: str = "minmax") -> NormalizationParams:
    if scheme not in NORMALIZATION_SCHEMES:
        raise ConfigError(f"unknown normalization {scheme!r}; expected one of {NORMALIZATION_SCHEMES}")
    X = np.asarray(features, dtype=np.float64)
    d = X.shape[1]
    if scheme == "none":
        return NormalizationParams("none", np.zeros(d), np.ones(d))
    if scheme == "minmax":
        lo, hi = X.min(axis=0), X.max(axis=0)
        return NormalizationParams("minmax", lo, hi - lo)
    return NormalizationParams("zscore", X.mean(axis=0), X.std(axis=0))


def apply_normalization(params: NormalizationParams, features) -> np.ndarray:
    X = np.asarray(features, dtype=np.float64)
    if params.scheme == "none":
        return X.copy()
    out = np.zeros_like(X)
    live = params.scale > 0
    out[..., live] = (X[..., live] - params.offset[live]) / params.scale[live]
    return out


def invert_normalization(params: NormalizationParams, features) -> np.ndarray:
    Z = np.asarray(features, dtype=np.float64)
    if params.scheme == "none":
        return Z.copy()
    return Z * params.scale + params.offset


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray

    def test_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def splits(self):
        for f in range(self.k):
            yield self.train_index(f), self.test_index(f)


def stratified_kfold(labels, k: int, seed: int = 0) -> FoldPlan:
    """Deterministic stratified fold assignment.

    Each class (in sorted label order) is shuffled with a generator seeded by
    ``seed`` and dealt round-robin, continuing from where the previous class
    stopped so the overall fold sizes also differ by at most one.
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if k > n:
        raise ConfigError(f"k={k} exceeds the number of samples ({n})")
    rng = np.random.default_rng(seed)
    assignments = np.empty(n, dtype=np.int64)
    start = 0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(idx.size)]
        assignments[idx] = (start + np.arange(idx.size)) % k
        start = (start + idx.size) % k
    return FoldPlan(k, assignments)


def stratified_subsample(dataset: Dataset, size: int, seed: int = 0) -> Dataset:
    """Random subset of ``size`` rows keeping class proportions (largest remainder rounding).

    Every class keeps at least one row. Row order of the original is preserved.
    """
    n = dataset.n_samples
    if not 1 <= size <= n:
        raise ConfigError(f"subsample size must be in [1, {n}], got {size}")
    classes, counts = np.unique(dataset.labels, return_counts=True)
    if size < classes.size:
        raise ConfigError(f"subsample of {size} cannot keep all {classes.size} classes")
    exact = counts * size / n
    quota = np.maximum(np.floor(exact).astype(int), 1)
    while quota.sum() < size:
        slack = np.where(quota < counts, exact - quota, -np.inf)
        quota[int(np.argmax(slack))] += 1
    while quota.sum() > size:
        quota[int(np.argmax(quota))] -= 1
    rng = np.random.default_rng(seed)
    keep = []
    for c, q in zip(classes, quota):
        idx = np.flatnonzero(dataset.labels == c)
        keep.append(rng.choice(idx, size=int(q), replace=False))
    return dataset.subset(np.sort(np.concatenate(keep)))


@dataclass(frozen=True)
class BlobSpec:
    mu: Sequence[float]
    sigma: Sequence[float]
    count: int
    seed: int
    label: str | None = None


def generate_blobs(specs: Sequence[BlobSpec]) -> Dataset:
    """Axis-aligned Gaussian blobs.

    Each spec draws ``count`` rows from ``numpy.random.Generator(PCG64(seed))``
    with ``normal(mu, sigma)`` per axis. Labels default to the spec position
    (``"0"``, ``"1"``, ...).
    """
    if not specs:
        raise ConfigError("at least one blob spec is required")
    dims = {len(s.mu) for s in specs} | {len(s.sigma) for s in specs}
    if len(dims) != 1:
        raise ConfigError("all blob specs must share one dimension")
    feats, labels = [], []
    for i, s in enumerate(specs):
        mu = np.asarray(s.mu, dtype=float)
        sigma = np.asarray(s.sigma, dtype=float)
        if np.any(sigma <= 0) or not np.all(np.isfinite(sigma)):
            raise ConfigError(f"blob {i}: sigma must be positive, got {sigma.tolist()}")
        if s.count < 1:
            raise ConfigError(f"blob {i}: count must be positive")
        rng = np.random.Generator(np.random.PCG64(s.seed))
        feats.append(rng.normal(mu, sigma, size=(s.count, mu.size)))
        labels += [s.label if s.label is not None else str(i)] * s.count
    names = [f"x{j}" for j in range(feats[0].shape[1])]
    return Dataset(np.vstack(feats), np.array(labels), names)


def two_blobs(seed: int = 0, count: int = 50) -> Dataset:
    """The two-class synthetic set: N([1,1], 0.5^2) and N([5,5], 0.4^2), 50 each."""
    return generate_blobs(
        [
            BlobSpec([1.0, 1.0], [0.5, 0.5], count, seed, "1"),
            BlobSpec([5.0, 5.0], [0.4, 0.4], count, seed + 1, "2"),
        ]
    )
