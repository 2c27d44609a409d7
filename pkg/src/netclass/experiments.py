"""Experiment harnesses: insertion sensitivity, measure timing, k-fold accuracy."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .classifier import ClassifierConfig, ClassNetwork, MeasureKind, delta_g, fit, predict_batch
from .data import Dataset, apply_normalization, fit_normalization, stratified_kfold
from .errors import ConfigError, DataError
from .graph import build_distance_graph, dijkstra_sssp, kruskal_mst, select_source
from . import kernels

log = logging.getLogger(__name__)

__all__ = [
    "SensitivityReport",
    "TimingStats",
    "CvReport",
    "summarize",
    "sensitivity_experiment",
    "timing_benchmark",
    "crossval_accuracy",
]


def summarize(values) -> dict:
    """Five-number summary plus mean; empty input gives NaNs."""
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return {k: float("nan") for k in ("min", "q1", "median", "q3", "max", "mean")}
    q1, med, q3 = np.percentile(a, [25, 50, 75])
    return {
        "min": float(a.min()),
        "q1": float(q1),
        "median": float(med),
        "q3": float(q3),
        "max": float(a.max()),
        "mean": float(a.mean()),
    }


# ---------------------------------------------------------------------------
# sensitivity


@dataclass
class SensitivityReport:
    measure: MeasureKind
    same_class_deltas: list[float]
    different_class_deltas: list[float]
    records: list[dict] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        return {
            "same": summarize(self.same_class_deltas),
            "different": summarize(self.different_class_deltas),
        }

    def to_dict(self) -> dict:
        return {
            "measure": self.measure.value,
            "same_class_deltas": self.same_class_deltas,
            "different_class_deltas": self.different_class_deltas,
            "summary": self.summary,
        }


def sensitivity_experiment(
    dataset: Dataset,
    measure,
    insertions_per_class: int = 5,
    seed: int = 0,
    *,
    normalize: str = "minmax",
    graph="complete",
) -> SensitivityReport:
    """Compare the perturbation caused by same-class and other-class insertions.

    For every class, ``insertions_per_class`` members are held out and the
    network is built from the rest. Each held-out member is re-inserted
    (same-class) and the same number of samples drawn from the other classes
    is inserted too (different-class). Deltas are absolute.
    """
    measure = MeasureKind.parse(measure)
    m = int(insertions_per_class)
    if m < 1:
        raise ConfigError("insertions_per_class must be >= 1")
    classes = dataset.classes
    if classes.size < 2:
        raise DataError("sensitivity experiment needs at least 2 classes")
    Z = apply_normalization(fit_normalization(dataset.features, normalize), dataset.features)
    rng = np.random.default_rng(seed)
    same, diff, records = [], [], []
    for c in classes:
        members = np.flatnonzero(dataset.labels == c)
        others = np.flatnonzero(dataset.labels != c)
        if m >= members.size:
            raise ConfigError(
                f"class {c!r} has {members.size} samples; cannot hold out {m} and keep a network"
            )
        if m > others.size:
            raise ConfigError(f"only {others.size} samples outside class {c!r}, {m} requested")
        held = rng.choice(members, size=m, replace=False)
        foreign = rng.choice(others, size=m, replace=False)
        kept = np.setdiff1d(members, held)
        net = ClassNetwork(str(c), Z[kept], graph)
        for kind, picks, sink in (("same", held, same), ("different", foreign, diff)):
            for i in picks:
                dg = delta_g(net, Z[i], measure)
                sink.append(dg)
                records.append(
                    {
                        "network": str(c),
                        "insertion": kind,
                        "sample": int(i),
                        "sample_label": str(dataset.labels[i]),
                        "delta": dg,
                    }
                )
    return SensitivityReport(measure, same, diff, records)


# ---------------------------------------------------------------------------
# timing


@dataclass
class TimingStats:
    """Wall-clock statistics in milliseconds."""

    mean: float
    std: float
    min: float
    max: float
    p25: float
    p50: float
    p75: float
    samples: int = 0

    @classmethod
    def from_samples(cls, ms) -> "TimingStats":
        a = np.asarray(ms, dtype=float)
        p25, p50, p75 = np.percentile(a, [25, 50, 75])
        lo, hi = float(a.min()), float(a.max())
        mean = min(max(float(a.mean()), lo), hi)  # rounding guard
        std = float(a.std(ddof=1)) if a.size > 1 else 0.0
        return cls(mean, std, lo, hi, float(p25), float(p50), float(p75), int(a.size))

    def to_dict(self) -> dict:
        return asdict(self)


def timing_benchmark(
    graph_size: int = 300,
    repetitions: int = 1000,
    seed: int = 0,
    *,
    n_graphs: int = 3,
    dim: int = 2,
) -> tuple[TimingStats, TimingStats]:
    """Time Kruskal and Dijkstra on the same prebuilt complete graphs.

    ``n_graphs`` random point clouds are built up front and visited
    round-robin; only the measure computation is inside the timed region.
    Runs on the calling thread.
    """
    if repetitions < 30:
        raise ConfigError("repetitions must be >= 30")
    if graph_size < 50:
        raise ConfigError("graph_size must be >= 50")
    if n_graphs < 1:
        raise ConfigError("n_graphs must be >= 1")
    rng = np.random.default_rng(seed)
    graphs = []
    for _ in range(n_graphs):
        pts = rng.random((graph_size, dim))
        g = build_distance_graph(pts, "complete")
        g.edges  # materialise the edge list outside the timed region
        graphs.append((g, select_source(pts)))
    for g, s in graphs:  # warm-up / JIT compilation
        kruskal_mst(g)
        dijkstra_sssp(g, s)

    clock = time.perf_counter
    mst_ms = np.empty(repetitions)
    sssp_ms = np.empty(repetitions)
    for r in range(repetitions):
        g, s = graphs[r % n_graphs]
        t0 = clock()
        kruskal_mst(g)
        t1 = clock()
        dijkstra_sssp(g, s)
        t2 = clock()
        mst_ms[r] = (t1 - t0) * 1e3
        sssp_ms[r] = (t2 - t1) * 1e3
    log.debug("timing benchmark backend=%s n=%d reps=%d", kernels.backend(), graph_size, repetitions)
    return TimingStats.from_samples(mst_ms), TimingStats.from_samples(sssp_ms)


# ---------------------------------------------------------------------------
# cross-validation


@dataclass
class CvReport:
    k: int
    per_fold_accuracy: list  # None for skipped folds
    confusion: dict  # true label -> predicted label -> count
    fold_assignments: list[int]
    warnings: list[str] = field(default_factory=list)

    @property
    def evaluated(self) -> np.ndarray:
        return np.array([a for a in self.per_fold_accuracy if a is not None], dtype=float)

    @property
    def median(self) -> float:
        return float(np.median(self.evaluated)) if self.evaluated.size else float("nan")

    @property
    def mean(self) -> float:
        return float(self.evaluated.mean()) if self.evaluated.size else float("nan")

    @property
    def std(self) -> float:
        a = self.evaluated
        return float(a.std(ddof=1)) if a.size > 1 else 0.0

    @property
    def total(self) -> int:
        return sum(sum(row.values()) for row in self.confusion.values())

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "per_fold_accuracy": self.per_fold_accuracy,
            "median": self.median,
            "mean": self.mean,
            "std": self.std,
            "confusion": self.confusion,
            "fold_assignments": self.fold_assignments,
            "warnings": self.warnings,
        }


def _run_fold(dataset: Dataset, config: ClassifierConfig, train, test):
    model = fit(dataset.subset(train), config)
    preds = predict_batch(model, dataset.features[test])
    return [p.label for p in preds]


def crossval_accuracy(
    dataset: Dataset,
    config: ClassifierConfig | None = None,
    k: int = 10,
    seed: int = 0,
    *,
    workers: int = 1,
) -> CvReport:
    """Stratified k-fold accuracy; normalisation is refitted on every training fold.

    ``workers > 1`` evaluates folds on a thread pool; results are identical to
    the sequential run.
    """
    config = config or ClassifierConfig()
    plan = stratified_kfold(dataset.labels, k, seed)
    classes = [str(c) for c in dataset.classes]
    warnings: list[str] = []
    jobs = []
    for f, (train, test) in enumerate(plan.splits()):
        train_classes = set(str(c) for c in np.unique(dataset.labels[train]))
        test_classes = set(str(c) for c in np.unique(dataset.labels[test]))
        missing_train = [c for c in classes if c not in train_classes]
        missing_test = [c for c in classes if c not in test_classes]
        if missing_train:
            warnings.append(f"fold {f}: classes {missing_train} absent from training data; fold skipped")
            jobs.append(None)
            continue
        if missing_test:
            warnings.append(f"fold {f}: classes {missing_test} absent from the held-out fold")
        jobs.append((train, test))

    def run(job):
        return None if job is None else _run_fold(dataset, config, *job)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(run, jobs))
    else:
        outputs = [run(j) for j in jobs]

    confusion = {c: {p: 0 for p in classes} for c in classes}
    accuracy = []
    for job, predicted in zip(jobs, outputs):
        if job is None:
            accuracy.append(None)
            continue
        truth = dataset.labels[job[1]]
        correct = 0
        for t, p in zip(truth, predicted):
            t, p = str(t), str(p)
            confusion[t][p] += 1
            correct += t == p
        accuracy.append(correct / len(truth))
    return CvReport(k, accuracy, confusion, plan.assignments.tolist(), warnings)
