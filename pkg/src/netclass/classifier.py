"""Per-class distance networks and classification by smallest measure perturbation.

Training builds one network per class and records its MST weight and its
shortest-path distance sum from a centroid source. A query is inserted into
each network in turn; the class whose measure moves least wins.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import kernels
from .data import Dataset, NormalizationParams, apply_normalization, fit_normalization, NORMALIZATION_SCHEMES
from .errors import ConfigError, DataError, DegenerateClassError, InvariantError
from .graph import (
    DistanceGraph,
    GraphMode,
    build_distance_graph,
    dijkstra_sssp,
    kruskal_mst,
    parse_graph_mode,
    select_source,
)

__all__ = [
    "MeasureKind",
    "VariationMode",
    "ClassifierConfig",
    "ClassNetwork",
    "Model",
    "Prediction",
    "fit",
    "measure_with_insertion",
    "delta_g",
    "predict",
    "predict_batch",
    "save_model",
    "load_model",
]

MODEL_FORMAT = "netclass-model"
MODEL_VERSION = 1


class MeasureKind(str, Enum):
    MST = "mst"
    SSSP = "sssp"

    @classmethod
    def parse(cls, value) -> "MeasureKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"unknown measure {value!r}; expected 'mst' or 'sssp'") from None


class VariationMode(str, Enum):
    ABSOLUTE = "abs"
    RELATIVE = "rel"

    @classmethod
    def parse(cls, value) -> "VariationMode":
        if isinstance(value, cls):
            return value
        s = str(value).strip().lower()
        s = {"absolute": "abs", "relative": "rel"}.get(s, s)
        try:
            return cls(s)
        except ValueError:
            raise ConfigError(f"unknown variation {value!r}; expected 'abs' or 'rel'") from None


@dataclass(frozen=True)
class ClassifierConfig:
    measure: MeasureKind = MeasureKind.MST
    variation: VariationMode = VariationMode.ABSOLUTE
    normalize: str = "minmax"
    graph: GraphMode = field(default_factory=GraphMode)

    def __post_init__(self):
        object.__setattr__(self, "measure", MeasureKind.parse(self.measure))
        object.__setattr__(self, "variation", VariationMode.parse(self.variation))
        object.__setattr__(self, "graph", parse_graph_mode(self.graph))
        if self.normalize not in NORMALIZATION_SCHEMES:
            raise ConfigError(f"unknown normalization {self.normalize!r}")

    def to_dict(self) -> dict:
        return {
            "measure": self.measure.value,
            "variation": self.variation.value,
            "normalize": self.normalize,
            "graph": str(self.graph),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierConfig":
        return cls(d["measure"], d["variation"], d["normalize"], d["graph"])


class ClassNetwork:
    """One class's samples, their distance graph, the SSSP source and both baselines."""

    def __init__(self, label, samples, graph_mode=None, source: int | None = None):
        self.label = label
        self.samples = np.array(samples, dtype=np.float64)
        if self.samples.ndim != 2 or self.samples.shape[0] < 1:
            raise DataError(f"class {label!r} has no samples")
        self.samples.setflags(write=False)
        self.graph_mode = parse_graph_mode(graph_mode)
        self.graph: DistanceGraph = build_distance_graph(self.samples, self.graph_mode)
        self.source = select_source(self.samples) if source is None else int(source)
        self.baseline_mst = kruskal_mst(self.graph).total_weight
        self.baseline_sssp = dijkstra_sssp(self.graph, self.source).total

    @property
    def size(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def baseline(self, kind: MeasureKind) -> float:
        return self.baseline_mst if MeasureKind.parse(kind) is MeasureKind.MST else self.baseline_sssp

    def augmented_graph(self, x: np.ndarray) -> DistanceGraph:
        """The network's graph with ``x`` appended as node ``size``."""
        if self.graph_mode.is_complete:
            n = self.size
            dx = kernels.distances_to_point(self.samples, x)
            D = np.empty((n + 1, n + 1))
            D[:n, :n] = self.graph.dense
            D[n, :n] = dx
            D[:n, n] = dx
            D[n, n] = 0.0
            return DistanceGraph.from_dense(D, validate=False)
        return build_distance_graph(np.vstack([self.samples, x[None, :]]), self.graph_mode)

    def __repr__(self):
        return (
            f"ClassNetwork(label={self.label!r}, n={self.size}, source={self.source}, "
            f"mst={self.baseline_mst:.6g}, sssp={self.baseline_sssp:.6g})"
        )


def _check_query(network: ClassNetwork, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != network.dim:
        raise DataError(f"query has {x.size} features, model expects {network.dim}")
    if not np.all(np.isfinite(x)):
        raise DataError("query contains non-finite values")
    return x


def measure_with_insertion(network: ClassNetwork, x, kind) -> float:
    """Measure of the network after inserting ``x``; the network itself is untouched.

    The SSSP source stays the one chosen at fit time.
    """
    kind = MeasureKind.parse(kind)
    x = _check_query(network, x)
    g = network.augmented_graph(x)
    if kind is MeasureKind.MST:
        return kruskal_mst(g).total_weight
    return dijkstra_sssp(g, network.source).total


def delta_g(network: ClassNetwork, x, kind, mode=VariationMode.ABSOLUTE) -> float:
    kind = MeasureKind.parse(kind)
    mode = VariationMode.parse(mode)
    before = network.baseline(kind)
    if mode is VariationMode.RELATIVE and before <= 0:
        raise DegenerateClassError(
            f"class {network.label!r}: baseline {kind.value} measure is 0, relative variation undefined"
        )
    after = measure_with_insertion(network, x, kind)
    change = abs(before - after)
    return change / before if mode is VariationMode.RELATIVE else change


@dataclass
class Prediction:
    label: object
    deltas: dict

    def to_dict(self) -> dict:
        return {"label": _jsonable(self.label), "deltas": {str(k): v for k, v in self.deltas.items()}}


@dataclass
class Model:
    networks: list[ClassNetwork]
    normalization: NormalizationParams
    config: ClassifierConfig

    @property
    def classes(self) -> list:
        return [net.label for net in self.networks]

    @property
    def n_features(self) -> int:
        return self.networks[0].dim


def fit(dataset: Dataset, config: ClassifierConfig | None = None, **overrides) -> Model:
    """Build one class network per distinct label, in sorted label order."""
    if config is None:
        config = ClassifierConfig(**overrides)
    elif overrides:
        raise TypeError("pass either a config or keyword overrides, not both")
    classes = dataset.classes
    if classes.size < 2:
        raise DataError(f"need at least 2 classes to train, got {classes.size}")
    params = fit_normalization(dataset.features, config.normalize)
    Z = apply_normalization(params, dataset.features)
    networks = []
    for c in classes:
        members = Z[dataset.labels == c]
        if members.shape[0] == 0:  # pragma: no cover - np.unique guarantees members
            raise DataError(f"class {c!r} has no samples")
        networks.append(ClassNetwork(_jsonable(c), members, config.graph))
    return Model(networks, params, config)


def _argmin_prediction(model: Model, z: np.ndarray) -> Prediction:
    cfg = model.config
    values = [delta_g(net, z, cfg.measure, cfg.variation) for net in model.networks]
    best = int(np.argmin(values))  # first minimum = lowest class in label order
    return Prediction(model.networks[best].label, {net.label: v for net, v in zip(model.networks, values)})


def predict(model: Model, x_raw) -> Prediction:
    x = np.asarray(x_raw, dtype=np.float64).reshape(-1)
    if x.size != model.n_features:
        raise DataError(f"query has {x.size} features, model expects {model.n_features}")
    if not np.all(np.isfinite(x)):
        raise DataError("query contains non-finite values")
    return _argmin_prediction(model, apply_normalization(model.normalization, x))


def predict_batch(model: Model, X) -> list[Prediction]:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("predict_batch needs at least one query row")
    out = []
    for i, row in enumerate(X):
        try:
            out.append(predict(model, row))
        except DataError as exc:
            raise type(exc)(f"row {i}: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# persistence


def _jsonable(value):
    return value.item() if isinstance(value, np.generic) else value


def model_to_dict(model: Model) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "config": model.config.to_dict(),
        "normalization": model.normalization.to_dict(),
        "classes": [
            {
                "label": net.label,
                "source": net.source,
                "baseline_mst": net.baseline_mst,
                "baseline_sssp": net.baseline_sssp,
                "samples": net.samples.tolist(),
            }
            for net in model.networks
        ],
    }


def model_from_dict(d: dict, *, verify: bool = True) -> Model:
    if d.get("format") != MODEL_FORMAT:
        raise DataError(f"not a {MODEL_FORMAT} document")
    if d.get("version") != MODEL_VERSION:
        raise DataError(f"unsupported model version {d.get('version')!r}")
    try:
        config = ClassifierConfig.from_dict(d["config"])
        params = NormalizationParams.from_dict(d["normalization"])
        networks = [
            ClassNetwork(c["label"], np.asarray(c["samples"], dtype=float), config.graph, source=c["source"])
            for c in d["classes"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"malformed model document: {exc}") from exc
    if verify:
        for net, c in zip(networks, d["classes"]):
            for name, have in (("baseline_mst", net.baseline_mst), ("baseline_sssp", net.baseline_sssp)):
                want = float(c[name])
                if not math.isclose(have, want, rel_tol=1e-9, abs_tol=1e-12):
                    raise InvariantError(
                        f"class {net.label!r}: stored {name}={want!r} but recomputed {have!r}"
                    )
    return Model(networks, params, config)


def save_model(model: Model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)), encoding="utf-8")


def load_model(path) -> Model:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such model file")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(doc)
