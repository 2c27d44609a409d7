"""Pattern-based classification with per-class Euclidean networks.

Each class becomes a complete distance graph; a query is assigned to the class
whose minimum-spanning-tree weight (or centroid shortest-path sum) changes
least when the query is inserted.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DataError,
    DegenerateClassError,
    DisconnectedGraphError,
    InvariantError,
    NetClassError,
)
from .graph import (
    DisjointSet,
    DistanceGraph,
    GraphMode,
    ShortestPathResult,
    SpanningTree,
    build_distance_graph,
    dijkstra_sssp,
    kruskal_mst,
    select_source,
)
from .data import (
    BlobSpec,
    Dataset,
    FoldPlan,
    NormalizationParams,
    apply_normalization,
    fit_normalization,
    generate_blobs,
    load_csv,
    two_blobs,
    stratified_kfold,
)
from .classifier import (
    ClassifierConfig,
    ClassNetwork,
    MeasureKind,
    Model,
    Prediction,
    VariationMode,
    delta_g,
    fit,
    load_model,
    measure_with_insertion,
    predict,
    predict_batch,
    save_model,
)
from .experiments import (
    CvReport,
    SensitivityReport,
    TimingStats,
    crossval_accuracy,
    sensitivity_experiment,
    timing_benchmark,
)
