"""Euclidean distance graphs and the two network measures.

A :class:`DistanceGraph` is immutable. Complete graphs keep the dense distance
matrix and expose their edge list lazily; k-nearest-neighbour graphs keep an
edge list plus a CSR adjacency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import ConfigError, DataError, DisconnectedGraphError

__all__ = [
    "DistanceGraph",
    "DisjointSet",
    "SpanningTree",
    "ShortestPathResult",
    "GraphMode",
    "parse_graph_mode",
    "build_distance_graph",
    "kruskal_mst",
    "dijkstra_sssp",
    "select_source",
]


@dataclass(frozen=True)
class GraphMode:
    """``complete`` (k is None) or ``knn(k)``."""

    k: int | None = None

    @property
    def is_complete(self) -> bool:
        return self.k is None

    def __str__(self) -> str:
        return "complete" if self.k is None else f"knn:{self.k}"


COMPLETE = GraphMode()


def parse_graph_mode(text) -> GraphMode:
    """Accepts ``"complete"``, ``"knn:5"``, ``"knn(5)"``, an int or a GraphMode."""
    if isinstance(text, GraphMode):
        return text
    if text is None:
        return COMPLETE
    if isinstance(text, (int, np.integer)):
        return GraphMode(int(text))
    s = str(text).strip().lower()
    if s == "complete":
        return COMPLETE
    for prefix, suffix in (("knn:", ""), ("knn(", ")"), ("knn=", "")):
        if s.startswith(prefix) and s.endswith(suffix):
            body = s[len(prefix) : len(s) - len(suffix)]
            try:
                k = int(body)
            except ValueError:
                break
            if k < 1:
                raise ConfigError(f"knn k must be >= 1, got {k}")
            return GraphMode(k)
    raise ConfigError(f"unknown graph mode {text!r}; use 'complete' or 'knn:K'")


def _readonly(a):
    a.setflags(write=False)
    return a


class DistanceGraph:
    """Undirected weighted graph over ``node_count`` sample nodes.

    Edges are stored once per unordered pair with ``u < v`` in lexicographic
    order.
    """

    def __init__(self, node_count, u=None, v=None, w=None, *, dense=None, mode=None):
        self.node_count = int(node_count)
        self.mode = mode
        self._dense = None if dense is None else _readonly(dense)
        if u is not None:
            self._set_edges(u, v, w)

    def _set_edges(self, u, v, w):
        self.__dict__["_edges"] = (
            _readonly(np.asarray(u, dtype=np.int64)),
            _readonly(np.asarray(v, dtype=np.int64)),
            _readonly(np.asarray(w, dtype=np.float64)),
        )

    @classmethod
    def from_dense(cls, D: np.ndarray, *, validate: bool = True) -> "DistanceGraph":
        """Complete graph from a symmetric matrix of non-negative finite weights."""
        D = np.ascontiguousarray(D, dtype=np.float64)
        if validate:
            if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] < 1:
                raise DataError(f"expected a non-empty square matrix, got shape {D.shape}")
            if not np.all(np.isfinite(D)):
                raise DataError("edge weights must be finite")
            if np.any(D < 0):
                raise DataError("edge weights must be non-negative")
            if not np.array_equal(D, D.T):
                raise DataError("weight matrix is not symmetric")
        return cls(D.shape[0], dense=D, mode=COMPLETE)

    @classmethod
    def from_edges(cls, node_count: int, edges, *, mode: GraphMode | None = None) -> "DistanceGraph":
        """Graph from ``(u, v, weight)`` triples. Rejects self-loops and duplicate pairs."""
        if node_count < 1:
            raise DataError("graph needs at least one node")
        arr = [(int(a), int(b), float(c)) for a, b, c in edges]
        u = np.array([min(a, b) for a, b, _ in arr], dtype=np.int64)
        v = np.array([max(a, b) for a, b, _ in arr], dtype=np.int64)
        w = np.array([c for _, _, c in arr], dtype=np.float64)
        if np.any(u == v):
            raise DataError("self-loops are not allowed")
        if u.size and (u.min() < 0 or v.max() >= node_count):
            raise DataError("edge endpoint out of range")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DataError("edge weights must be finite and non-negative")
        order = np.lexsort((v, u))
        u, v, w = u[order], v[order], w[order]
        if u.size > 1 and np.any((u[1:] == u[:-1]) & (v[1:] == v[:-1])):
            raise DataError("duplicate edge")
        return cls(node_count, u, v, w, mode=mode)

    # -- views -------------------------------------------------------------

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    @property
    def dense(self) -> np.ndarray | None:
        return self._dense

    @cached_property
    def _edges(self):
        D = self._dense
        iu, iv = np.triu_indices(self.node_count, 1)
        return _readonly(iu.astype(np.int64)), _readonly(iv.astype(np.int64)), _readonly(D[iu, iv])

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(u, v, weight)`` arrays, ``u < v``, lexicographic."""
        return self._edges

    @property
    def edge_count(self) -> int:
        if self._dense is not None and "_edges" not in self.__dict__:
            return self.node_count * (self.node_count - 1) // 2
        return int(self._edges[0].size)

    @property
    def representation_tag(self) -> str:
        """``complete``, ``knn(k)``, or ``edges`` for graphs given as an explicit edge list."""
        if self.mode is None:
            return "edges"
        if self.mode.is_complete:
            return "complete"
        return f"knn({self.mode.k})"

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric adjacency as ``(indptr, indices, weights)``, neighbours sorted by id."""
        u, v, w = self.edges
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        wt = np.concatenate([w, w])
        order = np.lexsort((dst, src))
        src, dst, wt = src[order], dst[order], wt[order]
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.node_count), out=indptr[1:])
        return _readonly(indptr), _readonly(dst), _readonly(np.ascontiguousarray(wt))

    def weight(self, a: int, b: int) -> float | None:
        """Weight of edge ``{a, b}`` or None when absent."""
        if a == b:
            return None
        if self._dense is not None:
            return float(self._dense[a, b])
        indptr, indices, data = self.csr
        lo, hi = indptr[a], indptr[a + 1]
        p = lo + np.searchsorted(indices[lo:hi], b)
        if p < hi and indices[p] == b:
            return float(data[p])
        return None

    def __repr__(self):
        return f"DistanceGraph(n={self.node_count}, edges={self.edge_count}, {self.representation_tag})"


class DisjointSet:
    """Union-find over ``0..size-1`` with union by rank and path halving.

    >>> ds = DisjointSet(3)
    >>> ds.union(0, 2)
    True
    >>> ds.find(0) == ds.find(2), ds.find(0) == ds.find(1)
    (True, False)
    """

    def __init__(self, size: int):
        if size < 0:
            raise ValueError("size must be non-negative")
        self.parent = list(range(size))
        self.rank = [0] * size
        self.n_sets = size

    def __len__(self):
        return len(self.parent)

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        """Merge the sets holding ``a`` and ``b``; False if they were already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        self.n_sets -= 1
        return True

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


@dataclass(frozen=True)
class SpanningTree:
    u: np.ndarray
    v: np.ndarray
    weights: np.ndarray
    total_weight: float

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.u.tolist(), self.v.tolist(), self.weights.tolist()))

    def __len__(self):
        return int(self.u.size)


@dataclass(frozen=True)
class ShortestPathResult:
    source: int
    dist: np.ndarray
    parent: np.ndarray  # -1 where there is no predecessor
    total: float


def _check_samples(samples) -> np.ndarray:
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1:
        raise DataError(f"samples must be a non-empty n x d matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(X))[0]
        raise DataError(f"non-finite feature value at row {bad[0]}, column {bad[1]}")
    return X


def knn_edges(D: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetrised k-nearest-neighbour edges plus the complete-graph MST edges."""
    n = D.shape[0]
    masked = D.copy()
    np.fill_diagonal(masked, np.inf)
    # stable sort: equal distances resolve to the lower neighbour index
    nbrs = np.argsort(masked, axis=1, kind="stable")[:, :k]
    rows = np.repeat(np.arange(n), k)
    cols = nbrs.ravel()
    full_u, full_v = np.triu_indices(n, 1)
    chosen, _ = kernels.kruskal(n, full_u.astype(np.int64), full_v.astype(np.int64), D[full_u, full_v])
    u = np.concatenate([np.minimum(rows, cols), full_u[chosen]])
    v = np.concatenate([np.maximum(rows, cols), full_v[chosen]])
    pairs = np.unique(u * n + v)
    u, v = pairs // n, pairs % n
    return u.astype(np.int64), v.astype(np.int64), D[u, v]


def build_distance_graph(samples, mode="complete") -> DistanceGraph:
    """Euclidean distance graph over the rows of ``samples``.

    ``mode`` is ``"complete"`` (all n(n-1)/2 pairs) or ``"knn:k"``: each node's
    k nearest neighbours, symmetrised, plus the edges of the complete-graph MST
    so the result is always connected.
    """
    X = _check_samples(samples)
    gm = parse_graph_mode(mode)
    n = X.shape[0]
    D = kernels.pairwise_distances(X)
    if gm.is_complete:
        return DistanceGraph(n, dense=D, mode=gm)
    if not 1 <= gm.k < n:
        raise ConfigError(f"knn requires 1 <= k < n, got k={gm.k}, n={n}")
    u, v, w = knn_edges(D, gm.k)
    return DistanceGraph(n, u, v, w, mode=gm)


def kruskal_mst(graph: DistanceGraph) -> SpanningTree:
    """Minimum spanning tree by Kruskal's algorithm.

    Edges are considered in ``(weight, u, v)`` order, so the returned tree is
    deterministic even when several minimum trees exist.
    """
    n = graph.node_count
    u, v, w = graph.edges
    chosen, _ = kernels.kruskal(n, u, v, w)
    if chosen.size != n - 1:
        raise DisconnectedGraphError(n - int(chosen.size))
    weights = w[chosen]
    # exactly rounded, so the total does not depend on edge order
    return SpanningTree(u[chosen], v[chosen], weights, math.fsum(weights.tolist()))


def dijkstra_sssp(graph: DistanceGraph, source: int) -> ShortestPathResult:
    """Shortest-path distances from ``source`` using a binary-heap Dijkstra.

    Among equal tentative distances the lower node id is settled first.
    """
    n = graph.node_count
    if not (isinstance(source, (int, np.integer)) and 0 <= source < n):
        raise DataError(f"source {source!r} is not a node of a graph with {n} nodes")
    source = int(source)
    if graph.is_dense:
        dist, parent = kernels.dijkstra_dense(graph.dense, source)
    else:
        indptr, indices, data = graph.csr
        dist, parent = kernels.dijkstra_csr(indptr, indices, data, source)
    unreachable = int(np.count_nonzero(~np.isfinite(dist)))
    if unreachable:
        raise DataError(f"{unreachable} nodes unreachable from source {source}")
    return ShortestPathResult(source, dist, parent, math.fsum(dist.tolist()))


def select_source(samples) -> int:
    """Index of the sample nearest the feature-space mean (lowest index on ties).

    Distances within ``1e-12 * max distance`` of the minimum count as tied, so
    the choice survives rescaling and rounding in the mean.
    """
    X = _check_samples(samples)
    centre = X.mean(axis=0)
    d = kernels.distances_to_point(X, centre)
    tol = 1e-12 * float(d.max())
    return int(np.flatnonzero(d <= d.min() + tol)[0])
