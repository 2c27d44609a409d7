"""Hot numeric kernels: pairwise distances, Kruskal, Dijkstra.

Every kernel has two implementations: a numba ``@njit`` version and a
numpy/heapq fallback. Both use the same tie-breaking rules so they return the
same spanning trees, distances and parents. Edge weights and distances
may differ in the last ulp because the distance reductions are summed in a
different order.

The active backend is chosen at import time (``NETCLASS_DISABLE_NUMBA``) and
can be switched at runtime with :func:`use_backend`.
"""

from __future__ import annotations

import contextlib
import heapq

import numpy as np

from . import _accel
from ._accel import njit

BACKENDS = ("numba", "numpy")

_backend = "numpy" if (_accel.NUMBA_DISABLED_BY_ENV or not _accel.HAVE_NUMBA) else "numba"


def backend() -> str:
    """Name of the active kernel backend."""
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba" and not _accel.HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


@contextlib.contextmanager
def use_backend(name: str):
    previous = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def edge_order(u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Edge indices sorted by ``(w, u, v)``.

    numpy's introsort beats any jitted sort here, so both backends share this.
    Only the runs of tied weights get the (slower) lexicographic pass.
    """
    order = np.argsort(w)
    ws = w[order]
    tied = ws[1:] == ws[:-1]
    if not tied.any():
        return order
    slots = np.zeros(order.size, dtype=bool)
    slots[1:] |= tied
    slots[:-1] |= tied
    pos = np.flatnonzero(slots)
    sub = order[pos]
    order[pos] = sub[np.lexsort((v[sub], u[sub], w[sub]))]
    return order


# ---------------------------------------------------------------------------
# numba kernels


@njit(cache=True, nogil=True)
def _pairwise_nb(X):
    n, d = X.shape
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for k in range(d):
                diff = X[i, k] - X[j, k]
                s += diff * diff
            r = np.sqrt(s)
            D[i, j] = r
            D[j, i] = r
    return D


@njit(cache=True, nogil=True)
def _to_point_nb(X, x):
    n, d = X.shape
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        for k in range(d):
            diff = X[i, k] - x[k]
            s += diff * diff
        out[i] = np.sqrt(s)
    return out


@njit(cache=True, nogil=True)
def _find_nb(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def _kruskal_nb(n, u, v, w, order):
    parent = np.arange(n)
    rank = np.zeros(n, np.int64)
    chosen = np.empty(max(n - 1, 0), np.int64)
    k = 0
    total = 0.0
    for idx in range(order.size):
        if k >= n - 1:
            break
        e = order[idx]
        ru = _find_nb(parent, u[e])
        rv = _find_nb(parent, v[e])
        if ru == rv:
            continue
        if rank[ru] < rank[rv]:
            parent[ru] = rv
        elif rank[ru] > rank[rv]:
            parent[rv] = ru
        else:
            parent[rv] = ru
            rank[ru] += 1
        chosen[k] = e
        k += 1
        total += w[e]
    return chosen[:k], total


@njit(cache=True, nogil=True)
def _heap_less(dist, a, b):
    return dist[a] < dist[b] or (dist[a] == dist[b] and a < b)


@njit(cache=True, nogil=True)
def _sift_up(heap, pos, dist, i):
    node = heap[i]
    while i > 0:
        p = (i - 1) >> 1
        if _heap_less(dist, node, heap[p]):
            heap[i] = heap[p]
            pos[heap[i]] = i
            i = p
        else:
            break
    heap[i] = node
    pos[node] = i


@njit(cache=True, nogil=True)
def _sift_down(heap, pos, dist, i, size):
    node = heap[i]
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and _heap_less(dist, heap[c + 1], heap[c]):
            c += 1
        if _heap_less(dist, heap[c], node):
            heap[i] = heap[c]
            pos[heap[i]] = i
            i = c
        else:
            break
    heap[i] = node
    pos[node] = i


@njit(cache=True, nogil=True)
def _dijkstra_dense_nb(W, source):
    n = W.shape[0]
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, np.int64)
    done = np.zeros(n, np.bool_)
    heap = np.empty(n, np.int64)
    pos = np.full(n, -1, np.int64)
    dist[source] = 0.0
    heap[0] = source
    pos[source] = 0
    size = 1
    while size > 0:
        u = heap[0]
        pos[u] = -1
        size -= 1
        if size > 0:
            heap[0] = heap[size]
            _sift_down(heap, pos, dist, 0, size)
        done[u] = True
        du = dist[u]
        for v in range(n):
            if v == u or done[v]:
                continue
            nd = du + W[u, v]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                if pos[v] < 0:
                    heap[size] = v
                    size += 1
                    _sift_up(heap, pos, dist, size - 1)
                else:
                    _sift_up(heap, pos, dist, pos[v])
    return dist, parent


@njit(cache=True, nogil=True)
def _dijkstra_csr_nb(indptr, indices, data, source):
    n = indptr.size - 1
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, np.int64)
    done = np.zeros(n, np.bool_)
    heap = np.empty(n, np.int64)
    pos = np.full(n, -1, np.int64)
    dist[source] = 0.0
    heap[0] = source
    pos[source] = 0
    size = 1
    while size > 0:
        u = heap[0]
        pos[u] = -1
        size -= 1
        if size > 0:
            heap[0] = heap[size]
            _sift_down(heap, pos, dist, 0, size)
        done[u] = True
        du = dist[u]
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if done[v]:
                continue
            nd = du + data[p]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                if pos[v] < 0:
                    heap[size] = v
                    size += 1
                    _sift_up(heap, pos, dist, size - 1)
                else:
                    _sift_up(heap, pos, dist, pos[v])
    return dist, parent


# ---------------------------------------------------------------------------
# numpy fallbacks


def _pairwise_np(X, block=256):
    n = X.shape[0]
    D = np.empty((n, n))
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = X[start:stop, None, :] - X[None, :, :]
        D[start:stop] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    # mirror the upper triangle so D is exactly symmetric
    iu = np.triu_indices(n, 1)
    D[(iu[1], iu[0])] = D[iu]
    np.fill_diagonal(D, 0.0)
    return D


def _to_point_np(X, x):
    diff = X - x
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _find_np(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _kruskal_np(n, u, v, w, order):
    parent = list(range(n))
    rank = [0] * n
    chosen = []
    total = 0.0
    uu = u.tolist()
    vv = v.tolist()
    ww = w.tolist()
    for e in order.tolist():
        if len(chosen) >= n - 1:
            break
        ru = _find_np(parent, uu[e])
        rv = _find_np(parent, vv[e])
        if ru == rv:
            continue
        if rank[ru] < rank[rv]:
            parent[ru] = rv
        elif rank[ru] > rank[rv]:
            parent[rv] = ru
        else:
            parent[rv] = ru
            rank[ru] += 1
        chosen.append(e)
        total += ww[e]
    return np.asarray(chosen, dtype=np.int64), total


def _dijkstra_np(n, neighbors, source):
    """Lazy-deletion heapq Dijkstra; ``neighbors(u)`` yields ``(idx, weights)`` arrays."""
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u] or du > dist[u]:
            continue
        done[u] = True
        idx, wts = neighbors(u)
        nd = du + wts
        better = (nd < dist[idx]) & ~done[idx]
        if not better.any():
            continue
        tgt = idx[better]
        nd = nd[better]
        dist[tgt] = nd
        parent[tgt] = u
        for d_v, v in zip(nd.tolist(), tgt.tolist()):
            heapq.heappush(heap, (d_v, v))
    return dist, parent


def _dijkstra_dense_np(W, source):
    n = W.shape[0]
    everyone = np.arange(n)

    def neighbors(u):
        return everyone, W[u]

    dist, parent = _dijkstra_np(n, neighbors, source)
    return dist, parent


def _dijkstra_csr_np(indptr, indices, data, source):
    def neighbors(u):
        lo, hi = indptr[u], indptr[u + 1]
        return indices[lo:hi], data[lo:hi]

    return _dijkstra_np(indptr.size - 1, neighbors, source)


# ---------------------------------------------------------------------------
# dispatch


def pairwise_distances(X: np.ndarray) -> np.ndarray:
    """Dense symmetric Euclidean distance matrix with an exact zero diagonal."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if _backend == "numba":
        return _pairwise_nb(X)
    return _pairwise_np(X)


def distances_to_point(X: np.ndarray, x: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if _backend == "numba":
        return _to_point_nb(X, x)
    return _to_point_np(X, x)


def kruskal(n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, float]:
    """Indices of the accepted edges (in acceptance order) and their weight sum.

    Edges are scanned in ``(weight, u, v)`` order. Fewer than ``n - 1`` accepted
    edges means the graph is disconnected.
    """
    order = edge_order(u, v, w)
    if _backend == "numba":
        chosen, total = _kruskal_nb(n, u, v, w, order)
        return chosen, float(total)
    return _kruskal_np(n, u, v, w, order)


def dijkstra_dense(W: np.ndarray, source: int) -> tuple[np.ndarray, np.ndarray]:
    if _backend == "numba":
        return _dijkstra_dense_nb(W, source)
    return _dijkstra_dense_np(W, source)


def dijkstra_csr(indptr, indices, data, source: int) -> tuple[np.ndarray, np.ndarray]:
    if _backend == "numba":
        return _dijkstra_csr_nb(indptr, indices, data, source)
    return _dijkstra_csr_np(indptr, indices, data, source)
