"""Generative checks of the graph and classifier invariants (>= 100 examples each)."""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from netclass import (
    ClassNetwork,
    Dataset,
    build_distance_graph,
    delta_g,
    dijkstra_sssp,
    fit,
    kruskal_mst,
    measure_with_insertion,
    predict_batch,
)

N_EXAMPLES = 120
PROPS = settings(max_examples=N_EXAMPLES, deadline=None, suppress_health_check=[HealthCheck.too_slow])

# millesimal grid keeps squared distances away from underflow
coord = st.integers(-100_000, 100_000).map(lambda i: i / 1000.0)


@st.composite
def point_sets(draw, min_n=1, max_n=25, dim=None):
    d = dim or draw(st.integers(1, 4))
    n = draw(st.integers(min_n, max_n))
    return draw(hnp.arrays(np.float64, (n, d), elements=coord))


def close(a, b, rel=1e-9):
    return abs(a - b) <= rel * max(abs(a), abs(b)) + 1e-12


@PROPS
@given(point_sets(), st.randoms(use_true_random=False))
def test_permutation_invariance(X, random):
    n = X.shape[0]
    perm = list(range(n))
    random.shuffle(perm)
    perm = np.array(perm)
    g1 = build_distance_graph(X)
    g2 = build_distance_graph(X[perm])
    assert close(kruskal_mst(g1).total_weight, kruskal_mst(g2).total_weight)
    s = random.randrange(n)
    s2 = int(np.flatnonzero(perm == s)[0])
    d1 = np.sort(dijkstra_sssp(g1, s).dist)
    d2 = np.sort(dijkstra_sssp(g2, s2).dist)
    np.testing.assert_allclose(d1, d2, rtol=1e-9, atol=1e-12)


@PROPS
@given(point_sets(), st.floats(0.01, 100.0))
def test_positive_scaling(X, c):
    g1 = build_distance_graph(X)
    g2 = build_distance_graph(X * c)
    np.testing.assert_allclose(g2.dense, c * g1.dense, rtol=1e-9, atol=1e-9)
    assert close(kruskal_mst(g2).total_weight, c * kruskal_mst(g1).total_weight)
    np.testing.assert_allclose(dijkstra_sssp(g2, 0).dist, c * dijkstra_sssp(g1, 0).dist, rtol=1e-9, atol=1e-9)


@PROPS
@given(point_sets(), st.data())
def test_mst_not_heavier_than_sssp(X, data):
    g = build_distance_graph(X)
    s = data.draw(st.integers(0, X.shape[0] - 1))
    assert kruskal_mst(g).total_weight <= dijkstra_sssp(g, s).total * (1 + 1e-12) + 1e-12


@PROPS
@given(point_sets(min_n=2), st.data(), st.sampled_from(["complete", "knn:1", "knn:3"]))
def test_shortest_path_optimality(X, data, mode):
    if mode != "complete" and int(mode[-1]) >= X.shape[0]:
        mode = "complete"
    g = build_distance_graph(X, mode)
    s = data.draw(st.integers(0, X.shape[0] - 1))
    r = dijkstra_sssp(g, s)
    u, v, w = g.edges
    slack = 1e-9 * (1 + r.dist.max())
    assert np.all(r.dist[v] <= r.dist[u] + w + slack)
    assert np.all(r.dist[u] <= r.dist[v] + w + slack)
    assert r.dist[s] == 0.0
    for node in range(X.shape[0]):
        p = r.parent[node]
        if p >= 0:
            assert close(r.dist[node], r.dist[p] + g.weight(p, node))


@PROPS
@given(point_sets(min_n=2), hnp.arrays(np.float64, 4, elements=coord), st.sampled_from(["mst", "sssp"]))
def test_delta_nonnegative(X, q, kind):
    d = X.shape[1]
    net = ClassNetwork("a", X)
    assert delta_g(net, q[:d], kind) >= 0.0
    if net.baseline(kind) > 0:
        assert delta_g(net, q[:d], kind, "rel") >= 0.0


@PROPS
@given(point_sets(), st.data())
def test_duplicate_insertion_is_zero(X, data):
    net = ClassNetwork("a", X)
    i = data.draw(st.integers(0, X.shape[0] - 1))
    assert delta_g(net, X[i], "mst") == 0.0
    assert delta_g(net, X[net.source], "sssp") == 0.0


@PROPS
@given(point_sets(min_n=2, max_n=12), hnp.arrays(np.float64, 4, elements=coord))
def test_insertion_never_mutates(X, q):
    net = ClassNetwork("a", X)
    before = (net.baseline_mst, net.baseline_sssp)
    for kind in ("mst", "sssp"):
        measure_with_insertion(net, q[: X.shape[1]], kind)
    assert (net.baseline_mst, net.baseline_sssp) == before


@st.composite
def labelled_sets(draw):
    X = draw(point_sets(min_n=4, max_n=20, dim=2))
    n = X.shape[0]
    labels = draw(st.lists(st.sampled_from(["a", "b", "c"]), min_size=n, max_size=n))
    if len(set(labels)) < 2:
        labels[0], labels[-1] = "a", "b"
    return Dataset(X, np.array(labels))


@PROPS
@given(
    labelled_sets(),
    hnp.arrays(np.float64, (3, 2), elements=coord),
    st.floats(0.01, 100.0),
    st.sampled_from(["mst", "sssp"]),
)
def test_prediction_scale_invariance(ds, queries, c, measure):
    a = predict_batch(fit(ds, measure=measure, normalize="none"), queries)
    b = predict_batch(fit(Dataset(ds.features * c, ds.labels), measure=measure, normalize="none"), queries * c)
    for pa, pb in zip(a, b):
        vals = sorted(pa.deltas.values())
        if vals[1] - vals[0] <= 1e-9 * max(vals[1], 1e-12):
            continue  # near-tie: argmin is decided by rounding
        assert pa.label == pb.label
        for k in pa.deltas:
            assert close(pb.deltas[k], c * pa.deltas[k], rel=1e-8)
