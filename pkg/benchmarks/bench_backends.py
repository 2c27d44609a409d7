"""Compare the numba kernels with the pure-numpy fallback.

    python benchmarks/bench_backends.py --sizes 100 300 1000 --reps 20

Both backends are run in the same process through ``kernels.use_backend``;
results are checked for agreement before timings are reported.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from netclass import ClassNetwork, kernels, measure_with_insertion
from netclass._accel import HAVE_NUMBA


def _time(fn, reps):
    fn()  # warm-up, also triggers jit compilation
    out = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        out.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(out)


def _cases(X, x):
    n = X.shape[0]
    D = kernels.pairwise_distances(X)
    iu, iv = np.triu_indices(n, 1)
    w = D[iu, iv]
    net = ClassNetwork("b", X)
    return {
        "pairwise": lambda: kernels.pairwise_distances(X),
        "kruskal": lambda: kernels.kruskal(n, iu, iv, w),
        "dijkstra": lambda: kernels.dijkstra_dense(D, 0),
        "insert-mst": lambda: measure_with_insertion(net, x, "mst"),
        "insert-sssp": lambda: measure_with_insertion(net, x, "sssp"),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 300, 1000])
    ap.add_argument("--dim", type=int, default=4)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = [b for b in kernels.BACKENDS if b != "numba" or HAVE_NUMBA]
    rng = np.random.default_rng(args.seed)
    print(f"{'n':>6} {'kernel':<12}" + "".join(f"{b + ' ms':>12}" for b in backends) + f"{'speedup':>10}")
    for n in args.sizes:
        X = rng.normal(size=(n, args.dim))
        x = rng.normal(size=args.dim)
        timings, answers = {}, {}
        for b in backends:
            with kernels.use_backend(b):
                cases = _cases(X, x)
                answers[b] = {k: f() for k, f in cases.items()}
                timings[b] = {k: _time(f, args.reps) for k, f in cases.items()}
        ref = answers[backends[0]]
        for b in backends[1:]:
            for k, val in answers[b].items():
                a = ref[k][1] if k == "kruskal" else ref[k]
                c = val[1] if k == "kruskal" else val
                if k == "dijkstra":
                    a, c = a[0], c[0]
                assert np.allclose(a, c, rtol=1e-12, atol=0), f"{k}: backends disagree at n={n}"
        for k in timings[backends[0]]:
            row = [timings[b][k] for b in backends]
            speed = f"{row[-1] / row[0]:>9.1f}x" if len(row) > 1 else ""
            print(f"{n:>6} {k:<12}" + "".join(f"{t:>12.3f}" for t in row) + speed)


if __name__ == "__main__":
    main()
