"""Benchmark the JIT kernels against the numpy fallbacks.

Run: python benchmarks/bench_kernels.py [--n 250] [--repeat 3]
Both backends are imported directly, so this compares them in one process
regardless of the S2_NO_NUMBA flag.
"""

import argparse
import time

import numpy as np

from s2net.kernels import backend_numpy
from s2net.topology import build_deploy_as_whole
from s2net.bandwidth import bisection_network, server_switches

try:
    from s2net.kernels import backend_numba
except ImportError:
    backend_numba = None


def timeit(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=250)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    t = build_deploy_as_whole(args.n, 2 * args.n, 10, seed=0)
    indptr, indices, eidx = t.csr()
    backends = [("numpy", backend_numpy)]
    if backend_numba is not None:
        backends.insert(0, ("numba", backend_numba))
        # trigger JIT compilation outside the timed region
        small = build_deploy_as_whole(10, 0, 6, seed=0)
        ip, ix, ei = small.csr()
        t2s = backend_numba.two_hop_tables(ip, ix)
        backend_numba.bfs_distances(ip, ix)
        backend_numba.greedy_hops(ip, ix, ei, len(small.edges), small.coords,
                                  small.L, 2, *t2s, 40)
        backend_numba.key_terminals(ip, ix, small.coords,
                                    np.array([0.5]), 40)
        backend_numba.min_pairwise_mcd(small.coords)

    rng = np.random.default_rng(0)
    perm = rng.permutation(t.n_servers)
    half = t.n_servers // 2
    net = bisection_network(t, perm[:half], perm[half:])

    results = {}
    for name, be in backends:
        t2 = be.two_hop_tables(indptr, indices)
        rows = {}
        rows["two_hop_tables"], _ = timeit(
            lambda: be.two_hop_tables(indptr, indices), args.repeat)
        rows["bfs_distances"], _ = timeit(
            lambda: be.bfs_distances(indptr, indices), args.repeat)
        rows["greedy_hops[k=1]"], _ = timeit(
            lambda: be.greedy_hops(indptr, indices, eidx, len(t.edges),
                                   t.coords, t.L, 1, *t2, 4 * args.n),
            args.repeat)
        rows["greedy_hops[k=2]"], h2 = timeit(
            lambda: be.greedy_hops(indptr, indices, eidx, len(t.edges),
                                   t.coords, t.L, 2, *t2, 4 * args.n),
            args.repeat)
        rows["key_terminals"], _ = timeit(
            lambda: be.key_terminals(indptr, indices, t.coords,
                                     rng.random(t.L), 4 * args.n),
            args.repeat)
        rows["min_pairwise_mcd"], _ = timeit(
            lambda: be.min_pairwise_mcd(t.coords), args.repeat)
        rows["dinic_max_flow"], flow = timeit(
            lambda: be.dinic_max_flow(net.n_nodes, net.arc_heads,
                                      net.arc_caps, net.g_indptr, net.g_arcs,
                                      net.source, net.sink), args.repeat)
        results[name] = rows
        print(f"\n{name} backend (N={args.n}, L={t.L}, "
              f"edges={len(t.edges)}, max-flow={flow:.0f})")
        for k, v in rows.items():
            print(f"  {k:20s} {v * 1e3:10.2f} ms")

    if len(results) == 2:
        print("\nspeedup numba vs numpy")
        for k in results["numba"]:
            ratio = results["numpy"][k] / results["numba"][k]
            print(f"  {k:20s} {ratio:8.1f}x")


if __name__ == "__main__":
    main()
