"""Backend parity: the numba kernels and the numpy fallbacks must agree
exactly, and both must agree with the independent oracles."""

import numpy as np
import pytest

from s2net.kernels import backend_numpy
from s2net.topology import build_deploy_as_whole, generate_random_regular
from s2net.bandwidth import bisection_network, build_flow_network

import oracles

backend_numba = pytest.importorskip("s2net.kernels.backend_numba")


def random_topology(seed, N=None):
    rng = np.random.default_rng(seed)
    N = N or int(rng.integers(8, 60))
    w = int(rng.integers(4, 14))
    H = int(rng.integers(0, max((w - 2) * N // 2, 1)))
    mode = "balanced" if rng.random() < 0.5 else "pure_random"
    try:
        return build_deploy_as_whole(N, H, w, coord_mode=mode,
                                     seed=seed + 1000)
    except Exception:
        return build_deploy_as_whole(N, 0, 6, seed=seed + 1000)


@pytest.mark.parametrize("seed", range(8))
def test_two_hop_parity_and_oracle(seed):
    t = random_topology(seed)
    indptr, indices, _ = t.csr()
    nb = backend_numba.two_hop_tables(indptr, indices)
    npy = backend_numpy.two_hop_tables(indptr, indices)
    for a, b in zip(nb, npy):
        assert np.array_equal(a, b)
    t2p, t2t, t2s = nb
    edge_list = t.edge_list()
    for s in range(t.n_switches):
        targets = set(t2t[t2p[s]:t2p[s + 1]].tolist())
        assert targets == oracles.bfs_two_hop_frontier(
            t.n_switches, edge_list, s)
        one = set(t.neighbors(s))
        for e in range(t2p[s], t2p[s + 1]):
            via = indices[indptr[s] + t2s[e]]
            assert via in one
            assert (min(via, t2t[e]), max(via, t2t[e])) in t.edges


@pytest.mark.parametrize("seed", range(8))
def test_bfs_parity_and_oracle(seed):
    t = random_topology(seed)
    indptr, indices, _ = t.csr()
    a = backend_numba.bfs_distances(indptr, indices)
    b = backend_numpy.bfs_distances(indptr, indices)
    assert np.array_equal(a, b)
    assert np.array_equal(a, oracles.dijkstra_all_pairs(
        t.n_switches, t.edge_list()))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("k_hops", (1, 2))
def test_greedy_parity(seed, k_hops):
    t = random_topology(seed)
    indptr, indices, eidx = t.csr()
    t2 = backend_numba.two_hop_tables(indptr, indices)
    for d in {1, t.L}:
        args = (indptr, indices, eidx, len(t.edges), t.coords, d, k_hops,
                *t2, 4 * t.n_switches)
        ha, ea, na = backend_numba.greedy_hops(*args)
        hb, eb, nbl = backend_numpy.greedy_hops(*args)
        assert np.array_equal(ha, hb)
        assert np.array_equal(ea, eb)
        assert np.array_equal(na, nbl)


@pytest.mark.parametrize("seed", range(6))
def test_key_terminal_parity(seed):
    t = random_topology(seed)
    indptr, indices, _ = t.csr()
    rng = np.random.default_rng(seed)
    for d in {1, t.L}:
        kc = rng.random(d)
        ta, ha = backend_numba.key_terminals(indptr, indices, t.coords, kc,
                                             4 * t.n_switches)
        tb, hb = backend_numpy.key_terminals(indptr, indices, t.coords, kc,
                                             4 * t.n_switches)
        assert np.array_equal(ta, tb)
        assert np.array_equal(ha, hb)


@pytest.mark.parametrize("seed", range(8))
def test_min_mcd_parity(seed):
    t = random_topology(seed)
    a = backend_numba.min_pairwise_mcd(t.coords)
    b = backend_numpy.min_pairwise_mcd(t.coords)
    assert a == b


def random_flow_net(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 11))
    arcs = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < 0.4:
                arcs.append((i, j, float(rng.integers(1, 6))))
    if not arcs:
        arcs = [(0, 1, 1.0)]
    return n, arcs


@pytest.mark.parametrize("seed", range(12))
def test_max_flow_parity_and_oracle(seed):
    n, arcs = random_flow_net(seed)
    net = build_flow_network(n, arcs, 0, n - 1)
    call = (net.n_nodes, net.arc_heads, net.arc_caps, net.g_indptr,
            net.g_arcs, net.source, net.sink)
    va = backend_numba.dinic_max_flow(*call)
    vb = backend_numpy.dinic_max_flow(*call)
    assert va == pytest.approx(vb, abs=1e-9)
    assert va == pytest.approx(
        oracles.brute_force_min_cut(n, arcs, 0, n - 1), abs=1e-9)


def test_route_matches_kernel():
    from s2net.routing import route
    t = random_topology(42, N=30)
    indptr, indices, eidx = t.csr()
    t2 = backend_numba.two_hop_tables(indptr, indices)
    for k_hops in (1, 2):
        hops, _, _ = backend_numba.greedy_hops(
            indptr, indices, eidx, len(t.edges), t.coords, t.L, k_hops,
            *t2, 4 * t.n_switches)
        for s in range(t.n_switches):
            for d in range(t.n_switches):
                if s == d:
                    continue
                rec = route(t, s, d, k_hops=k_hops)
                if rec.success:
                    assert hops[s, d] == rec.hop_count
                else:
                    assert hops[s, d] < 0
