"""Vectorized numpy/scipy fallbacks for the JIT kernels.

Selected with S2_NO_NUMBA=1 (or when numba is unavailable). Outputs are
bit-identical to backend_numba: the same distances, the same tie-breaks
(first minimum in ascending slot/entry order), the same load counters.
"""

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path, maximum_flow

_CHUNK = 4096


def two_hop_tables(indptr, indices):
    """Depth-2 frontier per switch with via slots (see backend_numba)."""
    n = len(indptr) - 1
    t2_indptr = np.zeros(n + 1, dtype=np.int64)
    targets_parts = []
    slots_parts = []
    for s in range(n):
        one_hop = indices[indptr[s]:indptr[s + 1]]
        one_set = set(one_hop.tolist()) | {s}
        claimed: dict[int, int] = {}
        for slot, nb in enumerate(one_hop):
            for u in indices[indptr[nb]:indptr[nb + 1]]:
                u = int(u)
                if u not in one_set and u not in claimed:
                    claimed[u] = slot
        order = sorted(claimed.items(), key=lambda kv: (kv[1], kv[0]))
        targets_parts.append(np.array([u for u, _ in order], dtype=np.int64))
        slots_parts.append(np.array([sl for _, sl in order], dtype=np.int64))
        t2_indptr[s + 1] = t2_indptr[s] + len(order)
    cat = lambda parts: (np.concatenate(parts) if parts else
                         np.empty(0, dtype=np.int64))
    return t2_indptr, cat(targets_parts), cat(slots_parts)


def bfs_distances(indptr, indices):
    """Unweighted all-pairs distances; -1 marks unreachable pairs."""
    n = len(indptr) - 1
    adj = sp.csr_matrix(
        (np.ones(len(indices)), indices, indptr), shape=(n, n))
    dist = shortest_path(adj, method="D", unweighted=True, directed=False)
    out = np.where(np.isinf(dist), -1, dist).astype(np.int32)
    return out


def _dmcd_arr(a, b, d):
    """d-MCD between coordinate arrays broadcast along leading axes."""
    diff = np.abs(a[..., :d] - b[..., :d])
    return np.minimum(diff, 1.0 - diff).min(axis=-1)


def _pad_adjacency(indptr, indices, eidx):
    n = len(indptr) - 1
    deg = np.diff(indptr)
    dmax = max(int(deg.max()), 1) if n else 1
    nbr = np.full((n, dmax), -1, dtype=np.int64)
    edg = np.full((n, dmax), 0, dtype=np.int64)
    for s in range(n):
        k = deg[s]
        nbr[s, :k] = indices[indptr[s]:indptr[s + 1]]
        edg[s, :k] = eidx[indptr[s]:indptr[s + 1]]
    return nbr, edg


def _pad_two_hop(t2_indptr, t2_targets, t2_via_slots, n):
    cnt = np.diff(t2_indptr)
    tmax = max(int(cnt.max()), 1) if n and len(cnt) else 1
    tgt = np.full((n, tmax), -1, dtype=np.int64)
    slo = np.zeros((n, tmax), dtype=np.int64)
    for s in range(n):
        k = cnt[s]
        tgt[s, :k] = t2_targets[t2_indptr[s]:t2_indptr[s + 1]]
        slo[s, :k] = t2_via_slots[t2_indptr[s]:t2_indptr[s + 1]]
    return tgt, slo


def _walk_chunk(srcs, tgt_coords, tgts, coords, d_spaces, k_hops,
                nbr_pad, edg_pad, t2_tgt, t2_slo, budget):
    """March a chunk of greedy walkers to completion.

    Returns (codes, step_walkers, step_edges, step_nodes): codes as in
    greedy_hops; the step logs cover every hop taken, to be committed by the
    caller for successful walkers only.
    """
    P = len(srcs)
    n = coords.shape[0]
    cur = srcs.copy()
    nhops = np.zeros(P, dtype=np.int32)
    codes = np.full(P, -3, dtype=np.int32)
    visited = np.zeros((P, n), dtype=bool)
    visited[np.arange(P), srcs] = True
    active = np.ones(P, dtype=bool)
    log_w, log_e, log_n = [], [], []
    while True:
        arrived = active & (cur == tgts)
        codes[arrived] = nhops[arrived]
        active &= ~arrived
        blown = active & (nhops >= budget)
        codes[blown] = -2
        active &= ~blown
        rows = np.flatnonzero(active)
        if len(rows) == 0:
            break
        cu = cur[rows]
        tc = tgt_coords[rows]
        self_m = _dmcd_arr(coords[cu], tc, d_spaces)
        nb = nbr_pad[cu]
        pad = nb < 0
        m_nb = _dmcd_arr(coords[np.maximum(nb, 0)], tc[:, None, :], d_spaces)
        vis = visited[rows[:, None], np.maximum(nb, 0)] | pad
        improving = (m_nb < self_m[:, None]) & ~vis
        score = np.where(improving, m_nb, np.inf)
        if k_hops == 2:
            t2 = t2_tgt[cu]
            t2pad = t2 < 0
            slo = t2_slo[cu]
            mt = _dmcd_arr(coords[np.maximum(t2, 0)], tc[:, None, :], d_spaces)
            gate = np.take_along_axis(improving, slo, axis=1) & ~t2pad
            mt_gated = np.where(gate, mt, np.inf)
            np.minimum.at(score, (np.arange(len(rows))[:, None], slo), mt_gated)
            score[~improving] = np.inf
        best_slot = np.argmin(score, axis=1)
        has_step = score[np.arange(len(rows)), best_slot] < np.inf
        if k_hops == 2 and not has_step.all():
            # 2-hop escape for stuck walkers
            stuck = np.flatnonzero(~has_step)
            t2s = t2_tgt[cu[stuck]]
            t2pad = t2s < 0
            slos = t2_slo[cu[stuck]]
            mts = _dmcd_arr(coords[np.maximum(t2s, 0)],
                            tc[stuck][:, None, :], d_spaces)
            via_vis = np.take_along_axis(
                visited[rows[stuck][:, None], np.maximum(nbr_pad[cu[stuck]], 0)]
                | (nbr_pad[cu[stuck]] < 0), slos, axis=1)
            ok = (mts < self_m[stuck][:, None]) & ~via_vis & ~t2pad
            mts = np.where(ok, mts, np.inf)
            pick = np.argmin(mts, axis=1)
            found = mts[np.arange(len(stuck)), pick] < np.inf
            best_slot[stuck[found]] = slos[np.arange(len(stuck)), pick][found]
            has_step[stuck[found]] = True
        dead = rows[~has_step]
        codes[dead] = -1
        active[dead] = False
        go = np.flatnonzero(has_step)
        if len(go) == 0:
            continue
        grow = rows[go]
        gslot = best_slot[go]
        step = nbr_pad[cur[grow], gslot]
        log_w.append(grow)
        log_e.append(edg_pad[cur[grow], gslot])
        log_n.append(step)
        visited[grow, step] = True
        cur[grow] = step
        nhops[grow] += 1
    cat = lambda parts, dt: (np.concatenate(parts) if parts
                             else np.empty(0, dtype=dt))
    return codes, cat(log_w, np.int64), cat(log_e, np.int64), cat(log_n, np.int64)


def greedy_hops(indptr, indices, eidx, n_edges, coords, d_spaces, k_hops,
                t2_indptr, t2_targets, t2_via_slots, budget):
    """Greedy walks for all ordered switch pairs (see backend_numba)."""
    n = len(indptr) - 1
    nbr_pad, edg_pad = _pad_adjacency(indptr, indices, eidx)
    t2_tgt, t2_slo = _pad_two_hop(t2_indptr, t2_targets, t2_via_slots, n)
    hops_out = np.zeros((n, n), dtype=np.int32)
    edge_loads = np.zeros(n_edges, dtype=np.int64)
    node_loads = np.zeros(n, dtype=np.int64)
    pair_src, pair_tgt = np.divmod(
        np.arange(n * n, dtype=np.int64), n)
    keep = pair_src != pair_tgt
    pair_src, pair_tgt = pair_src[keep], pair_tgt[keep]
    for lo in range(0, len(pair_src), _CHUNK):
        srcs = pair_src[lo:lo + _CHUNK]
        tgts = pair_tgt[lo:lo + _CHUNK]
        codes, lw, le, ln = _walk_chunk(
            srcs, coords[tgts], tgts, coords, d_spaces, k_hops,
            nbr_pad, edg_pad, t2_tgt, t2_slo, budget)
        hops_out[srcs, tgts] = codes
        success = codes >= 0
        took = success[lw]
        np.add.at(edge_loads, le[took], 1)
        np.add.at(node_loads, ln[took], 1)
        np.add.at(node_loads, srcs[success], 1)
    return hops_out, edge_loads, node_loads


def key_terminals(indptr, indices, coords, key_coords, budget):
    """1-hop greedy walk toward key coordinates (see backend_numba)."""
    n = len(indptr) - 1
    d = len(key_coords)
    nbr_pad, _ = _pad_adjacency(indptr, indices,
                                np.zeros(len(indices), dtype=np.int64))
    cur = np.arange(n, dtype=np.int64)
    nhops = np.full(n, 0, dtype=np.int32)
    active = np.ones(n, dtype=bool)
    kc = np.asarray(key_coords, dtype=np.float64)
    steps = 0
    while active.any() and steps <= budget:
        rows = np.flatnonzero(active)
        cu = cur[rows]
        self_m = _dmcd_arr(coords[cu, :d], kc, d)
        nb = nbr_pad[cu]
        pad = nb < 0
        m_nb = _dmcd_arr(coords[np.maximum(nb, 0), :d], kc, d)
        m_nb = np.where(pad, np.inf, m_nb)
        best = np.argmin(m_nb, axis=1)
        bval = m_nb[np.arange(len(rows)), best]
        move = bval < self_m
        stop = rows[~move]
        active[stop] = False
        go = rows[move]
        cur[go] = nbr_pad[cu[move], best[move]]
        nhops[go] += 1
        steps += 1
    return cur, nhops


def min_pairwise_mcd(coords):
    """Smallest MCD over all switch pairs."""
    n = coords.shape[0]
    best = 2.0
    for lo in range(0, n, 256):
        block = coords[lo:lo + 256]
        diff = np.abs(block[:, None, :] - coords[None, :, :])
        m = np.minimum(diff, 1.0 - diff).min(axis=-1)
        rows = np.arange(lo, min(lo + 256, n))
        m[np.arange(len(rows)), rows] = np.inf  # self pairs
        best = min(best, float(m.min()))
    return best


def dinic_max_flow(n_nodes, arc_heads, arc_caps, g_indptr, g_arcs,
                   source, sink):
    """Max-flow via scipy's solver; capacities must be integral."""
    tails = np.repeat(np.arange(n_nodes), np.diff(g_indptr))
    order = np.argsort(g_arcs)
    tail_of_arc = tails[order]
    caps_int = np.rint(arc_caps).astype(np.int64)
    if not np.allclose(arc_caps, caps_int, atol=1e-9):
        raise ValueError("fallback max-flow requires integral capacities")
    forward = np.arange(len(arc_heads)) % 2 == 0
    graph = sp.csr_matrix(
        (caps_int[forward],
         (tail_of_arc[forward], arc_heads[forward])),
        shape=(n_nodes, n_nodes))
    graph.sum_duplicates()
    return float(maximum_flow(graph, int(source), int(sink)).flow_value)
