"""JIT-compiled hot loops: all-pairs BFS, greedy walkers, Dinic max-flow.

Semantics here must stay bit-identical to backend_numpy; the parity tests
compare both on random instances. Greedy step rule (shared contract):

* self_m = d-MCD(current, target) over the first d spaces.
* 1-hop candidates are unvisited neighbors with d-MCD strictly below self_m,
  scanned in ascending switch id. With 2-hop tables a candidate's score is
  the minimum of its own d-MCD and the d-MCDs of the 2-hop targets filed
  under it; the lowest score wins, first winner on ties.
* If no 1-hop candidate improves (possible only on damaged topologies),
  2-hop escape: step to the via of the best improving 2-hop target whose
  via is unvisited; otherwise the walk ends in a local minimum.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def two_hop_tables(indptr, indices):
    """Depth-2 frontier per switch with via slots.

    Entries are grouped by via slot (ascending neighbor id) and ascending
    target inside a slot; each target is filed under its smallest-id via.
    """
    n = len(indptr) - 1
    one_hop = np.full(n, -1, dtype=np.int64)
    claimed = np.full(n, -1, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    # first pass: count
    for s in range(n):
        for j in range(indptr[s], indptr[s + 1]):
            one_hop[indices[j]] = s
        for j in range(indptr[s], indptr[s + 1]):
            nb = indices[j]
            for e in range(indptr[nb], indptr[nb + 1]):
                u = indices[e]
                if u != s and one_hop[u] != s and claimed[u] != s:
                    claimed[u] = s
                    counts[s] += 1
    t2_indptr = np.zeros(n + 1, dtype=np.int64)
    for s in range(n):
        t2_indptr[s + 1] = t2_indptr[s] + counts[s]
    total = t2_indptr[n]
    t2_targets = np.empty(total, dtype=np.int64)
    t2_via_slots = np.empty(total, dtype=np.int64)
    one_hop[:] = -1
    claimed[:] = -1
    pos = 0
    for s in range(n):
        for j in range(indptr[s], indptr[s + 1]):
            one_hop[indices[j]] = s
        for j in range(indptr[s], indptr[s + 1]):
            nb = indices[j]
            slot = j - indptr[s]
            for e in range(indptr[nb], indptr[nb + 1]):
                u = indices[e]
                if u != s and one_hop[u] != s and claimed[u] != s:
                    claimed[u] = s
                    t2_targets[pos] = u
                    t2_via_slots[pos] = slot
                    pos += 1
    return t2_indptr, t2_targets, t2_via_slots


@njit(cache=True)
def bfs_distances(indptr, indices):
    """Unweighted all-pairs distances; -1 marks unreachable pairs."""
    n = len(indptr) - 1
    dist = np.full((n, n), -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        drow = dist[s]
        drow[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = drow[u]
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if drow[v] < 0:
                    drow[v] = du + 1
                    queue[tail] = v
                    tail += 1
    return dist


@njit(cache=True, inline="always")
def _dmcd(coords, i, tc, d):
    best = 2.0
    for k in range(d):
        cd = abs(coords[i, k] - tc[k])
        if cd > 0.5:
            cd = 1.0 - cd
        if cd < best:
            best = cd
    return best


@njit(cache=True)
def greedy_hops(indptr, indices, eidx, n_edges, coords, d_spaces, k_hops,
                t2_indptr, t2_targets, t2_via_slots, budget):
    """Greedy walks for all ordered switch pairs.

    Returns (hops, edge_loads, node_loads): hops[s,t] is the hop count, -1 a
    local minimum, -2 a blown hop budget. Loads count successful paths only,
    endpoints included in node loads.
    """
    n = len(indptr) - 1
    hops_out = np.zeros((n, n), dtype=np.int32)
    edge_loads = np.zeros(n_edges, dtype=np.int64)
    node_loads = np.zeros(n, dtype=np.int64)
    visited = np.full(n, -1, dtype=np.int64)
    path_nodes = np.empty(budget + 2, dtype=np.int64)
    path_edges = np.empty(budget + 2, dtype=np.int64)
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            pid = s * n + t
            tc = coords[t]
            cur = s
            visited[s] = pid
            nhops = 0
            while True:
                if cur == t:
                    code = np.int32(nhops)
                    break
                if nhops >= budget:
                    code = np.int32(-2)
                    break
                self_m = _dmcd(coords, cur, tc, d_spaces)
                base = indptr[cur]
                deg = indptr[cur + 1] - base
                best_score = self_m
                best_slot = -1
                e = t2_indptr[cur]
                e_end = t2_indptr[cur + 1]
                for slot in range(deg):
                    nb = indices[base + slot]
                    blocked = visited[nb] == pid
                    m = _dmcd(coords, nb, tc, d_spaces)
                    score = m
                    if k_hops == 2:
                        eligible = not blocked and m < self_m
                        while e < e_end and t2_via_slots[e] == slot:
                            if eligible:
                                mt = _dmcd(coords, t2_targets[e], tc, d_spaces)
                                if mt < score:
                                    score = mt
                            e += 1
                    if blocked or m >= self_m:
                        continue
                    if score < best_score:
                        best_score = score
                        best_slot = slot
                if best_slot < 0 and k_hops == 2:
                    # no improving neighbor (damaged topology): take the via
                    # of the best improving 2-hop target instead
                    esc = self_m
                    for e2 in range(t2_indptr[cur], t2_indptr[cur + 1]):
                        slot = t2_via_slots[e2]
                        if visited[indices[base + slot]] == pid:
                            continue
                        mt = _dmcd(coords, t2_targets[e2], tc, d_spaces)
                        if mt < esc:
                            esc = mt
                            best_slot = slot
                if best_slot < 0:
                    code = np.int32(-1)
                    break
                step = indices[base + best_slot]
                path_nodes[nhops] = step
                path_edges[nhops] = eidx[base + best_slot]
                visited[step] = pid
                cur = step
                nhops += 1
            hops_out[s, t] = code
            if code >= 0:
                node_loads[s] += 1
                for h in range(code):
                    node_loads[path_nodes[h]] += 1
                    edge_loads[path_edges[h]] += 1
    return hops_out, edge_loads, node_loads


@njit(cache=True)
def key_terminals(indptr, indices, coords, key_coords, budget):
    """1-hop greedy walk from every switch toward synthetic key coordinates.

    The walk stops at the first switch none of whose neighbors strictly
    reduces the d-MCD; returns (terminal switch, hops) per source.
    """
    n = len(indptr) - 1
    d = len(key_coords)
    terminals = np.empty(n, dtype=np.int64)
    nhops = np.full(n, -1, dtype=np.int32)
    for s in range(n):
        cur = s
        h = 0
        while h <= budget:
            self_m = _dmcd(coords, cur, key_coords, d)
            best = self_m
            step = -1
            for j in range(indptr[cur], indptr[cur + 1]):
                nb = indices[j]
                m = _dmcd(coords, nb, key_coords, d)
                if m < best:
                    best = m
                    step = nb
            if step < 0:
                break
            cur = step
            h += 1
        terminals[s] = cur
        nhops[s] = h
    return terminals, nhops


@njit(cache=True)
def min_pairwise_mcd(coords):
    """Smallest MCD over all switch pairs."""
    n, L = coords.shape
    best = 2.0
    for i in range(n):
        for j in range(i + 1, n):
            m = 2.0
            for k in range(L):
                cd = abs(coords[i, k] - coords[j, k])
                if cd > 0.5:
                    cd = 1.0 - cd
                if cd < m:
                    m = cd
            if m < best:
                best = m
    return best


@njit(cache=True)
def dinic_max_flow(n_nodes, arc_heads, arc_caps, g_indptr, g_arcs,
                   source, sink):
    """Blocking-flow max-flow; arc i's reverse is arc i^1."""
    cap = arc_caps.copy()
    level = np.empty(n_nodes, dtype=np.int64)
    queue = np.empty(n_nodes, dtype=np.int64)
    it = np.empty(n_nodes, dtype=np.int64)
    stack_node = np.empty(n_nodes + 1, dtype=np.int64)
    stack_arc = np.empty(n_nodes + 1, dtype=np.int64)
    total = 0.0
    while True:
        level[:] = -1
        level[source] = 0
        queue[0] = source
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            for j in range(g_indptr[u], g_indptr[u + 1]):
                a = g_arcs[j]
                v = arc_heads[a]
                if cap[a] > 0.0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue[tail] = v
                    tail += 1
        if level[sink] < 0:
            break
        for i in range(n_nodes):
            it[i] = g_indptr[i]
        # DFS for blocking flow
        depth = 0
        stack_node[0] = source
        while depth >= 0:
            u = stack_node[depth]
            if u == sink:
                # bottleneck along the path
                push = np.inf
                for dpos in range(depth):
                    a = g_arcs[stack_arc[dpos]]
                    if cap[a] < push:
                        push = cap[a]
                total += push
                retreat = depth
                for dpos in range(depth):
                    a = g_arcs[stack_arc[dpos]]
                    cap[a] -= push
                    cap[a ^ 1] += push
                    if cap[a] <= 0.0 and dpos < retreat:
                        retreat = dpos
                depth = retreat
                continue
            advanced = False
            j = it[u]
            while j < g_indptr[u + 1]:
                a = g_arcs[j]
                v = arc_heads[a]
                if cap[a] > 0.0 and level[v] == level[u] + 1:
                    stack_arc[depth] = j
                    depth += 1
                    stack_node[depth] = v
                    advanced = True
                    break
                j += 1
            it[u] = j
            if not advanced:
                level[u] = -1
                depth -= 1
                if depth >= 0:
                    it[stack_node[depth]] += 1
    return total
