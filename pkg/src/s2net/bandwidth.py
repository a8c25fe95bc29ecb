"""Capacity metrics: max-flow, bisection bandwidth, permutation traffic,
and max-min fair throughput on fixed routes.

All link rates are normalized to 1.0: every inter-switch link carries one
unit per direction and every server NIC one unit up and one down.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .hashing import FlowTuple
from .routing import PathRecord, multipath_route
from .topology import Topology


@dataclass
class FlowNetwork:
    """Directed arc network. Arcs come in (forward, reverse) pairs: arc 2i
    carries the capacity, arc 2i+1 is its zero-capacity residual twin; an
    undirected link contributes one pair per direction.
    """

    n_nodes: int
    arc_heads: np.ndarray
    arc_caps: np.ndarray
    g_indptr: np.ndarray
    g_arcs: np.ndarray
    source: int
    sink: int


def build_flow_network(n_nodes: int, arcs: Sequence[tuple[int, int, float]],
                       source: int, sink: int) -> FlowNetwork:
    """Assemble a FlowNetwork from directed (tail, head, capacity) arcs."""
    heads = []
    caps = []
    tails = []
    for tail, head, cap in arcs:
        if cap < 0:
            raise ValueError("negative capacity")
        tails += [tail, head]
        heads += [head, tail]
        caps += [float(cap), 0.0]
    heads = np.array(heads, dtype=np.int64)
    caps = np.array(caps, dtype=np.float64)
    tails = np.array(tails, dtype=np.int64)
    order = np.argsort(tails, kind="stable")
    g_arcs = order.astype(np.int64)
    g_indptr = np.zeros(n_nodes + 1, dtype=np.int64)
    np.add.at(g_indptr, tails + 1, 1)
    g_indptr = np.cumsum(g_indptr).astype(np.int64)
    return FlowNetwork(n_nodes, heads, caps, g_indptr, g_arcs,
                       int(source), int(sink))


def max_flow(net: FlowNetwork) -> float:
    """Exact maximum flow from source to sink (blocking-flow algorithm)."""
    return float(kernels.dinic_max_flow(
        net.n_nodes, net.arc_heads, net.arc_caps, net.g_indptr, net.g_arcs,
        net.source, net.sink))


def server_switches(t: Topology) -> np.ndarray:
    """Switch of every server, servers numbered 0..H-1 in switch order."""
    return np.repeat(np.arange(t.n_switches), t.servers)


def bisection_network(t: Topology, side_a: np.ndarray,
                      side_b: np.ndarray) -> FlowNetwork:
    """Flow network for one server bipartition: unit inter-switch links,
    super-source feeding side-A servers, super-sink draining side B."""
    n = t.n_switches
    of = server_switches(t)
    src, snk = n, n + 1
    arcs: list[tuple[int, int, float]] = []
    for a, b in t.edge_list():
        arcs.append((a, b, 1.0))
        arcs.append((b, a, 1.0))
    a_counts = np.bincount(of[side_a], minlength=n)
    b_counts = np.bincount(of[side_b], minlength=n)
    for i in range(n):
        if a_counts[i]:
            arcs.append((src, i, float(a_counts[i])))
        if b_counts[i]:
            arcs.append((i, snk, float(b_counts[i])))
    return build_flow_network(n + 2, arcs, src, snk)


def bisection_bandwidth(t: Topology, partitions: int = 50,
                        rng: Optional[np.random.Generator] = None,
                        seed: Optional[int] = None) -> float:
    """Minimum over random balanced server bipartitions of the max-flow."""
    H = t.n_servers
    if H < 2:
        raise ValueError("bisection bandwidth needs at least 2 servers")
    if rng is None:
        rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(partitions):
        perm = rng.permutation(H)
        half = H // 2
        value = max_flow(bisection_network(t, perm[:half], perm[half:]))
        best = min(best, value)
    return float(best)


@dataclass(frozen=True)
class Flow:
    src_server: int
    dst_server: int
    demand: float = 1.0


@dataclass
class TrafficMatrix:
    flows: list[Flow]


def permutation_traffic(servers: Sequence[int],
                        rng: np.random.Generator) -> TrafficMatrix:
    """Uniform random derangement: each server sends one flow and receives
    one, never to itself."""
    servers = np.asarray(servers)
    n = len(servers)
    if n < 2:
        raise ValueError("permutation traffic needs at least 2 servers")
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == np.arange(n)):
            break
    return TrafficMatrix([Flow(int(servers[i]), int(servers[perm[i]]))
                          for i in range(n)])


@dataclass
class ThroughputReport:
    per_flow_rate: list[float]
    total: float
    jain_index: float
    excluded_flows: list[int] = field(default_factory=list)


def jain_index(rates: Sequence[float]) -> float:
    r = np.asarray(rates, dtype=np.float64)
    if len(r) == 0 or not np.any(r):
        return float("nan")
    return float(r.sum() ** 2 / (len(r) * (r * r).sum()))


def route_flows(t: Topology, matrix: TrafficMatrix, subflows: int = 1,
                mode: str = "hash", k_hops: int = 2,
                flow_bytes: float = 1.0) -> list[list[PathRecord]]:
    """Route every flow as `subflows` hashed subflows (source ports vary).

    Load-aware mode feeds cumulative assigned bytes per link back into the
    first-hop choice of later flows.
    """
    of = server_switches(t)
    link_loads: dict[tuple[int, int], float] = {}
    routes: list[list[PathRecord]] = []
    for flow in matrix.flows:
        recs = []
        for j in range(subflows):
            ft = FlowTuple(src=flow.src_server, dst=flow.dst_server,
                           sport=1000 + j, dport=80, proto=6)
            rec = multipath_route(t, int(of[flow.src_server]),
                                  int(of[flow.dst_server]), ft, mode=mode,
                                  link_loads=link_loads, k_hops=k_hops)
            if rec.success and mode == "load_aware":
                share = flow_bytes / subflows
                for a, b in zip(rec.hops, rec.hops[1:]):
                    e = (a, b) if a < b else (b, a)
                    link_loads[e] = link_loads.get(e, 0.0) + share
            recs.append(rec)
        routes.append(recs)
    return routes


def progressive_fill(members: list[list[int]], n_resources: int,
                     capacity: float = 1.0,
                     weights: Optional[list[list[float]]] = None) -> np.ndarray:
    """Water-filling: raise all unfrozen rates together, freeze on saturation.

    members[i] lists the resources participant i crosses; weights[i] gives
    its per-resource load share (default 1). Terminates with the unique
    max-min fair rate vector under these linear capacity constraints.
    """
    S = len(members)
    rates = np.zeros(S)
    if not S:
        return rates
    if weights is None:
        weights = [[1.0] * len(res) for res in members]
    cap = np.full(n_resources, float(capacity))
    active_w = np.zeros(n_resources)
    res_subs: dict[int, list[int]] = {}
    for si, res in enumerate(members):
        for rid, w in zip(res, weights[si]):
            active_w[rid] += w
            res_subs.setdefault(rid, []).append(si)
    active = np.ones(S, dtype=bool)
    while active.any():
        with np.errstate(divide="ignore", invalid="ignore"):
            slack = np.where(active_w > 1e-15, cap / active_w, np.inf)
        delta = max(float(slack.min()), 0.0)
        rid_sat = np.flatnonzero(slack <= delta)
        rates[active] += delta
        cap = np.maximum(cap - delta * active_w, 0.0)
        for rid in rid_sat:
            for si in res_subs.get(int(rid), []):
                if active[si]:
                    active[si] = False
                    for r2, w2 in zip(members[si], weights[si]):
                        active_w[r2] -= w2
    return rates


def maxmin_throughput(t: Topology, matrix: TrafficMatrix,
                      routes: list[list[PathRecord]]) -> ThroughputReport:
    """Max-min fair subflow rates by progressive filling.

    Subflows are independent filling participants, like the per-subflow
    congestion control they stand in for: unfrozen rates rise together
    until a link saturates, freezing the subflows crossing it. A flow's
    rate is the sum over its subflows, so subflows sharing the flow's
    server NIC split it evenly unless frozen earlier in the core.
    Constraints: unit directed inter-switch links plus unit server
    uplinks/downlinks. Flows with no surviving route are excluded.
    """
    edge_rank = {e: i for i, e in enumerate(t.edge_list())}
    E = len(edge_rank)
    H = t.n_servers
    # resource ids: directed edges [0, 2E), uplinks [2E, 2E+H), downlinks rest
    n_res = 2 * E + 2 * H
    members: list[list[int]] = []
    sub_flow: list[int] = []
    excluded = []
    for fi, (flow, recs) in enumerate(zip(matrix.flows, routes)):
        ok = [r for r in recs if r.success]
        if not ok:
            excluded.append(fi)
            continue
        for rec in ok:
            res = [2 * E + flow.src_server, 2 * E + H + flow.dst_server]
            for a, b in zip(rec.hops, rec.hops[1:]):
                e = (a, b) if a < b else (b, a)
                res.append(2 * edge_rank[e] + (0 if a < b else 1))
            members.append(res)
            sub_flow.append(fi)
    rates = progressive_fill(members, n_res)
    flow_ids = [fi for fi in range(len(matrix.flows)) if fi not in excluded]
    per_flow = {fi: 0.0 for fi in flow_ids}
    for si, fi in enumerate(sub_flow):
        per_flow[fi] += float(rates[si])
    rate_list = [per_flow[fi] for fi in flow_ids]
    return ThroughputReport(
        per_flow_rate=rate_list,
        total=float(sum(rate_list)),
        jain_index=jain_index(rate_list),
        excluded_flows=excluded,
    )
