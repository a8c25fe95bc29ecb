"""Forwarding over ring coordinates: greediest, multi-path, and key-based.

The forwarding metric is the minimum circular distance (MCD) to the
destination coordinates, optionally restricted to the first d spaces. A
switch forwards to a strictly-improving neighbor; with 2-hop tables the
choice among improving neighbors is informed by the best coordinates
reachable through each of them, and a stuck switch (possible only with
failed links) escapes through the via of an improving 2-hop target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .geometry import d_mcd, mcd
from .hashing import FlowTuple, hash_unit_interval
from .topology import Topology

LOCAL_MINIMUM = "local_minimum"
HOP_BUDGET_EXCEEDED = "hop_budget_exceeded"


@dataclass(frozen=True)
class DestinationAddress:
    """Routable address: the access switch coordinates plus a host id."""

    coords: tuple
    host_id: object = None


@dataclass
class PathRecord:
    """Ordered switch sequence produced by one routing run."""

    hops: list[int]
    success: bool
    failure_reason: Optional[str] = None

    @property
    def hop_count(self) -> int:
        return len(self.hops) - 1


@dataclass
class RoutingTable:
    """Per-switch forwarding state: 1-hop and 2-hop neighbor coordinates."""

    owner: int
    one_hop: list[tuple[int, np.ndarray]]
    two_hop: list[tuple[int, np.ndarray, int]]

    @property
    def entry_count(self) -> int:
        return len(self.one_hop) + len(self.two_hop)


def default_hop_budget(t: Topology) -> int:
    return 4 * t.n_switches


def _tables_arrays(t: Topology, k_hops: int):
    indptr, indices, eidx = t.csr()
    if k_hops == 2:
        key = "_two_hop_arrays"
        cached = getattr(t, key, None)
        if cached is None:
            cached = kernels.two_hop_tables(indptr, indices)
            object.__setattr__(t, key, cached)
        return indptr, indices, eidx, cached
    n = t.n_switches
    empty = (np.zeros(n + 1, dtype=np.int64),
             np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    return indptr, indices, eidx, empty


def build_routing_table(t: Topology, s: int, k_hops: int = 2) -> RoutingTable:
    """Forwarding state of switch s: 1-hop, and 2-hop when k_hops=2."""
    if not 0 <= s < t.n_switches:
        raise KeyError(f"unknown switch {s}")
    if k_hops not in (1, 2):
        raise ValueError(f"k_hops must be 1 or 2, got {k_hops}")
    indptr, indices, _, (t2p, t2t, t2s) = _tables_arrays(t, k_hops)
    one = [(int(nb), t.coords[nb]) for nb in indices[indptr[s]:indptr[s + 1]]]
    two = []
    if k_hops == 2:
        base = indptr[s]
        for e in range(t2p[s], t2p[s + 1]):
            tg = int(t2t[e])
            via = int(indices[base + t2s[e]])
            two.append((tg, t.coords[tg], via))
    return RoutingTable(owner=s, one_hop=one, two_hop=two)


@dataclass(frozen=True)
class Decision:
    kind: str  # "deliver" | "forward" | "local_minimum"
    neighbor: Optional[int] = None


def greediest_next_hop(table: RoutingTable, self_coords: Sequence[float],
                       dest: DestinationAddress, d_spaces: Optional[int] = None,
                       k_hops: int = 1) -> Decision:
    """One forwarding decision from a routing table.

    Deliver when the destination coordinates are our own; otherwise forward
    to the best strictly-improving neighbor (2-hop entries sharpen the
    ranking and provide the escape step), else report a local minimum.
    """
    dc = dest.coords
    d = d_spaces if d_spaces is not None else len(dc)
    if tuple(self_coords) == tuple(dc):
        return Decision("deliver")
    self_m = d_mcd(self_coords, dc, d)
    best_score = self_m
    best_nb = None
    subtree: dict[int, float] = {}
    if k_hops == 2:
        for tg, tg_coords, via in table.two_hop:
            m = d_mcd(tg_coords, dc, d)
            if via not in subtree or m < subtree[via]:
                subtree[via] = m
    for nb, nb_coords in table.one_hop:
        m = d_mcd(nb_coords, dc, d)
        if m >= self_m:
            continue
        score = min(m, subtree.get(nb, 2.0))
        if score < best_score:
            best_score = score
            best_nb = nb
    if best_nb is not None:
        return Decision("forward", best_nb)
    if k_hops == 2:
        esc = self_m
        for tg, tg_coords, via in table.two_hop:
            m = d_mcd(tg_coords, dc, d)
            if m < esc:
                esc = m
                best_nb = via
        if best_nb is not None:
            return Decision("forward", best_nb)
    return Decision(LOCAL_MINIMUM)


def _walk(t: Topology, src: int, target_coords: np.ndarray, dst: Optional[int],
          d_spaces: int, k_hops: int, budget: int,
          first_hop: Optional[int] = None,
          stop_at_local_min: bool = False) -> PathRecord:
    """Reference walker shared by route/multipath/key routing.

    Mirrors the kernel step rule exactly; kept in plain Python so single
    paths are cheap and the hop sequence is available.
    """
    indptr, indices, _, (t2p, t2t, t2s) = _tables_arrays(t, k_hops)
    coords = t.coords
    tc = np.asarray(target_coords)
    cur = src
    path = [src]
    visited = {src}
    if first_hop is not None:
        path.append(first_hop)
        visited.add(first_hop)
        cur = first_hop
    while True:
        if dst is not None and cur == dst:
            return PathRecord(path, True)
        if len(path) - 1 >= budget:
            return PathRecord(path, False, HOP_BUDGET_EXCEEDED)
        self_m = d_mcd(coords[cur], tc, d_spaces)
        base = indptr[cur]
        deg = indptr[cur + 1] - base
        best_score = self_m
        best_slot = -1
        e = t2p[cur]
        e_end = t2p[cur + 1]
        for slot in range(deg):
            nb = indices[base + slot]
            blocked = nb in visited
            m = d_mcd(coords[nb], tc, d_spaces)
            score = m
            if k_hops == 2:
                eligible = not blocked and m < self_m
                while e < e_end and t2s[e] == slot:
                    if eligible:
                        mt = d_mcd(coords[t2t[e]], tc, d_spaces)
                        if mt < score:
                            score = mt
                    e += 1
            if blocked or m >= self_m:
                continue
            if score < best_score:
                best_score = score
                best_slot = slot
        if best_slot < 0 and k_hops == 2:
            esc = self_m
            for e2 in range(t2p[cur], t2p[cur + 1]):
                slot = t2s[e2]
                if indices[base + slot] in visited:
                    continue
                mt = d_mcd(coords[t2t[e2]], tc, d_spaces)
                if mt < esc:
                    esc = mt
                    best_slot = slot
        if best_slot < 0:
            if stop_at_local_min:
                return PathRecord(path, True)
            return PathRecord(path, False, LOCAL_MINIMUM)
        step = int(indices[base + best_slot])
        path.append(step)
        visited.add(step)
        cur = step


def route(t: Topology, src: int, dst: int, d_spaces: Optional[int] = None,
          k_hops: int = 1, hop_budget: Optional[int] = None) -> PathRecord:
    """Greedy route between two switches; guaranteed on intact topologies."""
    n = t.n_switches
    if not (0 <= src < n and 0 <= dst < n):
        raise KeyError(f"unknown switch in pair ({src}, {dst})")
    if t.L < 1:
        raise ValueError("topology has no coordinate spaces to route on")
    d = d_spaces if d_spaces is not None else t.L
    if not 1 <= d <= t.L:
        raise ValueError(f"d_spaces={d} out of range [1, {t.L}]")
    budget = hop_budget if hop_budget is not None else default_hop_budget(t)
    return _walk(t, src, t.coords[dst], dst, d, k_hops, budget)


def multipath_candidates(table: RoutingTable, self_coords: Sequence[float],
                         dest: DestinationAddress) -> list[int]:
    """First-hop neighbor set: every neighbor strictly closer to dest."""
    self_m = mcd(self_coords, dest.coords)
    out = [nb for nb, nb_coords in table.one_hop
           if mcd(nb_coords, dest.coords) < self_m]
    return sorted(out)


def multipath_route(t: Topology, src: int, dst: int, flow: FlowTuple,
                    mode: str = "hash",
                    link_loads: Optional[dict] = None,
                    k_hops: int = 2,
                    hop_budget: Optional[int] = None) -> PathRecord:
    """Route one flow: hashed (or load-aware) first hop, then greedy.

    The first hop is drawn from the candidate set V by the flow's 5-tuple
    hash, so all packets of a flow take one path. Load-aware mode picks the
    least-loaded candidate link instead, hash-breaking ties.
    """
    if src == dst:
        return PathRecord([src], True)
    table = build_routing_table(t, src, k_hops=1)
    dest = DestinationAddress(coords=tuple(t.coords[dst]), host_id=None)
    cands = multipath_candidates(table, t.coords[src], dest)
    if not cands:
        return PathRecord([src], False, LOCAL_MINIMUM)
    h = flow.hash64()
    if mode == "hash":
        first = cands[h % len(cands)]
    elif mode == "load_aware":
        loads = link_loads if link_loads is not None else {}
        per = [loads.get((min(src, nb), max(src, nb)), 0.0) for nb in cands]
        lo = min(per)
        tied = [nb for nb, ld in zip(cands, per) if ld == lo]
        first = tied[h % len(tied)]
    else:
        raise ValueError(f"unknown multipath mode {mode!r}")
    budget = hop_budget if hop_budget is not None else default_hop_budget(t)
    d = t.L
    return _walk(t, src, t.coords[dst], dst, d, k_hops, budget,
                 first_hop=first)


def key_hash(key, r: int) -> float:
    """Space-r hash of a key into [0,1); stable across runs and platforms."""
    if r < 1:
        raise ValueError("space index r must be >= 1")
    data = key.encode() if isinstance(key, str) else bytes(key)
    return hash_unit_interval(data, seed=r)


def key_address(key, d: int) -> np.ndarray:
    return np.array([key_hash(key, r) for r in range(1, d + 1)])


def home_switches_for_address(t: Topology, hashes: Sequence[float]) -> list[int]:
    """Per-space home switches for an explicit hash vector.

    Entry r is the switch whose space-(r+1) coordinate is nearest hashes[r];
    exact midpoint ties go to the larger coordinate. Switches may repeat
    across spaces.
    """
    if not 1 <= len(hashes) <= t.L:
        raise ValueError(f"replica count {len(hashes)} out of range [1, {t.L}]")
    homes = []
    for r, h in enumerate(hashes):
        col = t.coords[:, r]
        diff = np.abs(col - h)
        cd = np.minimum(diff, 1.0 - diff)
        lo = cd.min()
        tied = np.flatnonzero(cd == lo)
        if len(tied) > 1:
            tied = tied[np.argsort(-col[tied], kind="stable")]
        homes.append(int(tied[0]))
    return homes


def home_switches(t: Topology, key, d: int) -> list[int]:
    """Per-space home switches of a key: nearest coordinate to H_r(key)."""
    if not 1 <= d <= t.L:
        raise ValueError(f"replica count d={d} out of range [1, {t.L}]")
    return home_switches_for_address(t, key_address(key, d))


def key_route_to_address(t: Topology, src: int, hashes: Sequence[float],
                         hop_budget: Optional[int] = None) -> PathRecord:
    """Greedy walk toward explicit hash coordinates in the first d spaces.

    Terminates at the first switch where no neighbor makes progress; that
    switch is a home switch of the address.
    """
    if not 0 <= src < t.n_switches:
        raise KeyError(f"unknown switch {src}")
    d = len(hashes)
    if not 1 <= d <= t.L:
        raise ValueError(f"replica count d={d} out of range [1, {t.L}]")
    budget = hop_budget if hop_budget is not None else default_hop_budget(t)
    target = np.asarray(hashes, dtype=np.float64)
    return _walk(t, src, target, None, d, 1, budget, stop_at_local_min=True)


def key_route(t: Topology, src: int, key, d: int,
              hop_budget: Optional[int] = None) -> PathRecord:
    """Greedy walk toward the key's hashed coordinates; ends at a home switch."""
    if not 1 <= d <= t.L:
        raise ValueError(f"replica count d={d} out of range [1, {t.L}]")
    return key_route_to_address(t, src, key_address(key, d), hop_budget)
