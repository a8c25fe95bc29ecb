"""Measurement harness: path statistics, link loads, forwarding state,
control areas, and failure experiments.

Statistics come in two levels. Switch level counts inter-switch hops over
switch pairs (unordered for shortest paths, ordered for routing). Server
level weights each switch pair by its server product and adds the two
server-to-switch links, with same-switch server pairs at distance 2; this
matches how server-level path-length tables are usually reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .geometry import control_area_sizes, mcd, circular_distance
from .routing import _tables_arrays, default_hop_budget
from .topology import Topology


@dataclass
class PathStats:
    mean: float
    p10: int
    p90: int
    histogram: dict[int, float]
    count: float
    failures: int = 0

    @classmethod
    def from_histogram(cls, hist: dict[int, float], failures: int = 0) -> "PathStats":
        total = float(sum(hist.values()))
        if total == 0:
            return cls(float("nan"), 0, 0, {}, 0.0, failures)
        mean = sum(k * v for k, v in hist.items()) / total
        return cls(mean, _nearest_rank(hist, total, 0.10),
                   _nearest_rank(hist, total, 0.90), dict(hist), total,
                   failures)


def _nearest_rank(hist: dict[int, float], total: float, q: float) -> int:
    cum = 0.0
    for k in sorted(hist):
        cum += hist[k]
        if cum >= q * total:
            return k
    return max(hist)


@dataclass
class RouterConfig:
    """Knobs for greedy routing runs."""

    k_hops: int = 2
    d_spaces: Optional[int] = None
    hop_budget: Optional[int] = None

    def resolve(self, t: Topology) -> tuple[int, int, int]:
        d = self.d_spaces if self.d_spaces is not None else t.L
        if not 1 <= d <= t.L:
            raise ValueError(f"d_spaces={d} out of range [1, {t.L}]")
        budget = (self.hop_budget if self.hop_budget is not None
                  else default_hop_budget(t))
        return self.k_hops, d, budget


def distance_matrix(t: Topology) -> np.ndarray:
    """All-pairs unweighted switch distances; -1 marks unreachable."""
    indptr, indices, _ = t.csr()
    return kernels.bfs_distances(indptr, indices)


def _check_connected(dist: np.ndarray) -> None:
    bad = np.argwhere(dist < 0)
    if len(bad):
        a, b = bad[0]
        raise ValueError(f"graph is disconnected: no path between switches "
                         f"{int(a)} and {int(b)}")


def _switch_hist_unordered(dist: np.ndarray) -> dict[int, float]:
    n = dist.shape[0]
    iu = np.triu_indices(n, 1)
    vals, counts = np.unique(dist[iu], return_counts=True)
    return {int(v): float(c) for v, c in zip(vals, counts)}


def _server_hist(lengths: np.ndarray, servers: np.ndarray,
                 ordered: bool) -> dict[int, float]:
    """Server-pair length histogram from switch-pair lengths (+2 links)."""
    n = len(servers)
    m = servers.astype(np.float64)
    w = np.outer(m, m)
    hist: dict[int, float] = {}
    if ordered:
        mask = ~np.eye(n, dtype=bool)
        same = (m * (m - 1)).sum()
    else:
        mask = np.triu(np.ones((n, n), dtype=bool), 1)
        same = (m * (m - 1) / 2).sum()
    lens = lengths[mask] + 2
    weights = w[mask]
    for v in np.unique(lens):
        hist[int(v)] = float(weights[lens == v].sum())
    if same > 0:
        hist[2] = hist.get(2, 0.0) + float(same)
    return hist


def all_pairs_shortest(t: Topology, level: str = "switch") -> PathStats:
    """BFS shortest-path statistics over unordered pairs."""
    dist = distance_matrix(t)
    _check_connected(dist)
    if level == "switch":
        return PathStats.from_histogram(_switch_hist_unordered(dist))
    if level == "server":
        if t.n_servers < 2:
            raise ValueError("server-level statistics need at least 2 servers")
        return PathStats.from_histogram(
            _server_hist(dist.astype(np.int64), t.servers, ordered=False))
    raise ValueError(f"unknown level {level!r}")


def _greedy_run(t: Topology, config: RouterConfig):
    k_hops, d, budget = config.resolve(t)
    indptr, indices, eidx = t.csr()
    _, _, _, (t2p, t2t, t2s) = _tables_arrays(t, k_hops)
    hops, edge_loads, node_loads = kernels.greedy_hops(
        indptr, indices, eidx, len(t.edges), t.coords, d, k_hops,
        t2p, t2t, t2s, budget)
    return hops, edge_loads, node_loads


def routing_path_stats(t: Topology, config: Optional[RouterConfig] = None,
                       level: str = "switch") -> PathStats:
    """Greedy path statistics over all ordered switch pairs."""
    config = config or RouterConfig()
    hops, _, _ = _greedy_run(t, config)
    n = t.n_switches
    off = ~np.eye(n, dtype=bool)
    failures = int((hops[off] < 0).sum())
    if level == "switch":
        good = hops[off][hops[off] >= 0]
        vals, counts = np.unique(good, return_counts=True)
        hist = {int(v): float(c) for v, c in zip(vals, counts)}
        return PathStats.from_histogram(hist, failures)
    if level == "server":
        if failures:
            raise ValueError("server-level stats require all routes to succeed")
        return PathStats.from_histogram(
            _server_hist(hops.astype(np.int64), t.servers, ordered=True),
            failures)
    raise ValueError(f"unknown level {level!r}")


@dataclass
class LinkLoadRow:
    edge: tuple[int, int]
    path_count: int
    endpoint_mcd: float
    endpoint_cd_sum: float


@dataclass
class LinkLoadReport:
    rows: list[LinkLoadRow]
    switch_path_counts: np.ndarray
    total_hops: int

    @property
    def max_path_count(self) -> int:
        return max(r.path_count for r in self.rows) if self.rows else 0

    def heavy_light_deciles(self) -> tuple[list[LinkLoadRow], list[LinkLoadRow]]:
        """Strict top and bottom 10% of links by path count, edge-id ties."""
        ranked = sorted(self.rows, key=lambda r: (r.path_count, r.edge))
        k = max(len(ranked) // 10, 1)
        return ranked[-k:], ranked[:k]


def link_load(t: Topology, config: Optional[RouterConfig] = None) -> LinkLoadReport:
    """Distinct greedy paths per link and per switch, all ordered pairs."""
    config = config or RouterConfig(k_hops=1)
    hops, edge_loads, node_loads = _greedy_run(t, config)
    rows = []
    for ei, (a, b) in enumerate(t.edge_list()):
        ca, cb = t.coords[a], t.coords[b]
        rows.append(LinkLoadRow(
            edge=(a, b),
            path_count=int(edge_loads[ei]),
            endpoint_mcd=mcd(ca, cb),
            endpoint_cd_sum=float(sum(circular_distance(ca[k], cb[k])
                                      for k in range(t.L))),
        ))
    total = int(hops[hops > 0].sum())
    return LinkLoadReport(rows, node_loads, total)


@dataclass
class ControlAreaReport:
    sum_log_area: np.ndarray
    switch_path_counts: np.ndarray
    pearson: float


def control_area_report(t: Topology,
                        config: Optional[RouterConfig] = None) -> ControlAreaReport:
    """Correlation of per-switch log control-area mass with routing load."""
    config = config or RouterConfig(k_hops=1)
    sum_log = np.zeros(t.n_switches)
    for k in range(t.L):
        sum_log += np.log(control_area_sizes(t.coords[:, k]))
    _, _, node_loads = _greedy_run(t, config)
    if np.ptp(sum_log) == 0.0 or np.ptp(node_loads) == 0:
        pearson = float("nan")
    else:
        pearson = float(np.corrcoef(sum_log, node_loads.astype(float))[0, 1])
    return ControlAreaReport(sum_log, node_loads, pearson)


@dataclass
class ForwardingStateReport:
    entries: np.ndarray          # 1-hop + 2-hop coordinate vectors per switch
    scalar_entries: np.ndarray   # the same, counted per space
    bound: int                   # d + d^2 with d = inter-switch port budget

    @property
    def mean(self) -> float:
        return float(self.entries.mean())

    @property
    def max(self) -> int:
        return int(self.entries.max())


def forwarding_state(t: Topology, k_hops: int = 2) -> ForwardingStateReport:
    """Routing-table size per switch, counted in coordinate entries."""
    indptr, indices, _ = t.csr()
    one = np.diff(indptr)
    if k_hops == 2:
        t2p, _, _ = kernels.two_hop_tables(indptr, indices)
        two = np.diff(t2p)
    else:
        two = np.zeros_like(one)
    entries = one + two
    d = min(2 * t.L, t.w - int(t.servers.max())) if t.L else int(one.max())
    return ForwardingStateReport(entries, entries * max(t.L, 1), d + d * d)


@dataclass
class FailureReport:
    fraction_failed: float
    success_rate: float
    mean_success_path_length: float
    local_minimum_rate: float = 0.0
    budget_exceeded_rate: float = 0.0


def remove_edges(t: Topology, doomed: list[tuple[int, int]]) -> Topology:
    keep = {e: r for e, r in t.edges.items() if e not in set(doomed)}
    return t.with_edges(keep)


def remove_switch_edges(t: Topology, switches) -> Topology:
    """Model switch failures as the failure of all their links."""
    dead = set(int(s) for s in switches)
    keep = {e: r for e, r in t.edges.items()
            if e[0] not in dead and e[1] not in dead}
    return t.with_edges(keep)


def failure_experiment(t: Topology, fraction: float, trials: int,
                       rng: np.random.Generator,
                       config: Optional[RouterConfig] = None) -> FailureReport:
    """Routing success under random link failures.

    Each trial removes floor(fraction * |edges|) uniform random links,
    rebuilds forwarding state on the survivors, and routes all ordered
    pairs; rates are averaged over trials.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("failure fraction must be in [0, 1]")
    config = config or RouterConfig(k_hops=2)
    edge_order = t.edge_list()
    n_fail = int(fraction * len(edge_order))
    n = t.n_switches
    pairs = n * (n - 1)
    succ = np.zeros(trials)
    locmin = np.zeros(trials)
    blown = np.zeros(trials)
    len_sum = 0.0
    len_cnt = 0
    for trial in range(trials):
        if n_fail:
            idx = rng.choice(len(edge_order), size=n_fail, replace=False)
            damaged = remove_edges(t, [edge_order[i] for i in idx])
        else:
            damaged = t
        hops, _, _ = _greedy_run(damaged, config)
        off = ~np.eye(n, dtype=bool)
        h = hops[off]
        succ[trial] = (h >= 0).sum() / pairs
        locmin[trial] = (h == -1).sum() / pairs
        blown[trial] = (h == -2).sum() / pairs
        len_sum += h[h >= 0].sum()
        len_cnt += (h >= 0).sum()
    return FailureReport(
        fraction_failed=fraction,
        success_rate=float(succ.mean()),
        mean_success_path_length=float(len_sum / len_cnt) if len_cnt else float("nan"),
        local_minimum_rate=float(locmin.mean()),
        budget_exceeded_rate=float(blown.mean()),
    )
