"""Construction of multi-ring switch topologies.

A topology has N switches, each holding one coordinate per virtual ring
space. Per space every switch is wired to its two coordinate-adjacent
switches; leftover inter-switch ports are paired up randomly. Edges are
physical: a pair of switches adjacent in several spaces shares one cable
carrying several ring roles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .geometry import as_coords

RANDOM_ROLE = "random"


class ConfigurationError(ValueError):
    """Requested network parameters are infeasible."""


class TopologyFormatError(ValueError):
    """A topology file is malformed or violates invariants."""


def ring_role(space: int) -> str:
    """Role label for ring adjacency in 1-based space `space`."""
    return f"ring:{space}"


def _norm_pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(eq=False, repr=False)
class Topology:
    """Immutable-by-convention switch network.

    coords has shape (N, L); servers has shape (N,). Edge roles are sets of
    "ring:<k>" (k is 1-based) and "random" labels. Baseline random-regular
    graphs use L == 0 and an empty coords array.
    """

    L: int
    w: int
    coords: np.ndarray
    servers: np.ndarray
    edges: dict[tuple[int, int], frozenset[str]]
    seed: Optional[int] = None
    _csr: Optional[tuple] = field(default=None, repr=False, compare=False)

    @property
    def n_switches(self) -> int:
        return len(self.servers)

    @property
    def n_servers(self) -> int:
        return int(self.servers.sum())

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_switches, dtype=np.int64)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def neighbors(self, s: int) -> list[int]:
        indptr, indices, _ = self.csr()
        return list(indices[indptr[s]:indptr[s + 1]])

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Adjacency as (indptr, indices, edge_index), neighbors ascending.

        edge_index[i] maps adjacency slot i to the rank of its edge in
        sorted(edges), shared by both directions.
        """
        if self._csr is None:
            n = self.n_switches
            order = sorted(self.edges)
            nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
            for ei, (a, b) in enumerate(order):
                nbrs[a].append((b, ei))
                nbrs[b].append((a, ei))
            indptr = np.zeros(n + 1, dtype=np.int64)
            indices = np.empty(2 * len(order), dtype=np.int64)
            eidx = np.empty(2 * len(order), dtype=np.int64)
            pos = 0
            for i in range(n):
                nbrs[i].sort()
                for nb, ei in nbrs[i]:
                    indices[pos] = nb
                    eidx[pos] = ei
                    pos += 1
                indptr[i + 1] = pos
            object.__setattr__(self, "_csr", (indptr, indices, eidx))
        return self._csr

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def with_edges(self, edges: Mapping[tuple[int, int], Iterable[str]],
                   seed: Optional[int] = None) -> "Topology":
        """Copy of this topology with a replaced edge set."""
        return Topology(
            L=self.L, w=self.w, coords=self.coords.copy(),
            servers=self.servers.copy(),
            edges={_norm_pair(*e): frozenset(r) for e, r in edges.items()},
            seed=self.seed if seed is None else seed,
        )

    def validate(self) -> list[str]:
        """All invariant violations, empty when the topology is well formed."""
        problems = []
        n = self.n_switches
        if self.coords.shape != (n, self.L):
            problems.append(
                f"coords shape {self.coords.shape} != ({n}, {self.L})")
            return problems
        if np.any(self.coords < 0.0) or np.any(self.coords >= 1.0):
            problems.append("coordinates outside [0,1)")
        for k in range(self.L):
            col = self.coords[:, k]
            if len(np.unique(col)) != n:
                problems.append(f"duplicate coordinate in space {k + 1}")
        for (a, b), roles in self.edges.items():
            if a == b:
                problems.append(f"self-loop at switch {a}")
            if not (0 <= a < n and 0 <= b < n):
                problems.append(f"edge ({a},{b}) references unknown switch")
            if not roles:
                problems.append(f"edge ({a},{b}) carries no role")
            for r in roles:
                if r == RANDOM_ROLE:
                    continue
                try:
                    space = int(r.removeprefix("ring:")) if r.startswith("ring:") else 0
                except ValueError:
                    space = 0
                if not 1 <= space <= self.L:
                    problems.append(f"edge ({a},{b}) has invalid role {r!r}")
        # ring consistency: sorted coordinates per space reproduce ring roles
        for k in range(self.L):
            expect = _ring_pairs(self.coords[:, k])
            actual = {e for e, roles in self.edges.items()
                      if ring_role(k + 1) in roles}
            if expect != actual:
                problems.append(
                    f"space {k + 1} ring edges do not match sorted "
                    f"coordinates (missing {sorted(expect - actual)[:3]}, "
                    f"extra {sorted(actual - expect)[:3]})")
        deg = self.degrees()
        for i in range(n):
            if self.L >= 1 and deg[i] > 2 * self.L:
                problems.append(
                    f"switch {i} inter-switch degree {deg[i]} > 2L={2 * self.L}")
            if deg[i] + self.servers[i] > self.w:
                problems.append(
                    f"switch {i} degree {deg[i]} + servers "
                    f"{self.servers[i]} exceeds {self.w} ports")
        return problems

    def __eq__(self, other) -> bool:
        if not isinstance(other, Topology):
            return NotImplemented
        return (self.L == other.L and self.w == other.w
                and self.seed == other.seed
                and np.array_equal(self.coords, other.coords)
                and np.array_equal(self.servers, other.servers)
                and self.edges == other.edges)

    def __repr__(self) -> str:
        return (f"Topology(N={self.n_switches}, L={self.L}, w={self.w}, "
                f"servers={self.n_servers}, edges={len(self.edges)}, "
                f"seed={self.seed})")


def _ring_pairs(space_coords: np.ndarray) -> set[tuple[int, int]]:
    """Unordered ring-adjacent switch pairs for one space."""
    n = len(space_coords)
    if n < 2:
        return set()
    order = np.argsort(space_coords)
    if n == 2:
        return {_norm_pair(int(order[0]), int(order[1]))}
    return {_norm_pair(int(order[i]), int(order[(i + 1) % n]))
            for i in range(n)}


def balanced_coordinate(existing: Sequence[float],
                        rng: np.random.Generator) -> float:
    """Draw a coordinate at circular distance >= 1/(3n) from all n existing.

    The new point lands uniformly inside the widest arc between circularly
    consecutive existing coordinates, shrunk by 1/(3n) on both ends. The
    widest arc spans at least 1/n (pigeonhole), so the shrunk arc is never
    empty and the separation guarantee composes across insertions.
    """
    n = len(existing)
    if n == 0:
        return float(rng.random())
    arr = np.sort(np.asarray(existing, dtype=np.float64))
    gaps = np.diff(arr, append=arr[0] + 1.0)
    gi = int(np.argmax(gaps))  # ties: lowest starting coordinate wins
    a = float(arr[gi])
    width = float(gaps[gi])
    delta = 1.0 / (3.0 * n)
    if width - 2.0 * delta <= 0.0:
        raise ValueError("no arc wide enough; existing coordinates clash")
    t = a + delta + rng.random() * (width - 2.0 * delta)
    return t % 1.0


def _generate_space_coords(N: int, mode: str, rng: np.random.Generator) -> np.ndarray:
    if mode == "balanced":
        pts: list[float] = []
        for _ in range(N):
            pts.append(balanced_coordinate(pts, rng))
        return np.array(pts)
    if mode == "pure_random":
        pts = []
        seen = set()
        for _ in range(N):
            t = float(rng.random())
            while t in seen:  # collisions are measure zero but must not slip through
                t = float(rng.random())
            seen.add(t)
            pts.append(t)
        return np.array(pts)
    raise ConfigurationError(f"unknown coordinate mode {mode!r}")


def generate_coordinates(N: int, L: int, mode: str,
                         rng: np.random.Generator) -> np.ndarray:
    """(N, L) coordinate matrix, filled space by space."""
    coords = np.empty((N, L))
    for k in range(L):
        coords[:, k] = _generate_space_coords(N, mode, rng)
    return coords


def _split_servers(H: int, N: int) -> np.ndarray:
    base, extra = divmod(H, N)
    servers = np.full(N, base, dtype=np.int64)
    servers[:extra] += 1
    return servers


def _ring_edges(coords: np.ndarray) -> dict[tuple[int, int], set[str]]:
    edges: dict[tuple[int, int], set[str]] = {}
    for k in range(coords.shape[1]):
        for pair in _ring_pairs(coords[:, k]):
            edges.setdefault(pair, set()).add(ring_role(k + 1))
    return edges


def build_deploy_as_whole(n_switches: int, n_servers: int, ports: int,
                          coord_mode: str = "balanced",
                          rng: Optional[np.random.Generator] = None,
                          seed: Optional[int] = None,
                          coordinate_override: Optional[Sequence] = None,
                          pair_free_ports: bool = True) -> Topology:
    """Build a whole network: per-space rings plus random free-port pairing.

    Every switch gets floor(H/N) or floor(H/N)+1 servers; the space count is
    L = floor((w - ceil(H/N)) / 2). With coordinate_override the construction
    is deterministic up to the pairing stage.
    """
    N, H, w = n_switches, n_servers, ports
    if N < 2:
        raise ConfigurationError("need at least 2 switches")
    if H < 0:
        raise ConfigurationError("negative server count")
    rng = _resolve_rng(rng, seed)
    ceil_hn = -(-H // N) if H else 0
    L = (w - ceil_hn) // 2
    if L < 1:
        raise ConfigurationError(
            f"infeasible: w={w} ports with {ceil_hn} servers/switch "
            f"leaves no room for ring wiring (L={L})")
    servers = _split_servers(H, N)
    if coordinate_override is not None:
        coords = np.asarray(coordinate_override, dtype=np.float64)
        if coords.shape != (N, L):
            raise ConfigurationError(
                f"coordinate override shape {coords.shape} != ({N}, {L})")
        coords = as_coords(coords.ravel()).reshape(N, L)
        for k in range(L):
            if len(np.unique(coords[:, k])) != N:
                raise ConfigurationError(
                    f"override has duplicate coordinates in space {k + 1}")
    else:
        coords = generate_coordinates(N, L, coord_mode, rng)
    edges = _ring_edges(coords)
    t = Topology(L=L, w=w, coords=coords, servers=servers,
                 edges={e: frozenset(r) for e, r in edges.items()},
                 seed=seed)
    if pair_free_ports:
        t = connect_free_ports(t, rng)
    return t


def free_ports(t: Topology) -> np.ndarray:
    """Ports per switch still available for inter-switch pairing."""
    budget = np.minimum(t.w - t.servers,
                        2 * t.L if t.L >= 1 else t.w - t.servers)
    return budget - t.degrees()


def connect_free_ports(t: Topology, rng: np.random.Generator) -> Topology:
    """Randomly pair switches that still have free inter-switch ports.

    Repeatedly picks a uniform random pair of distinct, not-yet-connected
    switches with free ports until no legal pair remains; leftover ports may
    strand when every remaining pair is already connected.
    """
    edges = {e: set(r) for e, r in t.edges.items()}
    free = free_ports(t).copy()

    def legal_pairs() -> list[tuple[int, int]]:
        fs = np.flatnonzero(free > 0)
        return [(int(fs[i]), int(fs[j]))
                for i in range(len(fs)) for j in range(i + 1, len(fs))
                if (fs[i], fs[j]) not in edges]

    while True:
        fs = np.flatnonzero(free > 0)
        if len(fs) < 2:
            break
        # rejection sampling is uniform over legal pairs; fall back to
        # enumeration when legal pairs become scarce
        pair = None
        for _ in range(32):
            i, j = rng.choice(len(fs), size=2, replace=False)
            cand = _norm_pair(int(fs[i]), int(fs[j]))
            if cand not in edges:
                pair = cand
                break
        if pair is None:
            cands = legal_pairs()
            if not cands:
                break
            pair = cands[int(rng.integers(len(cands)))]
        edges[pair] = {RANDOM_ROLE}
        free[pair[0]] -= 1
        free[pair[1]] -= 1
    return t.with_edges(edges)


def add_switch_incremental(t: Topology, servers_to_add: int,
                           coord_mode: str = "balanced",
                           rng: Optional[np.random.Generator] = None,
                           seed: Optional[int] = None,
                           coordinate_override: Optional[Sequence] = None) -> Topology:
    """Grow a network by ceil(m / (w-2L)) switches hosting m new servers.

    Each new switch splits, per space, the ring edge between its two
    coordinate-adjacent switches; free ports are re-paired once after the
    whole batch.
    """
    if servers_to_add < 1:
        raise ConfigurationError("servers_to_add must be positive")
    rng = _resolve_rng(rng, seed)
    per_switch = t.w - 2 * t.L
    if per_switch < 1:
        raise ConfigurationError("no server ports available per new switch")
    count = -(-servers_to_add // per_switch)
    if coordinate_override is not None:
        override = np.asarray(coordinate_override, dtype=np.float64)
        if override.shape != (count, t.L):
            raise ConfigurationError(
                f"override shape {override.shape} != ({count}, {t.L})")
    coords = t.coords.copy()
    servers = list(t.servers)
    edges = {e: set(r) for e, r in t.edges.items()}

    def degree_of(x: int) -> int:
        return sum(1 for e in edges if x in e)

    def free_port(x: int) -> None:
        # A switch at its full port budget can still be forced to accept a
        # new ring cable when the split pair stays adjacent through another
        # space. That switch then has a doubled ring neighbor, so at least
        # one of its edges is a pure random pairing; unplug one.
        budget = min(t.w - servers[x], 2 * t.L)
        if degree_of(x) < budget:
            return
        sacrifices = sorted(e for e, roles in edges.items()
                            if x in e and roles == {RANDOM_ROLE})
        if not sacrifices:
            raise ConfigurationError(
                f"switch {x} has no free port and no random pairing to drop")
        del edges[sacrifices[0]]

    remaining = servers_to_add
    for idx in range(count):
        s = len(servers)
        if coordinate_override is not None:
            new_coords = as_coords(override[idx])
        else:
            new_coords = np.empty(t.L)
            for k in range(t.L):
                col = coords[:, k]
                if coord_mode == "balanced":
                    new_coords[k] = balanced_coordinate(col, rng)
                else:
                    c = float(rng.random())
                    while c in set(col):
                        c = float(rng.random())
                    new_coords[k] = c
        for k in range(t.L):
            col = coords[:, k]
            if np.any(col == new_coords[k]):
                raise ConfigurationError(
                    f"new coordinate duplicates space {k + 1}")
            # ring-adjacent pair around the new coordinate
            order = np.argsort(col)
            pos = int(np.searchsorted(col[order], new_coords[k]))
            u = int(order[pos % len(order)])
            v = int(order[(pos - 1) % len(order)])
            role = ring_role(k + 1)
            # on a 2-node ring u and v stay adjacent through the other arc
            if u != v and len(col) > 2:
                old = _norm_pair(u, v)
                roles = edges[old]
                roles.discard(role)
                if not roles:
                    del edges[old]
            for nb in {u, v}:
                pair = _norm_pair(s, nb)
                if pair not in edges:
                    free_port(nb)
                    edges[pair] = set()
                edges[pair].add(role)
        coords = np.vstack([coords, new_coords[None, :]])
        servers.append(min(per_switch, remaining))
        remaining -= servers[-1]
    grown = Topology(L=t.L, w=t.w, coords=coords,
                     servers=np.array(servers, dtype=np.int64),
                     edges={e: frozenset(r) for e, r in edges.items()},
                     seed=t.seed)
    return connect_free_ports(grown, rng)


def _stub_match(degrees: np.ndarray, rng: np.random.Generator,
                max_restarts: int = 1000) -> set[tuple[int, int]]:
    """Simple graph with the given degree sequence via stub matching.

    Colliding stubs (self-loops, duplicate edges) are re-shuffled and
    re-paired; a full restart happens when the leftovers cannot be wired.
    """
    n = len(degrees)
    if degrees.sum() % 2 != 0:
        raise ConfigurationError("degree sequence sums to an odd number")
    if np.any(degrees >= n):
        raise ConfigurationError("degree must be smaller than switch count")
    for _ in range(max_restarts):
        edges: set[tuple[int, int]] = set()
        stubs = np.repeat(np.arange(n), degrees)
        stuck = False
        while len(stubs):
            rng.shuffle(stubs)
            leftover: dict[int, int] = {}
            for i in range(0, len(stubs) - 1, 2):
                a, b = int(stubs[i]), int(stubs[i + 1])
                pair = _norm_pair(a, b)
                if a != b and pair not in edges:
                    edges.add(pair)
                else:
                    leftover[a] = leftover.get(a, 0) + 1
                    leftover[b] = leftover.get(b, 0) + 1
            if leftover:
                keys = sorted(leftover)
                if not any(_norm_pair(x, y) not in edges
                           for i, x in enumerate(keys) for y in keys[i + 1:]):
                    stuck = True  # no suitable pairing exists among leftovers
                    break
            stubs = np.array([s for s, c in leftover.items()
                              for _ in range(c)], dtype=np.int64)
        if not stuck:
            return edges
    raise ConfigurationError("stub matching failed after restart cap")


def generate_random_regular(n_switches: int, degree: int,
                            rng: Optional[np.random.Generator] = None,
                            seed: Optional[int] = None) -> Topology:
    """Sufficiently uniform random r-regular graph (no coordinates)."""
    N, r = n_switches, degree
    if (N * r) % 2 != 0:
        raise ConfigurationError(f"N*r = {N}*{r} is odd")
    if r >= N:
        raise ConfigurationError(f"degree {r} must be < {N}")
    rng = _resolve_rng(rng, seed)
    edges = _stub_match(np.full(N, r, dtype=np.int64), rng)
    return Topology(L=0, w=r, coords=np.empty((N, 0)),
                    servers=np.zeros(N, dtype=np.int64),
                    edges={e: frozenset({RANDOM_ROLE}) for e in edges},
                    seed=seed)


def random_regular_network(n_switches: int, n_servers: int, ports: int,
                           rng: Optional[np.random.Generator] = None,
                           seed: Optional[int] = None) -> Topology:
    """Random-graph baseline at matched parameters.

    Servers are spread like in an S2 build; every remaining port carries a
    random edge, so switch i has degree ports - servers_i. An odd stub total
    strands one port on the last switch.
    """
    N = n_switches
    if N < 2:
        raise ConfigurationError("need at least 2 switches")
    rng = _resolve_rng(rng, seed)
    servers = _split_servers(n_servers, N)
    degrees = ports - servers
    if np.any(degrees < 1):
        raise ConfigurationError("servers exhaust all ports")
    if degrees.sum() % 2 != 0:
        degrees[N - 1] -= 1
    edges = _stub_match(degrees, rng)
    return Topology(L=0, w=ports, coords=np.empty((N, 0)), servers=servers,
                    edges={e: frozenset({RANDOM_ROLE}) for e in edges},
                    seed=seed)


def _resolve_rng(rng: Optional[np.random.Generator],
                 seed: Optional[int]) -> np.random.Generator:
    if rng is not None:
        return rng
    return np.random.default_rng(seed)


FORMAT_VERSION = 1


def topology_to_dict(t: Topology) -> dict:
    return {
        "version": FORMAT_VERSION,
        "L": t.L,
        "w": t.w,
        "seed": t.seed,
        "switches": [
            {"id": i, "coords": [float(c) for c in t.coords[i]],
             "servers": int(t.servers[i])}
            for i in range(t.n_switches)
        ],
        "edges": [
            {"a": a, "b": b, "roles": sorted(t.edges[(a, b)])}
            for a, b in t.edge_list()
        ],
    }


def topology_from_dict(data: dict) -> Topology:
    try:
        if data["version"] != FORMAT_VERSION:
            raise TopologyFormatError(
                f"unsupported format version {data['version']}")
        switches = data["switches"]
        N = len(switches)
        L = int(data["L"])
        coords = np.empty((N, L))
        servers = np.empty(N, dtype=np.int64)
        for row in switches:
            i = int(row["id"])
            if not 0 <= i < N:
                raise TopologyFormatError(f"switch id {i} not in [0, {N})")
            if len(row["coords"]) != L:
                raise TopologyFormatError(
                    f"switch {i}: {len(row['coords'])} coords, expected {L}")
            coords[i] = row["coords"]
            servers[i] = row["servers"]
        edges = {}
        for row in data["edges"]:
            pair = _norm_pair(int(row["a"]), int(row["b"]))
            if pair in edges:
                raise TopologyFormatError(f"duplicate edge {pair}")
            edges[pair] = frozenset(row["roles"])
        t = Topology(L=L, w=int(data["w"]), coords=coords, servers=servers,
                     edges=edges, seed=data.get("seed"))
    except TopologyFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise TopologyFormatError(f"malformed topology file: {exc}") from exc
    problems = t.validate()
    if problems:
        raise TopologyFormatError("; ".join(problems))
    return t


def save_topology(t: Topology, path) -> None:
    """Write a topology as JSON; float repr keeps doubles exact."""
    with open(path, "w") as fh:
        json.dump(topology_to_dict(t), fh, indent=1)
        fh.write("\n")


def load_topology(path) -> Topology:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise TopologyFormatError(
            f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return topology_from_dict(data)
