"""Config-driven experiment runner.

Every subcommand builds (or loads) topologies, runs one experiment family,
and writes a CSV of metric rows plus a JSON summary echoing the full
config. Identical configs produce byte-identical CSV files. Seeds fan out
one topology per seed (--seed 1..20); S2_WORKERS>1 spreads seeds over
processes.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, analysis, bandwidth
from .analysis import RouterConfig
from .routing import home_switches, key_route
from .topology import (ConfigurationError, TopologyFormatError,
                       build_deploy_as_whole, load_topology,
                       random_regular_network, save_topology)

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def _fail(kind: str, code: int, msg: str) -> int:
    print(f"s2: error kind={kind} msg={json.dumps(str(msg))}", file=sys.stderr)
    return code


def parse_seeds(spec: str) -> list[int]:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty seed range {spec!r}")
        return list(range(lo, hi + 1))
    return [int(spec)]


def _add_topology_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--topology", type=Path, default=None,
                   help="load a topology file instead of generating")
    p.add_argument("--n", type=int, default=None, help="switch count")
    p.add_argument("--servers", type=int, default=0, help="total servers")
    p.add_argument("--ports", type=int, default=None, help="ports per switch")
    p.add_argument("--coord-mode", choices=("balanced", "pure_random"),
                   default="balanced")
    p.add_argument("--seed", default="0", help="seed or inclusive range a..b")


def _add_out_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, default=Path("."),
                   help="output directory")


def _make_topology(args, seed: int):
    if args.topology is not None:
        return load_topology(args.topology)
    if args.n is None or args.ports is None:
        raise ValueError("--n and --ports are required without --topology")
    return build_deploy_as_whole(args.n, args.servers, args.ports,
                                 coord_mode=args.coord_mode, seed=seed)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in row])


def _write_summary(path: Path, args, extra: dict, elapsed: float) -> None:
    config = {k: (str(v) if isinstance(v, Path) else v)
              for k, v in vars(args).items() if k != "func"}
    payload = {"config": config, "library_version": __version__,
               "wall_clock_seconds": round(elapsed, 3), **extra}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, default=str)
        fh.write("\n")


def _map_seeds(fn, args, seeds: list[int]) -> list:
    workers = int(os.environ.get("S2_WORKERS", "1"))
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, [(args, s) for s in seeds]))
    return [fn((args, s)) for s in seeds]


# ---------------------------------------------------------------- build

def cmd_build(args) -> int:
    seeds = parse_seeds(args.seed)
    if len(seeds) != 1:
        raise ConfigurationError("build takes a single seed")
    override = None
    if args.coords is not None:
        with open(args.coords) as fh:
            override = json.load(fh)
    t = build_deploy_as_whole(args.n, args.servers, args.ports,
                              coord_mode=args.coord_mode, seed=seeds[0],
                              coordinate_override=override)
    save_topology(t, args.out)
    print(f"wrote {args.out}: N={t.n_switches} L={t.L} "
          f"edges={len(t.edges)} servers={t.n_servers}")
    return 0


def cmd_validate(args) -> int:
    try:
        t = load_topology(args.file)
    except TopologyFormatError as exc:
        return _fail("validate", EXIT_CONFIG, str(exc))
    problems = t.validate()
    if problems:
        for p in problems:
            print(f"violation: {p}")
        return EXIT_CONFIG
    print("OK")
    return 0


# ------------------------------------------------------- shortest paths

def _shortest_one(packed):
    args, seed = packed
    rows = []
    t = _make_topology(args, seed)
    for level in args.levels.split(","):
        st = analysis.all_pairs_shortest(t, level=level)
        rows.append(["s2", seed, level, st.mean, st.p10, st.p90, st.count])
    if args.baseline:
        b = random_regular_network(t.n_switches, t.n_servers, t.w,
                                   seed=seed + 10_000_000)
        for level in args.levels.split(","):
            st = analysis.all_pairs_shortest(b, level=level)
            rows.append(["random_regular", seed, level, st.mean, st.p10,
                         st.p90, st.count])
    return rows


def cmd_shortest_paths(args) -> int:
    t0 = time.perf_counter()
    seeds = parse_seeds(args.seed)
    rows = [r for part in _map_seeds(_shortest_one, args, seeds) for r in part]
    args.out.mkdir(parents=True, exist_ok=True)
    _write_csv(args.out / "shortest_paths.csv",
               ["graph", "seed", "level", "mean", "p10", "p90", "pairs"],
               rows)
    agg = {}
    for graph, _, level, mean, *_ in rows:
        agg.setdefault(f"{graph}/{level}", []).append(mean)
    summary = {k: float(np.mean(v)) for k, v in sorted(agg.items())}
    _write_summary(args.out / "shortest_paths_summary.json", args,
                   {"mean_of_means": summary}, time.perf_counter() - t0)
    print(json.dumps(summary, indent=1))
    return 0


# --------------------------------------------------------- greedy paths

def _greedy_one(packed):
    args, seed = packed
    t = _make_topology(args, seed)
    config = RouterConfig(k_hops=args.k_hops, d_spaces=args.d_spaces)
    st = analysis.routing_path_stats(t, config, level=args.level)
    return [[seed, args.k_hops, args.d_spaces or t.L, args.level,
             st.mean, st.p10, st.p90, st.failures]]


def cmd_greedy_paths(args) -> int:
    t0 = time.perf_counter()
    seeds = parse_seeds(args.seed)
    rows = [r for part in _map_seeds(_greedy_one, args, seeds) for r in part]
    args.out.mkdir(parents=True, exist_ok=True)
    _write_csv(args.out / "greedy_paths.csv",
               ["seed", "k_hops", "d_spaces", "level", "mean", "p10", "p90",
                "failures"], rows)
    mean = float(np.mean([r[4] for r in rows]))
    _write_summary(args.out / "greedy_paths_summary.json", args,
                   {"mean_of_means": mean}, time.perf_counter() - t0)
    print(f"mean routing path length over {len(seeds)} seeds: {mean:.4f}")
    return 0


# ------------------------------------------------------------ link load

def _link_load_one(packed):
    args, seed = packed
    t = _make_topology(args, seed)
    rep = analysis.link_load(t, RouterConfig(k_hops=args.k_hops))
    return [[seed, row.edge[0], row.edge[1], row.path_count,
             row.endpoint_mcd, row.endpoint_cd_sum] for row in rep.rows]


def cmd_link_load(args) -> int:
    t0 = time.perf_counter()
    seeds = parse_seeds(args.seed)
    rows = [r for part in _map_seeds(_link_load_one, args, seeds) for r in part]
    args.out.mkdir(parents=True, exist_ok=True)
    _write_csv(args.out / "link_load.csv",
               ["seed", "a", "b", "path_count", "endpoint_mcd",
                "endpoint_cd_sum"], rows)
    per_seed_max = {}
    for seed, _, _, cnt, *_ in rows:
        per_seed_max[seed] = max(per_seed_max.get(seed, 0), cnt)
    _write_summary(args.out / "link_load_summary.json", args,
                   {"max_path_count": per_seed_max},
                   time.perf_counter() - t0)
    print(f"max link path count per seed: {per_seed_max}")
    return 0


# ----------------------------------------------------- forwarding state

def _forwarding_one(packed):
    args, seed = packed
    t = _make_topology(args, seed)
    rep = analysis.forwarding_state(t, k_hops=args.k_hops)
    return [[seed, args.k_hops, rep.mean, rep.max,
             float(rep.scalar_entries.mean()), int(rep.scalar_entries.max()),
             rep.bound]]


def cmd_forwarding_state(args) -> int:
    t0 = time.perf_counter()
    seeds = parse_seeds(args.seed)
    rows = [r for part in _map_seeds(_forwarding_one, args, seeds) for r in part]
    args.out.mkdir(parents=True, exist_ok=True)
    _write_csv(args.out / "forwarding_state.csv",
               ["seed", "k_hops", "mean_entries", "max_entries",
                "mean_scalar_entries", "max_scalar_entries", "bound"], rows)
    _write_summary(args.out / "forwarding_state_summary.json", args,
                   {"max_entries": max(r[3] for r in rows)},
                   time.perf_counter() - t0)
    print(f"max coordinate entries: {max(r[3] for r in rows)}")
    return 0


# ------------------------------------------------------------ bisection

def _bisection_one(packed):
    args, seed = packed
    t = _make_topology(args, seed)
    rows = [["s2", seed, bandwidth.bisection_bandwidth(
        t, partitions=args.partitions, seed=seed + 777)]]
    if args.baseline:
        b = random_regular_network(t.n_switches, t.n_servers, t.w,
                                   seed=seed + 10_000_000)
        rows.append(["random_regular", seed, bandwidth.bisection_bandwidth(
            b, partitions=args.partitions, seed=seed + 777)])
    return rows


def cmd_bisection(args) -> int:
    t0 = time.perf_counter()
    seeds = parse_seeds(args.seed)
    rows = [r for part in _map_seeds(_bisection_one, args, seeds) for r in part]
    args.out.mkdir(parents=True, exist_ok=True)
    _write_csv(args.out / "bisection.csv", ["graph", "seed", "bandwidth"],
               rows)
    agg = {}
    for graph, _, value in rows:
        agg.setdefault(graph, []).append(value)
    summary = {k: float(np.mean(v)) for k, v in sorted(agg.items())}
    _write_summary(args.out / "bisection_summary.json", args, summary,
                   time.perf_counter() - t0)
    print(json.dumps(summary, indent=1))
    return 0


# ----------------------------------------------------------- throughput

def _throughput_one(packed):
    args, seed = packed
    t = _make_topology(args, seed)
    rng = np.random.default_rng(seed + 555)
    matrix = bandwidth.permutation_traffic(
        np.arange(t.n_servers), rng)
    rows = []
    for k in args.subflows:
        routes = bandwidth.route_flows(t, matrix, subflows=k, mode=args.mode)
        rep = bandwidth.maxmin_throughput(t, matrix, routes)
        rows.append([seed, k, args.mode, rep.total, rep.jain_index,
                     len(rep.excluded_flows)])
    return rows


def cmd_throughput(args) -> int:
    t0 = time.perf_counter()
    args.subflows = [int(x) for x in args.subflows.split(",")]
    seeds = parse_seeds(args.seed)
    rows = [r for part in _map_seeds(_throughput_one, args, seeds) for r in part]
    args.out.mkdir(parents=True, exist_ok=True)
    _write_csv(args.out / "throughput.csv",
               ["seed", "subflows", "mode", "total", "jain", "excluded"],
               rows)
    agg = {}
    for _, k, _, total, *_ in rows:
        agg.setdefault(k, []).append(total)
    summary = {str(k): float(np.mean(v)) for k, v in sorted(agg.items())}
    _write_summary(args.out / "throughput_summary.json", args,
                   {"mean_total": summary}, time.perf_counter() - t0)
    print(json.dumps(summary, indent=1))
    return 0


# ------------------------------------------------------------- failures

def _failures_one(packed):
    args, seed = packed
    t = _make_topology(args, seed)
    rows = []
    for frac in args.fractions:
        rng = np.random.default_rng(seed + 333)
        rep = analysis.failure_experiment(
            t, frac, trials=args.trials, rng=rng,
            config=RouterConfig(k_hops=args.k_hops))
        rows.append([seed, frac, rep.success_rate,
                     rep.mean_success_path_length, rep.local_minimum_rate,
                     rep.budget_exceeded_rate])
    return rows


def cmd_failures(args) -> int:
    t0 = time.perf_counter()
    args.fractions = [float(x) for x in args.fractions.split(",")]
    seeds = parse_seeds(args.seed)
    rows = [r for part in _map_seeds(_failures_one, args, seeds) for r in part]
    args.out.mkdir(parents=True, exist_ok=True)
    _write_csv(args.out / "failures.csv",
               ["seed", "fraction", "success_rate", "mean_success_len",
                "local_minimum_rate", "budget_exceeded_rate"], rows)
    agg = {}
    for _, frac, rate, *_ in rows:
        agg.setdefault(frac, []).append(rate)
    summary = {repr(f): float(np.mean(v)) for f, v in sorted(agg.items())}
    _write_summary(args.out / "failures_summary.json", args,
                   {"mean_success_rate": summary}, time.perf_counter() - t0)
    print(json.dumps(summary, indent=1))
    return 0


# ----------------------------------------------------------- key routing

def _key_routing_one(packed):
    args, seed = packed
    t = _make_topology(args, seed)
    rng = np.random.default_rng(seed + 111)
    rows = []
    d = args.d if args.d is not None else t.L
    matches = 0
    total = 0
    hops = 0
    for ki in range(args.keys):
        key = rng.bytes(16)
        homes = set(home_switches(t, key, d))
        for src in range(t.n_switches):
            rec = key_route(t, src, key, d)
            total += 1
            hops += rec.hop_count
            if rec.hops[-1] in homes:
                matches += 1
    rows.append([seed, args.keys, t.n_switches, d, matches, total,
                 hops / total])
    return rows


def cmd_key_routing(args) -> int:
    t0 = time.perf_counter()
    seeds = parse_seeds(args.seed)
    rows = [r for part in _map_seeds(_key_routing_one, args, seeds) for r in part]
    args.out.mkdir(parents=True, exist_ok=True)
    _write_csv(args.out / "key_routing.csv",
               ["seed", "keys", "sources", "d", "oracle_matches", "routes",
                "mean_hops"], rows)
    ok = all(r[4] == r[5] for r in rows)
    _write_summary(args.out / "key_routing_summary.json", args,
                   {"all_terminals_are_homes": ok}, time.perf_counter() - t0)
    print(f"terminal-equals-home oracle: {'OK' if ok else 'MISMATCH'}")
    return 0 if ok else 1


# ----------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="s2",
        description="Multi-ring greedy-routed network experiments")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="generate a topology file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--servers", type=int, default=0)
    p.add_argument("--ports", type=int, required=True)
    p.add_argument("--coord-mode", choices=("balanced", "pure_random"),
                   default="balanced")
    p.add_argument("--coords", type=Path, default=None,
                   help="JSON file with explicit coordinates (N x L)")
    p.add_argument("--seed", default="0")
    p.add_argument("--out", type=Path, required=True,
                   help="topology file to write")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("validate", help="check a topology file")
    p.add_argument("file", type=Path)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("shortest-paths", help="BFS path-length statistics")
    _add_topology_args(p)
    _add_out_arg(p)
    p.add_argument("--levels", default="switch,server")
    p.add_argument("--baseline", action="store_true",
                   help="also run a matched random-regular graph")
    p.set_defaults(func=cmd_shortest_paths)

    p = sub.add_parser("greedy-paths", help="greedy routing path lengths")
    _add_topology_args(p)
    _add_out_arg(p)
    p.add_argument("--k-hops", type=int, choices=(1, 2), default=2)
    p.add_argument("--d-spaces", type=int, default=None)
    p.add_argument("--level", choices=("switch", "server"), default="switch")
    p.set_defaults(func=cmd_greedy_paths)

    p = sub.add_parser("link-load", help="paths per link for all pairs")
    _add_topology_args(p)
    _add_out_arg(p)
    p.add_argument("--k-hops", type=int, choices=(1, 2), default=1)
    p.set_defaults(func=cmd_link_load)

    p = sub.add_parser("forwarding-state", help="routing table sizes")
    _add_topology_args(p)
    _add_out_arg(p)
    p.add_argument("--k-hops", type=int, choices=(1, 2), default=2)
    p.set_defaults(func=cmd_forwarding_state)

    p = sub.add_parser("bisection", help="bisection bandwidth")
    _add_topology_args(p)
    _add_out_arg(p)
    p.add_argument("--partitions", type=int, default=50)
    p.add_argument("--baseline", action="store_true")
    p.set_defaults(func=cmd_bisection)

    p = sub.add_parser("throughput", help="max-min fair permutation traffic")
    _add_topology_args(p)
    _add_out_arg(p)
    p.add_argument("--subflows", default="1,8",
                   help="comma list of subflow counts")
    p.add_argument("--mode", choices=("hash", "load_aware"), default="hash")
    p.set_defaults(func=cmd_throughput)

    p = sub.add_parser("failures", help="routing success under link failures")
    _add_topology_args(p)
    _add_out_arg(p)
    p.add_argument("--fractions", default="0.0,0.05,0.1,0.15,0.2")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--k-hops", type=int, choices=(1, 2), default=2)
    p.set_defaults(func=cmd_failures)

    p = sub.add_parser("key-routing", help="key-based routing oracle check")
    _add_topology_args(p)
    _add_out_arg(p)
    p.add_argument("--keys", type=int, default=100)
    p.add_argument("--d", type=int, default=None)
    p.set_defaults(func=cmd_key_routing)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        return _fail("infeasible", EXIT_INFEASIBLE, str(exc))
    except TopologyFormatError as exc:
        return _fail("config", EXIT_CONFIG, str(exc))
    except ValueError as exc:
        return _fail("config", EXIT_CONFIG, str(exc))
    except OSError as exc:
        return _fail("io", EXIT_IO, str(exc))


if __name__ == "__main__":
    sys.exit(main())
