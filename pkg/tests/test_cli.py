import json

import pytest

from s2net.cli import main, parse_seeds
from s2net.topology import load_topology

from conftest import FIG1_COORDS, A, B, C, F, G, H, I


def run(argv):
    return main([str(a) for a in argv])


def test_parse_seeds():
    assert parse_seeds("7") == [7]
    assert parse_seeds("1..4") == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        parse_seeds("4..1")


class TestBuildValidate:
    def test_build_fig1(self, tmp_path):
        coords = tmp_path / "fig1_coords.json"
        coords.write_text(json.dumps(FIG1_COORDS))
        out = tmp_path / "topo.json"
        assert run(["build", "--n", 9, "--servers", 18, "--ports", 6,
                    "--coords", coords, "--seed", 7, "--out", out]) == 0
        t = load_topology(out)
        assert set(t.neighbors(B)) >= {A, C, F, G}
        assert t.edges[(A, I)] == frozenset({"ring:1", "ring:2"})
        assert run(["validate", out]) == 0

    def test_validate_rejects_corruption(self, tmp_path, capsys):
        coords = tmp_path / "c.json"
        coords.write_text(json.dumps(FIG1_COORDS))
        out = tmp_path / "topo.json"
        run(["build", "--n", 9, "--servers", 18, "--ports", 6,
             "--coords", coords, "--seed", 7, "--out", out])
        data = json.loads(out.read_text())
        data["switches"][1]["coords"] = data["switches"][0]["coords"]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data))
        assert run(["validate", bad]) == 2

    def test_infeasible_exit_code(self, tmp_path):
        assert run(["build", "--n", 4, "--servers", 44, "--ports", 6,
                    "--out", tmp_path / "x.json"]) == 3

    def test_missing_params_exit_code(self, tmp_path):
        assert run(["shortest-paths", "--out", tmp_path]) == 2

    def test_io_error_exit_code(self, tmp_path):
        assert run(["build", "--n", 4, "--servers", 0, "--ports", 4,
                    "--out", tmp_path / "no" / "dir" / "x.json"]) == 4


class TestExperiments:
    def test_shortest_paths_deterministic(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert run(["shortest-paths", "--n", 20, "--servers", 40,
                        "--ports", 8, "--seed", "1..2", "--baseline",
                        "--out", out]) == 0
        csv1 = (out1 / "shortest_paths.csv").read_bytes()
        csv2 = (out2 / "shortest_paths.csv").read_bytes()
        assert csv1 == csv2
        assert (out1 / "shortest_paths_summary.json").exists()

    def test_greedy_paths(self, tmp_path):
        assert run(["greedy-paths", "--n", 20, "--ports", 8,
                    "--k-hops", 2, "--seed", "0..1", "--out", tmp_path]) == 0
        body = (tmp_path / "greedy_paths.csv").read_text().splitlines()
        assert body[0] == "seed,k_hops,d_spaces,level,mean,p10,p90,failures"
        assert len(body) == 3

    def test_link_load(self, tmp_path):
        assert run(["link-load", "--n", 16, "--ports", 6, "--seed", "3",
                    "--out", tmp_path]) == 0
        assert (tmp_path / "link_load.csv").exists()

    def test_forwarding_state(self, tmp_path):
        assert run(["forwarding-state", "--n", 16, "--ports", 6,
                    "--seed", "0", "--out", tmp_path]) == 0

    def test_bisection(self, tmp_path):
        assert run(["bisection", "--n", 10, "--servers", 20, "--ports", 8,
                    "--partitions", 5, "--seed", "0", "--baseline",
                    "--out", tmp_path]) == 0
        rows = (tmp_path / "bisection.csv").read_text().splitlines()
        assert len(rows) == 3

    def test_throughput(self, tmp_path):
        assert run(["throughput", "--n", 12, "--servers", 24, "--ports", 8,
                    "--subflows", "1,4", "--seed", "0", "--out",
                    tmp_path]) == 0
        rows = (tmp_path / "throughput.csv").read_text().splitlines()
        assert len(rows) == 3

    def test_failures(self, tmp_path):
        assert run(["failures", "--n", 16, "--ports", 6,
                    "--fractions", "0.0,0.2", "--trials", 2,
                    "--seed", "0", "--out", tmp_path]) == 0
        rows = (tmp_path / "failures.csv").read_text().splitlines()
        assert rows[1].split(",")[2] == "1.0"  # f=0 success rate

    def test_key_routing(self, tmp_path):
        assert run(["key-routing", "--n", 16, "--ports", 6, "--keys", 5,
                    "--seed", "0", "--out", tmp_path]) == 0
        summary = json.loads(
            (tmp_path / "key_routing_summary.json").read_text())
        assert summary["all_terminals_are_homes"] is True

    def test_topology_file_input(self, tmp_path):
        topo = tmp_path / "t.json"
        run(["build", "--n", 12, "--servers", 0, "--ports", 6,
             "--seed", 5, "--out", topo])
        assert run(["greedy-paths", "--topology", topo, "--seed", "0",
                    "--out", tmp_path]) == 0

    def test_worker_pool_matches_sequential(self, tmp_path, monkeypatch):
        seq, par = tmp_path / "seq", tmp_path / "par"
        args = ["greedy-paths", "--n", 16, "--ports", 6, "--seed", "0..3"]
        assert run(args + ["--out", seq]) == 0
        monkeypatch.setenv("S2_WORKERS", "2")
        assert run(args + ["--out", par]) == 0
        assert (seq / "greedy_paths.csv").read_bytes() \
            == (par / "greedy_paths.csv").read_bytes()
