import numpy as np
import pytest

from s2net.analysis import (PathStats, RouterConfig, all_pairs_shortest,
                            control_area_report, distance_matrix,
                            failure_experiment, forwarding_state, link_load,
                            remove_switch_edges, routing_path_stats)
from s2net.topology import build_deploy_as_whole, generate_random_regular

import oracles
from conftest import B, make_graph


class TestShortest:
    def test_four_cycle(self):
        t = generate_random_regular(4, 2, seed=0)
        st = all_pairs_shortest(t)
        assert st.mean == pytest.approx(4 / 3)
        assert st.count == 6

    def test_single_edge(self):
        t = build_deploy_as_whole(2, 0, 2, seed=0)
        st = all_pairs_shortest(t)
        assert (st.mean, st.p10, st.p90) == (1.0, 1, 1)

    def test_disconnected_named_pair(self):
        t = make_graph(4, [(0, 1), (2, 3)])
        with pytest.raises(ValueError, match="disconnected"):
            all_pairs_shortest(t)

    def test_matches_dijkstra_oracle(self):
        for seed, n in ((0, 50), (1, 50), (2, 120), (3, 200)):
            t = build_deploy_as_whole(n, n, 9, seed=seed)
            assert np.array_equal(
                distance_matrix(t),
                oracles.dijkstra_all_pairs(t.n_switches, t.edge_list()))

    def test_server_level(self):
        # two switches, one link, one server each: a single pair 3 links apart
        t = build_deploy_as_whole(2, 2, 4, seed=0)
        st = all_pairs_shortest(t, level="server")
        assert (st.mean, st.count) == (3.0, 1.0)
        # same-switch pairs sit at distance 2
        t2 = build_deploy_as_whole(2, 4, 6, seed=0)
        st2 = all_pairs_shortest(t2, level="server")
        assert st2.histogram == {2: 2.0, 3: 4.0}

    def test_stats_consistency(self):
        st = PathStats.from_histogram({3: 10.0, 4: 30.0, 5: 10.0})
        assert st.mean == pytest.approx(
            sum(k * v for k, v in st.histogram.items()) / st.count, abs=1e-9)
        assert st.p10 == 3 and st.p90 == 5


class TestRoutingStats:
    def test_ordered_pair_count(self):
        t = build_deploy_as_whole(20, 0, 8, seed=1)
        st = routing_path_stats(t, RouterConfig(k_hops=1))
        assert st.count == 20 * 19
        assert st.failures == 0

    def test_greedy_never_beats_bfs(self):
        t = build_deploy_as_whole(40, 80, 10, seed=2)
        dist = distance_matrix(t)
        from s2net.analysis import _greedy_run
        hops, _, _ = _greedy_run(t, RouterConfig(k_hops=2))
        off = ~np.eye(40, dtype=bool)
        assert np.all(hops[off] >= dist[off])

    def test_d_spaces_validation(self):
        t = build_deploy_as_whole(10, 0, 6, seed=0)
        with pytest.raises(ValueError):
            routing_path_stats(t, RouterConfig(d_spaces=9))


class TestLinkLoad:
    def test_two_switches(self):
        t = build_deploy_as_whole(2, 0, 2, seed=0)
        rep = link_load(t)
        assert len(rep.rows) == 1 and rep.rows[0].path_count == 2

    def test_conservation(self):
        t = build_deploy_as_whole(50, 0, 10, seed=4)
        rep = link_load(t, RouterConfig(k_hops=1))
        assert sum(r.path_count for r in rep.rows) == rep.total_hops

    def test_endpoint_metrics(self):
        from s2net.geometry import circular_distance, mcd
        t = build_deploy_as_whole(12, 0, 6, seed=5)
        rep = link_load(t)
        for row in rep.rows:
            a, b = row.edge
            assert row.endpoint_mcd == mcd(t.coords[a], t.coords[b])
            assert row.endpoint_cd_sum == pytest.approx(sum(
                circular_distance(t.coords[a][k], t.coords[b][k])
                for k in range(t.L)))

    def test_heavy_links_have_small_endpoint_mcd(self):
        # load concentrates on links whose endpoints sit close on some ring
        ratios = []
        for seed in range(3):
            t = build_deploy_as_whole(250, 0, 8, coord_mode="pure_random",
                                      seed=40 + seed)
            rep = link_load(t, RouterConfig(k_hops=1))
            top, bottom = rep.heavy_light_deciles()
            top_mcd = np.mean([r.endpoint_mcd for r in top])
            bot_mcd = np.mean([r.endpoint_mcd for r in bottom])
            assert top_mcd < bot_mcd
            ratios.append(top_mcd / bot_mcd)
        assert np.mean(ratios) < 0.8


class TestControlArea:
    def test_uniform_coordinates_nan(self):
        n = 8
        coords = [[(i / n + 0.01) % 1.0, (i / n + 0.02) % 1.0]
                  for i in range(n)]
        t = build_deploy_as_whole(n, 0, 4, coordinate_override=coords, seed=0)
        rep = control_area_report(t)
        assert np.isnan(rep.pearson)

    def test_negative_on_random(self):
        t = build_deploy_as_whole(150, 0, 8, coord_mode="pure_random", seed=6)
        rep = control_area_report(t)
        assert rep.pearson < 0


class TestForwardingState:
    def test_fig1_ring_b(self, fig1_rings):
        rep = forwarding_state(fig1_rings, k_hops=2)
        assert rep.entries[B] == 8
        assert rep.scalar_entries[B] == 16

    def test_bound(self):
        for seed in range(3):
            t = build_deploy_as_whole(60, 0, 10, seed=seed)
            rep = forwarding_state(t, k_hops=2)
            assert rep.max <= rep.bound
            assert rep.bound == 10 + 100


class TestFailures:
    def test_f0_exact(self):
        t = build_deploy_as_whole(30, 0, 8, seed=7)
        rep = failure_experiment(t, 0.0, trials=2,
                                 rng=np.random.default_rng(0))
        assert rep.success_rate == 1.0
        st = routing_path_stats(t, RouterConfig(k_hops=2))
        assert rep.mean_success_path_length == pytest.approx(st.mean)

    def test_f1_zero(self):
        t = build_deploy_as_whole(10, 0, 6, seed=8)
        rep = failure_experiment(t, 1.0, trials=1,
                                 rng=np.random.default_rng(0))
        assert rep.success_rate == 0.0

    def test_partial_failure_rates_sum(self):
        t = build_deploy_as_whole(40, 0, 8, seed=9)
        rep = failure_experiment(t, 0.3, trials=3,
                                 rng=np.random.default_rng(1))
        assert rep.success_rate + rep.local_minimum_rate \
            + rep.budget_exceeded_rate == pytest.approx(1.0)
        assert 0.0 < rep.success_rate <= 1.0

    def test_switch_failure_wrapper(self):
        t = build_deploy_as_whole(20, 0, 6, seed=10)
        damaged = remove_switch_edges(t, [0, 5])
        assert damaged.degrees()[0] == 0 and damaged.degrees()[5] == 0
        for a, b in damaged.edges:
            assert a not in (0, 5) and b not in (0, 5)
