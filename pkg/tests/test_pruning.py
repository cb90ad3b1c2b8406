import pytest

from xorcast.pruning import (PruningError, PruningProtocol,
                             brute_force_min_forward_set, coverage_sets,
                             greedy_cover_bound, greedy_forward_set,
                             select_forwarders)
from xorcast.topology import (all_neighbor_views, from_edges,
                              generate_random_topology, neighbor_view)

PRUNED = (PruningProtocol.DP, PruningProtocol.TDP, PruningProtocol.PDP)


def complete_graph(n):
    return from_edges(n, [(a, b) for a in range(n) for b in range(a + 1, n)])


def path_graph(n):
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(n):
    return from_edges(n, [(0, i) for i in range(1, n)])


def hoods(t):
    return {v: neighbor_view(t, v).one_hop for v in range(t.node_count)}


class TestCoverageSets:
    @pytest.mark.parametrize("protocol", PRUNED)
    def test_complete_graph_has_empty_obligation(self, protocol):
        t = complete_graph(5)
        _, u_set = coverage_sets(protocol, t, 0, 1)
        assert u_set == frozenset()

    def test_path_dp(self):
        b, u_set = coverage_sets(PruningProtocol.DP, path_graph(5), 1, 2)
        assert b == frozenset({3})
        assert u_set == frozenset({4})

    def test_path_tdp_equals_dp_here(self):
        b, u_set = coverage_sets(PruningProtocol.TDP, path_graph(5), 1, 2)
        assert b == frozenset({3})
        assert u_set == frozenset({4})

    def test_source_case(self):
        t = path_graph(5)
        b, u_set = coverage_sets(PruningProtocol.DP, t, None, 2)
        assert b == frozenset({1, 3})
        assert u_set == frozenset({0, 4})

    def test_sender_must_be_adjacent(self):
        with pytest.raises(PruningError):
            coverage_sets(PruningProtocol.DP, path_graph(5), 0, 3)

    def test_flood_has_no_coverage_sets(self):
        with pytest.raises(PruningError):
            coverage_sets(PruningProtocol.FLOOD, path_graph(3), 0, 1)

    @pytest.mark.parametrize("seed", range(10))
    def test_tdp_and_pdp_obligations_subset_dp(self, seed):
        t = generate_random_topology(15, 300.0, 110.0, seed=seed)
        for v in range(t.node_count):
            for u in sorted(t.adj[v]):
                _, dp = coverage_sets(PruningProtocol.DP, t, u, v)
                _, tdp = coverage_sets(PruningProtocol.TDP, t, u, v)
                _, pdp = coverage_sets(PruningProtocol.PDP, t, u, v)
                assert tdp <= dp
                assert pdp <= dp


class TestGreedy:
    def test_empty_obligation(self):
        d = greedy_forward_set(frozenset({1, 2}), frozenset(), hoods(path_graph(3)))
        assert d.forward_list == ()

    def test_path_single_candidate(self):
        d = greedy_forward_set(frozenset({3}), frozenset({4}),
                               hoods(path_graph(5)))
        assert d.forward_list == (3,)
        assert d.uncovered == frozenset()

    def test_marginal_gain_order(self):
        one_hop = {10: frozenset({1, 2, 3}), 11: frozenset({4})}
        d = greedy_forward_set(frozenset({10, 11}), frozenset({1, 2, 3, 4}),
                               one_hop)
        assert d.forward_list == (10, 11)

    def test_tie_breaks_to_smallest_id(self):
        one_hop = {5: frozenset({1, 2}), 3: frozenset({1, 2})}
        d = greedy_forward_set(frozenset({3, 5}), frozenset({1, 2}), one_hop)
        assert d.forward_list == (3,)

    def test_unreachable_residue_is_reported(self):
        one_hop = {1: frozenset({1, 2})}
        d = greedy_forward_set(frozenset({1}), frozenset({2, 9}), one_hop)
        assert d.forward_list == (1,)
        assert d.uncovered == frozenset({9})


class TestBruteForce:
    def test_empty_obligation(self):
        d = brute_force_min_forward_set(frozenset({1}), frozenset(),
                                        hoods(path_graph(3)))
        assert d.forward_list == ()

    def test_path_example(self):
        d = brute_force_min_forward_set(frozenset({3}), frozenset({4}),
                                        hoods(path_graph(5)))
        assert d.forward_list == (3,)

    def test_lexicographic_tie_break(self):
        one_hop = {5: frozenset({1, 2}), 3: frozenset({1, 2})}
        d = brute_force_min_forward_set(frozenset({3, 5}), frozenset({1, 2}),
                                        one_hop)
        assert d.forward_list == (3,)

    def test_rejects_oversized_candidate_sets(self):
        big = frozenset(range(21))
        with pytest.raises(PruningError):
            brute_force_min_forward_set(big, frozenset(), {})

    @pytest.mark.parametrize("seed", range(10))
    def test_never_larger_than_greedy(self, seed):
        t = generate_random_topology(10, 120.0, 55.0, seed=seed)
        nh = hoods(t)
        for v in range(t.node_count):
            for u in sorted(t.adj[v]):
                b, u_set = coverage_sets(PruningProtocol.DP, t, u, v)
                greedy = greedy_forward_set(b, u_set, nh)
                brute = brute_force_min_forward_set(b, u_set, nh)
                assert len(brute.forward_list) <= len(greedy.forward_list)


class TestSelectForwarders:
    @pytest.mark.parametrize("protocol", PRUNED)
    def test_complete_graph_source_needs_nobody(self, protocol):
        d = select_forwarders(protocol, complete_graph(5), None, 0)
        assert d.forward_list == ()

    @pytest.mark.parametrize("protocol", PRUNED)
    def test_star_center_needs_nobody(self, protocol):
        d = select_forwarders(protocol, star_graph(6), None, 0)
        assert d.forward_list == ()

    def test_flood_forwards_all_neighbors(self):
        d = select_forwarders(PruningProtocol.FLOOD, star_graph(6), None, 0)
        assert d.forward_list == (1, 2, 3, 4, 5)
        assert d.coverage_set == frozenset()

    @pytest.mark.parametrize("protocol", PRUNED)
    def test_cover_completeness(self, protocol):
        for seed in range(10):
            t = generate_random_topology(15, 300.0, 110.0, seed=seed)
            views = all_neighbor_views(t)
            for v in range(t.node_count):
                for u in [None, *sorted(t.adj[v])]:
                    d = select_forwarders(protocol, t, u, v)
                    covered = set()
                    for f in d.forward_list:
                        covered |= views[f].one_hop
                    assert d.coverage_set - d.uncovered <= covered

    def test_deterministic(self):
        t = generate_random_topology(20, 400.0, 130.0, seed=4)
        for v in range(t.node_count):
            for u in sorted(t.adj[v]):
                a = select_forwarders(PruningProtocol.PDP, t, u, v)
                b = select_forwarders(PruningProtocol.PDP, t, u, v)
                assert a.forward_list == b.forward_list


def test_greedy_cover_bound_floor():
    assert greedy_cover_bound(0) == 1.0
    assert greedy_cover_bound(1) == 1.0
    assert greedy_cover_bound(10) > 3.0
