import math
from itertools import combinations_with_replacement

import numpy as np
import pytest

from itescan import (
    CapExceededError,
    beta_star,
    build_graph,
    cluster_count_check,
    count_connected_clusters,
    enumerate_connected_clusters,
    lattice_degree_bound,
    parse_hamiltonian,
)
from itescan.config import Caps

from conftest import random_hamiltonian, tfim_chain


def brute_force_connected(graph, size):
    """All multisets of vertices of the given size whose distinct-vertex set
    induces a connected subgraph. Independent of the growth enumeration."""

    def connected(vertices):
        vertices = set(vertices)
        stack = [next(iter(vertices))]
        seen = {stack[0]}
        while stack:
            u = stack.pop()
            for v in graph.adjacency[u] & vertices:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen == vertices

    out = set()
    for combo in combinations_with_replacement(range(graph.n_vertices), size):
        if connected(combo):
            out.add(combo)
    return out


def cluster_to_tuple(cluster):
    flat = []
    for term, count in cluster.multiplicities:
        flat.extend([term] * count)
    return tuple(flat)


class TestBuildGraph:
    def test_chain_edge(self):
        g = build_graph(parse_hamiltonian("1.0 Z0 Z1\n1.0 Z1 Z2"))
        assert g.edges() == [(0, 1)]
        assert g.max_degree == 1

    def test_disjoint_terms(self):
        g = build_graph(parse_hamiltonian("1.0 Z0 Z1\n1.0 Z2 Z3"))
        assert g.edges() == []
        assert g.max_degree == 0
        assert g.effective_degree == 1

    def test_three_terms_degree_two(self):
        g = build_graph(parse_hamiltonian("1.0 X0 X1\n1.0 Y0 Y1\n1.0 Z1 Z2"))
        assert g.max_degree == 2

    def test_edges_match_support_intersections(self, rng):
        for _ in range(20):
            h = random_hamiltonian(rng, 6, 6)
            g = build_graph(h)
            supports = [s.support for _, s in h.terms]
            for u in range(len(supports)):
                for v in range(u + 1, len(supports)):
                    expected = bool(supports[u] & supports[v])
                    assert (v in g.adjacency[u]) == expected
                    assert (u in g.adjacency[v]) == expected


class TestBetaStar:
    def test_degree_one(self):
        assert beta_star(1) == pytest.approx(1.0 / (4.0 * math.e ** 2))
        assert beta_star(1) == pytest.approx(0.033834, abs=1e-6)

    def test_degree_two(self):
        assert beta_star(2) == pytest.approx(1.0 / (12.0 * math.e ** 2))
        assert beta_star(2) == pytest.approx(0.011278, abs=1e-6)

    def test_degree_zero_uses_effective_degree(self):
        assert beta_star(0) == beta_star(1)


class TestLatticeDegreeBound:
    def test_k1_d1(self):
        assert lattice_degree_bound(1, 1) == pytest.approx(8.0)

    def test_k2_d1(self):
        assert lattice_degree_bound(2, 1) == pytest.approx(256.0)

    def test_chain_degree_below_bound(self):
        g = build_graph(tfim_chain(10))
        assert g.max_degree <= lattice_degree_bound(2, 1)

    def test_overflow_to_inf(self):
        assert lattice_degree_bound(300, 2) == math.inf

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            lattice_degree_bound(0, 1)


class TestEnumeration:
    def test_overlapping_pair_size_two(self):
        g = build_graph(parse_hamiltonian("1.0 X0 X1\n1.0 Y0 Y1"))
        clusters = enumerate_connected_clusters(g, 2)
        assert sorted(cluster_to_tuple(c) for c in clusters) == [
            (0, 0), (0, 1), (1, 1),
        ]

    def test_disjoint_pair_size_two(self):
        g = build_graph(parse_hamiltonian("1.0 Z0 Z1\n1.0 Z2 Z3"))
        clusters = enumerate_connected_clusters(g, 2)
        assert sorted(cluster_to_tuple(c) for c in clusters) == [(0, 0), (1, 1)]

    def test_singletons(self, rng):
        h = random_hamiltonian(rng, 5, 5)
        g = build_graph(h)
        clusters = enumerate_connected_clusters(g, 1)
        assert len(clusters) == h.n_terms

    def test_completeness_against_brute_force(self, rng):
        for _ in range(30):
            h = random_hamiltonian(rng, 6, int(rng.integers(2, 7)))
            g = build_graph(h)
            for m in range(1, 5):
                enumerated = {cluster_to_tuple(c) for c in enumerate_connected_clusters(g, m)}
                assert enumerated == brute_force_connected(g, m)

    def test_count_matches_enumeration(self, rng):
        for _ in range(15):
            h = random_hamiltonian(rng, 6, 5)
            g = build_graph(h)
            for m in range(1, 5):
                assert count_connected_clusters(g, m) == len(
                    enumerate_connected_clusters(g, m)
                )

    def test_connectivity_flag(self):
        g = build_graph(parse_hamiltonian("1.0 Z0 Z1\n1.0 Z1 Z2\n1.0 Z3 Z4"))
        for cluster in enumerate_connected_clusters(g, 3):
            assert cluster.is_connected(g)

    def test_growth_monotonicity(self, rng):
        # every connected size-m cluster contains a connected size-(m-1) sub-multiset
        for _ in range(10):
            h = random_hamiltonian(rng, 6, 5)
            g = build_graph(h)
            for m in range(2, 5):
                smaller = {cluster_to_tuple(c) for c in enumerate_connected_clusters(g, m - 1)}
                for cluster in enumerate_connected_clusters(g, m):
                    flat = cluster_to_tuple(cluster)
                    found = any(
                        tuple(sorted(flat[:i] + flat[i + 1:])) in smaller
                        for i in range(len(flat))
                    )
                    assert found

    def test_cluster_cap(self):
        g = build_graph(tfim_chain(8))
        with pytest.raises(CapExceededError):
            enumerate_connected_clusters(g, 6, Caps(cluster_count=10))

    def test_invalid_size(self):
        g = build_graph(parse_hamiltonian("1.0 Z0"))
        with pytest.raises(ValueError):
            enumerate_connected_clusters(g, 0)


class TestCountCheck:
    def test_overlapping_pair(self):
        g = build_graph(parse_hamiltonian("1.0 X0 X1\n1.0 Y0 Y1"))
        count, bound, ok = cluster_count_check(g, 2)
        assert count == 3
        assert bound == pytest.approx(2.0 * math.e ** 2)
        assert ok

    def test_disjoint_pair(self):
        g = build_graph(parse_hamiltonian("1.0 Z0 Z1\n1.0 Z2 Z3"))
        count, bound, ok = cluster_count_check(g, 2)
        assert count == 2
        assert ok

    def test_size_one(self, rng):
        h = random_hamiltonian(rng, 5, 4)
        g = build_graph(h)
        count, bound, ok = cluster_count_check(g, 1)
        assert count == h.n_terms
        assert ok

    def test_bound_on_random_instances(self, rng):
        # the combinatorial bound |S| (e d_eff)^m over many random graphs
        checked = 0
        for _ in range(100):
            h = random_hamiltonian(rng, 6, int(rng.integers(2, 9)), locality=3)
            g = build_graph(h)
            for m in range(1, 6):
                _, _, ok = cluster_count_check(g, m)
                assert ok
                checked += 1
        assert checked == 500
