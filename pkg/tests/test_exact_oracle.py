"""
Tests for shadowcount.exact_oracle.
"""
import networkx as nx
import pytest

from shadowcount.exact_oracle import (
    count_cliques,
    enumerate_cliques,
    exact_counts,
    naive_subset_counts,
)
from shadowcount.exceptions import ConfigError, OracleGuardError
from shadowcount.graph_core import Graph, is_clique

from .conftest import complete, gnp, graph_from_edges


def counts_tuple(counts):
    return counts.kclique, counts.k1, counts.k2_type1, counts.k2_type2


class TestEnumerateCliques:
    """Test degeneracy-ordered clique enumeration."""

    def test_complete_graph(self, k5):
        """Test K5 has C(5,3) triangles."""
        assert count_cliques(k5, 3) == 10

    def test_triangle_free(self):
        """Test C6 has no triangles."""
        c6 = graph_from_edges(6, nx.cycle_graph(6).edges())
        assert count_cliques(c6, 3) == 0

    def test_small_sizes(self, gnp_factory):
        """Test 1-cliques are vertices and 2-cliques are edges."""
        g = gnp_factory(20, 0.3, 1)
        assert count_cliques(g, 1) == g.n
        assert count_cliques(g, 2) == g.m

    def test_visits_each_clique_once(self, gnp_factory):
        """Test the visitor sees distinct sorted cliques."""
        g = gnp_factory(25, 0.5, 2)
        seen = []
        total = enumerate_cliques(g, 4, lambda K: seen.append(tuple(K.tolist())))
        assert total == len(seen) == len(set(seen))
        assert all(list(K) == sorted(K) and is_clique(g, list(K)) for K in seen)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_networkx(self, gnp_factory, seed):
        """Test counts agree with networkx's clique enumeration."""
        g = gnp_factory(20, 0.5, seed)
        reference = nx.Graph(g.edges().tolist())
        by_size = {}
        for clique in nx.enumerate_all_cliques(reference):
            by_size[len(clique)] = by_size.get(len(clique), 0) + 1
        for h in (3, 4, 5):
            assert count_cliques(g, h) == by_size.get(h, 0)

    def test_rejects_non_positive_h(self, k5):
        """Test h < 1 is rejected."""
        with pytest.raises(ConfigError):
            count_cliques(k5, 0)


class TestExactCounts:
    """Test brute-force pattern counts."""

    def test_diamond(self, diamond):
        """Test K4 minus an edge is one (4,1)-clique."""
        assert counts_tuple(exact_counts(diamond, 4)) == (0, 1, 0, 0)

    def test_c4(self, c4):
        """Test the 4-cycle is one Type 2 (4,2)-clique."""
        assert counts_tuple(exact_counts(c4, 4)) == (0, 0, 0, 1)

    def test_k5(self, k5):
        """Test K5 has five 4-cliques and no near-cliques."""
        assert counts_tuple(exact_counts(k5, 4)) == (5, 0, 0, 0)

    def test_k3_has_no_two_missing_kinds(self, diamond):
        """Test the (k,2) kinds are null for k = 3."""
        counts = exact_counts(diamond, 3)
        assert counts.kclique == 2
        assert counts.k1 == 2
        assert counts.k2_type1 is None and counts.k2_type2 is None

    def test_rejects_small_k(self, k5):
        """Test k < 3 is rejected."""
        with pytest.raises(ConfigError):
            exact_counts(k5, 2)


class TestNaiveSubsetCounts:
    """Test the independent all-subsets oracle."""

    def test_empty_graph(self):
        """Test an edgeless graph has no patterns."""
        assert counts_tuple(naive_subset_counts(Graph.empty(8), 4)) == (0, 0, 0, 0)

    def test_complete_graph(self):
        """Test K_k is a single k-clique."""
        assert counts_tuple(naive_subset_counts(complete(5), 5)) == (1, 0, 0, 0)

    def test_fewer_vertices_than_k(self, triangle):
        """Test a graph smaller than k has no subsets."""
        assert counts_tuple(naive_subset_counts(triangle, 4)) == (0, 0, 0, 0)

    def test_guard(self):
        """Test the subset-count guard trips on large inputs."""
        with pytest.raises(OracleGuardError):
            naive_subset_counts(Graph.empty(200), 6)

    @pytest.mark.parametrize("seed", range(50))
    def test_agrees_with_exact_counts(self, seed):
        """Test both oracles agree on small random graphs for k = 4, 5, 6."""
        n = 10 + seed % 9
        p = (0.3, 0.5, 0.7)[seed % 3]
        g = gnp(n, p, seed)
        for k in (4, 5, 6):
            assert exact_counts(g, k).matches(naive_subset_counts(g, k))
