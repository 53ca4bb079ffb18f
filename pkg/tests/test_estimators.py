"""
Tests for shadowcount.estimators.
"""
import math
import statistics

import numpy as np
import pytest

from shadowcount.estimators import (
    LOW_CONFIDENCE_THRESHOLD,
    Mode,
    PatternKind,
    PatternSpec,
    _listing_hits,
    count_near_cliques,
    enumerate_near_cliques,
    estimate,
    func_k1,
    func_k2_type1,
    func_k2_type2,
    func_kclique,
    inverse_ts,
    list_near_cliques,
    peanuts,
    phi_table,
    required_samples,
)
from shadowcount.exact_oracle import count_cliques, enumerate_cliques, exact_counts, naive_subset_counts
from shadowcount.exceptions import ConfigError
from shadowcount.graph_core import Graph, degeneracy_order
from shadowcount.monitoring import MetricsCollector
from shadowcount.utils import make_stream

from .conftest import complete, gnp, graph_from_edges

KIND_FIELDS = {
    PatternKind.KCLIQUE: "kclique",
    PatternKind.K1: "k1",
    PatternKind.K2_TYPE1: "k2_type1",
    PatternKind.K2_TYPE2: "k2_type2",
}


@pytest.fixture
def paw() -> Graph:
    """Triangle 0-1-2 with a pendant vertex 3 on vertex 2."""
    return graph_from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])


def missing_edges(g: Graph, vertices) -> int:
    vertices = list(vertices)
    present = sum(
        1 for i, u in enumerate(vertices) for v in vertices[i + 1:] if v in g.neighbors(u).tolist()
    )
    return math.comb(len(vertices), 2) - present


class TestPatternSpec:
    """Test pattern parameters and bounds."""

    def test_anchor_sizes(self):
        """Test h = k, k-1, k-1, k-2."""
        assert PatternSpec(PatternKind.KCLIQUE, 5).h == 5
        assert PatternSpec(PatternKind.K1, 5).h == 4
        assert PatternSpec(PatternKind.K2_TYPE1, 5).h == 4
        assert PatternSpec(PatternKind.K2_TYPE2, 5).h == 3

    def test_kind_from_string(self):
        """Test kinds can be given by their CLI names."""
        assert PatternSpec("k2t2", 4).kind is PatternKind.K2_TYPE2

    @pytest.mark.parametrize("kind, k", [
        (PatternKind.KCLIQUE, 2),
        (PatternKind.K1, 2),
        (PatternKind.K2_TYPE1, 3),
        (PatternKind.K2_TYPE2, 3),
    ])
    def test_rejects_small_k(self, kind, k):
        """Test k below the pattern minimum is rejected."""
        with pytest.raises(ConfigError):
            PatternSpec(kind, k)

    def test_bounds_for_graph(self, k5):
        """Test B for each kind on K5 (n=5, d_max=4, α=4)."""
        d = degeneracy_order(k5)
        assert PatternSpec.for_graph(PatternKind.KCLIQUE, 4, k5, d).bound == 1
        assert PatternSpec.for_graph(PatternKind.K1, 4, k5, d).bound == 5
        assert PatternSpec.for_graph(PatternKind.K2_TYPE1, 4, k5, d).bound == 5
        assert PatternSpec.for_graph(PatternKind.K2_TYPE2, 4, k5, d).bound == 25


class TestCountingFunctions:
    """Test per-clique near-clique counts."""

    def test_kclique(self, k5):
        """Test the k-clique function is constant."""
        assert func_kclique(k5, [0, 1, 2]) == 1

    def test_k1_counts_once(self, diamond):
        """Test the diamond's (4,1)-clique is anchored by exactly one triangle."""
        assert func_k1(diamond, [0, 1, 2]) == 1
        assert func_k1(diamond, [1, 2, 3]) == 0

    def test_k1_rejects_non_clique(self, diamond):
        """Test a non-clique K is rejected."""
        with pytest.raises(ValueError):
            func_k1(diamond, [0, 1, 3])

    def test_k2_type1(self, paw):
        """Test the pendant vertex completes one Type 1 pattern."""
        assert func_k2_type1(paw, [0, 1, 2]) == 1

    def test_k2_type1_rejects_small_clique(self, paw):
        """Test K must have at least three vertices."""
        with pytest.raises(ValueError):
            func_k2_type1(paw, [0, 1])

    def test_k2_type2_lowest_order_anchor(self, c4):
        """Test only the lowest-order edge of C4 anchors the 4-cycle."""
        d = degeneracy_order(c4)
        counts = {edge: func_k2_type2(c4, d, list(edge)) for edge in [(0, 1), (1, 2), (2, 3), (0, 3)]}
        assert counts == {(0, 1): 1, (1, 2): 0, (2, 3): 0, (0, 3): 0}

    def test_k2_type2_rejects_non_clique(self, c4):
        """Test a non-edge is rejected."""
        with pytest.raises(ValueError):
            func_k2_type2(c4, degeneracy_order(c4), [0, 2])

    def test_enumerate_near_cliques(self, c4, diamond):
        """Test the listed instances are the ones counted."""
        d = degeneracy_order(c4)
        assert enumerate_near_cliques(c4, d, PatternKind.K2_TYPE2, np.array([0, 1])) == [(0, 1, 2, 3)]
        dd = degeneracy_order(diamond)
        assert enumerate_near_cliques(diamond, dd, PatternKind.K1, np.array([0, 1, 2])) == [(0, 1, 2, 3)]
        assert enumerate_near_cliques(diamond, dd, PatternKind.KCLIQUE, np.array([2, 0, 1])) == [(0, 1, 2)]

    @pytest.mark.parametrize("kind, missing", [
        (PatternKind.K1, 1),
        (PatternKind.K2_TYPE1, 2),
        (PatternKind.K2_TYPE2, 2),
    ])
    def test_enumerated_instances_match_counts(self, kind, missing):
        """Test enumerated instances have the right shape and add up to the exact total."""
        g = gnp(16, 0.6, 4)
        d = degeneracy_order(g)
        pattern = PatternSpec(kind, 5)
        anchors = []
        enumerate_cliques(g, pattern.h, anchors.append, degeneracy=d)

        seen = set()
        total = 0
        for K in anchors:
            instances = enumerate_near_cliques(g, d, kind, K)
            total += len(instances)
            assert len(instances) == count_near_cliques(g, d, kind, K)
            for instance in instances:
                assert len(instance) == 5
                assert set(K.tolist()) <= set(instance)
                assert missing_edges(g, instance) == missing
                seen.add(instance)
        assert total == len(seen)
        assert len(seen) == getattr(naive_subset_counts(g, 5), KIND_FIELDS[kind])

    @pytest.mark.parametrize("p", [0.3, 0.5, 0.7])
    @pytest.mark.parametrize("kind", [PatternKind.K1, PatternKind.K2_TYPE1, PatternKind.K2_TYPE2])
    def test_counts_within_bound(self, kind, p):
        """Test f(K) never exceeds B on any anchoring clique."""
        g = gnp(18, p, 7)
        d = degeneracy_order(g)
        for k in (4, 5, 6):
            pattern = PatternSpec.for_graph(kind, k, g, d)
            values = []
            enumerate_cliques(
                g, pattern.h, lambda K: values.append(count_near_cliques(g, d, kind, K)), degeneracy=d
            )
            assert max(values, default=0) <= pattern.bound


class TestNormalizers:
    """Test Φ and the sample-size bound."""

    def test_phi_table(self, k5):
        """Test Φ_v = C(out-degree, h-1) on K5."""
        phi = phi_table(k5, degeneracy_order(k5), 3)
        assert phi.per_vertex.tolist() == [6.0, 3.0, 1.0, 0.0, 0.0]
        assert phi.total == 10.0
        assert phi.cumulative.tolist() == [6.0, 9.0, 10.0, 10.0, 10.0]

    def test_required_samples(self):
        """Test the worked example."""
        assert required_samples(1000, 1, 0.1, 0.05, 100) == 11067

    @pytest.mark.parametrize("args", [
        (0, 1, 0.1, 0.05, 100),
        (1000, 1, 0.0, 0.05, 100),
        (1000, 1, 1.5, 0.05, 100),
        (1000, 1, 0.1, 0.05, -1),
    ])
    def test_required_samples_rejects_bad_arguments(self, args):
        """Test non-positive inputs and ε >= 1 are rejected."""
        with pytest.raises(ValueError):
            required_samples(*args)


class TestDeterministicCases:
    """Test inputs whose estimate is exact regardless of the draws."""

    @pytest.mark.parametrize("seed", [0, 1, 12345])
    @pytest.mark.parametrize("estimator", [peanuts, inverse_ts])
    def test_triangle(self, triangle, estimator, seed):
        """Test one triangle is always estimated as exactly 1."""
        result = estimator(triangle, PatternSpec(PatternKind.KCLIQUE, 3), 500, seed)
        assert result.value == 1.0
        assert result.nonzero_samples == 500
        assert result.seed == seed

    @pytest.mark.parametrize("estimator", [peanuts, inverse_ts])
    def test_complete_graph(self, estimator):
        """Test K6 has exactly 15 4-cliques and no (5,1)-cliques."""
        k6 = complete(6)
        assert estimator(k6, PatternSpec(PatternKind.KCLIQUE, 4), 1000, 3).value == 15.0
        assert estimator(k6, PatternSpec(PatternKind.K1, 5), 1000, 3).value == 0.0

    @pytest.mark.parametrize("estimator", [peanuts, inverse_ts])
    def test_empty_graph(self, estimator):
        """Test a clique-free graph gives 0 without failing."""
        result = estimator(Graph.empty(5), PatternSpec(PatternKind.KCLIQUE, 3), 100, 1)
        assert result.value == 0.0
        assert result.nonzero_samples == 0
        assert result.low_confidence

    def test_rejects_zero_samples(self, triangle):
        """Test the sample budget must be positive."""
        with pytest.raises(ConfigError):
            inverse_ts(triangle, PatternSpec(PatternKind.KCLIQUE, 3), 0, 1)


class TestEstimates:
    """Test estimator behaviour on small random graphs."""

    def test_low_confidence_flag(self, diamond, caplog):
        """Test few nonzero samples set the flag and log an advisory."""
        result = inverse_ts(diamond, PatternSpec(PatternKind.K1, 4), 2000, 5)
        assert result.low_confidence is (result.nonzero_samples < LOW_CONFIDENCE_THRESHOLD)
        assert result.low_confidence
        assert "peanuts" in caplog.text

    @pytest.mark.parametrize("estimator", [peanuts, inverse_ts])
    def test_diamond_k1(self, diamond, estimator):
        """Test the diamond's single (4,1)-clique is recovered."""
        result = estimator(diamond, PatternSpec(PatternKind.K1, 4), 20_000, 8)
        assert result.value == pytest.approx(1.0, rel=0.05)

    def test_same_seed_same_estimate(self):
        """Test runs are reproducible for a fixed seed and batch count."""
        g = gnp(30, 0.4, 2)
        pattern = PatternSpec(PatternKind.K1, 4)
        first = inverse_ts(g, pattern, 3000, 99, batches=3)
        second = inverse_ts(g, pattern, 3000, 99, batches=3)
        assert first.value == second.value
        assert first.nonzero_samples == second.nonzero_samples

    def test_generated_seed_is_reported(self, triangle):
        """Test a missing seed is replaced and echoed."""
        result = peanuts(triangle, PatternSpec(PatternKind.KCLIQUE, 3), 10)
        assert isinstance(result.seed, int) and result.seed >= 0

    def test_dispatch(self, triangle):
        """Test estimate() routes on mode."""
        pattern = PatternSpec(PatternKind.KCLIQUE, 3)
        assert estimate(triangle, pattern, 10, 1, mode=Mode.PEANUTS).mode is Mode.PEANUTS
        assert estimate(triangle, pattern, 10, 1).mode is Mode.INVERSE_TS

    def test_storage_diagnostics(self):
        """Test discarding keeps fewer leaves alive than caching every shadow."""
        g = gnp(40, 0.4, 6)
        pattern = PatternSpec(PatternKind.KCLIQUE, 4)
        discarding = inverse_ts(g, pattern, 2000, 4)
        caching = inverse_ts(g, pattern, 2000, 4, cache_shadows=True)
        assert discarding.peak_live_leaves < discarding.shadow_leaves_built
        assert caching.peak_live_leaves == caching.shadow_leaves_built
        assert 0 < discarding.success_ratio <= 1

    @pytest.mark.parametrize("kind", list(PatternKind))
    @pytest.mark.parametrize("mode", list(Mode))
    def test_close_to_exact(self, kind, mode):
        """Test a moderate run lands near the exact count."""
        g = gnp(20, 0.5, 1)
        truth = getattr(exact_counts(g, 4), KIND_FIELDS[kind])
        result = estimate(g, PatternSpec(kind, 4), 40_000, 17, mode=mode)
        assert result.value == pytest.approx(truth, rel=0.2)

    def test_cached_shadows_close_to_exact(self):
        """Test the caching schedule estimates the same quantity."""
        g = gnp(20, 0.5, 1)
        truth = exact_counts(g, 4).k1
        result = inverse_ts(g, PatternSpec(PatternKind.K1, 4), 5000, 2, cache_shadows=True)
        assert result.value == pytest.approx(truth, rel=0.25)


class TestListing:
    """Test near-clique listing."""

    @pytest.mark.parametrize("mode", list(Mode))
    def test_diamond(self, diamond, mode):
        """Test the only (4,1)-clique is listed once."""
        assert list_near_cliques(diamond, PatternSpec(PatternKind.K1, 4), 200, 1, mode=mode) == [(0, 1, 2, 3)]

    def test_instances_are_valid_and_unique(self):
        """Test listed instances are distinct Type 1 patterns."""
        g = gnp(25, 0.5, 3)
        listed = list_near_cliques(g, PatternSpec(PatternKind.K2_TYPE1, 5), 3000, 6)
        assert listed
        assert len(listed) == len(set(listed))
        for instance in listed:
            assert len(instance) == 5
            assert missing_edges(g, instance) == 2

    def test_limit(self):
        """Test the instance cap is honoured."""
        g = gnp(25, 0.5, 3)
        assert len(list_near_cliques(g, PatternSpec(PatternKind.K1, 4), 3000, 6, limit=7)) == 7

    @pytest.mark.slow
    @pytest.mark.parametrize("mode", list(Mode))
    def test_anchor_cliques_drawn_uniformly(self, mode):
        """Test every anchoring 4-clique is kept about equally often in both modes."""
        g = gnp(25, 0.5, 3)
        d = degeneracy_order(g)
        pattern = PatternSpec(PatternKind.K2_TYPE1, 5)
        draws = _listing_hits(g, d, pattern, make_stream(3, 0), 400_000, mode, MetricsCollector())
        rows = np.concatenate(list(draws))
        _, counts = np.unique(rows, axis=0, return_counts=True)
        assert counts.size == count_cliques(g, pattern.h, degeneracy=d)
        assert counts.max() < 1.5 * counts.min()

    def test_rejects_kclique(self, k5):
        """Test listing is only for near-cliques."""
        with pytest.raises(ConfigError):
            list_near_cliques(k5, PatternSpec(PatternKind.KCLIQUE, 3), 10, 1)


@pytest.mark.slow
class TestStatisticalAcceptance:
    """Long-running accuracy checks against the exact oracle."""

    @pytest.mark.parametrize("mode", list(Mode))
    @pytest.mark.parametrize("kind", list(PatternKind))
    def test_unbiased(self, kind, mode):
        """Test the mean of 400 runs lies within 4 standard errors of the truth."""
        g = gnp(25, 0.4, 2024)
        truth = getattr(exact_counts(g, 5), KIND_FIELDS[kind])
        d = degeneracy_order(g)
        pattern = PatternSpec.for_graph(kind, 5, g, d)
        values = [
            estimate(g, pattern, 10_000, seed, mode=mode, degeneracy=d).value for seed in range(400)
        ]
        mean = statistics.fmean(values)
        standard_error = statistics.stdev(values) / math.sqrt(len(values))
        assert abs(mean - truth) <= 4 * standard_error + 1e-9

    @pytest.mark.parametrize("kind", list(PatternKind))
    def test_single_run_accuracy(self, kind):
        """Test at least 95 of 100 runs land within 5% of the truth."""
        g = gnp(60, 0.35, 2024)
        truth = getattr(exact_counts(g, 5), KIND_FIELDS[kind])
        d = degeneracy_order(g)
        pattern = PatternSpec.for_graph(kind, 5, g, d)
        within = sum(
            abs(inverse_ts(g, pattern, 500_000, seed, degeneracy=d).value - truth) <= 0.05 * truth
            for seed in range(100)
        )
        assert within >= 95
