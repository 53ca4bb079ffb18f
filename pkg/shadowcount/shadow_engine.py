"""
Prefixed Turán shadows: construction and uniform clique-candidate sampling.

A shadow is a list of leaves (P, S, l). P is a partial clique fully joined to
the body S, and the l-cliques of the bodies are in one-to-one correspondence
with the h-cliques of the host graph. Leaves are admitted once their body is
Turán-dense for l, so a uniform l-subset of a body is a clique with good
probability.
"""
import math
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from .exceptions import ConfigError, EmptyShadowError
from .graph_core import (
    DegeneracyInfo,
    Graph,
    VertexSet,
    adjacent_pairs,
    degeneracy_order,
    edge_density,
    induced_subgraph,
    out_neighbors,
)
from .monitoring import MetricsCollector, metrics_collector, trace_operation

logger = logging.getLogger(__name__)

# Upper bound on the rows x population cells of one batched partial shuffle
SHUFFLE_CELL_BUDGET = 1 << 22


def binom(a: int, b: int) -> float:
    """C(a, b) as a float; exact below 2**53, 0 when b > a."""
    if a < 0 or b < 0:
        raise ValueError(f"binom requires non-negative arguments, got ({a}, {b})")
    if b > a:
        return 0.0
    return float(math.comb(a, b))


def turan_threshold(level: int) -> float:
    """Edge density above which a body is dense enough for level-cliques."""
    if level < 3:
        raise ConfigError(f"Turán threshold is defined for level >= 3, got {level}")
    return 1.0 - 1.0 / (level - 1)


@dataclass(frozen=True, eq=False)
class ShadowLeaf:
    prefix: VertexSet
    body: VertexSet
    level: int
    weight: float

    def __repr__(self) -> str:
        return (
            f"prefix={self.prefix.tolist()} |S|={self.body.size} "
            f"ℓ={self.level} weight={self.weight:g}"
        )


@dataclass(eq=False)
class PrefixedShadow:
    leaves: List[ShadowLeaf]
    target: int
    total_weight: float = field(init=False)

    def __post_init__(self) -> None:
        self.total_weight = float(math.fsum(leaf.weight for leaf in self.leaves))

    @cached_property
    def cumulative(self) -> npt.NDArray[np.float64]:
        return np.cumsum(np.fromiter((leaf.weight for leaf in self.leaves), dtype=np.float64,
                                     count=len(self.leaves)))

    @property
    def size(self) -> int:
        """Total body size, Σ|S| over the leaves."""
        return sum(leaf.body.size for leaf in self.leaves)

    @property
    def max_depth(self) -> int:
        return max((leaf.prefix.size for leaf in self.leaves), default=0)


@dataclass(eq=False)
class CandidateBatch:
    """
    Sampled h-vertex candidates.

    Each row of ``vertices`` is the leaf prefix followed by the drawn body subset;
    only the last ``vertices.shape[1] - prefix_len`` columns need a clique check.
    """

    vertices: npt.NDArray[np.int64]
    prefix_len: npt.NDArray[np.int64]

    def sorted_rows(self) -> npt.NDArray[np.int64]:
        return np.sort(self.vertices, axis=1)


# --------------- Construction


def _admits_leaf(level: int, body_graph: Graph) -> bool:
    if level <= 2 or body_graph.n <= 1:
        return True
    return edge_density(body_graph) > turan_threshold(level)


def _find_shadow(
    prefix: Tuple[int, ...],
    body: VertexSet,
    body_graph: Graph,
    level: int,
) -> List[ShadowLeaf]:
    """Pop-test-emit-or-expand worklist, depth first."""
    root_depth = len(prefix)
    root_level = level
    leaves: List[ShadowLeaf] = []
    worklist = [(prefix, body, body_graph, level)]

    while worklist:
        prefix, body, body_graph, level = worklist.pop()
        if level > body.size:
            continue
        if _admits_leaf(level, body_graph):
            leaves.append(ShadowLeaf(
                prefix=np.sort(np.asarray(prefix, dtype=np.int64)),
                body=body,
                level=level,
                weight=binom(body.size, level),
            ))
            continue

        assert len(prefix) - root_depth + level == root_level, "prefix and level out of step"
        info = degeneracy_order(body_graph)
        for s in range(body_graph.n):
            local_out = out_neighbors(body_graph, info, s)
            if local_out.size < level - 1:
                continue
            child_graph, _ = induced_subgraph(body_graph, local_out)
            worklist.append((prefix + (int(body[s]),), body[local_out], child_graph, level - 1))

    return leaves


def build_prefixed_shadow(g: Graph, h: int, collector: MetricsCollector = metrics_collector) -> PrefixedShadow:
    """The h-clique prefixed Turán shadow of g, rooted at (∅, V, h)."""
    if h < 1:
        raise ConfigError(f"Clique size must be >= 1, got {h}")
    with trace_operation("build_prefixed_shadow", {"n": g.n, "m": g.m, "h": h}):
        body = np.arange(g.n, dtype=np.int64)
        shadow = PrefixedShadow(leaves=_find_shadow((), body, g, h), target=h)

    collector.shadow_built(len(shadow.leaves))
    logger.info(
        f"Built {h}-clique shadow: {len(shadow.leaves)} leaves, "
        f"weight {shadow.total_weight:.6g}, size {shadow.size}"
    )
    return shadow


def build_vertex_shadow(
    g: Graph, d: DegeneracyInfo, v: int, h: int, collector: MetricsCollector = metrics_collector
) -> PrefixedShadow:
    """
    The (h-1)-clique prefixed Turán shadow of G restricted to N_v^+, with v in
    every prefix, so each candidate it yields is an h-vertex set containing v.
    """
    if h < 1:
        raise ConfigError(f"Clique size must be >= 1, got {h}")
    body = out_neighbors(g, d, v)
    body_graph, _ = induced_subgraph(g, body)
    shadow = PrefixedShadow(leaves=_find_shadow((int(v),), body, body_graph, h - 1), target=h)
    collector.shadow_built(len(shadow.leaves))
    return shadow


def release_shadow(shadow: PrefixedShadow, collector: MetricsCollector = metrics_collector) -> None:
    """Mark a shadow as discarded for storage accounting."""
    collector.shadow_released(len(shadow.leaves))


def dump_shadow(shadow: PrefixedShadow) -> str:
    """One line per leaf, in construction order."""
    return "\n".join(repr(leaf) for leaf in shadow.leaves)


# --------------- Sampling


def draw_subsets(population: int, size: int, rng: np.random.Generator, count: int) -> npt.NDArray[np.int64]:
    """
    ``count`` independent uniform ``size``-subsets of range(population), one per row.

    Rows are produced by a partial Fisher-Yates shuffle, so no draw is ever
    rejected whatever the size/population ratio.
    """
    out = np.empty((count, size), dtype=np.int64)
    if count == 0 or size == 0:
        return out
    if size > population:
        raise ValueError(f"Cannot draw {size} of {population} items")

    if population > SHUFFLE_CELL_BUDGET // 4:
        for row in range(count):
            out[row] = rng.choice(population, size=size, replace=False)
        return out

    rows_per_chunk = max(1, SHUFFLE_CELL_BUDGET // population)
    for start in range(0, count, rows_per_chunk):
        rows = min(rows_per_chunk, count - start)
        perm = np.tile(np.arange(population, dtype=np.int64), (rows, 1))
        r = np.arange(rows)
        for j in range(size):
            pick = rng.integers(j, population, size=rows)
            held = perm[r, j].copy()
            perm[r, j] = perm[r, pick]
            perm[r, pick] = held
        out[start:start + rows] = perm[:, :size]
    return out


def draw_leaves(shadow: PrefixedShadow, rng: np.random.Generator, count: int) -> npt.NDArray[np.int64]:
    """Leaf indices drawn with probability weight / total_weight."""
    if shadow.total_weight <= 0:
        raise EmptyShadowError("Cannot sample from a shadow of total weight 0")
    cumulative = shadow.cumulative
    targets = rng.random(count) * cumulative[-1]
    picked = np.searchsorted(cumulative, targets, side="right")
    return np.minimum(picked, cumulative.size - 1)


def sample_clique_candidates(
    shadow: PrefixedShadow,
    rng: np.random.Generator,
    count: int,
    collector: MetricsCollector = metrics_collector,
) -> CandidateBatch:
    """Draw ``count`` candidates; every h-clique of the host is hit with probability 1/w per draw."""
    h = shadow.target
    vertices = np.empty((count, h), dtype=np.int64)
    prefix_len = np.empty(count, dtype=np.int64)
    if count == 0:
        return CandidateBatch(vertices=vertices, prefix_len=prefix_len)

    leaf_index = draw_leaves(shadow, rng, count)
    order = np.argsort(leaf_index, kind="stable")
    hit_leaves, starts, counts = np.unique(leaf_index[order], return_index=True, return_counts=True)
    for index, start, hits in zip(hit_leaves.tolist(), starts.tolist(), counts.tolist()):
        leaf = shadow.leaves[index]
        rows = order[start:start + hits]
        subsets = draw_subsets(leaf.body.size, leaf.level, rng, rows.size)
        p = leaf.prefix.size
        vertices[rows, :p] = leaf.prefix
        vertices[rows, p:] = leaf.body[subsets]
        prefix_len[rows] = p

    collector.increment_counter("samples_drawn", count)
    return CandidateBatch(vertices=vertices, prefix_len=prefix_len)


def sample_clique_candidate(shadow: PrefixedShadow, rng: np.random.Generator) -> VertexSet:
    """One candidate as a sorted vertex set; the caller decides whether it is a clique."""
    return sample_clique_candidates(shadow, rng, 1).sorted_rows()[0]


def candidates_are_cliques(g: Graph, batch: CandidateBatch, full_check: Optional[bool] = None) -> npt.NDArray[np.bool_]:
    """
    Clique test for every candidate row.

    Prefix-prefix and prefix-body pairs are adjacent by construction, so only
    pairs inside the drawn subset are looked up. ``full_check`` (default: on when
    assertions are enabled) verifies the structural pairs as well.
    """
    count, h = batch.vertices.shape
    ok = np.ones(count, dtype=bool)
    if count == 0 or h <= 1:
        return ok

    for p in np.unique(batch.prefix_len):
        rows = np.flatnonzero(batch.prefix_len == p)
        width = h - int(p)
        if width <= 1:
            continue
        i, j = np.triu_indices(width, k=1)
        drawn = batch.vertices[np.ix_(rows, np.arange(int(p), h))]
        ok[rows] = adjacent_pairs(g, drawn[:, i], drawn[:, j]).all(axis=1)

    if full_check is None:
        full_check = __debug__
    if full_check:
        i, j = np.triu_indices(h, k=1)
        full = adjacent_pairs(g, batch.vertices[:, i], batch.vertices[:, j]).all(axis=1)
        assert np.array_equal(full, ok), "shadow prefix is not fully joined to its body"

    return ok
