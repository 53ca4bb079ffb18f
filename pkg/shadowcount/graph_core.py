"""
Immutable simple undirected graphs in compressed sparse row form.

Vertices are dense ids 0..n-1 and every neighbor list is sorted, so adjacency
is a binary search and set intersections are linear merges. The degeneracy
machinery here orients every edge from the earlier to the later vertex of
the min-degree removal order; the out-neighborhoods of that orientation are
what the shadow engine and the estimators recurse on.
"""
import heapq
import logging
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

import numpy as np
import numpy.typing as npt
import pandas as pd
from scipy import sparse

from .exceptions import GraphFormatError

logger = logging.getLogger(__name__)

# Sorted, duplicate-free int64 array of vertex ids.
VertexSet = npt.NDArray[np.int64]

COMMENT_PREFIXES = ("#", "%")


def vertex_set(vertices: Iterable[int]) -> VertexSet:
    """Normalise any iterable of ids into a VertexSet."""
    return np.unique(np.fromiter(vertices, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph; ``indices[indptr[v]:indptr[v+1]]`` are v's neighbors."""

    indptr: npt.NDArray[np.int64]
    indices: npt.NDArray[np.int64]
    # u * n + v for every edge with u < v, sorted
    edge_keys: npt.NDArray[np.int64]

    @classmethod
    def empty(cls, n: int = 0) -> "Graph":
        return cls(
            indptr=np.zeros(n + 1, dtype=np.int64),
            indices=np.zeros(0, dtype=np.int64),
            edge_keys=np.zeros(0, dtype=np.int64),
        )

    @classmethod
    def from_edge_keys(cls, n: int, edge_keys: npt.NDArray[np.int64]) -> "Graph":
        """Build from sorted unique keys u * n + v (u < v)."""
        if edge_keys.size == 0:
            return cls.empty(n)
        upper = edge_keys // n
        lower = edge_keys % n
        rows = np.concatenate([upper, lower])
        cols = np.concatenate([lower, upper])
        adjacency = sparse.csr_matrix(
            (np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n)
        )
        adjacency.sort_indices()
        return cls(
            indptr=adjacency.indptr.astype(np.int64),
            indices=adjacency.indices.astype(np.int64),
            edge_keys=edge_keys.astype(np.int64),
        )

    @classmethod
    def from_symmetric_csr(cls, adjacency: sparse.csr_matrix) -> "Graph":
        n = adjacency.shape[0]
        adjacency = sparse.csr_matrix(adjacency)
        adjacency.sort_indices()
        upper = sparse.triu(adjacency, k=1).tocoo()
        keys = np.sort(upper.row.astype(np.int64) * n + upper.col.astype(np.int64))
        return cls(
            indptr=adjacency.indptr.astype(np.int64),
            indices=adjacency.indices.astype(np.int64),
            edge_keys=keys,
        )

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    @property
    def m(self) -> int:
        return self.edge_keys.size

    @cached_property
    def degrees(self) -> npt.NDArray[np.int64]:
        return np.diff(self.indptr)

    @property
    def d_max(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> VertexSet:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> npt.NDArray[np.int64]:
        """(m, 2) array of edges with u < v, sorted."""
        n = max(self.n, 1)
        return np.stack([self.edge_keys // n, self.edge_keys % n], axis=1)

    @cached_property
    def csr(self) -> sparse.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int8)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class DegeneracyInfo:
    """Position of every vertex in the removal order, its out-degree, and α."""

    position: npt.NDArray[np.int64]
    out_degree: npt.NDArray[np.int64]
    degeneracy: int

    @cached_property
    def order(self) -> npt.NDArray[np.int64]:
        """Vertices listed by position."""
        order = np.empty_like(self.position)
        order[self.position] = np.arange(self.position.size)
        return order


@dataclass(frozen=True, eq=False)
class SubgraphMapping:
    """Id translation for an induced subgraph; local id i is global ``local_to_global[i]``."""

    local_to_global: VertexSet

    def to_global(self, local_ids: Union[int, npt.ArrayLike]) -> npt.NDArray[np.int64]:
        return self.local_to_global[local_ids]

    def to_local(self, global_ids: npt.ArrayLike) -> npt.NDArray[np.int64]:
        global_ids = np.asarray(global_ids, dtype=np.int64)
        local = np.searchsorted(self.local_to_global, global_ids)
        valid = local < self.local_to_global.size
        if not valid.all() or not np.array_equal(self.local_to_global[local], global_ids):
            raise KeyError("Vertex is not part of the induced subgraph")
        return local


# --------------- Construction


def build_graph(edges: Iterable[Tuple[int, int]]) -> Tuple[Graph, Dict[int, int]]:
    """
    Build a simple graph from raw labelled edges.

    Self-loops are dropped, repeated pairs and both orientations collapse to one
    edge, and labels are compacted to 0..n-1 in order of first appearance. A label
    that only ever appears in a self-loop still becomes an isolated vertex.

    Returns:
        The graph and the original-label -> dense-id mapping.
    """
    pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    pairs = pairs.reshape(-1, 2)
    if (pairs < 0).any():
        raise GraphFormatError("Vertex labels must be non-negative integers")

    codes, uniques = pd.factorize(pairs.ravel(), sort=False)
    n = len(uniques)
    label_map = {int(label): i for i, label in enumerate(uniques)}

    codes = codes.astype(np.int64).reshape(-1, 2)
    codes = codes[codes[:, 0] != codes[:, 1]]
    low = np.minimum(codes[:, 0], codes[:, 1])
    high = np.maximum(codes[:, 0], codes[:, 1])
    keys = np.unique(low * n + high)

    graph = Graph.from_edge_keys(n, keys)
    logger.debug(f"Built graph with {graph.n} vertices and {graph.m} edges from {len(pairs)} pairs")
    return graph, label_map


def load_edge_list(path: Union[str, Path]) -> Tuple[Graph, Dict[int, int]]:
    """
    Read a SNAP-style edge list.

    One whitespace-separated integer pair per line; lines starting with '#' or '%'
    and blank lines are skipped, columns past the second are ignored.
    """
    path = Path(path)
    logger.info(f"Loading edge list: {path}")
    try:
        with warnings.catch_warnings():
            # empty inputs are legal and yield the empty graph
            warnings.simplefilter("ignore", UserWarning)
            pairs = np.loadtxt(
                path,
                dtype=np.int64,
                comments=COMMENT_PREFIXES,
                usecols=(0, 1),
                ndmin=2,
                encoding="utf-8",
            )
    except ValueError as e:
        logger.error(f"Failed to parse edge list {path}: {e}")
        raise GraphFormatError(f"Cannot parse edge list {path}: {e}") from e

    if pairs.size == 0:
        pairs = pairs.reshape(0, 2)
    graph, labels = build_graph(pairs)
    logger.info(f"Loaded {path.name}: n={graph.n}, m={graph.m}, d_max={graph.d_max}")
    return graph, labels


# --------------- Degeneracy


def degeneracy_order(g: Graph) -> DegeneracyInfo:
    """
    Repeatedly remove a minimum-degree vertex, smallest id first among ties.

    Vertices sit in one bucket per residual degree. The lowest non-empty bucket
    drops by at most one per removal, so finding it is O(n + m) over the whole
    run, as are the m bucket moves. Each bucket is a min-heap of ids, seeded in
    ascending id order; entries left behind by a move are stale and skipped
    when popped.

    The residual degree of a vertex at removal time is its out-degree in the
    resulting orientation, and the largest of those is the degeneracy.
    """
    n = g.n
    indptr = g.indptr.tolist()
    indices = g.indices.tolist()
    degree = g.degrees.tolist()

    buckets: List[List[int]] = [[] for _ in range(max(degree, default=0) + 1)]
    for v, dv in enumerate(degree):
        buckets[dv].append(v)
    removed = bytearray(n)
    position = [0] * n
    out_degree = [0] * n
    degeneracy = 0
    level = 0

    for next_position in range(n):
        while True:
            while not buckets[level]:
                level += 1
            v = heapq.heappop(buckets[level])
            if not removed[v] and degree[v] == level:
                break
        removed[v] = 1
        position[v] = next_position
        out_degree[v] = level
        if level > degeneracy:
            degeneracy = level
        for u in indices[indptr[v]:indptr[v + 1]]:
            if not removed[u]:
                degree[u] -= 1
                heapq.heappush(buckets[degree[u]], u)
        if level > 0:
            level -= 1

    return DegeneracyInfo(
        position=np.asarray(position, dtype=np.int64),
        out_degree=np.asarray(out_degree, dtype=np.int64),
        degeneracy=degeneracy,
    )


def out_neighbors(g: Graph, d: DegeneracyInfo, v: int) -> VertexSet:
    """Neighbors of v that come later in the degeneracy order, sorted by id."""
    nbrs = g.neighbors(v)
    return nbrs[d.position[nbrs] > d.position[v]]


# --------------- Queries


def induced_subgraph(g: Graph, s: VertexSet) -> Tuple[Graph, SubgraphMapping]:
    """G restricted to s; local id i corresponds to s[i]."""
    s = np.asarray(s, dtype=np.int64)
    mapping = SubgraphMapping(local_to_global=s)
    if s.size == 0:
        return Graph.empty(0), mapping
    if g.m == 0:
        return Graph.empty(s.size), mapping
    sub = g.csr[s][:, s]
    return Graph.from_symmetric_csr(sub), mapping


def edge_density(g: Graph) -> float:
    """m / C(n, 2); a graph with at most one vertex counts as fully dense."""
    n = g.n
    if n <= 1:
        return 1.0
    return g.m / (n * (n - 1) / 2)


def adjacent(g: Graph, u: int, v: int) -> bool:
    if u == v:
        return False
    nbrs = g.neighbors(u)
    i = int(np.searchsorted(nbrs, v))
    return i < nbrs.size and int(nbrs[i]) == v


def adjacent_pairs(g: Graph, us: npt.ArrayLike, vs: npt.ArrayLike) -> npt.NDArray[np.bool_]:
    """Element-wise adjacency test for two equally shaped id arrays."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    if g.m == 0 or us.size == 0:
        return np.zeros(np.broadcast(us, vs).shape, dtype=bool)
    low = np.minimum(us, vs)
    high = np.maximum(us, vs)
    keys = low * g.n + high
    idx = np.searchsorted(g.edge_keys, keys)
    idx = np.minimum(idx, g.edge_keys.size - 1)
    return (g.edge_keys[idx] == keys) & (low != high)


def is_clique(g: Graph, s: npt.ArrayLike) -> bool:
    s = np.asarray(s, dtype=np.int64)
    if s.size <= 1:
        return True
    i, j = np.triu_indices(s.size, k=1)
    return bool(adjacent_pairs(g, s[i], s[j]).all())
