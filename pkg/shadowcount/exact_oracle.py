"""
Exact clique and near-clique counts for verification.

``exact_counts`` walks every clique through the degeneracy DAG and applies the
estimators' counting functions to it. ``naive_subset_counts`` shares no code
with the estimators: it classifies every k-subset by its missing edges.
"""
import time
import logging
from dataclasses import dataclass
from itertools import combinations, islice
from typing import Callable, List, Optional

import numpy as np
import numpy.typing as npt

from .exceptions import ConfigError, OracleGuardError
from .estimators import PatternKind, count_near_cliques
from .graph_core import DegeneracyInfo, Graph, degeneracy_order, out_neighbors
from .monitoring import monitor_performance, trace_operation
from .shadow_engine import binom

logger = logging.getLogger(__name__)

NAIVE_SUBSET_LIMIT = 10 ** 8
NAIVE_CHUNK = 1 << 16

CliqueVisitor = Callable[[npt.NDArray[np.int64]], None]


@dataclass
class ExactCounts:
    """Exact pattern counts; the (k,2) kinds are None for k = 3."""
    k: int
    kclique: int
    k1: int
    k2_type1: Optional[int]
    k2_type2: Optional[int]
    elapsed_seconds: float = 0.0

    def matches(self, other: "ExactCounts") -> bool:
        return (self.k, self.kclique, self.k1, self.k2_type1, self.k2_type2) == (
            other.k, other.kclique, other.k1, other.k2_type1, other.k2_type2
        )


def _check_k(k: int) -> None:
    if k < 3:
        raise ConfigError(f"Exact counts need k >= 3, got k={k}")


def enumerate_cliques(
    g: Graph,
    h: int,
    visitor: Optional[CliqueVisitor] = None,
    degeneracy: Optional[DegeneracyInfo] = None,
) -> int:
    """
    Visit every h-clique once, as a sorted vertex array, and return how many there are.

    Each clique is reached from its earliest vertex in the degeneracy order by
    intersecting out-neighborhoods; branches with fewer candidates than the
    remaining depth are cut.
    """
    if h < 1:
        raise ConfigError(f"Clique size must be >= 1, got {h}")
    d = degeneracy if degeneracy is not None else degeneracy_order(g)
    out = [out_neighbors(g, d, v) for v in range(g.n)]
    count = 0

    def extend(clique: List[int], candidates: npt.NDArray[np.int64]) -> None:
        nonlocal count
        remaining = h - len(clique)
        if remaining == 0:
            count += 1
            if visitor is not None:
                visitor(np.sort(np.asarray(clique, dtype=np.int64)))
            return
        if candidates.size < remaining:
            return
        for u in candidates.tolist():
            clique.append(u)
            extend(clique, np.intersect1d(candidates, out[u], assume_unique=True))
            clique.pop()

    with trace_operation("enumerate_cliques", {"n": g.n, "m": g.m, "h": h}):
        for v in range(g.n):
            if out[v].size >= h - 1:
                extend([v], out[v])

    logger.debug(f"Enumerated {count} {h}-cliques")
    return count


def count_cliques(g: Graph, h: int, degeneracy: Optional[DegeneracyInfo] = None) -> int:
    return enumerate_cliques(g, h, degeneracy=degeneracy)


@monitor_performance
def exact_counts(g: Graph, k: int) -> ExactCounts:
    """Brute-force counts of k-cliques and the three near-clique kinds."""
    _check_k(k)
    start = time.perf_counter()
    d = degeneracy_order(g)

    totals = {kind: 0 for kind in PatternKind}

    def tally(kinds: List[PatternKind]) -> CliqueVisitor:
        def visit(K: npt.NDArray[np.int64]) -> None:
            for kind in kinds:
                totals[kind] += count_near_cliques(g, d, kind, K)
        return visit

    kclique = count_cliques(g, k, degeneracy=d)
    one_smaller = [PatternKind.K1] + ([PatternKind.K2_TYPE1] if k >= 4 else [])
    enumerate_cliques(g, k - 1, tally(one_smaller), degeneracy=d)
    if k >= 4:
        enumerate_cliques(g, k - 2, tally([PatternKind.K2_TYPE2]), degeneracy=d)

    counts = ExactCounts(
        k=k,
        kclique=kclique,
        k1=totals[PatternKind.K1],
        k2_type1=totals[PatternKind.K2_TYPE1] if k >= 4 else None,
        k2_type2=totals[PatternKind.K2_TYPE2] if k >= 4 else None,
        elapsed_seconds=time.perf_counter() - start,
    )
    logger.info(
        f"Exact counts k={k}: kclique={counts.kclique} k1={counts.k1} "
        f"k2_type1={counts.k2_type1} k2_type2={counts.k2_type2} ({counts.elapsed_seconds:.2f}s)"
    )
    return counts


def naive_subset_counts(g: Graph, k: int) -> ExactCounts:
    """Classify every k-subset by the edges it is missing."""
    _check_k(k)
    subsets = binom(g.n, k)
    if subsets > NAIVE_SUBSET_LIMIT:
        raise OracleGuardError(
            f"C({g.n}, {k}) = {subsets:.3g} subsets exceeds the limit of {NAIVE_SUBSET_LIMIT:.0e}"
        )
    start = time.perf_counter()
    dense = g.csr.toarray().astype(bool)
    i, j = np.triu_indices(k, k=1)
    kclique = k1 = type1 = type2 = 0

    stream = combinations(range(g.n), k)
    while True:
        chunk = np.asarray(list(islice(stream, NAIVE_CHUNK)), dtype=np.int64)
        if chunk.size == 0:
            break
        missing = ~dense[chunk[:, i], chunk[:, j]]
        per_subset = missing.sum(axis=1)
        kclique += int((per_subset == 0).sum())
        k1 += int((per_subset == 1).sum())

        two = missing[per_subset == 2]
        if two.size:
            cols = np.nonzero(two)[1].reshape(-1, 2)
            a, b = i[cols], j[cols]
            shared = (
                (a[:, 0] == a[:, 1]) | (a[:, 0] == b[:, 1])
                | (b[:, 0] == a[:, 1]) | (b[:, 0] == b[:, 1])
            )
            type1 += int(shared.sum())
            type2 += int((~shared).sum())

    return ExactCounts(
        k=k,
        kclique=kclique,
        k1=k1,
        k2_type1=type1 if k >= 4 else None,
        k2_type2=type2 if k >= 4 else None,
        elapsed_seconds=time.perf_counter() - start,
    )
