"""
Near-clique estimators built on prefixed Turán shadows.

Every pattern is counted through a smaller clique it contains: F = Σ f(K)
over the h-cliques K of the graph, where f(K) counts the pattern instances
that K is the canonical anchor of. PEANUTS samples K uniformly from the full
h-clique shadow; Inverse-TS first picks a vertex v proportionally to
C(|N_v^+|, h-1) and only builds the shadow of that out-neighborhood, which it
discards as soon as the vertex's share of the samples has been drawn.
"""
import math
import time
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Generator, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from .exceptions import ConfigError
from .graph_core import (
    DegeneracyInfo,
    Graph,
    adjacent_pairs,
    degeneracy_order,
    is_clique,
)
from .monitoring import MetricsCollector, monitor_performance, trace_operation
from .shadow_engine import (
    PrefixedShadow,
    binom,
    build_prefixed_shadow,
    build_vertex_shadow,
    candidates_are_cliques,
    release_shadow,
    sample_clique_candidates,
)
from .utils import generate_seed, make_stream

logger = logging.getLogger(__name__)

# Below this many nonzero samples an estimate is likely to carry substantial error
LOW_CONFIDENCE_THRESHOLD = 5000


class PatternKind(str, Enum):
    """Patterns that can be counted."""
    KCLIQUE = "kclique"
    K1 = "k1"
    K2_TYPE1 = "k2t1"
    K2_TYPE2 = "k2t2"

    @property
    def clique_offset(self) -> int:
        """k - h: how much smaller the anchoring clique is than the pattern."""
        return {
            PatternKind.KCLIQUE: 0,
            PatternKind.K1: 1,
            PatternKind.K2_TYPE1: 1,
            PatternKind.K2_TYPE2: 2,
        }[self]

    @property
    def min_k(self) -> int:
        return 4 if self in (PatternKind.K2_TYPE1, PatternKind.K2_TYPE2) else 3


class Mode(str, Enum):
    INVERSE_TS = "inverse-ts"
    PEANUTS = "peanuts"


@dataclass(frozen=True)
class PatternSpec:
    """
    A pattern together with its anchor clique size h and the bound B on f.

    Use ``PatternSpec.for_graph`` to derive B from the graph's n, d_max and α.
    """
    kind: PatternKind
    k: int
    bound: float = math.inf

    def __post_init__(self) -> None:
        if not isinstance(self.kind, PatternKind):
            object.__setattr__(self, "kind", PatternKind(self.kind))
        if self.k < self.kind.min_k:
            raise ConfigError(
                f"Pattern {self.kind.value} needs k >= {self.kind.min_k}, got k={self.k}"
            )

    @property
    def h(self) -> int:
        return self.k - self.kind.clique_offset

    @classmethod
    def for_graph(cls, kind: PatternKind, k: int, g: Graph, d: DegeneracyInfo) -> "PatternSpec":
        kind = PatternKind(kind)
        n, d_max, alpha = g.n, g.d_max, d.degeneracy
        if kind is PatternKind.KCLIQUE:
            bound = 1.0
        elif kind is PatternKind.K1:
            bound = float(min(2 * d_max, n))
        elif kind is PatternKind.K2_TYPE1:
            bound = float(min(3 * d_max, n))
        else:
            bound = float(min(n * n, k * k * alpha * d_max / 2))
        return cls(kind=kind, k=k, bound=bound)


@dataclass
class Estimate:
    """Estimator output; ``normalizer`` is w(S) for PEANUTS and Φ for Inverse-TS."""
    value: float
    samples: int
    nonzero_samples: int
    normalizer: float
    seed: int
    elapsed_seconds: float
    low_confidence: bool
    mode: Mode
    pattern: PatternSpec
    clique_hits: int = 0
    shadow_leaves_built: int = 0
    peak_live_leaves: int = 0

    @property
    def success_ratio(self) -> float:
        return self.clique_hits / self.samples if self.samples else 0.0


@dataclass(eq=False)
class PhiTable:
    per_vertex: npt.NDArray[np.float64]
    total: float
    cumulative: npt.NDArray[np.float64]


@dataclass
class _Tally:
    total: float = 0.0
    nonzero: int = 0
    hits: int = 0

    def add(self, other: "_Tally") -> None:
        self.total += other.total
        self.nonzero += other.nonzero
        self.hits += other.hits


# --------------- Counting functions


def _as_clique(g: Graph, K: npt.ArrayLike, min_size: int, name: str) -> npt.NDArray[np.int64]:
    clique = np.asarray(K, dtype=np.int64)
    if clique.size < min_size:
        raise ValueError(f"{name} needs a clique of at least {min_size} vertices, got {clique.size}")
    if not is_clique(g, clique):
        raise ValueError(f"{name} was given a vertex set that is not a clique: {clique.tolist()}")
    return clique


def _candidate_profile(
    g: Graph, K: npt.NDArray[np.int64], anchors: int
) -> Tuple[npt.NDArray[np.int64], npt.NDArray[np.bool_]]:
    """
    Vertices outside K adjacent to at least one of K's first ``anchors`` members,
    and their adjacency to every member of K as a (candidates, |K|) matrix.
    """
    pool = np.unique(np.concatenate([g.neighbors(int(u)) for u in K[:anchors]]))
    candidates = np.setdiff1d(pool, K, assume_unique=True)
    linked = adjacent_pairs(g, candidates[:, None], K[None, :])
    return candidates, linked


def _k1_completions(g: Graph, K: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
    # a vertex missing one member of K is adjacent to at least one of any two
    candidates, linked = _candidate_profile(g, K, 2)
    one_missing = linked.sum(axis=1) == K.size - 1
    nbrs = candidates[one_missing]
    missing = K[np.argmin(linked[one_missing], axis=1)]
    return nbrs[nbrs > missing]


def _k2_type1_completions(g: Graph, K: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
    # a vertex missing two members of K is adjacent to at least one of any three
    candidates, linked = _candidate_profile(g, K, 3)
    return candidates[linked.sum(axis=1) == K.size - 2]


def _k2_type2_completions(g: Graph, d: DegeneracyInfo, K: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
    """(v, x) pairs completing K into a Type 2 pattern that K is the lowest-order anchor of."""
    candidates, linked = _candidate_profile(g, K, 2)
    one_missing = linked.sum(axis=1) == K.size - 1
    candidates = candidates[one_missing]
    missing = K[np.argmin(linked[one_missing], axis=1)]
    position = d.position
    cand_pos = position[candidates]

    pairs = []
    by_position = K[np.argsort(position[K], kind="stable")]
    for i, u in enumerate(by_position.tolist()):
        vs = candidates[(missing == u) & (cand_pos > position[u])]
        if vs.size == 0:
            continue
        for w in by_position[i + 1:].tolist():
            xs = candidates[(missing == w) & (cand_pos > position[w])]
            if xs.size == 0:
                continue
            iv, ix = np.nonzero(adjacent_pairs(g, vs[:, None], xs[None, :]))
            if iv.size:
                pairs.append(np.stack([vs[iv], xs[ix]], axis=1))

    if not pairs:
        return np.zeros((0, 2), dtype=np.int64)
    return np.concatenate(pairs)


def func_kclique(g: Graph, K: npt.ArrayLike) -> int:
    return 1


def func_k1(g: Graph, K: npt.ArrayLike) -> int:
    """Number of (k,1)-cliques J = K + {nbr} whose missing edge (w, nbr) has nbr > w."""
    return int(_k1_completions(g, _as_clique(g, K, 2, "func_k1")).size)


def func_k2_type1(g: Graph, K: npt.ArrayLike) -> int:
    """Number of Type 1 (k,2)-cliques containing the (k-1)-clique K."""
    return int(_k2_type1_completions(g, _as_clique(g, K, 3, "func_k2_type1")).size)


def func_k2_type2(g: Graph, d: DegeneracyInfo, K: npt.ArrayLike) -> int:
    """Number of Type 2 (k,2)-cliques whose lowest-order (k-2)-clique is K."""
    clique = _as_clique(g, K, 2, "func_k2_type2")
    return int(_k2_type2_completions(g, d, clique).shape[0])


def count_near_cliques(g: Graph, d: DegeneracyInfo, kind: PatternKind, K: npt.NDArray[np.int64]) -> int:
    """f(K) for an h-clique K already known to be a clique."""
    if kind is PatternKind.KCLIQUE:
        return 1
    if kind is PatternKind.K1:
        return int(_k1_completions(g, K).size)
    if kind is PatternKind.K2_TYPE1:
        return int(_k2_type1_completions(g, K).size)
    return int(_k2_type2_completions(g, d, K).shape[0])


def enumerate_near_cliques(
    g: Graph, d: DegeneracyInfo, kind: PatternKind, K: npt.NDArray[np.int64]
) -> List[Tuple[int, ...]]:
    """The pattern instances counted by f(K), each as a sorted vertex tuple."""
    K = np.asarray(K, dtype=np.int64)
    base = K.tolist()
    if kind is PatternKind.KCLIQUE:
        return [tuple(sorted(base))]
    if kind is PatternKind.K2_TYPE2:
        extra = _k2_type2_completions(g, d, K).tolist()
    elif kind is PatternKind.K1:
        extra = [[x] for x in _k1_completions(g, K).tolist()]
    else:
        extra = [[x] for x in _k2_type1_completions(g, K).tolist()]
    return [tuple(sorted(base + added)) for added in extra]


# --------------- Normalizers and sample sizes


def phi_table(g: Graph, d: DegeneracyInfo, h: int) -> PhiTable:
    """Φ_v = C(|N_v^+|, h-1) for every v, their sum Φ and prefix sums."""
    if h < 1:
        raise ConfigError(f"Clique size must be >= 1, got {h}")
    per_vertex = np.fromiter(
        (binom(int(x), h - 1) for x in d.out_degree.tolist()),
        dtype=np.float64,
        count=g.n,
    )
    return PhiTable(
        per_vertex=per_vertex,
        total=float(math.fsum(per_vertex.tolist())),
        cumulative=np.cumsum(per_vertex),
    )


def required_samples(normalizer: float, bound: float, epsilon: float, delta: float, f_lower: float) -> int:
    """
    Sample count guaranteeing |F̂ - F| <= εF with probability 1 - δ:
    ⌈3 · normalizer · B · ln(2/δ) / (ε² · F)⌉.
    """
    for name, value in (("normalizer", normalizer), ("bound", bound), ("epsilon", epsilon),
                        ("delta", delta), ("f_lower", f_lower)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    if epsilon >= 1:
        raise ValueError(f"epsilon must be < 1, got {epsilon}")
    return math.ceil(3 * normalizer * bound * math.log(2 / delta) / (epsilon ** 2 * f_lower))


# --------------- Sampling schedules

# A schedule yields groups of sampled h-cliques (sorted rows) with the weight
# each clique's f contributes to Σ X_i.
HitGroups = Generator[Tuple[npt.NDArray[np.int64], float], None, None]


def _draw_hits(g: Graph, shadow: PrefixedShadow, rng: np.random.Generator, count: int,
               collector: MetricsCollector) -> npt.NDArray[np.int64]:
    batch = sample_clique_candidates(shadow, rng, count, collector=collector)
    hits = batch.sorted_rows()[candidates_are_cliques(g, batch)]
    collector.increment_counter("clique_hits", int(hits.shape[0]))
    return hits


def _peanuts_groups(g: Graph, shadow: PrefixedShadow, rng: np.random.Generator, count: int,
                    collector: MetricsCollector) -> HitGroups:
    yield _draw_hits(g, shadow, rng, count, collector), 1.0


def _draw_vertices(phi: PhiTable, rng: np.random.Generator, count: int) -> npt.NDArray[np.int64]:
    """``count`` i.i.d. vertices with P(v) = Φ_v / Φ."""
    targets = rng.random(count) * phi.cumulative[-1]
    picked = np.searchsorted(phi.cumulative, targets, side="right")
    return np.minimum(picked, phi.cumulative.size - 1)


def _inverse_ts_groups(g: Graph, d: DegeneracyInfo, phi: PhiTable, h: int, rng: np.random.Generator,
                       count: int, collector: MetricsCollector, cache_shadows: bool) -> HitGroups:
    drawn = _draw_vertices(phi, rng, count)

    if cache_shadows:
        # draw-by-draw with a persistent map of per-vertex shadows
        shadows: Dict[int, PrefixedShadow] = {}
        try:
            for v in drawn.tolist():
                shadow = shadows.get(v)
                if shadow is None:
                    shadow = shadows[v] = build_vertex_shadow(g, d, v, h, collector=collector)
                if shadow.total_weight > 0:
                    yield (_draw_hits(g, shadow, rng, 1, collector),
                           shadow.total_weight / phi.per_vertex[v])
        finally:
            for shadow in shadows.values():
                release_shadow(shadow, collector=collector)
        return

    # all draws up front, then one vertex at a time: build, sample, discard
    counts = np.bincount(drawn, minlength=g.n)
    for v in np.flatnonzero(counts).tolist():
        shadow = build_vertex_shadow(g, d, v, h, collector=collector)
        try:
            if shadow.total_weight > 0:
                yield (_draw_hits(g, shadow, rng, int(counts[v]), collector),
                       shadow.total_weight / phi.per_vertex[v])
        finally:
            release_shadow(shadow, collector=collector)


def _score(g: Graph, d: DegeneracyInfo, pattern: PatternSpec, groups: HitGroups,
           memo: Dict[Tuple[int, ...], int]) -> _Tally:
    tally = _Tally()
    for hits, scale in groups:
        tally.hits += int(hits.shape[0])
        if pattern.kind is PatternKind.KCLIQUE:
            values = [1] * hits.shape[0]
        else:
            values = []
            for row in hits:
                key = tuple(row.tolist())
                value = memo.get(key)
                if value is None:
                    value = memo[key] = count_near_cliques(g, d, pattern.kind, row)
                values.append(value)
        tally.total += scale * sum(values)
        tally.nonzero += sum(1 for value in values if value > 0)
    return tally


def _split(samples: int, batches: int) -> List[int]:
    base, extra = divmod(samples, batches)
    return [base + (1 if b < extra else 0) for b in range(batches)]


def _run_batches(run_batch: Callable[[int, int], _Tally], samples: int, batches: int) -> _Tally:
    """Run the batches (concurrently when more than one) and sum them in batch order."""
    sizes = _split(samples, batches)
    if batches == 1:
        results = [run_batch(0, samples)]
    else:
        with ThreadPoolExecutor(max_workers=batches) as pool:
            results = list(pool.map(run_batch, range(batches), sizes))
    total = _Tally()
    for result in results:
        total.add(result)
    return total


def _check_run(samples: int, batches: int) -> None:
    if samples < 1:
        raise ConfigError(f"Sample count must be >= 1, got {samples}")
    if batches < 1:
        raise ConfigError(f"Batch count must be >= 1, got {batches}")


def _finish(value: float, tally: _Tally, samples: int, normalizer: float, seed: int, start: float,
            mode: Mode, pattern: PatternSpec, collector: MetricsCollector) -> Estimate:
    metrics = collector.get_metrics()
    estimate = Estimate(
        value=value,
        samples=samples,
        nonzero_samples=tally.nonzero,
        normalizer=normalizer,
        seed=seed,
        elapsed_seconds=time.perf_counter() - start,
        low_confidence=tally.nonzero < LOW_CONFIDENCE_THRESHOLD,
        mode=mode,
        pattern=pattern,
        clique_hits=tally.hits,
        shadow_leaves_built=metrics["shadow_leaves_built"],
        peak_live_leaves=metrics["peak_live_leaves"],
    )
    logger.info(
        f"{mode.value} {pattern.kind.value} k={pattern.k}: estimate {value:.6g} "
        f"({tally.nonzero}/{samples} nonzero samples, success ratio {estimate.success_ratio:.4f}, "
        f"{estimate.elapsed_seconds:.2f}s)"
    )
    if estimate.low_confidence:
        remedy = "take more samples or use peanuts mode" if mode is Mode.INVERSE_TS else "take more samples"
        logger.warning(
            f"Only {tally.nonzero} samples were nonzero (< {LOW_CONFIDENCE_THRESHOLD}); "
            f"the estimate may carry substantial error, {remedy}"
        )
    return estimate


# --------------- Estimators


@monitor_performance
def peanuts(g: Graph, pattern: PatternSpec, samples: int, seed: Optional[int] = None, *,
            degeneracy: Optional[DegeneracyInfo] = None, batches: int = 1) -> Estimate:
    """
    Estimate F by sampling h-cliques uniformly from the full prefixed Turán shadow.

    F̂ = (Σ X_i / s) · w(S) with X_i = f(K_i) when the i-th candidate is a clique.
    """
    _check_run(samples, batches)
    seed = generate_seed() if seed is None else seed
    start = time.perf_counter()
    collector = MetricsCollector()
    d = degeneracy if degeneracy is not None else degeneracy_order(g)

    shadow = build_prefixed_shadow(g, pattern.h, collector=collector)
    try:
        if shadow.total_weight == 0:
            tally = _Tally()
        else:
            def run_batch(batch_index: int, count: int) -> _Tally:
                rng = make_stream(seed, batch_index)
                with trace_operation("peanuts.sample", {"batch": batch_index, "samples": count}):
                    return _score(g, d, pattern, _peanuts_groups(g, shadow, rng, count, collector), {})

            tally = _run_batches(run_batch, samples, batches)
    finally:
        release_shadow(shadow, collector=collector)

    value = tally.total / samples * shadow.total_weight
    return _finish(value, tally, samples, shadow.total_weight, seed, start, Mode.PEANUTS, pattern, collector)


@monitor_performance
def inverse_ts(g: Graph, pattern: PatternSpec, samples: int, seed: Optional[int] = None, *,
               degeneracy: Optional[DegeneracyInfo] = None, batches: int = 1,
               cache_shadows: bool = False) -> Estimate:
    """
    Estimate F by picking vertices proportionally to Φ_v and sampling from the
    shadow of their out-neighborhood only.

    Each clique found through v carries weight φ_v / Φ_v and F̂ = (Σ X_i / s) · Φ.
    By default all vertex draws are made up front and each per-vertex shadow is
    discarded once its samples are taken; ``cache_shadows`` keeps every shadow
    built for the rest of the run instead.
    """
    _check_run(samples, batches)
    seed = generate_seed() if seed is None else seed
    start = time.perf_counter()
    collector = MetricsCollector()
    d = degeneracy if degeneracy is not None else degeneracy_order(g)

    phi = phi_table(g, d, pattern.h)
    if phi.total == 0:
        tally = _Tally()
    else:
        def run_batch(batch_index: int, count: int) -> _Tally:
            rng = make_stream(seed, batch_index)
            with trace_operation("inverse_ts.sample", {"batch": batch_index, "samples": count}):
                groups = _inverse_ts_groups(g, d, phi, pattern.h, rng, count, collector, cache_shadows)
                return _score(g, d, pattern, groups, {})

        tally = _run_batches(run_batch, samples, batches)

    value = tally.total / samples * phi.total
    estimate = _finish(value, tally, samples, phi.total, seed, start, Mode.INVERSE_TS, pattern, collector)
    if estimate.shadow_leaves_built:
        logger.info(
            f"Shadow storage: peak {estimate.peak_live_leaves} live leaves of "
            f"{estimate.shadow_leaves_built} built"
        )
    return estimate


def estimate(g: Graph, pattern: PatternSpec, samples: int, seed: Optional[int] = None, *,
             mode: Mode = Mode.INVERSE_TS, degeneracy: Optional[DegeneracyInfo] = None,
             batches: int = 1) -> Estimate:
    """Dispatch to the estimator selected by ``mode``."""
    if Mode(mode) is Mode.PEANUTS:
        return peanuts(g, pattern, samples, seed, degeneracy=degeneracy, batches=batches)
    return inverse_ts(g, pattern, samples, seed, degeneracy=degeneracy, batches=batches)


def _largest_shadow_share(g: Graph, d: DegeneracyInfo, phi: PhiTable, h: int,
                          collector: MetricsCollector) -> float:
    """max_v φ_v / Φ_v over vertices with Φ_v > 0, building each vertex shadow once."""
    largest = 0.0
    for v in np.flatnonzero(phi.per_vertex).tolist():
        shadow = build_vertex_shadow(g, d, v, h, collector=collector)
        largest = max(largest, shadow.total_weight / phi.per_vertex[v])
        release_shadow(shadow, collector=collector)
    return largest


def _listing_hits(
    g: Graph, d: DegeneracyInfo, pattern: PatternSpec, rng: np.random.Generator,
    samples: int, mode: Mode, collector: MetricsCollector,
) -> Generator[npt.NDArray[np.int64], None, None]:
    """
    Sampled h-cliques for listing, every h-clique equally likely on each draw.

    The full shadow already samples uniformly. Through a vertex shadow an
    h-clique is found with probability (Φ_v / Φ) / φ_v, so a hit from v is kept
    with probability (φ_v / Φ_v) / max_u (φ_u / Φ_u).
    """
    if mode is Mode.PEANUTS:
        shadow = build_prefixed_shadow(g, pattern.h, collector=collector)
        try:
            if shadow.total_weight > 0:
                yield _draw_hits(g, shadow, rng, samples, collector)
        finally:
            release_shadow(shadow, collector=collector)
        return

    phi = phi_table(g, d, pattern.h)
    if phi.total == 0:
        return
    largest = _largest_shadow_share(g, d, phi, pattern.h, collector)
    if largest == 0:
        return
    groups = _inverse_ts_groups(g, d, phi, pattern.h, rng, samples, collector, False)
    try:
        for hits, share in groups:
            yield hits[rng.random(hits.shape[0]) < share / largest]
    finally:
        groups.close()


def list_near_cliques(g: Graph, pattern: PatternSpec, samples: int, seed: Optional[int] = None, *,
                      mode: Mode = Mode.INVERSE_TS, limit: Optional[int] = None,
                      degeneracy: Optional[DegeneracyInfo] = None) -> List[Tuple[int, ...]]:
    """
    Sample h-cliques and list every pattern instance each of them anchors.

    Instances found through the same clique are correlated, but across the
    list each instance has the same chance of appearing. Instances are
    reported once, in the order they were first found.
    """
    if pattern.kind is PatternKind.KCLIQUE:
        raise ConfigError("Listing is only defined for near-clique patterns")
    _check_run(samples, 1)
    seed = generate_seed() if seed is None else seed
    collector = MetricsCollector()
    d = degeneracy if degeneracy is not None else degeneracy_order(g)
    rng = make_stream(seed, 0)

    found: Dict[Tuple[int, ...], None] = {}
    batches = _listing_hits(g, d, pattern, rng, samples, Mode(mode), collector)
    try:
        for hits in batches:
            for row in hits:
                for instance in enumerate_near_cliques(g, d, pattern.kind, row):
                    found.setdefault(instance, None)
                    if limit is not None and len(found) >= limit:
                        return list(found)
    finally:
        batches.close()

    logger.info(f"Listed {len(found)} {pattern.kind.value} instances from {samples} samples")
    return list(found)
