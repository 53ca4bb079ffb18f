"""
Machine-readable reports written to standard output.
"""
import json
from typing import Dict, Iterable, Optional, Tuple

import pandas as pd
from pydantic import BaseModel

from .config import OutputFormat
from .estimators import Estimate
from .exact_oracle import ExactCounts


class GraphSummary(BaseModel):
    graph: str
    n: int
    m: int
    degeneracy: int
    d_max: int


class CountReport(BaseModel):
    """Report of the ``count`` command: exactly these 17 keys, in this order."""
    graph: str
    n: int
    m: int
    degeneracy: int
    d_max: int
    command: str
    pattern: str
    k: int
    h: int
    mode: str
    samples: int
    nonzero_samples: int
    normalizer: float
    estimate: float
    low_confidence: bool
    seed: int
    elapsed_seconds: float

    @classmethod
    def from_estimate(cls, summary: GraphSummary, estimate: Estimate) -> "CountReport":
        return cls(
            **summary.model_dump(),
            command="count",
            pattern=estimate.pattern.kind.value,
            k=estimate.pattern.k,
            h=estimate.pattern.h,
            mode=estimate.mode.value,
            samples=estimate.samples,
            nonzero_samples=estimate.nonzero_samples,
            normalizer=estimate.normalizer,
            estimate=estimate.value,
            low_confidence=estimate.low_confidence,
            seed=estimate.seed,
            elapsed_seconds=estimate.elapsed_seconds,
        )


class ExactReport(BaseModel):
    """Report of the ``exact`` command; sampling fields are null."""
    graph: str
    n: int
    m: int
    degeneracy: int
    d_max: int
    command: str
    pattern: str
    k: int
    h: int
    mode: Optional[str] = None
    samples: Optional[int] = None
    nonzero_samples: Optional[int] = None
    normalizer: Optional[float] = None
    kclique: int
    k1: int
    k2_type1: Optional[int]
    k2_type2: Optional[int]
    low_confidence: bool = False
    seed: Optional[int] = None
    elapsed_seconds: float

    @classmethod
    def from_counts(cls, summary: GraphSummary, pattern: str, h: int, counts: ExactCounts) -> "ExactReport":
        return cls(
            **summary.model_dump(),
            command="exact",
            pattern=pattern,
            k=counts.k,
            h=h,
            kclique=counts.kclique,
            k1=counts.k1,
            k2_type1=counts.k2_type1,
            k2_type2=counts.k2_type2,
            elapsed_seconds=counts.elapsed_seconds,
        )


class StatsReport(BaseModel):
    """Graph statistics; counts and ratios are null unless exact counts were computed."""
    graph: str
    n: int
    m: int
    degeneracy: int
    d_max: int
    command: str
    pattern: str
    k: int
    h: int
    phi: float
    kclique: Optional[int] = None
    k1: Optional[int] = None
    k2_type1: Optional[int] = None
    k2_type2: Optional[int] = None
    k1_ratio: Optional[float] = None
    k2_type1_ratio: Optional[float] = None
    k2_type2_ratio: Optional[float] = None

    def with_counts(self, counts: ExactCounts) -> "StatsReport":
        def ratio(near: Optional[int]) -> Optional[float]:
            if near is None or counts.kclique == 0:
                return None
            return near / counts.kclique

        return self.model_copy(update={
            "kclique": counts.kclique,
            "k1": counts.k1,
            "k2_type1": counts.k2_type1,
            "k2_type2": counts.k2_type2,
            "k1_ratio": ratio(counts.k1),
            "k2_type1_ratio": ratio(counts.k2_type1),
            "k2_type2_ratio": ratio(counts.k2_type2),
        })


def emit_report(report: BaseModel, fmt: OutputFormat) -> str:
    """Render a report as one JSON object, or as a CSV header plus one row."""
    if OutputFormat(fmt) is OutputFormat.CSV:
        frame = pd.DataFrame([report.model_dump()], columns=list(type(report).model_fields))
        return frame.to_csv(index=False, lineterminator="\n")
    return report.model_dump_json() + "\n"


def emit_instances(
    instances: Iterable[Tuple[int, ...]],
    original_labels: Dict[int, int],
    fmt: OutputFormat,
) -> str:
    """One instance per line, in original vertex labels."""
    lines = []
    for instance in instances:
        labels = [original_labels[v] for v in instance]
        if OutputFormat(fmt) is OutputFormat.CSV:
            lines.append(",".join(str(label) for label in labels))
        else:
            lines.append(json.dumps(labels))
    return "".join(line + "\n" for line in lines)
