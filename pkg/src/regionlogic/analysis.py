"""Focus quality metrics and behavior classification.

Precision and recall compare each final state against the ground-truth state
by overlapped area (as image fractions, so values are size-invariant);
divergence is the area-weighted variance of region selections across final
states. Thresholds on the three values map to a five-way behavior taxonomy.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Union

from .errors import EmptyStateSetError
from .regions import RegionPartition
from .states import FinalStateSet, StateVector, iter_regions

StateSetLike = Union[FinalStateSet, Iterable[StateVector]]


class BehaviorClass(Enum):
    HOLISTIC = "Holistic"
    COMPOSITIONAL = "Compositional"
    NARROW = "Narrow"
    DISTRACTED = "Distracted"
    MISLED = "Misled"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class BehaviorThresholds:
    """Cutoffs for "high" precision/recall/divergence (values >= cutoff)."""

    precision_high: float = 0.5
    recall_high: float = 0.5
    divergence_high: float = 0.05

    def __post_init__(self):
        for name in ("precision_high", "recall_high", "divergence_high"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_THRESHOLDS = BehaviorThresholds()


def _states_of(final_states: StateSetLike) -> list[StateVector]:
    if isinstance(final_states, FinalStateSet):
        states = sorted(final_states.states, key=lambda s: s.bits)
    else:
        states = sorted(set(final_states), key=lambda s: s.bits)
    if not states:
        raise EmptyStateSetError("metrics require at least one final state")
    return states


def _fraction(bits: int, partition: RegionPartition) -> float:
    return float(sum(partition.area_fractions[i - 1] for i in iter_regions(bits)))


def precision(
    final_states: StateSetLike, ground_truth: StateVector, partition: RegionPartition
) -> float:
    """Mean, over final states, of overlapped area / state area.

    An empty state contributes 0 (its 0/0 term is defined away; report
    building flags the condition).
    """
    states = _states_of(final_states)
    total = 0.0
    for state in states:
        area = _fraction(state.bits, partition)
        if area == 0.0:
            continue
        total += _fraction(state.bits & ground_truth.bits, partition) / area
    return total / len(states)


def recall(
    final_states: StateSetLike, ground_truth: StateVector, partition: RegionPartition
) -> float:
    """Mean, over final states, of overlapped area / ground-truth area.

    Zero when the ground-truth state is empty (nothing matched the masks);
    report building flags the condition.
    """
    states = _states_of(final_states)
    gt_area = _fraction(ground_truth.bits, partition)
    if gt_area == 0.0:
        return 0.0
    total = 0.0
    for state in states:
        total += _fraction(state.bits & ground_truth.bits, partition) / gt_area
    return total / len(states)


def divergence(final_states: StateSetLike, partition: RegionPartition) -> float:
    """Area-fraction-weighted sum of per-region selection variances.

    Population variance over the 0/1 selections of each region across the
    final states; a single state therefore diverges by exactly 0.
    """
    states = _states_of(final_states)
    n = len(states)
    total = 0.0
    for i in range(1, partition.region_count + 1):
        selected = sum(1 for s in states if i in s)
        mean = selected / n
        total += float(partition.area_fractions[i - 1]) * (mean - mean * mean)
    return total


def classify(
    precision_value: float,
    recall_value: float,
    divergence_value: float,
    thresholds: BehaviorThresholds = DEFAULT_THRESHOLDS,
) -> BehaviorClass:
    """Five-way behavior taxonomy over the metric triple.

    Low precision splits on recall alone (Misled vs Distracted); high
    precision splits on recall and divergence (Holistic / Compositional /
    Narrow). The high/high/high cell has no named behavior and comes back
    Unclassified.
    """
    p_high = precision_value >= thresholds.precision_high
    r_high = recall_value >= thresholds.recall_high
    d_high = divergence_value >= thresholds.divergence_high
    if not p_high:
        return BehaviorClass.DISTRACTED if r_high else BehaviorClass.MISLED
    if r_high:
        return BehaviorClass.UNCLASSIFIED if d_high else BehaviorClass.HOLISTIC
    return BehaviorClass.COMPOSITIONAL if d_high else BehaviorClass.NARROW


@dataclass(frozen=True)
class MetricsReport:
    """Metric triple, behavior class, flags, and run provenance."""

    precision: float
    recall: float
    divergence: float
    behavior: BehaviorClass
    flags: tuple[str, ...]
    state_count: int
    query_count: int | None = None
    fill_mode: str | None = None
    beam_size: int | None = None
    iou_threshold: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "divergence": self.divergence,
            "behavior": self.behavior.value,
            "flags": list(self.flags),
            "state_count": self.state_count,
            "query_count": self.query_count,
            "fill_mode": self.fill_mode,
            "beam_size": self.beam_size,
            "iou_threshold": self.iou_threshold,
        }


def build_report(
    final_states: FinalStateSet,
    ground_truth: StateVector,
    partition: RegionPartition,
    thresholds: BehaviorThresholds = DEFAULT_THRESHOLDS,
    *,
    fill_mode: str | None = None,
    iou_threshold: float | None = None,
) -> MetricsReport:
    """Compute all metrics for one image and classify the behavior."""
    p = precision(final_states, ground_truth, partition)
    r = recall(final_states, ground_truth, partition)
    d = divergence(final_states, partition)
    behavior = classify(p, r, d, thresholds)
    flags = []
    if ground_truth.bits == 0:
        flags.append("no_ground_truth_match")
    if any(s.bits == 0 for s in final_states.states):
        flags.append("empty_final_state")
    if behavior is BehaviorClass.DISTRACTED and d >= thresholds.divergence_high:
        flags.append("high_divergence")
    return MetricsReport(
        precision=p,
        recall=r,
        divergence=d,
        behavior=behavior,
        flags=tuple(flags),
        state_count=len(final_states.states),
        query_count=final_states.query_count,
        fill_mode=fill_mode,
        beam_size=final_states.beam_size,
        iou_threshold=iou_threshold,
    )


def aggregate_reports(
    reports: Iterable[MetricsReport],
    thresholds: BehaviorThresholds = DEFAULT_THRESHOLDS,
) -> dict:
    """Corpus behavior: classify the arithmetic mean of per-image metrics."""
    reports = list(reports)
    if not reports:
        raise EmptyStateSetError("aggregate requires at least one report")
    n = len(reports)
    mean_p = sum(r.precision for r in reports) / n
    mean_r = sum(r.recall for r in reports) / n
    mean_d = sum(r.divergence for r in reports) / n
    return {
        "image_count": n,
        "precision": mean_p,
        "recall": mean_r,
        "divergence": mean_d,
        "behavior": classify(mean_p, mean_r, mean_d, thresholds).value,
    }
