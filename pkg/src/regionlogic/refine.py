"""Breadth-wise region-pruning search for minimal prediction-preserving subsets.

Starting from the all-regions state, each round derives candidates by pruning
one preserved region from every frontier state, validates them against the
model (a candidate is valid when the prediction matches the full-image
label), and expands the valid ones. States whose candidates are all invalid
are final: every region they keep is indispensable. Candidates are
deduplicated across derivation orders, and an optional beam keeps only the k
most promising valid children per parent.

``brute_force_final_states`` recomputes the same set by exhaustive
enumeration and serves as the independent oracle for small region counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .composer import FillPolicy
from .errors import QueryBudgetExceededError
from .predictor import PredictionCache, StateLabeler
from .regions import RegionPartition
from .states import FinalStateSet, StateVector, iter_regions

_CANDIDATE_ORDERS = ("area", "index")


@dataclass(frozen=True)
class RefinementConfig:
    """Search knobs.

    ``beam_size`` None means unlimited (every valid child is expanded);
    bounded beams keep at most that many valid children per parent, picked by
    ``candidate_order``: ``area`` prefers pruning the largest regions first
    (ties to the lowest region index), ``index`` the lowest indices. The
    query budget aborts pathological runs instead of reporting partial sets.
    """

    beam_size: int | None = None
    candidate_order: str = "area"
    max_queries: int = 50_000

    def __post_init__(self):
        if self.beam_size is not None and self.beam_size < 1:
            raise ValueError(f"beam_size must be >= 1 or None, got {self.beam_size}")
        if self.candidate_order not in _CANDIDATE_ORDERS:
            raise ValueError(
                f"candidate_order must be one of {_CANDIDATE_ORDERS}, got {self.candidate_order!r}"
            )
        if self.max_queries < 1:
            raise ValueError(f"max_queries must be positive, got {self.max_queries}")


def _children(bits: int) -> list[tuple[int, int]]:
    """(pruned region, child bitmask) for every preserved region, ascending."""
    return [(i, bits & ~(1 << (i - 1))) for i in iter_regions(bits)]


def _finish(
    finals: set[int], labeler: StateLabeler, partition: RegionPartition,
    reference_label: str, beam_size: int | None,
) -> FinalStateSet:
    m = partition.region_count
    return FinalStateSet(
        states=frozenset(StateVector(b, m) for b in finals),
        reference_label=reference_label,
        region_count=m,
        query_count=labeler.query_count,
        beam_size=beam_size,
    )


def refine(
    image: np.ndarray | None,
    partition: RegionPartition,
    model,
    fill: FillPolicy | None = None,
    config: RefinementConfig | None = None,
    *,
    cache: PredictionCache | None = None,
    image_id: str | None = None,
) -> FinalStateSet:
    """Search for the final states of ``model`` on the partitioned image.

    ``image`` may be None for state-channel models (synthetic oracles).
    Raises :class:`QueryBudgetExceededError` when the budget runs out; the
    exception carries whatever was found, flagged partial.
    """
    cfg = config or RefinementConfig()
    if partition.region_count < 1:
        raise ValueError("partition has no regions")
    labeler = StateLabeler(
        model, partition, image=image, fill=fill, cache=cache, image_id=image_id
    )
    areas = partition.areas
    full = (1 << partition.region_count) - 1
    reference_label = labeler.labels_for([full])[0]

    frontier = [full]
    enqueued = {full}
    validity: dict[int, bool] = {full: True}
    finals: set[int] = set()

    while frontier:
        batch: list[int] = []
        batch_seen: set[int] = set()
        children = {parent: _children(parent) for parent in frontier}
        for kids in children.values():
            for _, child in kids:
                if child not in validity and child not in batch_seen:
                    batch.append(child)
                    batch_seen.add(child)

        pending = labeler.pending_count(batch)
        if labeler.query_count + pending > cfg.max_queries:
            raise QueryBudgetExceededError(
                f"query budget of {cfg.max_queries} exhausted "
                f"({labeler.query_count} used, {pending} more needed)",
                query_count=labeler.query_count,
                partial_states=frozenset(
                    StateVector(b, partition.region_count) for b in finals
                ),
            )
        for child, label in zip(batch, labeler.labels_for(batch)):
            validity[child] = label == reference_label

        next_frontier: list[int] = []
        for parent in frontier:
            valid_kids = [(i, c) for i, c in children[parent] if validity[c]]
            if not valid_kids:
                finals.add(parent)
                continue
            if cfg.beam_size is not None and len(valid_kids) > cfg.beam_size:
                if cfg.candidate_order == "area":
                    valid_kids.sort(key=lambda ic: (-int(areas[ic[0] - 1]), ic[0]))
                valid_kids = valid_kids[: cfg.beam_size]
            for _, child in valid_kids:
                if child not in enqueued:
                    enqueued.add(child)
                    next_frontier.append(child)
        frontier = next_frontier

    return _finish(finals, labeler, partition, reference_label, cfg.beam_size)


def brute_force_final_states(
    partition: RegionPartition,
    model,
    image: np.ndarray | None = None,
    fill: FillPolicy | None = None,
    *,
    max_regions: int = 15,
    cache: PredictionCache | None = None,
    image_id: str | None = None,
) -> FinalStateSet:
    """Exhaustive oracle: evaluate all 2^M states and read the answer off
    the validity lattice.

    A state is final when it is valid, reachable from the all-regions state
    through a chain of valid single-region removals, and has no valid child.
    Independent of :func:`refine`'s frontier bookkeeping, which it verifies.
    """
    m = partition.region_count
    if m > max_regions:
        raise ValueError(f"brute force limited to {max_regions} regions, got {m}")
    if m < 1:
        raise ValueError("partition has no regions")
    labeler = StateLabeler(
        model, partition, image=image, fill=fill, cache=cache, image_id=image_id
    )
    full = (1 << m) - 1
    reference_label = labeler.labels_for([full])[0]

    by_popcount: list[list[int]] = [[] for _ in range(m + 1)]
    for bits in range(full + 1):
        by_popcount[bits.bit_count()].append(bits)

    valid = [False] * (full + 1)
    for count in range(m, -1, -1):
        group = by_popcount[count]
        for bits, label in zip(group, labeler.labels_for(group)):
            valid[bits] = label == reference_label

    reachable = [False] * (full + 1)
    reachable[full] = True
    for count in range(m - 1, -1, -1):
        for bits in by_popcount[count]:
            if not valid[bits]:
                continue
            absent = full & ~bits
            for i in iter_regions(absent):
                if reachable[bits | (1 << (i - 1))]:
                    reachable[bits] = True
                    break

    finals = {
        bits
        for bits in range(full + 1)
        if reachable[bits]
        and not any(valid[bits & ~(1 << (i - 1))] for i in iter_regions(bits))
    }
    return _finish(finals, labeler, partition, reference_label, None)
