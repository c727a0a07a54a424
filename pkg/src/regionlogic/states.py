"""State vectors over region partitions and the final-state sets of refinement.

A state marks, for each of the M regions of a partition, whether the region
is preserved (1) or pruned (0). States are stored as integer bitmasks with
region ``i`` on bit ``i - 1``; region indices are 1-based throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np


def iter_regions(bits: int) -> Iterator[int]:
    """Yield the 1-based region indices set in ``bits``, ascending."""
    while bits:
        low = bits & -bits
        yield low.bit_length()
        bits ^= low


@dataclass(frozen=True)
class StateVector:
    """Boolean vector over M regions, packed into an int bitmask."""

    bits: int
    region_count: int

    def __post_init__(self):
        if self.region_count < 0:
            raise ValueError(f"region_count must be >= 0, got {self.region_count}")
        if not 0 <= self.bits < (1 << self.region_count):
            raise ValueError(
                f"bits 0x{self.bits:x} out of range for {self.region_count} regions"
            )

    @classmethod
    def full(cls, region_count: int) -> StateVector:
        return cls((1 << region_count) - 1, region_count)

    @classmethod
    def empty(cls, region_count: int) -> StateVector:
        return cls(0, region_count)

    @classmethod
    def from_regions(cls, regions: Iterable[int], region_count: int) -> StateVector:
        bits = 0
        for i in regions:
            if not 1 <= i <= region_count:
                raise ValueError(f"region index {i} out of 1..{region_count}")
            bits |= 1 << (i - 1)
        return cls(bits, region_count)

    @classmethod
    def from_bools(cls, values: Iterable[bool]) -> StateVector:
        vals = list(values)
        bits = 0
        for i, v in enumerate(vals):
            if v:
                bits |= 1 << i
        return cls(bits, len(vals))

    @property
    def regions(self) -> tuple[int, ...]:
        """Preserved region indices, 1-based ascending."""
        return tuple(iter_regions(self.bits))

    @property
    def popcount(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, region: int) -> bool:
        return 1 <= region <= self.region_count and bool(self.bits >> (region - 1) & 1)

    def without(self, region: int) -> StateVector:
        """Copy of this state with ``region`` pruned."""
        if region not in self:
            raise ValueError(f"region {region} is not preserved in this state")
        return StateVector(self.bits & ~(1 << (region - 1)), self.region_count)

    def to_bools(self) -> np.ndarray:
        out = np.zeros(self.region_count, dtype=bool)
        for i in iter_regions(self.bits):
            out[i - 1] = True
        return out

    def issuperset(self, other: StateVector) -> bool:
        return (self.bits | other.bits) == self.bits


@dataclass(frozen=True)
class FinalStateSet:
    """Deduplicated locally-minimal valid states found by refinement.

    ``beam_size`` is None for an unlimited (exhaustive-frontier) run.
    """

    states: frozenset[StateVector]
    reference_label: str
    region_count: int
    query_count: int
    beam_size: int | None = None

    def sorted_states(self) -> list[StateVector]:
        """States in a canonical order (lexicographic on region tuples)."""
        return sorted(self.states, key=lambda s: s.regions)

    def to_json_dict(self) -> dict:
        return {
            "reference_label": self.reference_label,
            "beam_size": self.beam_size,
            "query_count": self.query_count,
            "states": [list(s.regions) for s in self.sorted_states()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json_dict(cls, data: dict, region_count: int | None = None) -> FinalStateSet:
        """Rebuild a set from its JSON form.

        The wire format does not carry M; pass ``region_count`` when regions
        may be absent from every state, otherwise the maximum index is used.
        """
        state_lists = data["states"]
        if region_count is None:
            region_count = max((max(s) for s in state_lists if s), default=0)
        states = frozenset(
            StateVector.from_regions(s, region_count) for s in state_lists
        )
        return cls(
            states=states,
            reference_label=data["reference_label"],
            region_count=region_count,
            query_count=data["query_count"],
            beam_size=data["beam_size"],
        )
