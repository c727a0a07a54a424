"""Focus overlay rendering.

Regions preserved in every final state are tinted red, regions preserved in
some but not all are tinted white, and everything else is dimmed. Blend
values are fixed so overlays are reproducible byte-for-byte.
"""

from __future__ import annotations

import numpy as np

from .composer import _check_image
from .errors import DimensionMismatchError
from .regions import RegionPartition
from .states import FinalStateSet

SHARED_TINT = (255, 0, 0)
PARTIAL_TINT = (255, 255, 255)
TINT_ALPHA = 0.45
DIM_FACTOR = 0.35

_NONE, _SHARED, _PARTIAL = 0, 1, 2


def render_overlay(
    image: np.ndarray, partition: RegionPartition, final_states: FinalStateSet
) -> np.ndarray:
    """Blend the focus categories over the image; returns a fresh uint8 array."""
    image = _check_image(image)
    if image.shape[:2] != partition.labels.shape:
        raise DimensionMismatchError(
            f"image is {image.shape[:2]}, partition is {partition.labels.shape}"
        )
    if final_states.region_count != partition.region_count:
        raise DimensionMismatchError("final states and partition disagree on region count")

    shared = ~0
    union = 0
    for state in final_states.states:
        shared &= state.bits
        union |= state.bits

    category = np.zeros(partition.region_count + 1, dtype=np.uint8)
    for i in range(1, partition.region_count + 1):
        bit = 1 << (i - 1)
        if shared & bit:
            category[i] = _SHARED
        elif union & bit:
            category[i] = _PARTIAL
    per_pixel = category[partition.labels]

    out = image.astype(np.float64) * DIM_FACTOR
    for cat, tint in ((_SHARED, SHARED_TINT), (_PARTIAL, PARTIAL_TINT)):
        mask = per_pixel == cat
        blend = image[mask].astype(np.float64) * (1 - TINT_ALPHA) + np.array(tint) * TINT_ALPHA
        out[mask] = blend
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)
