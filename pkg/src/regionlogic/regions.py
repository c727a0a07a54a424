"""Region partitions: label-map ingestion, small-region merging, ground truth.

A partition assigns every pixel a region label 1..M (0 marks pixels the
segmenter left uncovered; merging folds them into a catch-all region so the
partition becomes total). Areas are tracked both as pixel counts and as
fractions of the image, the unit all downstream metrics use.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import kernels
from .errors import DimensionMismatchError, GroundTruthError, LabelMapError
from .states import StateVector

_SINGLE_CHANNEL_MODES = ("L", "I", "I;16", "I;16B", "I;16L", "I;16N")


@dataclass(frozen=True, eq=False)
class RegionPartition:
    """Per-pixel region labeling plus per-region area accounting.

    ``labels`` holds values in 0..region_count where 0 means unsegmented;
    after :func:`merge_small_regions` no pixel is 0. ``areas[i - 1]`` is the
    pixel count of region i; ``merged_region`` names the catch-all region a
    merge created, if any. Instances are immutable and safe to share.
    """

    labels: np.ndarray
    region_count: int
    areas: np.ndarray
    area_fractions: np.ndarray
    merged_region: int | None = None

    def __post_init__(self):
        self.labels.setflags(write=False)
        self.areas.setflags(write=False)
        self.area_fractions.setflags(write=False)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def pixel_count(self) -> int:
        return self.labels.size

    @property
    def unsegmented_pixels(self) -> int:
        return self.pixel_count - int(self.areas.sum())

    def region_mask(self, region: int) -> np.ndarray:
        """Boolean mask of region ``region`` (1-based)."""
        if not 1 <= region <= self.region_count:
            raise ValueError(f"region {region} out of 1..{self.region_count}")
        return self.labels == region

    def state_fraction(self, state: StateVector) -> float:
        """Summed area fraction of the regions preserved in ``state``."""
        if state.region_count != self.region_count:
            raise DimensionMismatchError(
                f"state covers {state.region_count} regions, partition has {self.region_count}"
            )
        return float(sum(self.area_fractions[i - 1] for i in state.regions))


def partition_from_labels(labels_like) -> RegionPartition:
    """Build a partition from an integer label array.

    Nonzero labels are renumbered to contiguous 1..M in order of first
    appearance (row-major); 0 stays 0.
    """
    arr = np.asarray(labels_like)
    if arr.ndim != 2:
        raise LabelMapError(f"label map must be single-channel 2-D, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise LabelMapError(f"label map must be integer-valued, got dtype {arr.dtype}")
    if arr.size == 0:
        raise LabelMapError("label map is empty")
    if arr.min() < 0:
        raise LabelMapError("label map contains negative values")

    flat = arr.ravel()
    uniq, first = np.unique(flat, return_index=True)
    order = uniq[np.argsort(first)]
    order = order[order != 0]
    region_count = len(order)
    if region_count == 0:
        raise LabelMapError("label map contains no regions (all pixels are 0)")

    lut = np.zeros(int(uniq.max()) + 1, dtype=np.int32)
    lut[order] = np.arange(1, region_count + 1, dtype=np.int32)
    normalized = np.ascontiguousarray(lut[flat].reshape(arr.shape))

    counts = kernels.label_histogram(normalized, region_count)
    areas = counts[1:].copy()
    fractions = areas / float(arr.size)
    return RegionPartition(
        labels=normalized,
        region_count=region_count,
        areas=areas,
        area_fractions=fractions,
    )


def load_label_map(path: str | Path) -> RegionPartition:
    """Read a single-channel 16-bit PNG label map (0 = unsegmented)."""
    try:
        with Image.open(path) as img:
            mode = img.mode
            arr = np.asarray(img)
    except (OSError, UnidentifiedImageError) as exc:
        raise LabelMapError(f"cannot read label map {path}: {exc}") from exc
    if mode not in _SINGLE_CHANNEL_MODES:
        raise LabelMapError(
            f"label map {path} must be single-channel integer (got mode {mode!r})"
        )
    return partition_from_labels(arr.astype(np.int64))


@dataclass(frozen=True, eq=False)
class GroundTruthMaskSet:
    """Binary per-pixel masks marking ground-truth content, one per instance."""

    masks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.masks:
            raise GroundTruthError("at least one ground-truth mask is required")
        shape = self.masks[0].shape
        for m in self.masks:
            if m.ndim != 2 or m.dtype != np.bool_:
                raise GroundTruthError("ground-truth masks must be 2-D boolean arrays")
            if m.shape != shape:
                raise DimensionMismatchError("ground-truth masks differ in shape")
            m.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.masks[0].shape


def load_ground_truth_masks(paths: Sequence[str | Path]) -> GroundTruthMaskSet:
    """Read ground-truth masks from PNG files.

    8-bit files contribute one mask each (nonzero = foreground); 16-bit label
    maps contribute one mask per distinct nonzero value, ascending.
    """
    if not paths:
        raise GroundTruthError("at least one ground-truth mask file is required")
    masks: list[np.ndarray] = []
    for path in paths:
        try:
            with Image.open(path) as img:
                mode = img.mode
                arr = np.asarray(img)
        except (OSError, UnidentifiedImageError) as exc:
            raise GroundTruthError(f"cannot read mask {path}: {exc}") from exc
        if mode == "L":
            masks.append(arr > 0)
        elif mode in _SINGLE_CHANNEL_MODES:
            for value in np.unique(arr):
                if value != 0:
                    masks.append(arr == value)
        else:
            raise GroundTruthError(
                f"mask {path} must be single-channel (got mode {mode!r})"
            )
    if not masks:
        raise GroundTruthError("mask files contain no foreground")
    return GroundTruthMaskSet(tuple(np.ascontiguousarray(m) for m in masks))


def merge_small_regions(
    partition: RegionPartition, min_area_fraction: float = 1e-3
) -> RegionPartition:
    """Fold sub-threshold regions and all unsegmented pixels into one region.

    The merged region gets the highest index so surviving regions keep their
    relative order. When nothing needs merging the partition is returned
    unchanged; otherwise every pixel of the result carries a nonzero label.
    """
    if not 0 <= min_area_fraction < 1:
        raise ValueError(f"min_area_fraction must be in [0, 1), got {min_area_fraction}")

    small = {
        i
        for i in range(1, partition.region_count + 1)
        if partition.area_fractions[i - 1] < min_area_fraction
    }
    if not small and partition.unsegmented_pixels == 0:
        return partition

    survivors = [i for i in range(1, partition.region_count + 1) if i not in small]
    merged_index = len(survivors) + 1
    lut = np.full(partition.region_count + 1, merged_index, dtype=np.int32)
    for new, old in enumerate(survivors, start=1):
        lut[old] = new

    labels = np.ascontiguousarray(lut[partition.labels])
    counts = kernels.label_histogram(labels, merged_index)
    areas = counts[1:].copy()
    return RegionPartition(
        labels=labels,
        region_count=merged_index,
        areas=areas,
        area_fractions=areas / float(partition.pixel_count),
        merged_region=merged_index,
    )


def ground_truth_state(
    partition: RegionPartition,
    ground_truth: GroundTruthMaskSet | Iterable[np.ndarray],
    iou_threshold: float = 0.7,
) -> StateVector:
    """Regions matching any ground-truth mask at IoU >= threshold.

    May be all-zero when nothing clears the threshold; downstream metrics then
    report zero precision/recall with a flag rather than failing.
    """
    if not 0 < iou_threshold <= 1:
        raise ValueError(f"iou_threshold must be in (0, 1], got {iou_threshold}")
    if not isinstance(ground_truth, GroundTruthMaskSet):
        ground_truth = GroundTruthMaskSet(
            tuple(np.ascontiguousarray(np.asarray(m, dtype=bool)) for m in ground_truth)
        )
    if ground_truth.shape != partition.labels.shape:
        raise DimensionMismatchError(
            f"masks are {ground_truth.shape}, partition is {partition.labels.shape}"
        )

    bits = 0
    areas = partition.areas
    for mask in ground_truth.masks:
        inter = kernels.masked_label_histogram(
            partition.labels, mask.view(np.uint8), partition.region_count
        )[1:]
        union = areas + int(mask.sum()) - inter
        iou = inter / union
        for i in np.nonzero(iou >= iou_threshold)[0]:
            bits |= 1 << int(i)
    return StateVector(bits, partition.region_count)
