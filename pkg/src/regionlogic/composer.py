"""Composing pruned images: preserved regions keep their pixels, pruned
regions take a fill color (a constant or the per-image mean)."""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import kernels
from .errors import DimensionMismatchError
from .regions import RegionPartition
from .states import StateVector, iter_regions

DEFAULT_GRAY = (128, 128, 128)


@dataclass(frozen=True)
class FillPolicy:
    """Pixel values substituted into pruned regions.

    ``constant`` uses ``color``; ``mean`` uses the arithmetic mean color of
    the full original image (rounded per channel). The choice can shift what
    a model predicts on pruned images, so reports record it.
    """

    mode: str = "constant"
    color: tuple[int, int, int] = DEFAULT_GRAY

    def __post_init__(self):
        if self.mode not in ("constant", "mean"):
            raise ValueError(f"fill mode must be 'constant' or 'mean', got {self.mode!r}")
        if len(self.color) != 3 or not all(0 <= c <= 255 for c in self.color):
            raise ValueError(f"fill color channels must be in 0..255, got {self.color}")

    @classmethod
    def gray(cls) -> FillPolicy:
        return cls()

    @classmethod
    def mean(cls) -> FillPolicy:
        return cls(mode="mean")

    @classmethod
    def constant(cls, color: tuple[int, int, int]) -> FillPolicy:
        return cls(mode="constant", color=tuple(int(c) for c in color))

    @classmethod
    def from_spec(cls, spec: str) -> FillPolicy:
        """Parse ``gray``, ``mean``, or ``#RRGGBB``."""
        if spec == "gray":
            return cls.gray()
        if spec == "mean":
            return cls.mean()
        if spec.startswith("#") and len(spec) == 7:
            try:
                rgb = tuple(int(spec[i : i + 2], 16) for i in (1, 3, 5))
            except ValueError as exc:
                raise ValueError(f"invalid fill spec {spec!r}") from exc
            return cls.constant(rgb)
        raise ValueError(f"invalid fill spec {spec!r} (expected gray|mean|#RRGGBB)")

    def spec_string(self) -> str:
        """Canonical spec text, recorded in reports for reproducibility."""
        if self.mode == "mean":
            return "mean"
        return "#{:02x}{:02x}{:02x}".format(*self.color)

    def resolve_color(self, image: np.ndarray) -> tuple[int, int, int]:
        if self.mode == "mean":
            return mean_color(image)
        return self.color


def mean_color(image: np.ndarray) -> tuple[int, int, int]:
    """Per-channel arithmetic mean of an RGB image, rounded to uint8."""
    mean = image.reshape(-1, 3).mean(axis=0)
    return tuple(int(v) for v in np.clip(np.rint(mean), 0, 255).astype(np.uint8))


def _check_image(image: np.ndarray) -> np.ndarray:
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise ValueError(
            f"expected uint8 RGB image of shape (H, W, 3), got {image.dtype} {image.shape}"
        )
    return np.ascontiguousarray(image)


def compose(
    image: np.ndarray,
    partition: RegionPartition,
    state: StateVector,
    fill: FillPolicy | None = None,
) -> np.ndarray:
    """Return the image with the regions pruned by ``state`` filled in.

    Pixels of preserved regions (and any unsegmented pixels) are bit-identical
    to the input; exactly the pruned regions' pixels change.
    """
    image = _check_image(image)
    if image.shape[:2] != partition.labels.shape:
        raise DimensionMismatchError(
            f"image is {image.shape[:2]}, partition is {partition.labels.shape}"
        )
    if state.region_count != partition.region_count:
        raise DimensionMismatchError(
            f"state covers {state.region_count} regions, partition has {partition.region_count}"
        )
    fill = fill or FillPolicy.gray()
    keep = np.zeros(partition.region_count + 1, dtype=np.uint8)
    keep[0] = 1  # unsegmented pixels belong to no region and pass through
    for i in iter_regions(state.bits):
        keep[i] = 1
    r, g, b = fill.resolve_color(image)
    return kernels.compose_fill(image, partition.labels, keep, r, g, b)


def load_image(path: str | Path) -> np.ndarray:
    """Read an image file as uint8 RGB."""
    with Image.open(path) as img:
        return np.ascontiguousarray(np.asarray(img.convert("RGB"), dtype=np.uint8))


def image_to_png(image: np.ndarray) -> bytes:
    """Serialize a uint8 RGB array as PNG bytes (the transport format)."""
    buf = io.BytesIO()
    Image.fromarray(_check_image(image), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def png_to_image(data: bytes) -> np.ndarray:
    """Decode PNG bytes into a uint8 RGB array."""
    with Image.open(io.BytesIO(data)) as img:
        return np.ascontiguousarray(np.asarray(img.convert("RGB"), dtype=np.uint8))
