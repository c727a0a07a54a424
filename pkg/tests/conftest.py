"""Shared fixtures: tiny partitions, painted images, PNG writers."""

import numpy as np
import pytest
from PIL import Image

from regionlogic import partition_from_labels


def strip_partition(widths):
    """Partition of a 1-row image: region i spans widths[i-1] pixels."""
    labels = np.repeat(
        np.arange(1, len(widths) + 1, dtype=np.int32), list(widths)
    ).reshape(1, -1)
    return partition_from_labels(labels)


def grid_labels(rows, cols, cell=4):
    """(rows*cell x cols*cell) label map of rows*cols square regions."""
    tiles = np.arange(1, rows * cols + 1, dtype=np.int32).reshape(rows, cols)
    return np.kron(tiles, np.ones((cell, cell), dtype=np.int32))


def paint_regions(partition, colors=None, rng=None):
    """RGB image with each region in a solid distinct color (never mid-gray)."""
    m = partition.region_count
    if colors is None:
        rng = rng or np.random.default_rng(7)
        colors = []
        while len(colors) < m:
            c = tuple(int(v) for v in rng.integers(0, 256, size=3))
            if c != (128, 128, 128) and c not in colors:
                colors.append(c)
    img = np.zeros((*partition.labels.shape, 3), dtype=np.uint8)
    for i in range(1, m + 1):
        img[partition.labels == i] = colors[i - 1]
    return img


def write_label_png(path, labels):
    Image.fromarray(np.asarray(labels, dtype=np.uint16)).save(path, format="PNG")
    return path


def write_mask_png(path, mask):
    arr = np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")
    return path


def write_rgb_png(path, image):
    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="RGB").save(path, format="PNG")
    return path


@pytest.fixture
def quad_partition():
    """Four equal 4x8 regions in a 8x16 image."""
    return partition_from_labels(grid_labels(2, 2, cell=4).repeat(2, axis=1))
