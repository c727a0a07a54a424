"""Numpy fallback for the compiled pixel kernels (same signatures)."""

import numpy as np


def compose_fill(image, labels, keep, fill_r, fill_g, fill_b):
    """Copy pixels whose label is kept, substitute the fill color elsewhere."""
    keep_px = keep.view(bool)[labels]
    out = np.empty_like(image)
    out[...] = np.array([fill_r, fill_g, fill_b], dtype=np.uint8)
    out[keep_px] = image[keep_px]
    return out


def label_histogram(labels, n_labels):
    """Pixel counts per label value 0..n_labels."""
    return np.bincount(labels.ravel(), minlength=n_labels + 1).astype(np.int64)


def masked_label_histogram(labels, mask, n_labels):
    """Pixel counts per label value 0..n_labels, restricted to mask != 0."""
    return np.bincount(labels[mask.view(bool)], minlength=n_labels + 1).astype(np.int64)
