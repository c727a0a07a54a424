# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled pixel kernels: region-masked fill and label histograms.

Same signatures as regionlogic._kernels_py; regionlogic.kernels picks one
implementation at import time.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def compose_fill(const cnp.uint8_t[:, :, ::1] image,
                 const cnp.int32_t[:, ::1] labels,
                 const cnp.uint8_t[::1] keep,
                 int fill_r, int fill_g, int fill_b):
    """Copy pixels whose label is kept, substitute the fill color elsewhere.

    ``keep`` has one slot per label value 0..M (slot 0 covers unsegmented
    pixels, which callers normally keep).
    """
    cdef Py_ssize_t h = image.shape[0]
    cdef Py_ssize_t w = image.shape[1]
    out_arr = np.empty((h, w, 3), dtype=np.uint8)
    cdef cnp.uint8_t[:, :, ::1] out = out_arr
    cdef cnp.uint8_t fr = <cnp.uint8_t> fill_r
    cdef cnp.uint8_t fg = <cnp.uint8_t> fill_g
    cdef cnp.uint8_t fb = <cnp.uint8_t> fill_b
    cdef Py_ssize_t y, x
    cdef cnp.int32_t lab
    for y in range(h):
        for x in range(w):
            lab = labels[y, x]
            if keep[lab]:
                out[y, x, 0] = image[y, x, 0]
                out[y, x, 1] = image[y, x, 1]
                out[y, x, 2] = image[y, x, 2]
            else:
                out[y, x, 0] = fr
                out[y, x, 1] = fg
                out[y, x, 2] = fb
    return out_arr


def label_histogram(const cnp.int32_t[:, ::1] labels, Py_ssize_t n_labels):
    """Pixel counts per label value 0..n_labels."""
    counts_arr = np.zeros(n_labels + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef Py_ssize_t h = labels.shape[0]
    cdef Py_ssize_t w = labels.shape[1]
    cdef Py_ssize_t y, x
    for y in range(h):
        for x in range(w):
            counts[labels[y, x]] += 1
    return counts_arr


def masked_label_histogram(const cnp.int32_t[:, ::1] labels,
                           const cnp.uint8_t[:, ::1] mask,
                           Py_ssize_t n_labels):
    """Pixel counts per label value 0..n_labels, restricted to mask != 0."""
    counts_arr = np.zeros(n_labels + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef Py_ssize_t h = labels.shape[0]
    cdef Py_ssize_t w = labels.shape[1]
    cdef Py_ssize_t y, x
    for y in range(h):
        for x in range(w):
            if mask[y, x]:
                counts[labels[y, x]] += 1
    return counts_arr
