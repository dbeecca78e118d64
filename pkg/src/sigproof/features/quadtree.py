"""Quadtree gradient-orientation histograms over the grayscale signature.

The image is split into a two-level quadtree (whole image, 2x2, 4x4 = 21
cells). Each cell contributes a magnitude-weighted Sobel orientation
histogram over [0, 2pi), L2-normalized per cell; blank cells stay zero.
"""

from __future__ import annotations

import numpy as np

from ..config import BINS
from ..corpus import GRAYSCALE, SignatureImage
from ..errors import EmptySignature
from .vector import FeatureVector

TWO_PI = 2.0 * np.pi


def sobel_gradients(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """3x3 Sobel responses (gx along columns, gy along rows), edge-replicated."""
    p = np.pad(pixels, 1, mode="edge")
    gx = ((p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:])
          - (p[:-2, :-2] + 2 * p[1:-1, :-2] + p[2:, :-2]))
    gy = ((p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:])
          - (p[:-2, :-2] + 2 * p[:-2, 1:-1] + p[:-2, 2:]))
    return gx, gy


def _cell_bounds(n: int, parts: int) -> np.ndarray:
    return np.round(np.arange(parts + 1) * n / parts).astype(np.int64)


def _orientation_hist(ori: np.ndarray, mag: np.ndarray, n_bins: int) -> np.ndarray:
    hist = np.zeros(n_bins)
    if ori.size == 0:
        return hist
    idx = np.minimum((ori / (TWO_PI / n_bins)).astype(np.int64), n_bins - 1)
    np.add.at(hist, idx.ravel(), mag.ravel())
    norm = np.sqrt((hist * hist).sum())
    return hist / norm if norm > 0 else hist


def extract_quadtree_gradient(img: SignatureImage) -> FeatureVector:
    if img.kind != GRAYSCALE:
        raise ValueError("quadtree gradient features need a grayscale image")
    if img.pixels.size == 0:
        raise EmptySignature("empty image")

    gx, gy = sobel_gradients(img.pixels)
    mag = np.hypot(gx, gy)
    ori = np.arctan2(gy, gx) % TWO_PI

    h, w = img.pixels.shape
    pieces = []
    for level, n_bins in enumerate(BINS.quadtree_bins):
        parts = 2 ** level
        rb = _cell_bounds(h, parts)
        cb = _cell_bounds(w, parts)
        for i in range(parts):
            for j in range(parts):
                cell = np.s_[rb[i]:rb[i + 1], cb[j]:cb[j + 1]]
                pieces.append(_orientation_hist(ori[cell], mag[cell], n_bins))
    return FeatureVector("qt", np.concatenate(pieces))
