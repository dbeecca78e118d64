"""Textural features: local binary / derivative patterns plus their DCT.

Codes are collected only near the ink (a 2 px halo around the Otsu mask),
since the texture of interest is how the ink sits on the paper. Each
8-neighbor code plane keeps bins 0..254; the all-ones code 255 (a strictly
brighter ring, i.e. an inverted blob) is dropped. Three gray-level
difference thresholds give the 3 x 255 = 765 LBP histogram; the
second-order derivative pattern gives 255 more; both are normalized to sum
one and the leading orthonormal DCT-II coefficients form the last two
channels.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage
from scipy.fft import dct

from ..config import BINS
from ..corpus import GRAYSCALE, SignatureImage, otsu_threshold_index
from ..errors import EmptySignature
from .vector import FeatureVector

# 8-neighborhood in fixed bit order, top-left then clockwise.
NEIGHBOR_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, 1),
                    (1, 1), (1, 0), (1, -1), (0, -1))


def _shifted(padded: np.ndarray, dr: int, dc: int, h: int, w: int) -> np.ndarray:
    return padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]


def _ink_halo(pixels: np.ndarray, halo: int) -> np.ndarray:
    k = otsu_threshold_index(pixels)
    if k is None:
        return np.ones(pixels.shape, dtype=bool)
    bin_index = np.minimum((pixels * 256.0).astype(np.int64), 255)
    ink = bin_index <= k
    size = 2 * halo + 1
    return ndimage.binary_dilation(ink, structure=np.ones((size, size), dtype=bool))


def _code_histogram(codes: np.ndarray, mask: np.ndarray, n_bins: int) -> np.ndarray:
    counts = np.bincount(codes[mask].ravel(), minlength=n_bins + 1)
    return counts[:n_bins].astype(np.float64)


def _lbp_codes(pixels: np.ndarray, threshold: float) -> np.ndarray:
    h, w = pixels.shape
    padded = np.pad(pixels, 1, mode="edge")
    codes = np.zeros((h, w), dtype=np.int64)
    for bit, (dr, dc) in enumerate(NEIGHBOR_OFFSETS):
        codes |= ((_shifted(padded, dr, dc, h, w) - pixels) > threshold) << bit
    return codes


def _ldp_codes(pixels: np.ndarray) -> np.ndarray:
    h, w = pixels.shape
    padded = np.pad(pixels, 1, mode="edge")
    # first derivative along the scan direction; zero at the right edge
    deriv = _shifted(padded, 0, 1, h, w) - pixels
    dpad = np.pad(deriv, 1, mode="edge")
    codes = np.zeros((h, w), dtype=np.int64)
    for bit, (dr, dc) in enumerate(NEIGHBOR_OFFSETS):
        codes |= ((_shifted(dpad, dr, dc, h, w) * deriv) > 0) << bit
    return codes


def _normalized(hist: np.ndarray) -> np.ndarray:
    total = hist.sum()
    return hist / total if total > 0 else hist


def extract_textural(img: SignatureImage) -> tuple[FeatureVector, FeatureVector,
                                                   FeatureVector, FeatureVector]:
    if img.kind != GRAYSCALE:
        raise ValueError("textural features need a grayscale image")
    if img.pixels.size == 0:
        raise EmptySignature("empty image")

    mask = _ink_halo(img.pixels, BINS.ink_halo_px)
    n = BINS.codes_per_plane

    planes = [_code_histogram(_lbp_codes(img.pixels, thr), mask, n)
              for thr in BINS.lbp_thresholds]
    t1 = _normalized(np.concatenate(planes))
    t2 = _normalized(_code_histogram(_ldp_codes(img.pixels), mask, BINS.ldp_codes))

    t3 = dct(t1, type=2, norm="ortho")[:BINS.dct_keep_lbp]
    t4 = dct(t2, type=2, norm="ortho")[:BINS.dct_keep_ldp]
    return (FeatureVector("t1", t1), FeatureVector("t2", t2),
            FeatureVector("t3", t3), FeatureVector("t4", t4))
