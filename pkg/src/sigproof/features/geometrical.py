"""Geometrical contour features of the binary signature shape.

The 445 values are the concatenation of upper/lower envelope heights over
fixed column bins, centroid-relative radial contour distances over fixed
angular bins, and a handful of global shape scalars. All pieces are
computed on the tight ink bounding box, making the vector invariant to
where the signature sits on its canvas.
"""

from __future__ import annotations

import numpy as np

from ..config import BINS
from ..corpus import BINARY, SignatureImage
from ..errors import EmptySignature
from .vector import FeatureVector

TWO_PI = 2.0 * np.pi


def _envelopes(mask: np.ndarray, n_bins: int) -> tuple[np.ndarray, np.ndarray]:
    h, w = mask.shape
    denom = max(h - 1, 1)
    any_col = mask.any(axis=0)
    top = np.where(any_col, mask.argmax(axis=0), 0)
    bottom = np.where(any_col, h - 1 - mask[::-1].argmax(axis=0), 0)
    upper = np.zeros(n_bins)
    lower = np.zeros(n_bins)
    edges = (np.arange(n_bins + 1) * w) // n_bins
    for k in range(n_bins):
        lo, hi = edges[k], edges[k + 1]
        if hi <= lo:
            continue
        sel = any_col[lo:hi]
        if not sel.any():
            continue
        upper[k] = (h - 1 - top[lo:hi][sel].min()) / denom
        lower[k] = (h - 1 - bottom[lo:hi][sel].max()) / denom
    return upper, lower


def _radial(mask: np.ndarray, n_bins: int) -> tuple[np.ndarray, np.ndarray]:
    ys, xs = np.nonzero(mask)
    cy = ys.mean()
    cx = xs.mean()
    dy = -(ys - cy)  # y axis points up
    dx = xs - cx
    dist = np.hypot(dy, dx)
    ang = np.arctan2(dy, dx) % TWO_PI
    idx = np.minimum((ang / (TWO_PI / n_bins)).astype(np.int64), n_bins - 1)
    radial = np.zeros(n_bins)
    np.maximum.at(radial, idx, dist)
    return radial, np.array([cy, cx])


def extract_geometrical(img: SignatureImage) -> FeatureVector:
    if img.kind != BINARY:
        raise ValueError("geometrical features need a binary image")
    mask = img.ink_mask()
    if not mask.any():
        raise EmptySignature("geometrical features need at least one ink pixel")

    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    mask = mask[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]
    h, w = mask.shape

    upper, lower = _envelopes(mask, BINS.envelope_bins)
    radial, (cy, cx) = _radial(mask, BINS.radial_bins)

    half_diag = 0.5 * np.hypot(h - 1, w - 1)
    scalars = np.array([
        mask.mean(),                              # ink density in the bbox
        w / h,                                    # aspect ratio
        cx / max(w - 1, 1),                       # centroid, normalized
        cy / max(h - 1, 1),
        upper.mean(),
        upper.std(),
        lower.mean(),
        lower.std(),
        radial.mean() / half_diag if half_diag > 0 else 0.0,
    ])
    return FeatureVector("g", np.concatenate([upper, lower, radial, scalars]))
