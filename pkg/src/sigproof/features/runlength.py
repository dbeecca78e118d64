"""Run-length histograms of the binary signature in the four main directions.

Stroke widths are measured as ink run lengths along horizontal, vertical,
45 degree and 135 degree scan lines. Each direction gets a 100-bin
histogram (runs longer than 100 fall into the last bin) normalized to sum
one, concatenated in that order.
"""

from __future__ import annotations

import numpy as np

from ..config import BINS
from ..corpus import BINARY, SignatureImage
from ..errors import EmptySignature
from .vector import FeatureVector


def _line_runs(line: np.ndarray) -> np.ndarray:
    """Lengths of maximal runs of True in a 1-D bool array."""
    padded = np.zeros(line.size + 2, dtype=np.int8)
    padded[1:-1] = line
    edges = np.flatnonzero(np.diff(padded))
    return edges[1::2] - edges[0::2]


def _direction_lines(mask: np.ndarray, direction: str):
    h, w = mask.shape
    if direction == "horizontal":
        yield from mask
    elif direction == "vertical":
        yield from mask.T
    elif direction == "diag45":
        flipped = mask[:, ::-1]
        for off in range(-(h - 1), w):
            yield np.diagonal(flipped, offset=off)
    elif direction == "diag135":
        for off in range(-(h - 1), w):
            yield np.diagonal(mask, offset=off)
    else:
        raise ValueError(f"unknown direction {direction!r}")


DIRECTIONS = ("horizontal", "vertical", "diag45", "diag135")


def run_histogram(mask: np.ndarray, direction: str, max_run: int) -> np.ndarray:
    hist = np.zeros(max_run)
    for line in _direction_lines(mask, direction):
        runs = _line_runs(line)
        if runs.size:
            idx = np.minimum(runs, max_run) - 1
            np.add.at(hist, idx, 1.0)
    total = hist.sum()
    return hist / total if total > 0 else hist


def extract_runlength(img: SignatureImage) -> FeatureVector:
    if img.kind != BINARY:
        raise ValueError("run-length features need a binary image")
    mask = img.ink_mask()
    if not mask.any():
        raise EmptySignature("run-length features need at least one ink pixel")
    hists = [run_histogram(mask, d, BINS.max_run) for d in DIRECTIONS]
    return FeatureVector("rl", np.concatenate(hists))
