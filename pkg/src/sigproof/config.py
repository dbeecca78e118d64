"""Feature-channel dimensions and the binning configuration behind them.

The channel dimensions are the package-wide contract; ``feature_bins.json``
is the checked-in recipe that must add up to them. The totals are verified
at import time so a drifted configuration fails loudly instead of silently
emitting vectors of the wrong length.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

# Fixed output dimension per explainable channel.
CHANNEL_DIMS = {
    "g": 445,
    "qt": 200,
    "rl": 400,
    "t1": 765,
    "t2": 255,
    "t3": 168,
    "t4": 167,
}

EXPLAINABLE_CHANNELS = tuple(CHANNEL_DIMS)

# Score-fusion weights for the explainable channels; the textural share is
# split equally across t1-t4.
DEFAULT_WEIGHTS = {
    "g": 0.10,
    "qt": 0.75,
    "rl": 0.05,
    "t1": 0.025,
    "t2": 0.025,
    "t3": 0.025,
    "t4": 0.025,
}

# Preset for externally ingested deep-feature channels named ext:d1..ext:d4.
DL_WEIGHTS = {
    "ext:d1": 0.5,
    "ext:d2": 0.25,
    "ext:d3": 0.15,
    "ext:d4": 0.1,
}


def is_external(channel: str) -> bool:
    return channel.startswith("ext:")


def known_dim(channel: str) -> int | None:
    """Declared dimension for built-in channels, None for ext:* channels."""
    return CHANNEL_DIMS.get(channel)


@dataclass(frozen=True)
class FeatureBins:
    """Bin counts for every extractor, loaded from feature_bins.json."""

    canvas: int
    envelope_bins: int
    radial_bins: int
    shape_scalars: int
    quadtree_bins: tuple[int, int, int]
    max_run: int
    lbp_thresholds: tuple[float, ...]
    codes_per_plane: int
    ldp_codes: int
    dct_keep_lbp: int
    dct_keep_ldp: int
    ink_halo_px: int

    def check(self) -> None:
        g = 2 * self.envelope_bins + self.radial_bins + self.shape_scalars
        if g != CHANNEL_DIMS["g"]:
            raise ValueError(f"geometrical bins sum to {g}, expected {CHANNEL_DIMS['g']}")
        b0, b1, b2 = self.quadtree_bins
        qt = b0 + 4 * b1 + 16 * b2
        if qt != CHANNEL_DIMS["qt"]:
            raise ValueError(f"quadtree bins sum to {qt}, expected {CHANNEL_DIMS['qt']}")
        if 4 * self.max_run != CHANNEL_DIMS["rl"]:
            raise ValueError(f"run-length bins sum to {4 * self.max_run}, expected {CHANNEL_DIMS['rl']}")
        t1 = len(self.lbp_thresholds) * self.codes_per_plane
        if t1 != CHANNEL_DIMS["t1"]:
            raise ValueError(f"LBP bins sum to {t1}, expected {CHANNEL_DIMS['t1']}")
        if self.ldp_codes != CHANNEL_DIMS["t2"]:
            raise ValueError(f"LDP bins are {self.ldp_codes}, expected {CHANNEL_DIMS['t2']}")
        if self.dct_keep_lbp != CHANNEL_DIMS["t3"] or self.dct_keep_lbp > t1:
            raise ValueError("DCT coefficient count for t3 is inconsistent")
        if self.dct_keep_ldp != CHANNEL_DIMS["t4"] or self.dct_keep_ldp > self.ldp_codes:
            raise ValueError("DCT coefficient count for t4 is inconsistent")


def _load_bins() -> FeatureBins:
    raw = json.loads((Path(__file__).parent / "feature_bins.json").read_text())
    bins = FeatureBins(
        canvas=int(raw["canvas"]),
        envelope_bins=int(raw["geometrical"]["envelope_bins"]),
        radial_bins=int(raw["geometrical"]["radial_bins"]),
        shape_scalars=int(raw["geometrical"]["shape_scalars"]),
        quadtree_bins=tuple(int(b) for b in raw["quadtree"]["orientation_bins_per_level"]),
        max_run=int(raw["runlength"]["max_run"]),
        lbp_thresholds=tuple(float(t) for t in raw["textural"]["lbp_plane_thresholds"]),
        codes_per_plane=int(raw["textural"]["codes_per_plane"]),
        ldp_codes=int(raw["textural"]["ldp_codes"]),
        dct_keep_lbp=int(raw["textural"]["dct_keep_lbp"]),
        dct_keep_ldp=int(raw["textural"]["dct_keep_ldp"]),
        ink_halo_px=int(raw["textural"]["ink_halo_px"]),
    )
    bins.check()
    return bins


BINS = _load_bins()
DEFAULT_CANVAS = BINS.canvas
