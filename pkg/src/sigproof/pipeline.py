"""Manifest-to-features pipeline with an optional process pool.

Extraction is pure per specimen, so parallel runs produce the same record
order as serial ones (results are collected in manifest order).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from .config import DEFAULT_CANVAS, EXPLAINABLE_CHANNELS
from .corpus import CorpusManifest, ManifestEntry, load_entry_image, preprocess
from .features import FeatureSet, extract_features

CHANNEL_GROUPS = {"t": ("t1", "t2", "t3", "t4"), "all": EXPLAINABLE_CHANNELS}


def parse_channels(spec: str) -> tuple[str, ...]:
    """Expand a CLI channel list like "g,qt,rl,t" into concrete channels."""
    out: list[str] = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        for ch in CHANNEL_GROUPS.get(token, (token,)):
            if ch not in out:
                out.append(ch)
    return tuple(out)


def extract_entry(entry: ManifestEntry, channels: Sequence[str],
                  canvas: int = DEFAULT_CANVAS, invert: bool = False) -> FeatureSet:
    image = load_entry_image(entry, invert=invert)
    return extract_features(preprocess(image, canvas=canvas), channels)


_WORK: dict = {}


def _init(channels, canvas, invert):
    _WORK["args"] = (tuple(channels), canvas, invert)


def _run(entry: ManifestEntry) -> FeatureSet:
    channels, canvas, invert = _WORK["args"]
    return extract_entry(entry, channels, canvas=canvas, invert=invert)


def extract_manifest(manifest: CorpusManifest, channels: Sequence[str],
                     canvas: int = DEFAULT_CANVAS, invert: bool = False,
                     jobs: int = 1) -> list[FeatureSet]:
    """Extract every manifest entry, in manifest order."""
    channels = tuple(channels)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init,
                                 initargs=(channels, canvas, invert)) as pool:
            return list(pool.map(_run, manifest.entries, chunksize=4))
    return [extract_entry(e, channels, canvas=canvas, invert=invert)
            for e in manifest.entries]
