"""Explainable feature channels and the exchange format for external ones."""

from __future__ import annotations

from ..corpus import Preprocessed
from .exchange import (dump_feature_sets, feature_set_records, ingest_external,
                       iter_records, load_feature_sets)
from .geometrical import extract_geometrical
from .quadtree import extract_quadtree_gradient
from .runlength import extract_runlength
from .textural import extract_textural
from .vector import FeatureSet, FeatureVector, stack

__all__ = [
    "FeatureSet", "FeatureVector", "stack",
    "extract_geometrical", "extract_quadtree_gradient", "extract_runlength",
    "extract_textural", "extract_features",
    "ingest_external", "load_feature_sets", "dump_feature_sets",
    "feature_set_records", "iter_records",
]

_TEXTURAL = ("t1", "t2", "t3", "t4")


def extract_features(pre: Preprocessed, channels) -> FeatureSet:
    """Run the requested explainable extractors on one preprocessed specimen."""
    src = pre.binary
    fs = FeatureSet(writer_id=src.writer_id, specimen_index=src.specimen_index,
                    label=src.label)
    wanted = tuple(channels)
    if "g" in wanted:
        fs.add(extract_geometrical(pre.binary))
    if "qt" in wanted:
        fs.add(extract_quadtree_gradient(pre.gray))
    if any(ch in wanted for ch in _TEXTURAL):
        for vec in extract_textural(pre.gray):
            if vec.channel in wanted:
                fs.add(vec)
    if "rl" in wanted:
        fs.add(extract_runlength(pre.binary))
    return fs
