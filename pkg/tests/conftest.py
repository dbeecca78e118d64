import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sigproof.config import EXPLAINABLE_CHANNELS
from sigproof.corpus import scan_manifest
from sigproof.evaluation import FeatureStore
from sigproof.features import FeatureSet, FeatureVector
from sigproof.pipeline import extract_manifest
from sigproof.synth import toy_corpus
from sigproof.ubm import UniverseModel, build_ubm


def ext_set(writer: str, specimen: int, values, label: str = "genuine",
            channel: str = "ext:toy") -> FeatureSet:
    """1-D (or n-D) external-channel feature set for hand-computed worlds."""
    fs = FeatureSet(writer_id=writer, specimen_index=specimen, label=label)
    fs.add(FeatureVector(channel, np.atleast_1d(np.asarray(values, dtype=float))))
    return fs


@dataclass(frozen=True)
class ToyWorld:
    root: Path
    store: FeatureStore
    ubm: UniverseModel
    eval_manifest: Path
    ubm_manifest: Path
    eval_sets: list
    ubm_sets: list


@pytest.fixture(scope="session")
def toy(tmp_path_factory) -> ToyWorld:
    root = tmp_path_factory.mktemp("toycorpus")
    corpus = toy_corpus(root, n_writers=3, n_genuine=4, n_forgeries=2,
                        n_ubm_writers=6, seed=7)
    eval_manifest = scan_manifest(corpus.eval_manifest, "flat-json")
    ubm_manifest = scan_manifest(corpus.ubm_manifest, "flat-json")
    eval_sets = extract_manifest(eval_manifest, EXPLAINABLE_CHANNELS)
    ubm_sets = extract_manifest(ubm_manifest, EXPLAINABLE_CHANNELS)
    return ToyWorld(
        root=root,
        store=FeatureStore(eval_sets, name="toy"),
        ubm=build_ubm(ubm_sets, n=6, provenance="toy-ubm"),
        eval_manifest=corpus.eval_manifest,
        ubm_manifest=corpus.ubm_manifest,
        eval_sets=eval_sets,
        ubm_sets=ubm_sets,
    )
