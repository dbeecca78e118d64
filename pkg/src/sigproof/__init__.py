"""sigproof: explainable offline signature verification.

A questioned signature is compared against a reference set and a universal
background model of third-party signatures, using handcrafted feature
channels and simple distances; the output is likelihood-ratio evidence
with per-channel membership probabilities, plus an EER evaluation harness.
"""

from .config import (CHANNEL_DIMS, DEFAULT_CANVAS, DEFAULT_WEIGHTS,
                     EXPLAINABLE_CHANNELS)
from .corpus import (CorpusManifest, ManifestEntry, SignatureImage, binarize,
                     crop_normalize, load_image, preprocess, scan_manifest)
from .distances import (METRICS, cosine_distance, distance, dtw_distance,
                        l1_distance)
from .evaluation import (DetCurve, ExperimentResult, FeatureStore, Protocol,
                         SweepGrid, det_curve, eer, impostor_trials, run_sweep,
                         score_trials, split_enrollment)
from .evidence import (ChannelEvidence, EvidenceReport, GaussianFit,
                       LrPopulation, default_weights, fit_gaussian, fuse,
                       likelihood_ratio, nearest_distance, prob_ref, prob_ubm,
                       ref_lr_population, ubm_lr_population, verify)
from .features import (FeatureSet, FeatureVector, dump_feature_sets,
                       extract_features, extract_geometrical,
                       extract_quadtree_gradient, extract_runlength,
                       extract_textural, ingest_external, load_feature_sets)
from .pipeline import extract_manifest, parse_channels
from .ubm import UniverseModel, build_ubm, exclude_writer, load_ubm, save_ubm

__version__ = "0.1.0"

__all__ = [
    "CHANNEL_DIMS", "DEFAULT_CANVAS", "DEFAULT_WEIGHTS", "EXPLAINABLE_CHANNELS",
    "CorpusManifest", "ManifestEntry", "SignatureImage", "binarize",
    "crop_normalize", "load_image", "preprocess", "scan_manifest",
    "METRICS", "cosine_distance", "distance", "dtw_distance", "l1_distance",
    "DetCurve", "ExperimentResult", "FeatureStore", "Protocol", "SweepGrid",
    "det_curve", "eer", "impostor_trials", "run_sweep", "score_trials",
    "split_enrollment",
    "ChannelEvidence", "EvidenceReport", "GaussianFit", "LrPopulation",
    "default_weights", "fit_gaussian", "fuse", "likelihood_ratio",
    "nearest_distance", "prob_ref", "prob_ubm", "ref_lr_population",
    "ubm_lr_population", "verify",
    "FeatureSet", "FeatureVector", "dump_feature_sets", "extract_features",
    "extract_geometrical", "extract_quadtree_gradient", "extract_runlength",
    "extract_textural", "ingest_external", "load_feature_sets",
    "extract_manifest", "parse_channels",
    "UniverseModel", "build_ubm", "exclude_writer", "load_ubm", "save_ubm",
    "__version__",
]
