"""Likelihood-ratio evidence for a questioned signature.

The machinery: nearest distances of the questioned specimen to the
reference set and to the universe model, their log-ratio LR_q, leave-one-out
LR populations over both pools, normal fits of those populations, and the
two membership probabilities read off the fitted CDFs. A weighted sum
fuses the per-channel evidence into one score, and sampled PDF curves are
emitted for rendering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .config import DEFAULT_WEIGHTS
from .distances import distance, pairwise_matrix
from .errors import (EmptyPool, MissingChannel, ReferenceSetTooSmall,
                     TooFewSamples, UniverseTooSmall, WeightMismatch)
from .features.vector import FeatureSet, stack
from .ubm import UniverseModel, exclude_writer

# Distances are floored before entering the log ratio so duplicated
# specimens (distance 0) stay finite.
EPS = 1e-12
SIGMA_FLOOR = 1e-9
CURVE_POINTS = 256
PROB_MODES = ("oriented", "raw")

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class GaussianFit:
    mu: float
    sigma: float
    n_samples: int


@dataclass(frozen=True)
class LrPopulation:
    source: str  # "ubm" | "reference"
    values: np.ndarray


@dataclass(frozen=True)
class ChannelEvidence:
    channel: str
    delta1: float
    delta2: float
    lr_q: float
    p_u: float
    ubm_fit: GaussianFit
    p_r: float | None = None
    ref_fit: GaussianFit | None = None


@dataclass(frozen=True)
class CurveSet:
    """Sampled peak-normalized PDFs of both LR populations plus the marker."""

    lr: np.ndarray
    ubm_pdf: np.ndarray
    ref_pdf: np.ndarray | None
    lr_q: float


def nearest_distance(q: FeatureSet, pool: Sequence[FeatureSet], channel: str,
                     metric: str) -> float:
    """Smallest distance from q to the pool on one channel, floored at EPS."""
    if not pool:
        raise EmptyPool(f"empty pool for channel {channel!r}")
    qv = q.get(channel)
    best = min(distance(metric, qv, member.get(channel)) for member in pool)
    return max(best, EPS)


def likelihood_ratio(delta2: float, delta1: float) -> float:
    """-2 ln(delta2/delta1); positive when q sits closer to the references."""
    return -2.0 * math.log(delta2 / delta1)


def leave_one_out_nearest(members: Sequence[FeatureSet], channel: str,
                          metric: str) -> np.ndarray:
    """Per-member distance to its nearest *other* member, floored at EPS."""
    if len(members) < 2:
        raise UniverseTooSmall("leave-one-out needs at least 2 members")
    X = stack(members, channel)
    M = pairwise_matrix(X, X, metric)
    np.fill_diagonal(M, np.inf)
    return np.maximum(M.min(axis=1), EPS)


def _pool_to_pool_nearest(A: Sequence[FeatureSet], B: Sequence[FeatureSet],
                          channel: str, metric: str) -> np.ndarray:
    M = pairwise_matrix(stack(A, channel), stack(B, channel), metric)
    return np.maximum(M.min(axis=1), EPS)


def _lr_values(d2: np.ndarray, d1: np.ndarray) -> np.ndarray:
    return np.array([likelihood_ratio(b, a) for b, a in zip(d2, d1)])


def ubm_lr_population(ubm: UniverseModel, refs: Sequence[FeatureSet], channel: str,
                      metric: str, loo: np.ndarray | None = None) -> LrPopulation:
    """Leave-one-out LR of every universe member against the reference set.

    ``loo`` short-circuits the expensive member-vs-member scan when the
    caller has it cached; it must come from ``leave_one_out_nearest`` on
    this same model/channel/metric.
    """
    if ubm.size < 2:
        raise UniverseTooSmall("LR population needs a universe of at least 2")
    if not refs:
        raise EmptyPool("LR population needs a non-empty reference set")
    d1 = leave_one_out_nearest(ubm.members, channel, metric) if loo is None else loo
    if len(d1) != ubm.size:
        raise ValueError("cached leave-one-out vector does not match the model size")
    d2 = _pool_to_pool_nearest(ubm.members, refs, channel, metric)
    return LrPopulation("ubm", _lr_values(d2, d1))


def ref_lr_population(refs: Sequence[FeatureSet], ubm: UniverseModel, channel: str,
                      metric: str, orientation: str = "questioned") -> LrPopulation:
    """Leave-one-out LR of every reference against the universe model.

    With the default orientation each reference is scored exactly like a
    questioned signature: distance to the remaining references over
    distance to the universe, so a coherent reference set yields large
    positive LRs and its fitted curve sits to the right of the universe
    population. ``orientation="inverted"`` flips the ratio for comparison
    against systems that orient this population the other way.
    """
    if len(refs) < 2:
        raise ReferenceSetTooSmall(
            "the reference LR population needs more than one reference signature")
    if orientation not in ("questioned", "inverted"):
        raise ValueError(f"unknown orientation {orientation!r}")
    d_refs = leave_one_out_nearest(refs, channel, metric)
    d_ubm = _pool_to_pool_nearest(refs, ubm.members, channel, metric)
    if orientation == "questioned":
        return LrPopulation("reference", _lr_values(d_refs, d_ubm))
    return LrPopulation("reference", _lr_values(d_ubm, d_refs))


def fit_gaussian(pop: LrPopulation) -> GaussianFit:
    values = np.asarray(pop.values, dtype=np.float64)
    if values.size < 2:
        raise TooFewSamples("a normal fit needs at least 2 LR samples")
    mu = float(values.mean())
    sigma = max(float(values.std(ddof=1)), SIGMA_FLOOR)
    return GaussianFit(mu=mu, sigma=sigma, n_samples=int(values.size))


def prob_ubm(lr_q: float, fit: GaussianFit) -> float:
    """Upper-tail mass of the fitted UBM population at lr_q: 1 - CDF."""
    z = (lr_q - fit.mu) / fit.sigma
    return 0.5 * math.erfc(z / _SQRT2)


def prob_ref(lr_q: float, fit: GaussianFit, complement: bool = False) -> float:
    """Lower-tail mass of the fitted reference population at lr_q (the CDF).

    ``complement`` flips to the upper tail for cross-checking against
    systems that orient this probability the other way.
    """
    z = (lr_q - fit.mu) / fit.sigma
    phi = 0.5 * math.erfc(-z / _SQRT2)
    return 1.0 - phi if complement else phi


def default_weights(channels: Sequence[str]) -> dict[str, float]:
    """Restrict the default channel weights to `channels` and renormalize.

    Channels without a preset weight (ext:*) enter at 1/len(channels)
    before normalization.
    """
    channels = list(channels)
    if not channels:
        raise WeightMismatch("no channels to weight")
    base = {ch: DEFAULT_WEIGHTS.get(ch, 1.0 / len(channels)) for ch in channels}
    total = sum(base.values())
    return {ch: w / total for ch, w in sorted(base.items())}


def _oriented_prob(ev: ChannelEvidence, prob_mode: str) -> float:
    if prob_mode == "oriented":
        p = 1.0 - ev.p_u
        if ev.p_r is not None:
            p += ev.p_r
        return p
    if prob_mode == "raw":
        return ev.p_u + (ev.p_r if ev.p_r is not None else 0.0)
    raise ValueError(f"unknown prob mode {prob_mode!r}; know {PROB_MODES}")


def fuse(per_channel: Mapping[str, ChannelEvidence], weights: Mapping[str, float],
         prob_mode: str = "oriented") -> float:
    """Weighted sum of per-channel (LR + membership probability) scores."""
    if set(weights) != set(per_channel):
        raise WeightMismatch(
            f"weights cover {sorted(weights)} but evidence has {sorted(per_channel)}")
    if any(w < 0 for w in weights.values()):
        raise WeightMismatch("weights must be non-negative")
    total = sum(weights.values())
    if abs(total - 1.0) > 1e-9:
        raise WeightMismatch(f"weights must sum to 1, got {total!r}")
    return sum(weights[ch] * (per_channel[ch].lr_q + _oriented_prob(per_channel[ch], prob_mode))
               for ch in sorted(per_channel))


def _gaussian_pdf(x: np.ndarray, fit: GaussianFit) -> np.ndarray:
    z = (x - fit.mu) / fit.sigma
    return np.exp(-0.5 * z * z) / (fit.sigma * math.sqrt(2.0 * math.pi))


def sample_curves(lr_q: float, ubm_fit: GaussianFit,
                  ref_fit: GaussianFit | None) -> CurveSet:
    """Sample both fitted PDFs on a common grid, peak-normalized to 1."""
    fits = [ubm_fit] + ([ref_fit] if ref_fit is not None else [])
    lo = min(f.mu - 3.0 * f.sigma for f in fits)
    hi = max(f.mu + 3.0 * f.sigma for f in fits)
    grid = np.linspace(lo, hi, CURVE_POINTS)

    def normalized(fit):
        pdf = _gaussian_pdf(grid, fit)
        peak = pdf.max()
        return pdf / peak if peak > 0 else pdf

    return CurveSet(lr=grid, ubm_pdf=normalized(ubm_fit),
                    ref_pdf=normalized(ref_fit) if ref_fit is not None else None,
                    lr_q=lr_q)


@dataclass(frozen=True)
class EvidenceReport:
    per_channel: dict[str, ChannelEvidence]
    fused_score: float
    weights: dict[str, float]
    metric: str
    prob_mode: str
    n_references: int
    curves: dict[str, CurveSet]
    decision_threshold: float | None = None
    decision: str | None = None

    @property
    def channels(self) -> tuple[str, ...]:
        return tuple(sorted(self.per_channel))

    def to_json_dict(self) -> dict:
        def fit_dict(fit):
            return None if fit is None else {"mu": fit.mu, "sigma": fit.sigma,
                                             "n_samples": fit.n_samples}

        return {
            "schema_version": 1,
            "metric": self.metric,
            "prob_mode": self.prob_mode,
            "n_references": self.n_references,
            "channels": list(self.channels),
            "weights": {ch: self.weights[ch] for ch in sorted(self.weights)},
            "fused_score": self.fused_score,
            "decision_threshold": self.decision_threshold,
            "decision": self.decision,
            "per_channel": {
                ch: {
                    "delta1": ev.delta1,
                    "delta2": ev.delta2,
                    "lr_q": ev.lr_q,
                    "p_u": ev.p_u,
                    "p_r": ev.p_r,
                    "ubm_fit": fit_dict(ev.ubm_fit),
                    "ref_fit": fit_dict(ev.ref_fit),
                }
                for ch, ev in sorted(self.per_channel.items())
            },
            "curves": {
                ch: {
                    "lr": cs.lr.tolist(),
                    "ubm_pdf": cs.ubm_pdf.tolist(),
                    "ref_pdf": None if cs.ref_pdf is None else cs.ref_pdf.tolist(),
                    "lr_q": cs.lr_q,
                }
                for ch, cs in sorted(self.curves.items())
            },
        }


LooProvider = Callable[[UniverseModel, str, str], np.ndarray]


def verify(questioned: FeatureSet, references: Sequence[FeatureSet],
           universe: UniverseModel, channels: Sequence[str] | None = None,
           metric: str = "l1", weights: Mapping[str, float] | None = None,
           prob_mode: str = "oriented", decision_threshold: float | None = None,
           loo_provider: LooProvider | None = None) -> EvidenceReport:
    """Full per-channel evidence for one questioned signature.

    Universe members sharing a writer with the reference set are excluded
    before any distance is computed. P(R) and the reference curve appear
    only when the reference set has at least two signatures.
    """
    references = list(references)
    if not references:
        raise EmptyPool("verification needs at least one reference signature")
    if channels is None:
        channels = questioned.channels
    channels = tuple(sorted(channels))
    if not channels:
        raise MissingChannel("no channels requested")
    for writer in sorted({r.writer_id for r in references}):
        universe = exclude_writer(universe, writer)
    if weights is None:
        weights = default_weights(channels)

    per_channel: dict[str, ChannelEvidence] = {}
    curves: dict[str, CurveSet] = {}
    for ch in channels:
        delta1 = nearest_distance(questioned, universe.members, ch, metric)
        delta2 = nearest_distance(questioned, references, ch, metric)
        lr_q = likelihood_ratio(delta2, delta1)

        loo = loo_provider(universe, ch, metric) if loo_provider else None
        ubm_fit = fit_gaussian(ubm_lr_population(universe, references, ch, metric,
                                                 loo=loo))
        p_u = prob_ubm(lr_q, ubm_fit)

        ref_fit = None
        p_r = None
        if len(references) >= 2:
            ref_fit = fit_gaussian(ref_lr_population(references, universe, ch, metric))
            p_r = prob_ref(lr_q, ref_fit)

        per_channel[ch] = ChannelEvidence(channel=ch, delta1=delta1, delta2=delta2,
                                          lr_q=lr_q, p_u=p_u, ubm_fit=ubm_fit,
                                          p_r=p_r, ref_fit=ref_fit)
        curves[ch] = sample_curves(lr_q, ubm_fit, ref_fit)

    fused = fuse(per_channel, weights, prob_mode)
    decision = None
    if decision_threshold is not None:
        decision = "accept" if fused >= decision_threshold else "reject"
    return EvidenceReport(per_channel=per_channel, fused_score=fused,
                          weights=dict(weights), metric=metric, prob_mode=prob_mode,
                          n_references=len(references), curves=curves,
                          decision_threshold=decision_threshold, decision=decision)
