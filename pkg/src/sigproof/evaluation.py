"""EER evaluation harness: enrollment splits, forgery trials, DET curves,
and the sweep runner that grids over protocol knobs.

Scores are the fused evidence scores, writer by writer, with the enrolled
writer always excluded from the universe model. Everything downstream of
the corpus bytes and the seed is deterministic, so result CSVs are
byte-stable across runs.
"""

from __future__ import annotations

import hashlib
import json
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import EXPLAINABLE_CHANNELS
from .distances import METRICS, pairwise_matrix
from .errors import (EmptyScores, InsufficientGenuine, InsufficientImpostors,
                     UniverseTooSmall, UnknownMetric)
from .evidence import (ChannelEvidence, EPS, GaussianFit, LrPopulation,
                       default_weights, fit_gaussian, fuse, likelihood_ratio,
                       prob_ref, prob_ubm, ref_lr_population)
from .features.exchange import load_feature_sets
from .features.vector import FeatureSet, stack
from .ubm import UniverseModel

SCENARIOS = ("random_forgery", "skilled_forgery")

_SCENARIO_ALIASES = {"rf": "random_forgery", "sf": "skilled_forgery",
                     "random_forgery": "random_forgery",
                     "skilled_forgery": "skilled_forgery"}


def parse_scenario(name: str) -> str:
    try:
        return _SCENARIO_ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; know rf|sf") from None


@dataclass(frozen=True)
class Protocol:
    scenario: str
    n_refs: int = 1
    metric: str = "l1"
    channels: tuple[str, ...] = EXPLAINABLE_CHANNELS
    weights: tuple[tuple[str, float], ...] | None = None
    ubm_id: str = ""
    rng_seed: int = 42
    rf_impostor_writers: int = 74
    prob_mode: str = "oriented"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.n_refs < 1:
            raise ValueError("n_refs must be >= 1")
        if self.metric not in METRICS:
            raise UnknownMetric(f"unknown metric {self.metric!r}")

    def weight_map(self) -> dict[str, float]:
        if self.weights is None:
            return default_weights(self.channels)
        return dict(self.weights)


class FeatureStore:
    """Per-writer genuine/forgery feature sets, sorted by specimen index."""

    def __init__(self, feature_sets: Iterable[FeatureSet], name: str = ""):
        self.name = name
        self._genuine: dict[str, list[FeatureSet]] = {}
        self._forgery: dict[str, list[FeatureSet]] = {}
        for fs in feature_sets:
            bucket = self._genuine if fs.label == "genuine" else self._forgery
            bucket.setdefault(fs.writer_id, []).append(fs)
        for bucket in (self._genuine, self._forgery):
            for sets in bucket.values():
                sets.sort(key=lambda fs: fs.specimen_index)

    @classmethod
    def from_jsonl(cls, path, name: str = "") -> "FeatureStore":
        return cls(load_feature_sets(path), name=name or Path(path).stem)

    def writers(self) -> list[str]:
        return sorted(self._genuine)

    def genuine(self, writer_id: str) -> list[FeatureSet]:
        return list(self._genuine.get(writer_id, ()))

    def forgeries(self, writer_id: str) -> list[FeatureSet]:
        return list(self._forgery.get(writer_id, ()))


def split_enrollment(specimens: Sequence[FeatureSet], n_refs: int
                     ) -> tuple[list[FeatureSet], list[FeatureSet]]:
    """First n_refs genuine specimens enroll; the rest become questioned."""
    genuine = sorted((fs for fs in specimens if fs.label == "genuine"),
                     key=lambda fs: fs.specimen_index)
    if len(genuine) <= n_refs:
        raise InsufficientGenuine(
            f"need more than {n_refs} genuine specimens, got {len(genuine)}")
    return genuine[:n_refs], genuine[n_refs:]


@dataclass(frozen=True)
class ImpostorTrials:
    feature_sets: tuple[FeatureSet, ...]
    scenario: str
    clamped_from: int | None = None  # requested RF writer count, when clamped


def _writer_rng(seed: int, writer_id: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(writer_id.encode())])


def impostor_trials(scenario: str, writer_id: str, store: FeatureStore,
                    seed: int, rf_writers: int = 74) -> ImpostorTrials:
    """Forged trials against one enrolled writer.

    Skilled forgeries: every forgery targeting the writer. Random
    forgeries: one genuine specimen from each of `rf_writers` distinct
    other writers, sampled without replacement with a per-writer seeded
    generator; short corpora clamp to the available count and record it.
    """
    if scenario == "skilled_forgery":
        forgeries = store.forgeries(writer_id)
        if not forgeries:
            raise InsufficientImpostors(f"no skilled forgeries for writer {writer_id!r}")
        return ImpostorTrials(tuple(forgeries), scenario)

    others = [w for w in store.writers() if w != writer_id and store.genuine(w)]
    if not others:
        raise InsufficientImpostors(f"no other writers to forge against {writer_id!r}")
    rng = _writer_rng(seed, writer_id)
    k = min(rf_writers, len(others))
    chosen = rng.choice(len(others), size=k, replace=False)
    trials = []
    for idx in chosen:
        specimens = store.genuine(others[int(idx)])
        trials.append(specimens[int(rng.integers(len(specimens)))])
    clamped = len(others) if k < rf_writers else None
    return ImpostorTrials(tuple(trials), scenario, clamped_from=clamped)


class UbmDistanceCache:
    """Lazy member-vs-member distance matrices for one model and metric.

    Sub-selections of the full matrix serve every writer-excluded or
    size-truncated view of the model without rescanning.
    """

    def __init__(self, ubm: UniverseModel, metric: str):
        self.ubm = ubm
        self.metric = metric
        self._matrices: dict[str, np.ndarray] = {}

    def matrix(self, channel: str) -> np.ndarray:
        M = self._matrices.get(channel)
        if M is None:
            X = stack(self.ubm.members, channel)
            M = pairwise_matrix(X, X, self.metric)
            self._matrices[channel] = M
        return M

    def loo(self, channel: str, active: np.ndarray) -> np.ndarray:
        sub = self.matrix(channel)[np.ix_(active, active)].copy()
        np.fill_diagonal(sub, np.inf)
        return np.maximum(sub.min(axis=1), EPS)


def _active_members(ubm: UniverseModel, writer_id: str,
                    size: int | None) -> np.ndarray:
    limit = ubm.size if size is None else min(size, ubm.size)
    idx = [i for i in range(limit) if ubm.members[i].writer_id != writer_id]
    if len(idx) < 2:
        raise UniverseTooSmall(
            f"universe view for writer {writer_id!r} has {len(idx)} member(s)")
    return np.asarray(idx, dtype=np.int64)


def _score_writer(writer_id: str, protocol: Protocol, store: FeatureStore,
                  ubm: UniverseModel, cache: UbmDistanceCache,
                  ubm_size: int | None) -> tuple[list[float], list[float], int | None]:
    refs, questioned = split_enrollment(store.genuine(writer_id), protocol.n_refs)
    trials = impostor_trials(protocol.scenario, writer_id, store,
                             protocol.rng_seed, protocol.rf_impostor_writers)
    active = _active_members(ubm, writer_id, ubm_size)
    members = [ubm.members[i] for i in active]
    weights = protocol.weight_map()

    all_q = questioned + list(trials.feature_sets)
    evidence_rows: list[dict[str, ChannelEvidence]] = [dict() for _ in all_q]
    for ch in protocol.channels:
        U = stack(members, ch)
        R = stack(refs, ch)
        Q = stack(all_q, ch)
        d1 = np.maximum(pairwise_matrix(Q, U, protocol.metric).min(axis=1), EPS)
        d2 = np.maximum(pairwise_matrix(Q, R, protocol.metric).min(axis=1), EPS)

        d_u1 = cache.loo(ch, active)
        d_u2 = np.maximum(pairwise_matrix(U, R, protocol.metric).min(axis=1), EPS)
        pop = LrPopulation("ubm", np.array([likelihood_ratio(b, a)
                                            for b, a in zip(d_u2, d_u1)]))
        ubm_fit = fit_gaussian(pop)

        ref_fit: GaussianFit | None = None
        if protocol.n_refs >= 2:
            view = UniverseModel(members=tuple(members), origin=ubm.origin,
                                 provenance=ubm.provenance)
            ref_fit = fit_gaussian(ref_lr_population(refs, view, ch, protocol.metric))

        for row, dd1, dd2 in zip(evidence_rows, d1, d2):
            lr_q = likelihood_ratio(float(dd2), float(dd1))
            row[ch] = ChannelEvidence(
                channel=ch, delta1=float(dd1), delta2=float(dd2), lr_q=lr_q,
                p_u=prob_ubm(lr_q, ubm_fit), ubm_fit=ubm_fit,
                p_r=prob_ref(lr_q, ref_fit) if ref_fit is not None else None,
                ref_fit=ref_fit)

    scores = [fuse(row, weights, protocol.prob_mode) for row in evidence_rows]
    n_gen = len(questioned)
    return scores[:n_gen], scores[n_gen:], trials.clamped_from


@dataclass(frozen=True)
class TrialScores:
    genuine: np.ndarray
    impostor: np.ndarray
    skipped_writers: tuple[str, ...] = ()
    rf_clamps: tuple[tuple[str, int], ...] = ()


_POOL_STATE: dict = {}


def _pool_init(protocol, store, ubm, ubm_size):
    _POOL_STATE["args"] = (protocol, store, ubm, UbmDistanceCache(ubm, protocol.metric),
                           ubm_size)


def _pool_score(writer_id: str):
    protocol, store, ubm, cache, ubm_size = _POOL_STATE["args"]
    try:
        return writer_id, _score_writer(writer_id, protocol, store, ubm, cache, ubm_size)
    except (InsufficientGenuine, InsufficientImpostors):
        return writer_id, None


def score_trials(protocol: Protocol, store: FeatureStore, ubm: UniverseModel,
                 ubm_size: int | None = None, cache: UbmDistanceCache | None = None,
                 jobs: int = 1) -> TrialScores:
    """Fused scores for every questioned genuine and impostor trial.

    Writers without enough genuine specimens (or, under SF, without any
    forgeries) are skipped and recorded. Results are reduced in sorted
    writer order, so parallel runs reproduce the serial output.
    """
    if cache is None:
        cache = UbmDistanceCache(ubm, protocol.metric)
    writers = store.writers()

    per_writer: dict[str, tuple[list[float], list[float], int | None]] = {}
    skipped: list[str] = []

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_pool_init,
                                 initargs=(protocol, store, ubm, ubm_size)) as pool:
            for writer_id, result in pool.map(_pool_score, writers):
                if result is None:
                    skipped.append(writer_id)
                else:
                    per_writer[writer_id] = result
    else:
        for writer_id in writers:
            try:
                per_writer[writer_id] = _score_writer(writer_id, protocol, store,
                                                      ubm, cache, ubm_size)
            except (InsufficientGenuine, InsufficientImpostors):
                skipped.append(writer_id)

    genuine: list[float] = []
    impostor: list[float] = []
    clamps: list[tuple[str, int]] = []
    for writer_id in writers:
        if writer_id in skipped:
            continue
        g, i, clamp = per_writer[writer_id]
        genuine.extend(g)
        impostor.extend(i)
        if clamp is not None:
            clamps.append((writer_id, clamp))
    return TrialScores(genuine=np.asarray(genuine), impostor=np.asarray(impostor),
                       skipped_writers=tuple(skipped), rf_clamps=tuple(clamps))


# -- DET / EER -----------------------------------------------------------

@dataclass(frozen=True)
class DetCurve:
    thresholds: np.ndarray
    far: np.ndarray
    frr: np.ndarray

    def points(self):
        return zip(self.thresholds, self.far, self.frr)


def det_curve(genuine_scores, impostor_scores) -> DetCurve:
    """FAR/FRR across all score thresholds, accept iff score >= threshold."""
    g = np.sort(np.asarray(genuine_scores, dtype=np.float64))
    i = np.sort(np.asarray(impostor_scores, dtype=np.float64))
    if g.size == 0 or i.size == 0:
        raise EmptyScores("DET needs non-empty genuine and impostor score lists")
    thr = np.concatenate([[-np.inf], np.unique(np.concatenate([g, i])), [np.inf]])
    far = (i.size - np.searchsorted(i, thr, side="left")) / i.size
    frr = np.searchsorted(g, thr, side="left") / g.size
    return DetCurve(thresholds=thr, far=far, frr=frr)


def eer(det: DetCurve) -> float:
    """FAR = FRR operating point, linearly interpolated at the crossing."""
    diff = det.far - det.frr  # non-increasing in the threshold
    k = int(np.argmax(diff <= 0))
    if diff[k] == 0:
        return float(det.far[k])
    # crossing sits between k-1 (diff > 0) and k (diff < 0)
    alpha = diff[k - 1] / (diff[k - 1] - diff[k])
    return float(det.far[k - 1] + alpha * (det.far[k] - det.far[k - 1]))


# -- sweeps ----------------------------------------------------------------

@dataclass(frozen=True)
class SweepGrid:
    scenarios: tuple[str, ...] = SCENARIOS
    n_refs: tuple[int, ...] = (1,)
    metrics: tuple[str, ...] = ("l1",)
    channel_sets: tuple[tuple[str, ...], ...] = (EXPLAINABLE_CHANNELS,)
    ubm_sizes: tuple[int | None, ...] = (None,)
    seed: int = 42
    rf_impostor_writers: int = 74
    prob_mode: str = "oriented"


@dataclass(frozen=True)
class ExperimentResult:
    dataset: str
    ubm_id: str
    ubm_origin: str
    ubm_size: int
    protocol: Protocol
    eer: float | None
    det: DetCurve | None
    n_genuine_trials: int
    n_impostor_trials: int
    rf_clamped: int
    skipped_writers: int
    config_hash: str
    wall_time: float
    status: str = "ok"
    error: str = ""


CSV_COLUMNS = ("dataset", "ubm_id", "ubm_origin", "ubm_size", "scenario", "metric",
               "channels", "n_refs", "seed", "n_genuine_trials", "n_impostor_trials",
               "rf_clamped", "skipped_writers", "eer", "config_hash", "status", "error")


def _cell_hash(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def run_sweep(store: FeatureStore, ubms: Mapping[str, UniverseModel], grid: SweepGrid,
              out_csv=None, det_dir=None, det_svg: bool = False,
              jobs: int = 1) -> list[ExperimentResult]:
    """One ExperimentResult per grid cell; failed cells are recorded, not fatal.

    The CSV holds only run-invariant fields (wall-clock times go to the
    JSON sidecar) so identical inputs and seed give byte-identical files.
    """
    results: list[ExperimentResult] = []
    for ubm_id in sorted(ubms):
        ubm = ubms[ubm_id]
        for metric in grid.metrics:
            cache = UbmDistanceCache(ubm, metric)
            for channels in grid.channel_sets:
                for ubm_size in grid.ubm_sizes:
                    for scenario in grid.scenarios:
                        for n_refs in grid.n_refs:
                            protocol = Protocol(
                                scenario=scenario, n_refs=n_refs, metric=metric,
                                channels=tuple(channels), ubm_id=ubm_id,
                                rng_seed=grid.seed,
                                rf_impostor_writers=grid.rf_impostor_writers,
                                prob_mode=grid.prob_mode)
                            results.append(_run_cell(store, ubm, protocol, cache,
                                                     ubm_size, jobs))
    if out_csv is not None:
        write_results_csv(results, out_csv)
        _write_sidecar(results, Path(str(out_csv) + ".meta.json"))
    if det_dir is not None:
        export_det_curves(results, det_dir, svg=det_svg)
    return results


def _run_cell(store, ubm, protocol: Protocol, cache, ubm_size, jobs) -> ExperimentResult:
    effective_size = ubm.size if ubm_size is None else min(ubm_size, ubm.size)
    config_hash = _cell_hash({
        "dataset": store.name, "ubm_id": protocol.ubm_id, "ubm_size": effective_size,
        "scenario": protocol.scenario, "metric": protocol.metric,
        "channels": list(protocol.channels), "n_refs": protocol.n_refs,
        "seed": protocol.rng_seed, "rf_impostor_writers": protocol.rf_impostor_writers,
        "prob_mode": protocol.prob_mode})
    started = time.perf_counter()
    try:
        scores = score_trials(protocol, store, ubm, ubm_size=ubm_size,
                              cache=cache, jobs=jobs)
        det = det_curve(scores.genuine, scores.impostor)
        rate = eer(det)
        return ExperimentResult(
            dataset=store.name, ubm_id=protocol.ubm_id, ubm_origin=ubm.origin,
            ubm_size=effective_size, protocol=protocol, eer=rate, det=det,
            n_genuine_trials=int(scores.genuine.size),
            n_impostor_trials=int(scores.impostor.size),
            rf_clamped=len(scores.rf_clamps),
            skipped_writers=len(scores.skipped_writers),
            config_hash=config_hash, wall_time=time.perf_counter() - started)
    except Exception as exc:  # record, keep sweeping
        return ExperimentResult(
            dataset=store.name, ubm_id=protocol.ubm_id, ubm_origin=ubm.origin,
            ubm_size=effective_size, protocol=protocol, eer=None, det=None,
            n_genuine_trials=0, n_impostor_trials=0, rf_clamped=0, skipped_writers=0,
            config_hash=config_hash, wall_time=time.perf_counter() - started,
            status="error", error=f"{type(exc).__name__}: {exc}")


def _result_row(r: ExperimentResult) -> list[str]:
    return [r.dataset, r.ubm_id, r.ubm_origin, str(r.ubm_size), r.protocol.scenario,
            r.protocol.metric, "+".join(r.protocol.channels), str(r.protocol.n_refs),
            str(r.protocol.rng_seed), str(r.n_genuine_trials), str(r.n_impostor_trials),
            str(r.rf_clamped), str(r.skipped_writers),
            "" if r.eer is None else repr(r.eer), r.config_hash, r.status, r.error]


def write_results_csv(results: Sequence[ExperimentResult], path) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for r in results:
        lines.append(",".join(v.replace(",", ";") for v in _result_row(r)))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_sidecar(results: Sequence[ExperimentResult], path: Path) -> None:
    payload = [{
        "config_hash": r.config_hash, "dataset": r.dataset, "ubm_id": r.ubm_id,
        "ubm_origin": r.ubm_origin, "ubm_size": r.ubm_size,
        "scenario": r.protocol.scenario, "metric": r.protocol.metric,
        "channels": list(r.protocol.channels), "n_refs": r.protocol.n_refs,
        "seed": r.protocol.rng_seed, "prob_mode": r.protocol.prob_mode,
        "rf_impostor_writers": r.protocol.rf_impostor_writers,
        "eer": r.eer, "wall_time_s": r.wall_time, "status": r.status,
        "error": r.error,
    } for r in results]
    path.write_text(json.dumps(payload, indent=1))


def export_det_curves(results: Sequence[ExperimentResult], det_dir,
                      svg: bool = False) -> None:
    det_dir = Path(det_dir)
    det_dir.mkdir(parents=True, exist_ok=True)
    for r in results:
        if r.det is None:
            continue
        lines = ["threshold,far,frr"]
        for t, far, frr in r.det.points():
            lines.append(f"{t!r},{far!r},{frr!r}")
        (det_dir / f"det_{r.config_hash}.csv").write_text("\n".join(lines) + "\n")
        if svg:
            _plot_det(r, det_dir / f"det_{r.config_hash}.svg")


def _plot_det(r: ExperimentResult, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.plot(r.det.far, r.det.frr)
    ax.set_xlabel("false acceptance rate")
    ax.set_ylabel("false rejection rate")
    eer_txt = "n/a" if r.eer is None else f"{100 * r.eer:.2f}%"
    ax.set_title(f"{r.protocol.scenario}, n_refs={r.protocol.n_refs}, "
                 f"EER {eer_txt}", fontsize=9)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
