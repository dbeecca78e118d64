"""Acceptance suite: one test per criterion, one printed line per criterion.

Run with `pytest tests/test_acceptance.py -v -s`.

The corpus-scale criteria need the public CEDAR signature corpus on disk;
point SIGPROOF_CEDAR_ROOT at the extracted dataset (the directory holding
the genuine/forgery images, e.g. .../signatures with full_org/full_forg).
Without it those criteria skip. SIGPROOF_UBM_ROOT optionally supplies a
separate corpus for the universe model; otherwise the first 27 CEDAR
writers are held out for it and evaluation runs on the remaining 28, so
the model stays writer-disjoint from every trial.
"""

import math
import os
from itertools import product
from pathlib import Path

import numpy as np
import pytest

from conftest import ext_set
from oracles import all_sequences, dtw_paths
from sigproof.config import EXPLAINABLE_CHANNELS
from sigproof.corpus import scan_manifest
from sigproof.distances import cosine_distance, dtw_distance, l1_distance
from sigproof.evaluation import (FeatureStore, Protocol, SweepGrid,
                                 UbmDistanceCache, det_curve, eer, run_sweep,
                                 score_trials, split_enrollment)
from sigproof.evidence import (GaussianFit, fit_gaussian, likelihood_ratio,
                               nearest_distance, prob_ref, prob_ubm,
                               ref_lr_population, ubm_lr_population, verify)
from sigproof.features import FeatureVector, dump_feature_sets, load_feature_sets
from sigproof.pipeline import extract_manifest
from sigproof.ubm import UniverseModel, build_ubm

# Acceptance tolerances, fixed here and nowhere else.
TOL_EXACT = 0.0
TOL_PROB_HALF = 1e-9
TOL_PROB_SUM = 1e-12
TOL_LR = 1e-9
TOL_HAND = 1e-9
CEDAR_RF_BAND = (0.0519 - 0.04, 0.0519 + 0.04)
CEDAR_SF_BAND = (0.1212 - 0.04, 0.1212 + 0.04)
CEDAR_RF10_MAX = 0.05
CEDAR_SF10_MAX = 0.09
TREND_NOISE_BAND = 0.005      # 0.5 percentage points
UBM_STABILITY_BAND = 0.02     # 2 percentage points

SEED = 42


def ok(line: str) -> None:
    print(f"\nACCEPTANCE {line}: PASS")


def ev(values, channel="ext:toy"):
    return FeatureVector(channel, np.asarray(values, dtype=float))


# =====================================================================
# Math-core property suite (no datasets, < 1 min)
# =====================================================================

def test_math_core_dtw_exhaustive():
    # all pairs over the full length<=3 universe, exact
    seqs = all_sequences(3, (0, 1, 2, 3))
    for a in seqs:
        for b in seqs:
            assert dtw_distance(ev(a), ev(b)) == dtw_paths(a, b)
    # every length combination up to 6x6, seeded draws, exact
    rng = np.random.default_rng(SEED)
    for na, nb in product(range(1, 7), range(1, 7)):
        for _ in range(25):
            a = rng.integers(0, 4, size=na).astype(float)
            b = rng.integers(0, 4, size=nb).astype(float)
            assert dtw_distance(ev(a), ev(b)) == dtw_paths(a, b)
    ok("math-core/dtw-vs-path-enumeration (exact)")


def test_math_core_l1_axioms_and_cosine_scale_invariance():
    rng = np.random.default_rng(SEED)
    n = 10_000
    A = rng.normal(size=(n, 16))
    B = rng.normal(size=(n, 16))
    C = rng.normal(size=(n, 16))
    alphas = rng.uniform(0.01, 100.0, size=n)
    betas = rng.uniform(0.01, 100.0, size=n)
    for i in range(n):
        a, b, c = ev(A[i]), ev(B[i]), ev(C[i])
        dab = l1_distance(a, b)
        assert dab >= 0.0
        assert dab == l1_distance(b, a)
        assert l1_distance(a, a) == 0.0
        assert l1_distance(a, c) <= dab + l1_distance(b, c) + 1e-9
        base = cosine_distance(a, b)
        scaled = cosine_distance(ev(alphas[i] * A[i]), ev(betas[i] * B[i]))
        assert abs(scaled - base) <= 1e-9
    ok("math-core/l1-metric-axioms+cosine-scale-invariance (10k pairs)")


def test_math_core_lr_identities_and_alpha_scaling():
    for delta in (0.3, 1.0, 17.5):
        assert likelihood_ratio(delta, delta) == 0.0
        assert abs(likelihood_ratio(delta / math.e, delta) - 2.0) < TOL_LR
        assert abs(likelihood_ratio(math.e * delta, delta) + 2.0) < TOL_LR
    # sign semantics: delta2 < delta1 <=> positive LR
    assert likelihood_ratio(1.0, 2.0) > 0
    assert likelihood_ratio(2.0, 1.0) < 0

    rng = np.random.default_rng(SEED)
    base = rng.normal(size=8)
    refs = [ext_set("r0", 0, base + 0.25), ext_set("r1", 0, base + 0.5)]
    pool = [ext_set(f"u{i}", 0, base + 2.0 + i) for i in range(3)]
    q = ext_set("q", 0, base + 0.1)
    for metric in ("l1", "cosine", "dtw"):
        lrs = []
        for alpha in (1.0, 0.125, 9.75):
            scale = lambda fs: ext_set(fs.writer_id, 0,
                                       alpha * fs.get("ext:toy").values,
                                       label=fs.label)
            d1 = nearest_distance(scale(q), [scale(u) for u in pool], "ext:toy", metric)
            d2 = nearest_distance(scale(q), [scale(r) for r in refs], "ext:toy", metric)
            lrs.append(likelihood_ratio(d2, d1))
        assert max(lrs) - min(lrs) < TOL_LR, metric
    ok("math-core/lr-identities+alpha-scaling (all metrics)")


def test_math_core_probability_identities():
    rng = np.random.default_rng(SEED)
    for _ in range(500):
        fit = GaussianFit(mu=float(rng.normal() * 4),
                          sigma=float(rng.uniform(0.01, 8.0)), n_samples=5)
        assert abs(prob_ubm(fit.mu, fit) - 0.5) <= TOL_PROB_HALF
        x = float(rng.normal() * 20)
        assert abs(prob_ubm(x, fit) + prob_ref(x, fit) - 1.0) <= TOL_PROB_SUM
    fit = GaussianFit(mu=0.7, sigma=1.3, n_samples=5)
    grid = np.linspace(fit.mu - 8 * fit.sigma, fit.mu + 8 * fit.sigma, 400)
    ps = [prob_ubm(float(x), fit) for x in grid]
    assert all(a > b for a, b in zip(ps, ps[1:]))
    ok("math-core/probability-identities")


def test_math_core_lr_populations_hand_worlds():
    # universe world: members 0, 10, 20; single reference at 100
    u = UniverseModel(members=tuple(ext_set(f"u{i}", 0, [v])
                                    for i, v in enumerate((0.0, 10.0, 20.0))))
    pop = ubm_lr_population(u, [ext_set("r", 0, [100.0])], "ext:toy", "l1")
    hand = [-2 * math.log(100.0 / 10.0), -2 * math.log(90.0 / 10.0),
            -2 * math.log(80.0 / 10.0)]
    assert np.allclose(pop.values, hand, atol=TOL_HAND)

    # reference world: references 0 and 2, universe at 10/11; each reference
    # scores like a questioned specimen (own-pool over universe distance)
    refs = [ext_set("r0", 0, [0.0]), ext_set("r1", 0, [2.0])]
    u2 = UniverseModel(members=tuple(ext_set(f"v{i}", 0, [10.0 + i])
                                     for i in range(2)))
    rpop = ref_lr_population(refs, u2, "ext:toy", "l1")
    rhand = [-2 * math.log(2.0 / 10.0), -2 * math.log(2.0 / 8.0)]
    assert np.allclose(rpop.values, rhand, atol=TOL_HAND)

    # leave-one-out integrity: self-inclusion would floor every distance to
    # EPS and blow the values past -40; the hand values above prove exclusion
    assert all(v > -40 for v in pop.values)

    # permutation invariance of both populations
    perm_u = UniverseModel(members=(u.members[2], u.members[0], u.members[1]))
    perm_pop = ubm_lr_population(perm_u, [ext_set("r", 0, [100.0])], "ext:toy", "l1")
    assert np.allclose(sorted(perm_pop.values), sorted(pop.values), atol=1e-12)
    fa, fb = fit_gaussian(pop), fit_gaussian(perm_pop)
    assert abs(fa.mu - fb.mu) < 1e-12 and abs(fa.sigma - fb.sigma) < 1e-12
    rpop_perm = ref_lr_population(list(reversed(refs)), u2, "ext:toy", "l1")
    assert np.allclose(sorted(rpop_perm.values), sorted(rpop.values), atol=1e-12)
    ok("math-core/leave-one-out-populations (hand worlds, 1e-9)")


# =====================================================================
# Separable toy corpus end-to-end (< 2 min)
# =====================================================================

def test_toy_corpus_eer_zero_everywhere(toy):
    failures = []
    for metric in ("l1", "cosine", "dtw"):
        cache = UbmDistanceCache(toy.ubm, metric)
        for channel in EXPLAINABLE_CHANNELS:
            for scenario in ("random_forgery", "skilled_forgery"):
                protocol = Protocol(scenario=scenario, n_refs=1, metric=metric,
                                    channels=(channel,),
                                    weights=((channel, 1.0),), rng_seed=SEED)
                scores = score_trials(protocol, toy.store, toy.ubm, cache=cache)
                rate = eer(det_curve(scores.genuine, scores.impostor))
                if rate != 0.0:
                    failures.append((metric, channel, scenario, rate))
    assert not failures, failures
    ok("toy-corpus/eer-zero (3 metrics x 7 channels x RF+SF)")


def test_toy_corpus_one_vs_one_reports(toy):
    for writer in toy.store.writers():
        refs, questioned = split_enrollment(toy.store.genuine(writer), 1)
        report = verify(questioned[0], refs, toy.ubm,
                        channels=EXPLAINABLE_CHANNELS, metric="l1")
        for channel in EXPLAINABLE_CHANNELS:
            evd = report.per_channel[channel]
            assert 0.0 <= evd.p_u <= 1.0
            assert evd.p_r is None and evd.ref_fit is None
        assert report.n_references == 1
    ok("toy-corpus/1-vs-1-reports-have-P(U)-never-P(R)")


# =====================================================================
# CEDAR desk-scale reproduction (public corpus required)
# =====================================================================

CEDAR_ROOT = os.environ.get("SIGPROOF_CEDAR_ROOT", "")
UBM_ROOT = os.environ.get("SIGPROOF_UBM_ROOT", "")
UBM_LAYOUT = os.environ.get("SIGPROOF_UBM_LAYOUT", "cedar")

needs_cedar = pytest.mark.skipif(
    not CEDAR_ROOT,
    reason="SIGPROOF_CEDAR_ROOT is not set. The CEDAR corpus cannot be "
           "downloaded in this environment (no external network); mount the "
           "extracted corpus and set the variable to run the corpus criteria.")

N_UBM_HOLDOUT_WRITERS = 27  # when the model is carved out of CEDAR itself


def _extract_cached(root: str, layout: str, tag: str):
    manifest = scan_manifest(root, layout)
    cache = Path(root) / f".sigproof_features_{tag}.jsonl"
    if cache.exists():
        return manifest, load_feature_sets(cache)
    sets = extract_manifest(manifest, EXPLAINABLE_CHANNELS,
                            jobs=os.cpu_count() or 1)
    dump_feature_sets(sets, cache)
    return manifest, sets


@pytest.fixture(scope="session")
def cedar():
    manifest, sets = _extract_cached(CEDAR_ROOT, "cedar", "512")
    assert len(manifest) == 2640, "expected 55 writers x 24 genuine x 24 forged"
    assert len(manifest.writers()) == 55

    if UBM_ROOT:
        _, ubm_sets = _extract_cached(UBM_ROOT, UBM_LAYOUT, "512")
        rule = "first-per-writer" if len({s.writer_id for s in ubm_sets}) >= 300 \
            else "round-robin"
        ubm = build_ubm(ubm_sets, n=300, rule=rule, provenance=f"{UBM_ROOT}:{rule}")
        eval_sets = sets
    else:
        holdout = set(manifest.writers()[:N_UBM_HOLDOUT_WRITERS])
        ubm = build_ubm([s for s in sets if s.writer_id in holdout], n=300,
                        rule="round-robin", provenance="cedar-holdout:round-robin")
        eval_sets = [s for s in sets if s.writer_id not in holdout]
    return FeatureStore(eval_sets, name="cedar"), ubm


def _cell_eer(store, ubm, scenario, n_refs, cache, ubm_size=None):
    protocol = Protocol(scenario=scenario, n_refs=n_refs, metric="l1",
                        channels=EXPLAINABLE_CHANNELS, rng_seed=SEED)
    scores = score_trials(protocol, store, ubm, cache=cache, ubm_size=ubm_size)
    return eer(det_curve(scores.genuine, scores.impostor))


@pytest.fixture(scope="session")
def cedar_cache(cedar):
    return UbmDistanceCache(cedar[1], "l1")


@needs_cedar
def test_cedar_desk_scale_reproduction(cedar, cedar_cache):
    store, ubm = cedar
    rf1 = _cell_eer(store, ubm, "random_forgery", 1, cedar_cache)
    sf1 = _cell_eer(store, ubm, "skilled_forgery", 1, cedar_cache)
    assert CEDAR_RF_BAND[0] <= rf1 <= CEDAR_RF_BAND[1], f"RF EER {rf1:.4f}"
    assert CEDAR_SF_BAND[0] <= sf1 <= CEDAR_SF_BAND[1], f"SF EER {sf1:.4f}"
    rf10 = _cell_eer(store, ubm, "random_forgery", 10, cedar_cache)
    sf10 = _cell_eer(store, ubm, "skilled_forgery", 10, cedar_cache)
    assert rf10 <= CEDAR_RF10_MAX, f"RF@10 EER {rf10:.4f}"
    assert sf10 <= CEDAR_SF10_MAX, f"SF@10 EER {sf10:.4f}"
    assert rf10 < rf1 and sf10 < sf1, "10-reference cell must strictly improve"
    ok(f"cedar/desk-scale (RF1={rf1:.4f} SF1={sf1:.4f} RF10={rf10:.4f} "
       f"SF10={sf10:.4f})")


@needs_cedar
def test_cedar_reference_size_trend(cedar, cedar_cache):
    store, ubm = cedar
    for scenario in ("random_forgery", "skilled_forgery"):
        rates = [_cell_eer(store, ubm, scenario, n, cedar_cache)
                 for n in (1, 3, 5, 10)]
        for earlier, later in zip(rates, rates[1:]):
            assert later <= earlier + TREND_NOISE_BAND, (scenario, rates)
    ok("cedar/reference-size-trend (non-increasing within 0.5 points)")


@needs_cedar
def test_cedar_ubm_size_stability(cedar, cedar_cache):
    store, ubm = cedar
    for scenario in ("random_forgery", "skilled_forgery"):
        e150 = _cell_eer(store, ubm, scenario, 1, cedar_cache, ubm_size=150)
        e300 = _cell_eer(store, ubm, scenario, 1, cedar_cache, ubm_size=300)
        assert abs(e150 - e300) <= UBM_STABILITY_BAND, (scenario, e150, e300)
    ok("cedar/ubm-size-stability (|EER150 - EER300| <= 2 points)")


@needs_cedar
def test_cedar_sweep_determinism(cedar, tmp_path):
    store, ubm = cedar
    grid = SweepGrid(scenarios=("random_forgery", "skilled_forgery"),
                     n_refs=(1, 3, 5, 10), metrics=("l1",),
                     channel_sets=(EXPLAINABLE_CHANNELS,), seed=SEED)
    a, b = tmp_path / "run_a.csv", tmp_path / "run_b.csv"
    run_sweep(store, {"cedar": ubm}, grid, out_csv=a)
    run_sweep(store, {"cedar": ubm}, grid, out_csv=b)
    assert a.read_bytes() == b.read_bytes()
    ok("cedar/sweep-determinism (byte-identical CSVs)")
