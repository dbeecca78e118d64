"""Command-line interface.

Subcommands mirror the pipeline stages: corpus scan, features extract,
ubm build, verify, eval, serve.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import DEFAULT_CANVAS, DL_WEIGHTS
from .corpus import load_image, preprocess, scan_manifest
from .errors import SigproofError
from .evaluation import FeatureStore, SweepGrid, parse_scenario, run_sweep
from .evidence import default_weights, verify
from .features import extract_features, load_feature_sets
from .pipeline import extract_manifest, parse_channels
from .ubm import build_ubm, load_ubm, save_ubm


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sigproof",
                                     description="explainable offline signature verification")
    sub = parser.add_subparsers(dest="command", required=True)

    corpus = sub.add_parser("corpus", help="corpus utilities").add_subparsers(
        dest="subcommand", required=True)
    scan = corpus.add_parser("scan", help="enumerate a corpus directory")
    scan.add_argument("--root", required=True)
    scan.add_argument("--layout", required=True, choices=("cedar", "mcyt", "flat-json"))
    scan.add_argument("--out", required=True)

    features = sub.add_parser("features", help="feature extraction").add_subparsers(
        dest="subcommand", required=True)
    extract = features.add_parser("extract", help="extract channels for a manifest")
    extract.add_argument("--manifest", required=True)
    extract.add_argument("--channels", default="g,qt,rl,t")
    extract.add_argument("--out", required=True)
    extract.add_argument("--canvas", type=int, default=DEFAULT_CANVAS)
    extract.add_argument("--jobs", type=int, default=1)
    extract.add_argument("--invert", action="store_true",
                         help="flip light-on-dark scans before binarization")

    ubm = sub.add_parser("ubm", help="universe model utilities").add_subparsers(
        dest="subcommand", required=True)
    build = ubm.add_parser("build", help="build a universe model from features")
    build.add_argument("--features", required=True)
    build.add_argument("--n", type=int, required=True)
    build.add_argument("--rule", default="first-per-writer",
                       choices=("first-per-writer", "first-specimens", "round-robin"))
    build.add_argument("--origin", default="real", choices=("real", "synthetic"))
    build.add_argument("--provenance", default="")
    build.add_argument("--out", required=True)

    ver = sub.add_parser("verify", help="verify one questioned signature")
    ver.add_argument("--ubm", required=True)
    ver.add_argument("--refs", required=True, help="comma-separated reference images")
    ver.add_argument("--questioned", required=True)
    ver.add_argument("--metric", default="l1", choices=("dtw", "l1", "cosine"))
    ver.add_argument("--channels", default="g,qt,rl,t")
    ver.add_argument("--weights", default="default-h",
                     help="default-h, default-dl, or a JSON file of channel weights")
    ver.add_argument("--prob-mode", default="oriented", choices=("oriented", "raw"))
    ver.add_argument("--threshold", type=float, default=None)
    ver.add_argument("--canvas", type=int, default=DEFAULT_CANVAS)
    ver.add_argument("--out", required=True)
    ver.add_argument("--plot", default=None, help="write per-channel curves (svg/png)")

    ev = sub.add_parser("eval", help="run the EER evaluation harness")
    ev.add_argument("--manifest", default=None,
                    help="optional corpus manifest (informational)")
    ev.add_argument("--features", required=True)
    ev.add_argument("--ubm", required=True)
    ev.add_argument("--protocol", default="both", help="rf, sf, or both")
    ev.add_argument("--n-refs", default="1")
    ev.add_argument("--metric", default="l1", choices=("dtw", "l1", "cosine"))
    ev.add_argument("--channels", default="g,qt,rl,t")
    ev.add_argument("--ubm-sizes", default="",
                    help="comma-separated truncations of the universe model")
    ev.add_argument("--seed", type=int, default=42)
    ev.add_argument("--rf-impostors", type=int, default=74)
    ev.add_argument("--jobs", type=int, default=1)
    ev.add_argument("--out", required=True)
    ev.add_argument("--det-dir", default=None)
    ev.add_argument("--det-svg", action="store_true",
                    help="also emit an SVG plot per DET curve")

    serve = sub.add_parser("serve", help="run the case-verification service")
    serve.add_argument("--ubm-dir", required=True)
    serve.add_argument("--data-dir", required=True)
    serve.add_argument("--static-dir", default=None)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8741)
    return parser


def _cmd_corpus_scan(args) -> int:
    manifest = scan_manifest(args.root, args.layout)
    manifest.save(args.out)
    print(f"{len(manifest)} entries from {len(manifest.writers())} writers -> {args.out}")
    return 0


def _cmd_features_extract(args) -> int:
    from .features import dump_feature_sets

    manifest = scan_manifest(args.manifest, "flat-json")
    channels = parse_channels(args.channels)
    sets = extract_manifest(manifest, channels, canvas=args.canvas,
                            invert=args.invert, jobs=args.jobs)
    dump_feature_sets(sets, args.out)
    print(f"extracted {','.join(channels)} for {len(sets)} specimens -> {args.out}")
    return 0


def _cmd_ubm_build(args) -> int:
    sets = load_feature_sets(args.features)
    model = build_ubm(sets, n=args.n, rule=args.rule, origin=args.origin,
                      provenance=args.provenance)
    save_ubm(model, args.out)
    print(f"universe model: {model.size} members, channels {','.join(model.channels)} "
          f"-> {args.out}")
    return 0


def _load_weights(spec: str, channels) -> dict[str, float]:
    if spec == "default-h":
        return default_weights(channels)
    if spec == "default-dl":
        missing = [ch for ch in channels if ch not in DL_WEIGHTS]
        if missing:
            raise SigproofError(f"default-dl weights do not cover {missing}")
        total = sum(DL_WEIGHTS[ch] for ch in channels)
        return {ch: DL_WEIGHTS[ch] / total for ch in channels}
    weights = json.loads(Path(spec).read_text())
    return {str(k): float(v) for k, v in weights.items()}


def _featurize_file(path: str, channels, canvas: int, writer_id: str, index: int):
    image = load_image(path, writer_id=writer_id, specimen_index=index)
    return extract_features(preprocess(image, canvas=canvas), channels)


def _cmd_verify(args) -> int:
    model = load_ubm(args.ubm)
    channels = parse_channels(args.channels)
    questioned = _featurize_file(args.questioned, channels, args.canvas, "questioned", 0)
    references = [_featurize_file(p, channels, args.canvas, "claimed", i)
                  for i, p in enumerate(args.refs.split(","))]
    weights = _load_weights(args.weights, channels)
    report = verify(questioned, references, model, channels=channels,
                    metric=args.metric, weights=weights, prob_mode=args.prob_mode,
                    decision_threshold=args.threshold)
    Path(args.out).write_text(json.dumps(report.to_json_dict(), indent=1))
    for ch in report.channels:
        ev = report.per_channel[ch]
        p_r = "-" if ev.p_r is None else f"{ev.p_r:.4f}"
        print(f"{ch:>3}: LR_q={ev.lr_q:+.4f}  P(U)={ev.p_u:.4f}  P(R)={p_r}")
    print(f"fused score: {report.fused_score:+.4f}"
          + (f"  decision: {report.decision}" if report.decision else ""))
    if args.plot:
        _plot_report(report, args.plot)
        print(f"curves -> {args.plot}")
    return 0


def _plot_report(report, out_path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    channels = report.channels
    fig, axes = plt.subplots(len(channels), 1, figsize=(7, 2.2 * len(channels)),
                             squeeze=False)
    for ax, ch in zip(axes[:, 0], channels):
        cs = report.curves[ch]
        ax.plot(cs.lr, cs.ubm_pdf, color="red", label="universe")
        if cs.ref_pdf is not None:
            ax.plot(cs.lr, cs.ref_pdf, color="blue", label="references")
        ax.axvline(cs.lr_q, color="black", linestyle="--", label="LR_q")
        ax.set_ylabel(ch)
        ax.legend(loc="upper right", fontsize=7)
    axes[-1, 0].set_xlabel("likelihood ratio")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def _cmd_eval(args) -> int:
    store = FeatureStore.from_jsonl(args.features)
    model = load_ubm(args.ubm)
    scenarios = (tuple(parse_scenario(s) for s in args.protocol.split(","))
                 if args.protocol != "both"
                 else ("random_forgery", "skilled_forgery"))
    n_refs = tuple(int(x) for x in args.n_refs.split(","))
    sizes = (tuple(int(x) for x in args.ubm_sizes.split(",")) if args.ubm_sizes
             else (None,))
    grid = SweepGrid(scenarios=scenarios, n_refs=n_refs, metrics=(args.metric,),
                     channel_sets=(parse_channels(args.channels),), ubm_sizes=sizes,
                     seed=args.seed, rf_impostor_writers=args.rf_impostors)
    results = run_sweep(store, {Path(args.ubm).stem: model}, grid,
                        out_csv=args.out, det_dir=args.det_dir,
                        det_svg=args.det_svg, jobs=args.jobs)
    for r in results:
        eer_txt = "error" if r.eer is None else f"{100 * r.eer:6.2f}%"
        print(f"{r.protocol.scenario:16} n_refs={r.protocol.n_refs:<2} "
              f"ubm={r.ubm_size:<4} {r.protocol.metric:6} EER={eer_txt}")
    print(f"results -> {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.ubm_dir, args.data_dir, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_HANDLERS = {
    ("corpus", "scan"): _cmd_corpus_scan,
    ("features", "extract"): _cmd_features_extract,
    ("ubm", "build"): _cmd_ubm_build,
    ("verify", None): _cmd_verify,
    ("eval", None): _cmd_eval,
    ("serve", None): _cmd_serve,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = _HANDLERS[(args.command, getattr(args, "subcommand", None))]
    try:
        return handler(args)
    except SigproofError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
