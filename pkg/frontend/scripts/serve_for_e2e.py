"""Boot a verification service with a toy universe model for the e2e run.

Writes the upload assets (questioned + two references, same writer style)
into --assets, builds a toy UBM under --workdir, and serves until killed.
"""

import argparse
import sys
import tempfile
from pathlib import Path

import uvicorn

from sigproof.config import EXPLAINABLE_CHANNELS
from sigproof.corpus import scan_manifest
from sigproof.pipeline import extract_manifest
from sigproof.service import create_app
from sigproof.synth import render_glyph, save_png, toy_corpus
from sigproof.ubm import build_ubm, save_ubm


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, default=8799)
    parser.add_argument("--assets", required=True)
    parser.add_argument("--workdir", default=None)
    args = parser.parse_args()

    workdir = Path(args.workdir or tempfile.mkdtemp(prefix="sigproof-e2e-"))
    assets = Path(args.assets)
    assets.mkdir(parents=True, exist_ok=True)

    save_png(render_glyph(style=1, seed=77), assets / "questioned.png")
    save_png(render_glyph(style=1, seed=77), assets / "reference1.png")
    save_png(render_glyph(style=1, seed=77), assets / "reference2.png")

    corpus = toy_corpus(workdir / "corpus", n_ubm_writers=6, seed=77)
    ubm_sets = extract_manifest(scan_manifest(corpus.ubm_manifest, "flat-json"),
                                EXPLAINABLE_CHANNELS, canvas=256)
    ubm_dir = workdir / "ubms"
    ubm_dir.mkdir(exist_ok=True)
    save_ubm(build_ubm(ubm_sets, n=6, provenance="e2e-toy"), ubm_dir / "toy.sig")

    app = create_app(ubm_dir, workdir / "data", canvas=256)
    print(f"E2E_READY port={args.port}", flush=True)
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
