"""
Case workflow over the HTTP service
===================================

The service owns case state: upload a questioned signature and references,
set the config, evaluate, read the report. Any mutation invalidates the
stored report, so the examiner can never read stale evidence. This script
starts the service in-process, drives one case through the API with plain
urllib, and shows how P(R) appears once a second reference arrives.
"""

import io
import json
import tempfile
import threading
import time
import urllib.request
from pathlib import Path

import numpy as np
import uvicorn
from PIL import Image

from sigproof.config import EXPLAINABLE_CHANNELS
from sigproof.corpus import scan_manifest
from sigproof.pipeline import extract_manifest
from sigproof.service import create_app
from sigproof.synth import render_glyph, toy_corpus
from sigproof.ubm import build_ubm, save_ubm

PORT = 8741
BASE = f"http://127.0.0.1:{PORT}"


def call(method, path, data=None, content_type="application/json"):
    body = None
    if data is not None:
        body = data if isinstance(data, bytes) else json.dumps(data).encode()
    req = urllib.request.Request(BASE + path, data=body, method=method,
                                 headers={"content-type": content_type})
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())


def png_bytes(style):
    arr = np.round(render_glyph(style=style, seed=21) * 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L").save(buf, format="PNG")
    return buf.getvalue()


# %%
# Prepare a universe model on disk and boot the service.

workdir = Path(tempfile.mkdtemp(prefix="sigproof-demo-"))
corpus = toy_corpus(workdir / "corpus", n_ubm_writers=6, seed=21)
ubm_sets = extract_manifest(scan_manifest(corpus.ubm_manifest, "flat-json"),
                            EXPLAINABLE_CHANNELS, canvas=256)
(workdir / "ubms").mkdir()
save_ubm(build_ubm(ubm_sets, n=6), workdir / "ubms" / "demo.sig")

app = create_app(workdir / "ubms", workdir / "data", canvas=256)
server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=PORT,
                                       log_level="warning"))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.05)
print("service up:", call("GET", "/api/ubms"))

# %%
# One case: questioned + single reference. With one reference the report
# carries P(U) only.

case_id = call("POST", "/api/cases")["case_id"]
call("POST", f"/api/cases/{case_id}/specimens?role=questioned",
     png_bytes(style=1), "image/png")
call("POST", f"/api/cases/{case_id}/specimens?role=reference",
     png_bytes(style=1), "image/png")
report = call("POST", f"/api/cases/{case_id}/evaluate")
print(f"\n1 reference: fused {report['fused_score']:+.3f}, "
      f"P(R) fields: {{ {set(ev['p_r'] for ev in report['per_channel'].values())} }}")

# %%
# Add a second reference (this clears the stored report), re-evaluate, and
# P(R) appears.

call("POST", f"/api/cases/{case_id}/specimens?role=reference",
     png_bytes(style=1), "image/png")
report = call("POST", f"/api/cases/{case_id}/evaluate")
print("2 references, per-channel evidence:")
for channel, ev in sorted(report["per_channel"].items()):
    print(f"  {channel:>3}  LR_q {ev['lr_q']:+9.3f}  P(U) {ev['p_u']:.4f}  "
          f"P(R) {ev['p_r']:.4f}")

server.should_exit = True
thread.join(timeout=5)
print("\nservice stopped")
