"""Deterministic toy signature corpus for demos and tests.

Each "writer" is a seeded glyph style: a few parametric strokes (a
sinusoid, a slant, a loop) stamped onto a white canvas with ink whose
intensity varies along the stroke, so every feature channel sees real
structure. Genuine specimens of a writer are identical by construction
and forgeries use unrelated styles, which makes the corpus perfectly
separable: questioned genuines cluster with the references, forgeries
with everything else.

This is test plumbing only; it has nothing to do with motor-control
signature synthesis, and corpora produced here are handled exactly like
scanned ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image


def _disk_offsets(radius: int) -> list[tuple[int, int]]:
    offs = []
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dy * dy + dx * dx <= radius * radius:
                offs.append((dy, dx))
    return offs


def _stamp(canvas: np.ndarray, ys, xs, values, radius: int) -> None:
    h, w = canvas.shape
    for dy, dx in _disk_offsets(radius):
        yy = np.clip(np.round(ys).astype(np.int64) + dy, 0, h - 1)
        xx = np.clip(np.round(xs).astype(np.int64) + dx, 0, w - 1)
        np.minimum.at(canvas, (yy, xx), values)


def render_glyph(style: int, seed: int = 0, size: tuple[int, int] = (120, 180)
                 ) -> np.ndarray:
    """Grayscale glyph in [0,1] for one style id; identical for identical args."""
    rng = np.random.default_rng([seed, style])
    h, w = size
    canvas = np.ones((h, w))
    t = np.linspace(0.0, 1.0, 700)

    def ink(freq, phase):
        return 0.12 + 0.18 * (0.5 + 0.5 * np.sin(2.0 * np.pi * freq * t + phase))

    # main sinusoid stroke
    margin = 12
    xs = margin + (w - 2 * margin) * t
    cy = h * rng.uniform(0.35, 0.65)
    amp = h * rng.uniform(0.12, 0.30)
    freq = rng.uniform(1.0, 3.5)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    ys = cy + amp * np.sin(2.0 * np.pi * freq * t + phase)
    _stamp(canvas, ys, xs, ink(rng.uniform(3, 9), rng.uniform(0, 6)),
           int(rng.integers(2, 4)))

    # slanted cross stroke
    x0, x1 = sorted(rng.uniform(margin, w - margin, size=2))
    y0, y1 = rng.uniform(margin, h - margin, size=2)
    _stamp(canvas, y0 + (y1 - y0) * t, x0 + (x1 - x0) * t,
           ink(rng.uniform(3, 9), rng.uniform(0, 6)), int(rng.integers(1, 3)))

    # loop
    lcx = rng.uniform(0.25 * w, 0.75 * w)
    lcy = rng.uniform(0.35 * h, 0.65 * h)
    rx = rng.uniform(0.08, 0.2) * w
    ry = rng.uniform(0.12, 0.3) * h
    ang = 2.0 * np.pi * t
    _stamp(canvas, lcy + ry * np.sin(ang), lcx + rx * np.cos(ang),
           ink(rng.uniform(3, 9), rng.uniform(0, 6)), int(rng.integers(1, 3)))
    return canvas


def save_png(pixels: np.ndarray, path: Path) -> None:
    arr = np.round(np.clip(pixels, 0.0, 1.0) * 255.0).astype(np.uint8)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr, mode="L").save(path)


@dataclass(frozen=True)
class ToyCorpus:
    root: Path
    eval_manifest: Path
    ubm_manifest: Path


def toy_corpus(root, n_writers: int = 3, n_genuine: int = 4, n_forgeries: int = 2,
               n_ubm_writers: int = 6, seed: int = 7,
               size: tuple[int, int] = (120, 180)) -> ToyCorpus:
    """Write a separable evaluation corpus plus a disjoint UBM corpus."""
    root = Path(root)
    eval_rows = []
    for k in range(1, n_writers + 1):
        writer = f"w{k:02d}"
        glyph = render_glyph(style=k, seed=seed, size=size)
        for s in range(n_genuine):
            rel = f"images/{writer}_g{s:02d}.png"
            save_png(glyph, root / "eval" / rel)
            eval_rows.append({"writer_id": writer, "specimen": s,
                              "label": "genuine", "path": rel})
        for s in range(n_forgeries):
            rel = f"images/{writer}_f{s:02d}.png"
            save_png(render_glyph(style=1000 + 10 * k + s, seed=seed, size=size),
                     root / "eval" / rel)
            eval_rows.append({"writer_id": writer, "specimen": s,
                              "label": "forgery", "path": rel})
    eval_manifest = root / "eval" / "manifest.json"
    eval_manifest.write_text(json.dumps(eval_rows, indent=1))

    ubm_rows = []
    for k in range(1, n_ubm_writers + 1):
        writer = f"u{k:02d}"
        rel = f"images/{writer}_g00.png"
        save_png(render_glyph(style=500 + k, seed=seed, size=size),
                 root / "ubm" / rel)
        ubm_rows.append({"writer_id": writer, "specimen": 0,
                         "label": "genuine", "path": rel})
    ubm_manifest = root / "ubm" / "manifest.json"
    ubm_manifest.write_text(json.dumps(ubm_rows, indent=1))
    return ToyCorpus(root=root, eval_manifest=eval_manifest, ubm_manifest=ubm_manifest)
