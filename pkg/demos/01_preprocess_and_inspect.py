"""
Preprocessing a signature scan
==============================

Every pipeline stage works on float images in [0, 1]. A grayscale scan is
thresholded with Otsu's method (ink = 1), tight-cropped to the ink
bounding box, scaled so the longer side hits the canvas size, and padded
to a square. This script renders a synthetic signature, runs the chain,
and saves a before/after figure.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from sigproof.corpus import GRAYSCALE, SignatureImage, binarize, ink_bbox, preprocess
from sigproof.synth import render_glyph

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# %%
# Render a toy specimen and wrap it as a grayscale SignatureImage.

pixels = render_glyph(style=12, seed=3, size=(140, 220))
scan = SignatureImage(pixels, GRAYSCALE, writer_id="demo", source="synthetic")
print(f"scan: {scan.width} x {scan.height}, intensity "
      f"[{pixels.min():.2f}, {pixels.max():.2f}]")

# %%
# Binarize and inspect the ink geometry.

mask = binarize(scan)
r0, r1, c0, c1 = ink_bbox(mask)
print(f"ink pixels: {int(mask.pixels.sum())}, bounding box rows {r0}..{r1}, "
      f"cols {c0}..{c1}")

# %%
# The full preprocessing pair: aligned grayscale + binary views on a fixed
# canvas. Feature extractors consume exactly these two views.

pair = preprocess(scan, canvas=256)
print(f"canvas: {pair.binary.pixels.shape}, "
      f"ink fraction {pair.binary.pixels.mean():.4f}")

fig, axes = plt.subplots(1, 3, figsize=(12, 3.2))
axes[0].imshow(scan.pixels, cmap="gray", vmin=0, vmax=1)
axes[0].set_title("scan")
axes[1].imshow(pair.gray.pixels, cmap="gray", vmin=0, vmax=1)
axes[1].set_title("cropped grayscale")
axes[2].imshow(pair.binary.pixels, cmap="gray_r", vmin=0, vmax=1)
axes[2].set_title("binary mask (ink = 1)")
for ax in axes:
    ax.set_xticks([])
    ax.set_yticks([])
fig.tight_layout()
fig.savefig(OUT / "01_preprocess.png", dpi=120)
print(f"figure -> {OUT / '01_preprocess.png'}")
