"""Signature corpora: image loading, preprocessing, and dataset manifests.

Images travel through the pipeline as float arrays in [0, 1]. The internal
polarity convention is fixed: ink = 1 in binary images, ink is *dark* in
grayscale ones (scans of light ink on dark paper are flipped at load time
via the ``invert`` flag).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np
from PIL import Image, UnidentifiedImageError

from .config import DEFAULT_CANVAS
from .errors import (
    DegenerateImage,
    DuplicateEntry,
    EmptyCorpus,
    EmptySignature,
    UnknownLayout,
    UnreadableFile,
    UnsupportedFormat,
)

GRAYSCALE = "grayscale"
BINARY = "binary"

SUPPORTED_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".pgm")

# Luminance weights for RGB -> gray conversion.
_RGB_TO_GRAY = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class SignatureImage:
    """One offline signature raster plus its provenance."""

    pixels: np.ndarray
    kind: str
    writer_id: str = ""
    specimen_index: int = 0
    label: str = "genuine"
    source: str = ""

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2:
            raise ValueError("pixels must be a 2-D array")
        if self.kind not in (GRAYSCALE, BINARY):
            raise ValueError(f"unknown image kind {self.kind!r}")
        object.__setattr__(self, "pixels", px)
        px.setflags(write=False)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def ink_mask(self) -> np.ndarray:
        if self.kind != BINARY:
            raise ValueError("ink_mask is defined for binary images only")
        return self.pixels > 0.5


def load_image(path, *, writer_id: str = "", specimen_index: int = 0,
               label: str = "genuine", invert: bool = False) -> SignatureImage:
    """Read one image file into a grayscale SignatureImage scaled to [0, 1]."""
    path = Path(path)
    if path.suffix.lower() not in SUPPORTED_SUFFIXES:
        raise UnsupportedFormat(f"unsupported image format: {path.suffix!r} ({path})")
    try:
        with Image.open(path) as im:
            gray = _to_gray_array(im)
    except (FileNotFoundError, OSError, UnidentifiedImageError, ValueError) as exc:
        raise UnreadableFile(f"cannot read image {path}: {exc}") from exc
    if invert:
        gray = 1.0 - gray
    return SignatureImage(gray, GRAYSCALE, writer_id=writer_id,
                          specimen_index=specimen_index, label=label,
                          source=str(path))


def _to_gray_array(im: Image.Image) -> np.ndarray:
    if im.mode in ("RGB", "RGBA", "P", "CMYK", "LA"):
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
        return arr @ _RGB_TO_GRAY / 255.0
    if im.mode == "1":
        return np.asarray(im.convert("L"), dtype=np.float64) / 255.0
    if im.mode == "L":
        return np.asarray(im, dtype=np.float64) / 255.0
    if im.mode.startswith("I"):
        arr = np.asarray(im.convert("I"), dtype=np.float64)
        top = arr.max()
        return arr / top if top > 255 else arr / 255.0
    raise ValueError(f"unhandled image mode {im.mode!r}")


def otsu_threshold_index(pixels: np.ndarray) -> int | None:
    """Otsu's threshold over a 256-bin histogram of values in [0, 1].

    Returns the bin index k maximizing the between-class variance for the
    split {bins <= k} vs {bins > k}, ties broken toward the lowest k, or
    None when the image has no contrast at all (single occupied bin).
    """
    hist, _ = np.histogram(pixels, bins=256, range=(0.0, 1.0))
    hist = hist.astype(np.float64)
    total = hist.sum()
    if total == 0 or np.count_nonzero(hist) < 2:
        return None
    centers = (np.arange(256) + 0.5) / 256.0
    w0 = np.cumsum(hist)
    w1 = total - w0
    m0 = np.cumsum(hist * centers)
    mtot = m0[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = m0 / w0
        mu1 = (mtot - m0) / w1
        var_between = w0 * w1 * (mu0 - mu1) ** 2
    var_between = np.nan_to_num(var_between[:-1], nan=-1.0)
    if var_between.max() <= 0:
        return None
    return int(np.argmax(var_between))


def binarize(img: SignatureImage) -> SignatureImage:
    """Threshold a grayscale image with Otsu's method; darker pixels become ink."""
    if img.kind != GRAYSCALE:
        raise ValueError("binarize expects a grayscale image")
    k = otsu_threshold_index(img.pixels)
    if k is None:
        raise DegenerateImage(f"image has no intensity contrast: {img.source or '<array>'}")
    bin_index = np.minimum((img.pixels * 256.0).astype(np.int64), 255)
    ink = (bin_index <= k).astype(np.float64)
    return replace(img, pixels=ink, kind=BINARY)


def ink_bbox(img: SignatureImage) -> tuple[int, int, int, int]:
    """Tight inclusive bounding box (r0, r1, c0, c1) of the ink pixels."""
    mask = img.ink_mask()
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    if rows.size == 0:
        raise EmptySignature(f"no ink pixels in {img.source or '<array>'}")
    return int(rows[0]), int(rows[-1]), int(cols[0]), int(cols[-1])


def _nn_resize(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    h, w = arr.shape
    rows = np.minimum((np.arange(out_h) + 0.5) * h / out_h, h - 1).astype(np.int64)
    cols = np.minimum((np.arange(out_w) + 0.5) * w / out_w, w - 1).astype(np.int64)
    return arr[np.ix_(rows, cols)]


def _bilinear_resize(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    h, w = arr.shape
    ry = np.clip((np.arange(out_h) + 0.5) * h / out_h - 0.5, 0, h - 1)
    rx = np.clip((np.arange(out_w) + 0.5) * w / out_w - 0.5, 0, w - 1)
    y0 = np.floor(ry).astype(np.int64)
    x0 = np.floor(rx).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ry - y0)[:, None]
    fx = (rx - x0)[None, :]
    a = arr[np.ix_(y0, x0)]
    b = arr[np.ix_(y0, x1)]
    c = arr[np.ix_(y1, x0)]
    d = arr[np.ix_(y1, x1)]
    return (a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx
            + c * fy * (1 - fx) + d * fy * fx)


def _scaled_shape(h: int, w: int, canvas: int) -> tuple[int, int]:
    if h >= w:
        return canvas, max(1, round(w * canvas / h))
    return max(1, round(h * canvas / w)), canvas


def crop_normalize(img: SignatureImage, canvas: int = DEFAULT_CANVAS) -> SignatureImage:
    """Tight-crop the ink, scale the longer side to `canvas`, pad to a square.

    Nearest-neighbor resampling keeps the mask strictly binary. The crop is
    tight, so before padding the ink touches all four edges; the padded
    output is centered on a canvas x canvas background.
    """
    if img.kind != BINARY:
        raise ValueError("crop_normalize expects a binary image")
    r0, r1, c0, c1 = ink_bbox(img)
    crop = img.pixels[r0:r1 + 1, c0:c1 + 1]
    th, tw = _scaled_shape(crop.shape[0], crop.shape[1], canvas)
    scaled = _nn_resize(crop, th, tw)
    out = np.zeros((canvas, canvas))
    top = (canvas - th) // 2
    left = (canvas - tw) // 2
    out[top:top + th, left:left + tw] = scaled
    return replace(img, pixels=out)


@dataclass(frozen=True)
class Preprocessed:
    """Aligned grayscale + binary views of one specimen after crop/scale."""

    gray: SignatureImage
    binary: SignatureImage


def preprocess(img: SignatureImage, canvas: int = DEFAULT_CANVAS) -> Preprocessed:
    """Full preprocessing: binarize, tight-crop, scale, pad.

    The grayscale view is cropped with the binary view's ink bounding box
    and resampled bilinearly (background pad = white); the binary view uses
    nearest-neighbor so it stays a strict 0/1 mask.
    """
    if img.kind != GRAYSCALE:
        raise ValueError("preprocess expects a grayscale image")
    binary = binarize(img)
    r0, r1, c0, c1 = ink_bbox(binary)
    bcrop = binary.pixels[r0:r1 + 1, c0:c1 + 1]
    gcrop = img.pixels[r0:r1 + 1, c0:c1 + 1]
    th, tw = _scaled_shape(bcrop.shape[0], bcrop.shape[1], canvas)
    top = (canvas - th) // 2
    left = (canvas - tw) // 2

    bout = np.zeros((canvas, canvas))
    bout[top:top + th, left:left + tw] = _nn_resize(bcrop, th, tw)
    gout = np.ones((canvas, canvas))
    gout[top:top + th, left:left + tw] = _bilinear_resize(gcrop, th, tw)
    return Preprocessed(
        gray=replace(img, pixels=gout),
        binary=replace(binary, pixels=bout),
    )


# -- manifests ----------------------------------------------------------

@dataclass(frozen=True, order=True)
class ManifestEntry:
    writer_id: str
    specimen_index: int
    label: str
    path: str


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple[ManifestEntry, ...]
    dataset_name: str = ""

    def writers(self) -> list[str]:
        return sorted({e.writer_id for e in self.entries})

    def by_writer(self, writer_id: str, label: str | None = None) -> list[ManifestEntry]:
        return [e for e in self.entries
                if e.writer_id == writer_id and (label is None or e.label == label)]

    def __len__(self) -> int:
        return len(self.entries)

    def save(self, path) -> None:
        """Write the manifest in the flat-json interchange format."""
        path = Path(path)
        base = path.parent.resolve()
        rows = []
        for e in self.entries:
            p = Path(e.path)
            try:
                rel = str(p.resolve().relative_to(base))
            except ValueError:
                rel = str(p)
            rows.append({"writer_id": e.writer_id, "specimen": e.specimen_index,
                         "label": e.label, "path": rel})
        path.write_text(json.dumps(rows, indent=1))


def load_entry_image(entry: ManifestEntry, invert: bool = False) -> SignatureImage:
    return load_image(entry.path, writer_id=entry.writer_id,
                      specimen_index=entry.specimen_index, label=entry.label,
                      invert=invert)


@dataclass(frozen=True)
class NamingRule:
    """File-name pattern carrying (writer, specimen) groups plus a label."""

    pattern: re.Pattern
    label: str


def _rule_scan(root: Path, rules: Iterable[NamingRule]) -> Iterator[ManifestEntry]:
    files = sorted(p for p in root.rglob("*")
                   if p.is_file() and p.suffix.lower() in SUPPORTED_SUFFIXES)
    for p in files:
        for rule in rules:
            m = rule.pattern.search(p.name)
            if m:
                yield ManifestEntry(writer_id=f"{int(m.group(1)):04d}",
                                    specimen_index=int(m.group(2)),
                                    label=rule.label, path=str(p.resolve()))
                break


_CEDAR_RULES = (
    NamingRule(re.compile(r"original_(\d+)_(\d+)\.\w+$", re.I), "genuine"),
    NamingRule(re.compile(r"forger(?:y|ies)_(\d+)_(\d+)\.\w+$", re.I), "forgery"),
)

# MCYT-75 style: NNNNvMM genuine, NNNNfMM forgery.
_MCYT_RULES = (
    NamingRule(re.compile(r"(\d+)v(\d+)\.\w+$", re.I), "genuine"),
    NamingRule(re.compile(r"(\d+)f(\d+)\.\w+$", re.I), "forgery"),
)


def _scan_flat_json(root: Path) -> Iterator[ManifestEntry]:
    manifest_path = root if root.suffix == ".json" else root / "manifest.json"
    if not manifest_path.is_file():
        raise EmptyCorpus(f"no manifest.json under {root}")
    try:
        rows = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise UnreadableFile(f"bad flat-json manifest {manifest_path}: {exc}") from exc
    if not isinstance(rows, list):
        raise UnreadableFile(f"flat-json manifest must be a top-level array: {manifest_path}")
    base = manifest_path.parent
    for row in rows:
        try:
            entry = ManifestEntry(writer_id=str(row["writer_id"]),
                                  specimen_index=int(row["specimen"]),
                                  label=str(row["label"]),
                                  path=str((base / row["path"]).resolve()))
        except (KeyError, TypeError, ValueError) as exc:
            raise UnreadableFile(f"bad manifest row {row!r}: {exc}") from exc
        if entry.label not in ("genuine", "forgery"):
            raise UnreadableFile(f"bad label {entry.label!r} in {manifest_path}")
        yield entry


_LAYOUTS: dict[str, Callable[[Path], Iterator[ManifestEntry]]] = {
    "cedar": lambda root: _rule_scan(root, _CEDAR_RULES),
    "mcyt": lambda root: _rule_scan(root, _MCYT_RULES),
    "flat-json": _scan_flat_json,
}


def scan_manifest(root, layout: str) -> CorpusManifest:
    """Enumerate a corpus directory into a deterministic manifest."""
    root = Path(root)
    if layout not in _LAYOUTS:
        raise UnknownLayout(f"unknown corpus layout {layout!r}; know {sorted(_LAYOUTS)}")
    entries = sorted(_LAYOUTS[layout](root))
    if not entries:
        raise EmptyCorpus(f"no signature files found under {root} (layout {layout})")
    seen = set()
    for e in entries:
        key = (e.writer_id, e.specimen_index, e.label)
        if key in seen:
            raise DuplicateEntry(f"duplicate manifest entry {key}")
        seen.add(key)
    return CorpusManifest(entries=tuple(entries), dataset_name=f"{root.name}:{layout}")
