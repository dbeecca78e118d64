import json

import numpy as np
import pytest
from PIL import Image

from oracles import otsu_exhaustive
from sigproof.corpus import (BINARY, GRAYSCALE, SignatureImage, binarize,
                             crop_normalize, ink_bbox, load_image, preprocess,
                             scan_manifest)
from sigproof.errors import (DegenerateImage, DuplicateEntry, EmptyCorpus,
                             EmptySignature, UnknownLayout, UnreadableFile,
                             UnsupportedFormat)
from sigproof.synth import save_png


def gray_image(pixels, **meta) -> SignatureImage:
    return SignatureImage(np.asarray(pixels, dtype=float), GRAYSCALE, **meta)


def binary_image(mask, **meta) -> SignatureImage:
    return SignatureImage(np.asarray(mask, dtype=float), BINARY, **meta)


# -- load_image -----------------------------------------------------------

def test_load_white_png_normalizes_to_one(tmp_path):
    path = tmp_path / "white.png"
    Image.fromarray(np.full((20, 30), 255, dtype=np.uint8), mode="L").save(path)
    img = load_image(path)
    assert img.kind == GRAYSCALE
    assert np.all(img.pixels == 1.0)


def test_load_black_png_normalizes_to_zero(tmp_path):
    path = tmp_path / "black.png"
    Image.fromarray(np.zeros((20, 30), dtype=np.uint8), mode="L").save(path)
    assert np.all(load_image(path).pixels == 0.0)


def test_load_preserves_dimensions(tmp_path):
    path = tmp_path / "sized.png"
    Image.fromarray(np.zeros((150, 300), dtype=np.uint8), mode="L").save(path)
    img = load_image(path)
    assert (img.width, img.height) == (300, 150)


def test_load_rgb_uses_luminance(tmp_path):
    rgb = np.zeros((4, 4, 3), dtype=np.uint8)
    rgb[..., 0] = 255  # pure red
    path = tmp_path / "red.png"
    Image.fromarray(rgb, mode="RGB").save(path)
    img = load_image(path)
    assert np.allclose(img.pixels, 0.299, atol=1e-9)


def test_load_invert_flips_polarity(tmp_path):
    path = tmp_path / "w.png"
    Image.fromarray(np.full((5, 5), 255, dtype=np.uint8), mode="L").save(path)
    assert np.all(load_image(path, invert=True).pixels == 0.0)


def test_load_missing_file_is_unreadable(tmp_path):
    with pytest.raises(UnreadableFile):
        load_image(tmp_path / "nope.png")


def test_load_rejects_unknown_suffix(tmp_path):
    path = tmp_path / "sig.tiff"
    path.write_bytes(b"not an image")
    with pytest.raises(UnsupportedFormat):
        load_image(path)


def test_load_corrupt_file_is_unreadable(tmp_path):
    path = tmp_path / "sig.png"
    path.write_bytes(b"garbage")
    with pytest.raises(UnreadableFile):
        load_image(path)


# -- binarize ---------------------------------------------------------------

def test_binarize_bimodal_selects_dark_half():
    px = np.full((10, 10), 0.9)
    px[::2, :] = 0.1
    out = binarize(gray_image(px))
    assert out.kind == BINARY
    assert np.array_equal(out.pixels == 1.0, px == 0.1)


def test_binarize_constant_image_degenerate():
    with pytest.raises(DegenerateImage):
        binarize(gray_image(np.full((8, 8), 0.5)))


def test_binarize_matches_exhaustive_otsu_oracle():
    rng = np.random.default_rng(3)
    px = np.zeros(16)
    px[rng.permutation(16)[:8]] = 1.0
    px = px.reshape(4, 4)
    out = binarize(gray_image(px))
    assert out.pixels.sum() == 8
    k = otsu_exhaustive(px)
    bins = np.minimum((px * 256).astype(int), 255)
    assert np.array_equal(out.pixels == 1.0, bins <= k)


def test_binarize_random_images_match_oracle_threshold():
    rng = np.random.default_rng(11)
    for _ in range(20):
        px = rng.random((12, 9))
        out = binarize(gray_image(px))
        bins = np.minimum((px * 256).astype(int), 255)
        assert np.array_equal(out.pixels == 1.0, bins <= otsu_exhaustive(px))


def test_binarize_idempotent_through_grayscale():
    mask = np.zeros((9, 9))
    mask[2:6, 3:8] = 1.0
    # render the binary image as dark ink on white paper
    regray = gray_image(1.0 - mask)
    out = binarize(regray)
    assert np.array_equal(out.pixels, mask)


# -- crop_normalize -----------------------------------------------------------

def test_ink_bbox_is_exact():
    mask = np.zeros((40, 100))
    mask[5:21, 7:81] = 1.0
    assert ink_bbox(binary_image(mask)) == (5, 20, 7, 80)


def test_crop_normalize_canvas_dims_and_tightness():
    mask = np.zeros((100, 100))
    mask[30:40, 20:80] = 1.0
    out = crop_normalize(binary_image(mask), canvas=64)
    assert out.pixels.shape == (64, 64)
    r0, r1, c0, c1 = ink_bbox(out)
    # longer axis spans the full canvas, the other is centered
    assert (c0, c1) == (0, 63)
    assert abs((r0 + r1) / 2 - 31.5) <= 1.0


def test_crop_normalize_single_ink_pixel_not_empty():
    mask = np.zeros((100, 100))
    mask[10, 10] = 1.0
    out = crop_normalize(binary_image(mask), canvas=32)
    assert out.pixels.shape == (32, 32)
    assert out.pixels.sum() >= 1


def test_crop_normalize_empty_raises():
    with pytest.raises(EmptySignature):
        crop_normalize(binary_image(np.zeros((10, 10))))


def test_pipeline_is_deterministic(tmp_path):
    rng = np.random.default_rng(5)
    px = rng.random((60, 90))
    px[20:40, 30:70] *= 0.1
    path = tmp_path / "sig.png"
    save_png(px, path)

    def run():
        return crop_normalize(binarize(load_image(path)), canvas=128).pixels

    assert np.array_equal(run(), run())


def test_preprocess_pair_aligned(tmp_path):
    px = np.ones((50, 80))
    px[10:30, 20:60] = 0.2
    pre = preprocess(gray_image(px), canvas=64)
    assert pre.gray.kind == GRAYSCALE and pre.binary.kind == BINARY
    assert pre.gray.pixels.shape == pre.binary.pixels.shape == (64, 64)
    # ink locations in the binary view are dark in the gray view
    ink = pre.binary.ink_mask()
    assert pre.gray.pixels[ink].mean() < pre.gray.pixels[~ink].mean()


# -- scan_manifest ---------------------------------------------------------

def _touch_png(path):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.zeros((4, 4), dtype=np.uint8), mode="L").save(path)


def test_scan_unknown_layout(tmp_path):
    with pytest.raises(UnknownLayout):
        scan_manifest(tmp_path, "gpds")


def test_scan_empty_dir(tmp_path):
    with pytest.raises(EmptyCorpus):
        scan_manifest(tmp_path, "cedar")


def test_scan_cedar_layout(tmp_path):
    for writer in (1, 2):
        for s in (1, 2):
            _touch_png(tmp_path / "full_org" / f"original_{writer}_{s}.png")
            _touch_png(tmp_path / "full_forg" / f"forgeries_{writer}_{s}.png")
    manifest = scan_manifest(tmp_path, "cedar")
    assert len(manifest) == 8
    assert manifest.writers() == ["0001", "0002"]
    labels = {e.label for e in manifest.entries}
    assert labels == {"genuine", "forgery"}
    # deterministic order: writer, then specimen
    keys = [(e.writer_id, e.specimen_index, e.label) for e in manifest.entries]
    assert keys == sorted(keys)


def test_scan_mcyt_layout(tmp_path):
    _touch_png(tmp_path / "0007" / "0007v01.png")
    _touch_png(tmp_path / "0007" / "0007f01.png")
    manifest = scan_manifest(tmp_path, "mcyt")
    assert [(e.label, e.specimen_index) for e in manifest.entries] == [
        ("forgery", 1), ("genuine", 1)]


def test_scan_flat_json(tmp_path):
    for i in range(3):
        _touch_png(tmp_path / f"img{i}.png")
    rows = [{"writer_id": "w1", "specimen": i, "label": "genuine",
             "path": f"img{i}.png"} for i in range(3)]
    (tmp_path / "manifest.json").write_text(json.dumps(rows))
    manifest = scan_manifest(tmp_path, "flat-json")
    assert [e.specimen_index for e in manifest.entries] == [0, 1, 2]


def test_scan_flat_json_duplicate(tmp_path):
    _touch_png(tmp_path / "a.png")
    rows = [{"writer_id": "w1", "specimen": 0, "label": "genuine", "path": "a.png"}] * 2
    (tmp_path / "manifest.json").write_text(json.dumps(rows))
    with pytest.raises(DuplicateEntry):
        scan_manifest(tmp_path, "flat-json")


def test_manifest_save_roundtrip(tmp_path):
    _touch_png(tmp_path / "x.png")
    rows = [{"writer_id": "a", "specimen": 3, "label": "forgery", "path": "x.png"}]
    (tmp_path / "manifest.json").write_text(json.dumps(rows))
    manifest = scan_manifest(tmp_path, "flat-json")
    manifest.save(tmp_path / "copy.json")
    again = scan_manifest(tmp_path / "copy.json", "flat-json")
    assert again.entries == manifest.entries
