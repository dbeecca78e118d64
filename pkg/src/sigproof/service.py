"""Case-based verification service.

A case holds one questioned signature, an ordered reference set, and the
evaluation config. Any mutation invalidates the stored report, so served
evidence always corresponds to the current case state. Universe models
load read-only at startup; their leave-one-out scans are cached per
(model, channel, metric) across cases.
"""

from __future__ import annotations

import io
import json
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from PIL import Image

from .config import DEFAULT_CANVAS, EXPLAINABLE_CHANNELS
from .corpus import GRAYSCALE, SignatureImage, preprocess
from .distances import METRICS
from .errors import (MissingQuestioned, NoReferences, PayloadTooLarge,
                     SigproofError, UbmNotLoaded, UnreadableFile,
                     UnsupportedFormat, WeightMismatch)
from .evidence import PROB_MODES, default_weights, leave_one_out_nearest, verify
from .features import extract_features
from .service_store import CaseStore
from .ubm import UniverseModel, load_ubm

MAX_UPLOAD_BYTES = 10 * 1024 * 1024
MAX_SIDE_PX = 4096

_CONTENT_TYPES = {
    "image/png": ".png",
    "image/jpeg": ".jpg",
    "image/bmp": ".bmp",
    "image/x-portable-graymap": ".pgm",
}

_STATUS_BY_CODE = {
    "case_not_found": 404,
    "specimen_not_found": 404,
    "report_not_found": 404,
    "missing_questioned": 409,
    "no_references": 409,
    "ubm_not_loaded": 409,
    "payload_too_large": 413,
    "unsupported_format": 415,
}


def _error_response(code: str, message: str, detail: dict | None = None) -> JSONResponse:
    return JSONResponse(status_code=_STATUS_BY_CODE.get(code, 422),
                        content={"code": code, "message": message,
                                 "detail": detail or {}})


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class LooCache:
    """Read-through cache of leave-one-out nearest distances per model."""

    def __init__(self):
        self._lock = threading.Lock()
        self._values: dict[tuple[int, str, str], np.ndarray] = {}

    def provider(self, ubm_id: str, base: UniverseModel):
        def loo(universe: UniverseModel, channel: str, metric: str):
            if universe is not base:
                # a writer got excluded; universe differs from the cached model
                return leave_one_out_nearest(universe.members, channel, metric)
            key = (id(base), channel, metric)
            with self._lock:
                cached = self._values.get(key)
            if cached is None:
                cached = leave_one_out_nearest(base.members, channel, metric)
                with self._lock:
                    self._values.setdefault(key, cached)
            return cached

        return loo


def default_config(ubm_ids: list[str]) -> dict:
    return {
        "metric": "l1",
        "channels": list(EXPLAINABLE_CHANNELS),
        "weights": "default",
        "ubm_id": ubm_ids[0] if ubm_ids else None,
        "prob_mode": "oriented",
        "decision_threshold": None,
    }


def _validate_config(payload: dict, ubm_ids: list[str]) -> dict:
    cfg = default_config(ubm_ids)
    unknown = set(payload) - set(cfg)
    if unknown:
        raise WeightMismatch(f"unknown config keys: {sorted(unknown)}")
    cfg.update(payload)
    if cfg["metric"] not in METRICS:
        raise WeightMismatch(f"metric must be one of {METRICS}")
    bad = [ch for ch in cfg["channels"] if ch not in EXPLAINABLE_CHANNELS]
    if bad or not cfg["channels"]:
        raise WeightMismatch(f"channels must be a non-empty subset of "
                             f"{EXPLAINABLE_CHANNELS}, got {cfg['channels']}")
    if cfg["prob_mode"] not in PROB_MODES:
        raise WeightMismatch(f"prob_mode must be one of {PROB_MODES}")
    if cfg["ubm_id"] not in ubm_ids:
        raise UbmNotLoaded(f"no universe model named {cfg['ubm_id']!r} is loaded")
    w = cfg["weights"]
    if w != "default":
        if not isinstance(w, dict) or set(w) != set(cfg["channels"]):
            raise WeightMismatch("weights must be 'default' or cover exactly the "
                                 "configured channels")
        cfg["weights"] = {str(k): float(v) for k, v in w.items()}
    if cfg["decision_threshold"] is not None:
        cfg["decision_threshold"] = float(cfg["decision_threshold"])
    return cfg


def _decode_upload(blob: bytes, content_type: str) -> np.ndarray:
    if content_type not in _CONTENT_TYPES:
        raise UnsupportedFormat(f"unsupported content type {content_type!r}")
    if len(blob) > MAX_UPLOAD_BYTES:
        raise PayloadTooLarge(f"upload exceeds {MAX_UPLOAD_BYTES} bytes")
    try:
        with Image.open(io.BytesIO(blob)) as im:
            if max(im.size) > MAX_SIDE_PX:
                raise PayloadTooLarge(f"image side exceeds {MAX_SIDE_PX} px")
            from .corpus import _to_gray_array
            return _to_gray_array(im)
    except PayloadTooLarge:
        raise
    except Exception as exc:
        raise UnreadableFile(f"cannot decode upload: {exc}") from exc


def create_app(ubm_dir, data_dir, static_dir=None,
               canvas: int = DEFAULT_CANVAS) -> FastAPI:
    ubm_dir = Path(ubm_dir)
    ubms: dict[str, UniverseModel] = {
        p.stem: load_ubm(p) for p in sorted(ubm_dir.glob("*.sig"))
    }
    ubm_ids = sorted(ubms)
    store = CaseStore(Path(data_dir), lambda: default_config(ubm_ids))
    loo_cache = LooCache()
    app = FastAPI(title="sigproof service")

    @app.exception_handler(SigproofError)
    async def _sigproof_error(_request, exc: SigproofError):
        return _error_response(exc.code, str(exc), exc.detail)

    @app.post("/api/cases")
    def create_case():
        case = store.create()
        return {"case_id": case["case_id"]}

    @app.post("/api/cases/{case_id}/specimens")
    async def upload_specimen(case_id: str, request: Request,
                              role: str = Query(...)):
        if role not in ("questioned", "reference"):
            return _error_response("bad_role",
                                   "role must be 'questioned' or 'reference'")
        blob = await request.body()
        content_type = request.headers.get("content-type", "")
        _decode_upload(blob, content_type)  # reject bad uploads before storing
        suffix = _CONTENT_TYPES[content_type]
        with store.lock(case_id):
            sid = store.add_specimen(case_id, role, blob, suffix)
        return {"specimen_id": sid}

    @app.delete("/api/cases/{case_id}/specimens/{specimen_id}")
    def delete_specimen(case_id: str, specimen_id: str):
        with store.lock(case_id):
            store.remove_specimen(case_id, specimen_id)
        return {"removed": specimen_id}

    @app.put("/api/cases/{case_id}/config")
    def put_config(case_id: str, payload: dict):
        cfg = _validate_config(payload, ubm_ids)
        with store.lock(case_id):
            store.set_config(case_id, cfg)
        return {"config": cfg}

    @app.get("/api/cases/{case_id}")
    def get_case(case_id: str):
        return store.describe(case_id)

    @app.post("/api/cases/{case_id}/evaluate")
    def evaluate_case(case_id: str):
        with store.lock(case_id):
            case = store.read(case_id)
            cfg = case["config"]
            if cfg["ubm_id"] not in ubms:
                raise UbmNotLoaded(f"no universe model named {cfg['ubm_id']!r} is loaded")
            if case.get("questioned") is None:
                raise MissingQuestioned("upload a questioned signature first")
            if not case["references"]:
                raise NoReferences("upload at least one reference signature")
            base = ubms[cfg["ubm_id"]]

            def featurize(record, specimen_index):
                blob = store.specimen_bytes(case_id, record["specimen_id"])
                gray = _decode_upload(blob, record["content_type"])
                img = SignatureImage(gray, GRAYSCALE, writer_id=f"case:{case_id}",
                                     specimen_index=specimen_index, label="genuine",
                                     source=record["specimen_id"])
                return extract_features(preprocess(img, canvas=canvas),
                                        cfg["channels"])

            questioned = featurize(case["questioned"], 0)
            references = [featurize(r, i + 1)
                          for i, r in enumerate(case["references"])]
            weights = (default_weights(cfg["channels"])
                       if cfg["weights"] == "default" else cfg["weights"])
            report = verify(questioned, references, base,
                            channels=cfg["channels"], metric=cfg["metric"],
                            weights=weights, prob_mode=cfg["prob_mode"],
                            decision_threshold=cfg["decision_threshold"],
                            loo_provider=loo_cache.provider(cfg["ubm_id"], base))
            payload = report.to_json_dict()
            payload["case_id"] = case_id
            payload["version"] = uuid.uuid4().hex[:12]
            payload["computed_at"] = _now()
            store.set_report(case_id, payload)
        return payload

    @app.get("/api/cases/{case_id}/report")
    def get_report(case_id: str):
        report = store.get_report(case_id)
        if report is None:
            return _error_response("report_not_found",
                                   "no up-to-date report; evaluate the case")
        return report

    @app.get("/api/ubms")
    def list_ubms():
        return [{"ubm_id": uid, "origin": ubms[uid].origin, "size": ubms[uid].size,
                 "channels": list(ubms[uid].channels)} for uid in ubm_ids]

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="workbench")
    return app
