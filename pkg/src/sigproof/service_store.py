"""File-backed case store for the verification service.

One directory per case: image blobs plus ``case.json`` (state) and
``report.json`` (the last evidence report, deleted on any mutation so a
stale report is never served).
"""

from __future__ import annotations

import json
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from .errors import CaseNotFound, SpecimenNotFound


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class CaseStore:
    def __init__(self, root: Path, default_config: Callable[[], dict]):
        self.root = Path(root) / "cases"
        self.root.mkdir(parents=True, exist_ok=True)
        self._default_config = default_config
        self._global = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    # -- locking --------------------------------------------------------

    def lock(self, case_id: str) -> threading.Lock:
        self._case_dir(case_id)  # raises CaseNotFound
        with self._global:
            return self._locks.setdefault(case_id, threading.Lock())

    # -- paths ------------------------------------------------------------

    def _case_dir(self, case_id: str, must_exist: bool = True) -> Path:
        d = self.root / case_id
        if must_exist and not (d / "case.json").is_file():
            raise CaseNotFound(f"no case {case_id!r}")
        return d

    # -- lifecycle --------------------------------------------------------

    def create(self) -> dict:
        case_id = uuid.uuid4().hex[:12]
        d = self._case_dir(case_id, must_exist=False)
        d.mkdir(parents=True)
        case = {"case_id": case_id, "created_at": _now(), "updated_at": _now(),
                "next_specimen": 1, "config": self._default_config(),
                "questioned": None, "references": []}
        self._write(case)
        with self._global:
            self._locks[case_id] = threading.Lock()
        return case

    def read(self, case_id: str) -> dict:
        return json.loads((self._case_dir(case_id) / "case.json").read_text())

    def _write(self, case: dict) -> None:
        d = self.root / case["case_id"]
        (d / "case.json").write_text(json.dumps(case, indent=1))

    def _mutate(self, case_id: str, fn) -> dict:
        case = self.read(case_id)
        fn(case)
        case["updated_at"] = _now()
        self._write(case)
        report = self._case_dir(case_id) / "report.json"
        if report.exists():
            report.unlink()
        return case

    def describe(self, case_id: str) -> dict:
        case = self.read(case_id)
        has_report = (self._case_dir(case_id) / "report.json").is_file()
        return {"case_id": case["case_id"], "created_at": case["created_at"],
                "updated_at": case["updated_at"], "config": case["config"],
                "questioned": case["questioned"], "references": case["references"],
                "has_report": has_report}

    # -- specimens ----------------------------------------------------------

    def add_specimen(self, case_id: str, role: str, blob: bytes, suffix: str) -> str:
        d = self._case_dir(case_id)
        case = self.read(case_id)
        sid = f"s{case['next_specimen']:04d}"
        content_type = {".png": "image/png", ".jpg": "image/jpeg",
                        ".bmp": "image/bmp", ".pgm": "image/x-portable-graymap"}[suffix]
        (d / (sid + suffix)).write_bytes(blob)
        record = {"specimen_id": sid, "role": role, "content_type": content_type,
                  "filename": sid + suffix, "uploaded_at": _now()}

        def apply(case):
            case["next_specimen"] += 1
            if role == "questioned":
                case["questioned"] = record
            else:
                case["references"].append(record)

        self._mutate(case_id, apply)
        return sid

    def specimen_bytes(self, case_id: str, specimen_id: str) -> bytes:
        d = self._case_dir(case_id)
        case = self.read(case_id)
        for record in [case.get("questioned")] + case["references"]:
            if record and record["specimen_id"] == specimen_id:
                return (d / record["filename"]).read_bytes()
        raise SpecimenNotFound(f"no specimen {specimen_id!r} in case {case_id!r}")

    def remove_specimen(self, case_id: str, specimen_id: str) -> None:
        case = self.read(case_id)
        found = False

        def apply(case):
            nonlocal found
            q = case.get("questioned")
            if q and q["specimen_id"] == specimen_id:
                case["questioned"] = None
                found = True
                return
            kept = [r for r in case["references"] if r["specimen_id"] != specimen_id]
            found = len(kept) != len(case["references"])
            case["references"] = kept

        # probe before mutating so a miss doesn't clear the report
        apply(json.loads(json.dumps(case)))
        if not found:
            raise SpecimenNotFound(f"no specimen {specimen_id!r} in case {case_id!r}")
        found = False
        self._mutate(case_id, apply)

    # -- config / report ------------------------------------------------------

    def set_config(self, case_id: str, config: dict) -> None:
        def apply(case):
            case["config"] = config

        self._mutate(case_id, apply)

    def set_report(self, case_id: str, payload: dict) -> None:
        (self._case_dir(case_id) / "report.json").write_text(json.dumps(payload))

    def get_report(self, case_id: str) -> dict | None:
        path = self._case_dir(case_id) / "report.json"
        if not path.is_file():
            return None
        return json.loads(path.read_text())
