"""The universal background model: an ordered pool of third-party signatures.

The model is nothing more than feature sets of genuine signatures from
writers outside the case, kept in a deterministic order. It is immutable
once built; ``exclude_writer`` returns a filtered snapshot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (InsufficientCorpus, IoFailure, MissingChannel,
                     SchemaVersionMismatch, UniverseTooSmall)
from .features.exchange import feature_set_records, ingest_external
from .features.vector import FeatureSet

SCHEMA_VERSION = 1

SELECTION_RULES = ("first-per-writer", "first-specimens", "round-robin")


@dataclass(frozen=True)
class UniverseModel:
    members: tuple[FeatureSet, ...]
    origin: str = "real"
    provenance: str = ""

    def __post_init__(self):
        if len(self.members) < 2:
            raise UniverseTooSmall(
                f"a universe model needs at least 2 members, got {len(self.members)}")
        if self.origin not in ("real", "synthetic"):
            raise ValueError(f"origin must be real|synthetic, got {self.origin!r}")

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def channels(self) -> tuple[str, ...]:
        common = set(self.members[0].channels)
        for m in self.members[1:]:
            common &= set(m.channels)
        return tuple(sorted(common))

    def writers(self) -> list[str]:
        return sorted({m.writer_id for m in self.members})


def _genuine_sorted(feature_sets: Iterable[FeatureSet]) -> list[FeatureSet]:
    return sorted((fs for fs in feature_sets if fs.label == "genuine"),
                  key=lambda fs: (fs.writer_id, fs.specimen_index))


def _select(pool: list[FeatureSet], n: int, rule: str) -> list[FeatureSet]:
    if rule == "first-specimens":
        if len(pool) < n:
            raise InsufficientCorpus(f"need {n} genuine specimens, corpus has {len(pool)}")
        return pool[:n]

    by_writer: dict[str, list[FeatureSet]] = {}
    for fs in pool:
        by_writer.setdefault(fs.writer_id, []).append(fs)
    writers = sorted(by_writer)

    if rule == "first-per-writer":
        if len(writers) < n:
            raise InsufficientCorpus(
                f"need {n} writers for one-specimen-per-writer selection, "
                f"corpus has {len(writers)}")
        return [by_writer[w][0] for w in writers[:n]]

    if rule == "round-robin":
        if len(pool) < n:
            raise InsufficientCorpus(f"need {n} genuine specimens, corpus has {len(pool)}")
        picked: list[FeatureSet] = []
        depth = 0
        while len(picked) < n:
            for w in writers:
                specs = by_writer[w]
                if depth < len(specs):
                    picked.append(specs[depth])
                    if len(picked) == n:
                        break
            depth += 1
        return picked

    raise ValueError(f"unknown selection rule {rule!r}; know {SELECTION_RULES}")


def build_ubm(feature_sets: Iterable[FeatureSet], n: int,
              rule: str = "first-per-writer", channels: Sequence[str] | None = None,
              origin: str = "real", provenance: str = "") -> UniverseModel:
    """Select n genuine specimens into a universe model, deterministically.

    The default rule takes the first genuine specimen of each of the first
    n writers in manifest order; "first-specimens" takes the first n
    specimens outright, "round-robin" cycles writers taking one specimen
    per pass (useful when there are fewer writers than n).
    """
    if n < 2:
        raise UniverseTooSmall("a universe model needs at least 2 members")
    members = _select(_genuine_sorted(feature_sets), n, rule)
    if channels:
        for fs in members:
            for ch in channels:
                fs.get(ch)  # raises MissingChannel
    return UniverseModel(members=tuple(members), origin=origin,
                         provenance=provenance or f"{rule}:{n}")


def exclude_writer(u: UniverseModel, writer_id: str) -> UniverseModel:
    """Snapshot of the model without the given writer's signatures."""
    kept = tuple(m for m in u.members if m.writer_id != writer_id)
    if len(kept) == len(u.members):
        return u
    if len(kept) < 2:
        raise UniverseTooSmall(
            f"excluding writer {writer_id!r} leaves {len(kept)} member(s)")
    return UniverseModel(members=kept, origin=u.origin, provenance=u.provenance)


def save_ubm(u: UniverseModel, path) -> None:
    """Persist as a JSON header line followed by exchange-format records."""
    header = {"schema_version": SCHEMA_VERSION, "origin": u.origin,
              "channels": list(u.channels), "size": u.size,
              "provenance": u.provenance}
    try:
        with Path(path).open("w") as fh:
            fh.write(json.dumps(header) + "\n")
            for member in u.members:
                for record in feature_set_records(member):
                    fh.write(json.dumps(record) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write universe model to {path}: {exc}") from exc


def load_ubm(path) -> UniverseModel:
    path = Path(path)
    try:
        with path.open() as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read universe model from {path}: {exc}") from exc
    if not lines:
        raise IoFailure(f"universe model file {path} is empty")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise IoFailure(f"bad universe model header in {path}: {exc}") from exc
    version = header.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"universe model schema {version!r} is not supported (want {SCHEMA_VERSION})")
    try:
        records = [json.loads(line) for line in lines[1:] if line.strip()]
    except json.JSONDecodeError as exc:
        raise IoFailure(f"corrupt universe model body in {path}: {exc}") from exc
    members = ingest_external(records)
    if len(members) != header.get("size"):
        raise IoFailure(
            f"universe model {path} is truncated: header says {header.get('size')} "
            f"members, found {len(members)}")
    return UniverseModel(members=tuple(members), origin=header.get("origin", "real"),
                         provenance=header.get("provenance", ""))
