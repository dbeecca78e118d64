"""Feature exchange format: JSON-lines records, one channel per line.

Each record is ``{writer_id, specimen, label, channel, dim, values}``.
The same format moves in-repo features between pipeline stages and ingests
externally computed channels (``ext:<name>``), e.g. deep-network embeddings
produced elsewhere.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from ..errors import DimMismatch, MalformedRecord
from .vector import FeatureSet, FeatureVector

_REQUIRED_KEYS = ("writer_id", "specimen", "label", "channel", "dim", "values")


def feature_set_records(fs: FeatureSet) -> Iterator[dict]:
    for channel in fs.channels:
        vec = fs.vectors[channel]
        yield {"writer_id": fs.writer_id, "specimen": fs.specimen_index,
               "label": fs.label, "channel": channel, "dim": vec.dim,
               "values": vec.values.tolist()}


def dump_feature_sets(sets: Iterable[FeatureSet], path) -> None:
    with Path(path).open("w") as fh:
        for fs in sets:
            for record in feature_set_records(fs):
                fh.write(json.dumps(record) + "\n")


def _validated(record: Mapping) -> tuple[tuple[str, int, str], FeatureVector]:
    for key in _REQUIRED_KEYS:
        if key not in record:
            raise MalformedRecord(f"record missing key {key!r}: {dict(record)!r:.200}")
    values = record["values"]
    if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) and math.isfinite(v) for v in values):
        raise MalformedRecord(f"values must be a list of finite numbers "
                              f"({record['writer_id']}/{record['specimen']})")
    if int(record["dim"]) != len(values):
        raise MalformedRecord(
            f"declared dim {record['dim']} != {len(values)} values "
            f"({record['writer_id']}/{record['specimen']}, {record['channel']})")
    if record["label"] not in ("genuine", "forgery"):
        raise MalformedRecord(f"bad label {record['label']!r}")
    key = (str(record["writer_id"]), int(record["specimen"]), str(record["label"]))
    return key, FeatureVector(str(record["channel"]), values)


def ingest_external(records: Iterable[Mapping]) -> list[FeatureSet]:
    """Group exchange records into FeatureSets, checking dim consistency.

    Records for the same (writer, specimen, label) are merged into one set,
    in first-seen order. A channel appearing with two different dims
    anywhere in the stream raises DimMismatch.
    """
    dims: dict[str, int] = {}
    sets: dict[tuple[str, int, str], FeatureSet] = {}
    for record in records:
        key, vec = _validated(record)
        seen = dims.setdefault(vec.channel, vec.dim)
        if seen != vec.dim:
            raise DimMismatch(
                f"channel {vec.channel!r} has dim {vec.dim} but the stream "
                f"established dim {seen}")
        fs = sets.get(key)
        if fs is None:
            fs = sets[key] = FeatureSet(writer_id=key[0], specimen_index=key[1],
                                        label=key[2])
        fs.add(vec)
    return list(sets.values())


def iter_records(path) -> Iterator[dict]:
    with Path(path).open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"{path}:{lineno}: not valid JSON: {exc}") from exc


def load_feature_sets(path) -> list[FeatureSet]:
    return ingest_external(iter_records(path))
