import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ext_set
from sigproof.errors import DimMismatch, MalformedRecord
from sigproof.features import (dump_feature_sets, feature_set_records,
                               ingest_external, load_feature_sets)


def record(writer="w1", specimen=0, label="genuine", channel="ext:vgg19g",
           dim=4, values=(1.0, 2.0, 3.0, 4.0)):
    return {"writer_id": writer, "specimen": specimen, "label": label,
            "channel": channel, "dim": dim, "values": list(values)}


def test_empty_stream_gives_empty_list():
    assert ingest_external([]) == []


def test_two_records_same_channel_same_dim():
    sets = ingest_external([record(specimen=0), record(specimen=1)])
    assert len(sets) == 2
    assert all(fs.get("ext:vgg19g").dim == 4 for fs in sets)


def test_dim_mismatch_across_stream():
    with pytest.raises(DimMismatch):
        ingest_external([record(dim=4),
                         record(specimen=1, dim=2, values=(1.0, 2.0))])


def test_declared_dim_must_match_values():
    with pytest.raises(MalformedRecord):
        ingest_external([record(dim=5)])


def test_missing_key_is_malformed():
    bad = record()
    del bad["label"]
    with pytest.raises(MalformedRecord):
        ingest_external([bad])


def test_non_finite_values_are_malformed():
    with pytest.raises(MalformedRecord):
        ingest_external([record(values=(1.0, float("nan"), 3.0, 4.0))])


def test_multiple_channels_merge_into_one_set():
    rows = [record(), record(channel="ext:fcn", dim=2, values=(9.0, 8.0))]
    sets = ingest_external(rows)
    assert len(sets) == 1
    assert sets[0].channels == ("ext:fcn", "ext:vgg19g")


def test_jsonl_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    sets = [ext_set(f"w{i}", i, rng.normal(size=6)) for i in range(4)]
    path = tmp_path / "features.jsonl"
    dump_feature_sets(sets, path)
    loaded = load_feature_sets(path)
    assert [fs.key for fs in loaded] == [fs.key for fs in sets]
    for a, b in zip(loaded, sets):
        assert np.array_equal(a.get("ext:toy").values, b.get("ext:toy").values)


def test_jsonl_bad_line(tmp_path):
    path = tmp_path / "features.jsonl"
    path.write_text("not json\n")
    with pytest.raises(MalformedRecord):
        load_feature_sets(path)


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
                min_size=1, max_size=40))
@settings(max_examples=100, deadline=None)
def test_roundtrip_bit_exact(values):
    fs = ext_set("w", 0, values)
    line = json.dumps(next(feature_set_records(fs)))
    back = ingest_external([json.loads(line)])[0]
    assert np.array_equal(back.get("ext:toy").values, fs.get("ext:toy").values)
