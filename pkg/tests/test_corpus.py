import json

import pytest

from adsqa.corpus import (
    AttrType,
    load_domain,
    load_query_log,
    save_ads,
    valid_range,
)
from adsqa.errors import IngestError, RangeUnavailableError, SchemaError

from conftest import DATA_DIR

CARS = DATA_DIR / "domains" / "cars"


def write_domain(tmp_path, records, attributes=None):
    schema = {
        "domain": "test",
        "attributes": attributes or [
            {"name": "Make", "type": "I", "kind": "categorical"},
            {"name": "Color", "type": "II", "kind": "categorical"},
            {"name": "Price", "type": "III", "kind": "numeric"},
            {"name": "Year", "type": "III", "kind": "numeric"},
        ],
    }
    lexicon = {"domain": "test", "type1": {"Make": ["honda"]}, "type2": {}, "units": {}}
    (tmp_path / "schema.json").write_text(json.dumps(schema))
    (tmp_path / "lexicon.json").write_text(json.dumps(lexicon))
    with open(tmp_path / "ads.jsonl", "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return tmp_path / "schema.json", tmp_path / "lexicon.json", tmp_path / "ads.jsonl"


def test_three_record_load(tmp_path):
    files = write_domain(tmp_path, [
        {"id": "a", "values": {"Make": "Honda", "Price": 3000}},
        {"id": "b", "values": {"Make": "Ford", "Price": 7500}},
        {"id": "c", "values": {"Make": "Mazda", "Price": 16536}},
    ])
    domain = load_domain(*files)
    assert len(domain.records) == 3
    # min/max scan oracle over {3000, 7500, 16536}
    values = [3000, 7500, 16536]
    assert valid_range(domain, "Price") == (min(values), max(values))


def test_missing_type1_value_names_attribute(tmp_path):
    files = write_domain(tmp_path, [{"id": "a", "values": {"Price": 3000}}])
    with pytest.raises(SchemaError, match="Make"):
        load_domain(*files)


def test_bundled_year_range_matches_dataset(cars):
    assert cars.valid_range("Year") == (1985, 2011)


def test_unknown_attribute_rejected(tmp_path):
    files = write_domain(tmp_path, [{"id": "a", "values": {"Make": "Honda", "Engine": "v6"}}])
    with pytest.raises(SchemaError, match="Engine"):
        load_domain(*files)


def test_duplicate_record_id_rejected(tmp_path):
    files = write_domain(tmp_path, [
        {"id": "a", "values": {"Make": "Honda"}},
        {"id": "a", "values": {"Make": "Ford"}},
    ])
    with pytest.raises(IngestError, match="duplicate record id"):
        load_domain(*files)


def test_non_numeric_value_rejected(tmp_path):
    files = write_domain(tmp_path, [{"id": "a", "values": {"Make": "Honda", "Price": "cheap"}}])
    with pytest.raises(SchemaError, match="Price"):
        load_domain(*files)


def test_degenerate_range_single_record(tmp_path):
    files = write_domain(tmp_path, [{"id": "a", "values": {"Make": "Honda", "Price": 5000}}])
    domain = load_domain(*files)
    assert domain.valid_range("Price") == (5000, 5000)


def test_range_unavailable_without_values(tmp_path):
    files = write_domain(tmp_path, [{"id": "a", "values": {"Make": "Honda"}}])
    domain = load_domain(*files)
    with pytest.raises(RangeUnavailableError, match="range unavailable"):
        domain.valid_range("Price")


def test_valid_range_requires_numeric_attribute(cars):
    with pytest.raises(SchemaError):
        cars.valid_range("Color")


def test_schema_requires_a_type1_attribute(tmp_path):
    with pytest.raises(SchemaError, match="Type I"):
        write_and_load = write_domain(tmp_path, [], attributes=[
            {"name": "Color", "type": "II", "kind": "categorical"},
        ])
        load_domain(*write_and_load)


def test_every_value_inside_its_range(cars):
    for decl in cars.schema.of_type(AttrType.TYPE3):
        low, high = cars.valid_range(decl.name)
        assert low <= high
        for record in cars.records.values():
            value = record.value(decl.name)
            if value is not None:
                assert low <= value <= high


def test_round_trip_preserves_records(cars, tmp_path):
    out = tmp_path / "ads.jsonl"
    save_ads(cars.records.values(), out)
    reloaded = load_domain(CARS / "schema.json", CARS / "lexicon.json", out)
    assert reloaded.records.keys() == cars.records.keys()
    for rid, rec in cars.records.items():
        assert dict(reloaded.records[rid].values) == dict(rec.values)
    assert reloaded.ranges == cars.ranges


def test_query_log_empty_file(tmp_path):
    path = tmp_path / "log.jsonl"
    path.write_text("")
    sessions, rejected = load_query_log(path)
    assert sessions == [] and rejected == []


def test_query_log_one_session_two_queries(tmp_path):
    path = tmp_path / "log.jsonl"
    path.write_text(json.dumps({
        "user_id": "u1",
        "entries": [
            {"query": "toyota camry", "timestamp": 10},
            {"query": "honda accord", "timestamp": 20},
        ],
    }) + "\n")
    sessions, rejected = load_query_log(path)
    assert len(sessions) == 1 and not rejected
    assert [e.query_text for e in sessions[0].entries] == ["toyota camry", "honda accord"]


def test_query_log_negative_dwell_rejected_line_reported(tmp_path):
    good = json.dumps({"user_id": "u1", "entries": [{"query": "a", "timestamp": 1}]})
    bad = json.dumps({"user_id": "u2", "entries": [
        {"query": "b", "timestamp": 1,
         "clicked_ads": [{"ad_id": "x", "rank_position": 1, "dwell_seconds": -3}]}]})
    path = tmp_path / "log.jsonl"
    path.write_text(good + "\n" + bad + "\n")
    sessions, rejected = load_query_log(path)
    assert [s.user_id for s in sessions] == ["u1"]
    assert len(rejected) == 1 and "dwell" in rejected[0][1]


def test_query_log_unsorted_timestamps_rejected(tmp_path):
    bad = json.dumps({"user_id": "u1", "entries": [
        {"query": "a", "timestamp": 10}, {"query": "b", "timestamp": 5}]})
    path = tmp_path / "log.jsonl"
    path.write_text(bad + "\n")
    sessions, rejected = load_query_log(path)
    assert not sessions and len(rejected) == 1


def test_query_log_duplicate_user_rejected(tmp_path):
    line = json.dumps({"user_id": "u1", "entries": [{"query": "a", "timestamp": 1}]})
    path = tmp_path / "log.jsonl"
    path.write_text(line + "\n" + line + "\n")
    sessions, rejected = load_query_log(path)
    assert len(sessions) == 1 and len(rejected) == 1


def test_bundled_query_log_loads_clean():
    sessions, rejected = load_query_log(DATA_DIR / "query_log.jsonl")
    assert len(sessions) == 8 and not rejected
