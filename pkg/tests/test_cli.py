import json

import pytest
from click.testing import CliRunner

from adsqa.cli import main

from conftest import DATA_DIR

CARS = DATA_DIR / "domains" / "cars"


@pytest.fixture
def runner():
    return CliRunner()


def test_ingest_reports_ranges(runner):
    result = runner.invoke(main, [
        "ingest", "--schema", str(CARS / "schema.json"),
        "--lexicon", str(CARS / "lexicon.json"),
        "--ads", str(CARS / "ads.jsonl"),
        "--log", str(DATA_DIR / "query_log.jsonl")])
    assert result.exit_code == 0, result.output
    assert "domain cars: 28 records" in result.output
    assert "Year: [1985, 2011]" in result.output
    assert "8 sessions" in result.output


def test_ingest_bad_file_fails_cleanly(runner, tmp_path):
    bad = tmp_path / "ads.jsonl"
    bad.write_text('{"id": "a", "values": {"Nope": 1}}\n')
    result = runner.invoke(main, [
        "ingest", "--schema", str(CARS / "schema.json"),
        "--lexicon", str(CARS / "lexicon.json"), "--ads", str(bad)])
    assert result.exit_code != 0
    assert "Nope" in result.output


def test_ask_plain_output(runner):
    result = runner.invoke(main, [
        "ask", "Do you have automatic blue cars?", "--domain", "cars"])
    assert result.exit_code == 0, result.output
    assert "interpretation:" in result.output
    assert "[exact]" in result.output


def test_ask_json_output(runner):
    result = runner.invoke(main, [
        "ask", "cheapest honda", "--domain", "cars", "--json"])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["domain"] == "cars"
    assert doc["answers"]


def test_ask_contradiction_message(runner):
    result = runner.invoke(main, [
        "ask", "price above 9000 and price below 2000", "--domain", "cars"])
    assert result.exit_code == 0
    assert "search retrieved no results" in result.output


def test_explain_shows_tags(runner):
    result = runner.invoke(main, [
        "explain", "I want a 4 wheel drive with less than 20K miles", "--domain", "cars"])
    assert result.exit_code == 0, result.output
    assert "4 wheel drive/TII" in result.output
    assert "less than/TIII-PB" in result.output
    assert "20k mi./TIII-CB" in result.output


def test_train_writes_model(runner, tmp_path):
    out = tmp_path / "model.json"
    result = runner.invoke(main, [
        "train", "--questions", str(DATA_DIR / "questions.jsonl"), "--out", str(out)])
    assert result.exit_code == 0, result.output
    doc = json.loads(out.read_text())
    assert len(doc["domains"]) == 8


def test_build_stores_writes_artifacts(runner, tmp_path):
    result = runner.invoke(main, ["build-stores", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "cars.json").exists()
    assert (tmp_path / "cars.index.json").exists()
    stores = json.loads((tmp_path / "cars.json").read_text())
    assert stores["ranges"]["Price"] > 0


def test_eval_emits_csv(runner):
    result = runner.invoke(main, [
        "eval", "--judgments", str(DATA_DIR / "judgments.jsonl"), "--domain", "cars"])
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert lines[0] == "method,p_at_1,p_at_5,mrr"
    assert len(lines) == 6
