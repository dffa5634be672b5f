from __future__ import annotations

from pathlib import Path

import pytest

from adsqa import boolean
from adsqa.analyzer import extract_conditions
from adsqa.corpus import load_domain
from adsqa.lexicon import build_trie, correct, load_identifier_table, strip_nonessential, tag
from adsqa.service import bundled_data_dir, load_state

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "adsqa" / "data"


@pytest.fixture(scope="session")
def cars():
    base = DATA_DIR / "domains" / "cars"
    return load_domain(base / "schema.json", base / "lexicon.json", base / "ads.jsonl")


@pytest.fixture(scope="session")
def cars_trie(cars):
    return build_trie(cars.lexicon, load_identifier_table(), cars.schema)


@pytest.fixture(scope="session")
def app_state():
    return load_state(bundled_data_dir(), with_classifier=False)


@pytest.fixture(scope="session")
def pipeline(cars, cars_trie):
    """Question -> (corrected text, stripped tokens, conditions)."""

    def run(question: str):
        fixed = correct(question, cars_trie).text
        tokens = boolean.detect_negation(tag(fixed, cars_trie))
        stripped = strip_nonessential(tokens)
        return fixed, stripped, extract_conditions(stripped, cars)

    return run


@pytest.fixture(scope="session")
def interpret(cars, pipeline):
    def run(question: str):
        fixed, _, conditions = pipeline(question)
        return boolean.interpret(fixed, conditions, cars.schema)

    return run
