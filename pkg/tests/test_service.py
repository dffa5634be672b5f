import pytest
from fastapi.testclient import TestClient

from adsqa.errors import AdsQAError, NoConditionsError
from adsqa.service import ask, bundled_data_dir, create_app, explain, load_state


@pytest.fixture(scope="module")
def state():
    return load_state(bundled_data_dir(), with_classifier=True)


def test_ask_automatic_blue_cars(state):
    envelope = ask(state, "Do you have automatic blue cars?", domain="cars")
    assert envelope.answers, "expected exact matches"
    exact = [a for a in envelope.answers if a["kind"] == "exact"]
    for answer in exact:
        assert answer["values"]["Transmission"].lower() == "automatic"
        assert answer["values"]["Color"] == "blue"
    assert envelope.sql.count("IN (SELECT") == 2
    assert "Transmission" in envelope.sql and "Color" in envelope.sql


def test_ask_price_window_interpretation(state):
    envelope = ask(state, "Any car priced below $7000 and not less than $2000", domain="cars")
    assert envelope.interpretation == "Price between [2000, 7000)"
    for answer in envelope.answers:
        if answer["kind"] == "exact":
            assert 2000 <= answer["values"]["Price"] < 7000


def test_ask_empty_question_errors(state):
    with pytest.raises(NoConditionsError, match="no conditions extracted"):
        ask(state, "   ", domain="cars")


def test_ask_no_recognizable_conditions(state):
    with pytest.raises(NoConditionsError):
        ask(state, "hello there friend", domain="cars")


def test_contradiction_envelope(state):
    envelope = ask(state, "price above 9000 and price below 2000", domain="cars")
    assert envelope.message == "search retrieved no results"
    assert envelope.answers == []


def test_exacts_precede_partials_and_cap(state):
    envelope = ask(state, "silver 2 door mazda less than $5000", domain="cars")
    kinds = [a["kind"] for a in envelope.answers]
    if "partial" in kinds and "exact" in kinds:
        assert kinds.index("partial") > kinds.index("exact")
    assert len(envelope.answers) <= 30
    assert envelope.relaxation_triggered


def test_partial_answers_annotated(state):
    envelope = ask(state, "2 door car for less than $1600", domain="cars")
    partials = [a for a in envelope.answers if a["kind"] == "partial"]
    assert partials
    for answer in partials:
        assert answer["similarity_measure"].split(" ")[0] in ("TI_Sim", "Feat_Sim", "Num_Sim")
        assert answer["dropped_condition"]


def test_ask_uses_classifier_when_domain_not_forced(state):
    envelope = ask(state, "Cheapest 2dr mazda with automatic transmission")
    assert envelope.domain == "cars"
    assert 0 < envelope.posterior <= 1


def test_ask_is_deterministic(state):
    a = ask(state, "cheapest honda accord", domain="cars")
    b = ask(state, "cheapest honda accord", domain="cars")
    assert [x["record_id"] for x in a.answers] == [x["record_id"] for x in b.answers]
    assert a.interpretation == b.interpretation and a.sql == b.sql


def test_explain_matches_ask(state):
    question = "4 wheel drive with less than 20K miles"
    shown = explain(state, question, domain="cars")
    full = ask(state, question, domain="cars")
    assert shown.interpretation == full.interpretation
    assert shown.tags == full.tags
    assert shown.answers == []
    assert shown.sql == full.sql or full.relaxation_triggered


def test_explain_boundary_question_tags(state):
    envelope = explain(state, "I want a 4 wheel drive with less than 20K miles", domain="cars")
    assert [(t["display"], t["label"]) for t in envelope.tags] == [
        ("4 wheel drive", "TII"), ("less than", "TIII-PB"), ("20k mi.", "TIII-CB")]


def test_correction_report_in_envelope(state):
    envelope = explain(state, "Hondaaccord less than $2000", domain="cars")
    assert envelope.corrected == "Honda accord less than $2000"
    assert envelope.corrections == [{
        "original": "Hondaaccord", "replacement": "Honda accord", "kind": "missing_space"}]


def test_unknown_domain_raises(state):
    with pytest.raises(AdsQAError, match="not loaded"):
        ask(state, "red honda", domain="boats")


def test_motorcycles_domain_loaded(state):
    envelope = ask(state, "red harley cruiser", domain="motorcycles")
    assert envelope.answers
    assert envelope.domain == "motorcycles"


# --- HTTP surface -----------------------------------------------------------

@pytest.fixture(scope="module")
def client(state):
    return TestClient(create_app(state))


def test_http_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_http_domains(client):
    response = client.get("/domains")
    assert response.status_code == 200
    assert response.json() == {"domains": ["cars", "motorcycles"]}


def test_http_ask_round_trip(client):
    response = client.post("/ask", json={"question": "automatic blue cars", "domain": "cars"})
    assert response.status_code == 200
    doc = response.json()
    assert doc["domain"] == "cars"
    assert doc["answers"]
    assert all(a["kind"] in ("exact", "partial") for a in doc["answers"])
    assert [a for a in doc["answers"] if a["kind"] == "exact"] == doc["answers"][
        : len([a for a in doc["answers"] if a["kind"] == "exact"])]


def test_http_concurrent_identical_posts_deterministic(client):
    payload = {"question": "2 door car for less than $6000", "domain": "cars"}
    responses = [client.post("/ask", json=payload).json() for _ in range(4)]
    first = responses[0]
    for other in responses[1:]:
        assert [a["record_id"] for a in other["answers"]] == \
            [a["record_id"] for a in first["answers"]]
        assert other["interpretation"] == first["interpretation"]


def test_http_explain(client):
    response = client.post("/explain", json={"question": "red bmw", "domain": "cars"})
    assert response.status_code == 200
    assert response.json()["answers"] == []


def test_http_bad_question_is_400(client):
    response = client.post("/ask", json={"question": "???", "domain": "cars"})
    assert response.status_code == 400
    assert "no conditions" in response.json()["detail"]
