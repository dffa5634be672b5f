import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adsqa.errors import TrieBuildError
from adsqa.lexicon import (
    correct,
    is_shorthand,
    strip_nonessential,
    tag,
    text_similarity,
)
from adsqa.lexicon.trie import Identifier, IdentifierKind, Trie


def shown(tokens):
    return [(t.shown, t.label) for t in tokens]


# --- trie structure -------------------------------------------------------

def test_single_phrase_path(cars_trie):
    ident = cars_trie.lookup("bmw")
    assert ident.kind is IdentifierKind.TYPE1_VALUE
    assert ident.attribute == "Make"


def test_combined_phrase_detected_through_space(cars_trie):
    # walking "4", then a space child, continues to the full combined keyword
    node = cars_trie.root.children["4"]
    assert " " in node.children
    ident = cars_trie.lookup("4 wheel drive")
    assert ident.kind is IdentifierKind.TYPE2_VALUE
    assert ident.attribute == "DriveTrain"


def test_shared_prefix_distinct_leaves(cars_trie):
    corolla = cars_trie.lookup("corolla")
    corvette = cars_trie.lookup("corvette")
    assert corolla.attribute == corvette.attribute == "Model"
    node = cars_trie.root
    for ch in "cor":
        node = node.children[ch]
    assert {"o", "v"} <= set(node.children)


def test_node_labels_are_root_paths(cars_trie):
    node = cars_trie.root
    for ch in "maz":
        node = node.children[ch]
        assert node.label == "maz"[: len(node.label)]
    assert node.label == "maz"


def test_conflicting_identifier_is_build_error():
    trie = Trie()
    trie.insert("red", Identifier(kind=IdentifierKind.TYPE2_VALUE, attribute="Color"))
    with pytest.raises(TrieBuildError):
        trie.insert("red", Identifier(kind=IdentifierKind.TYPE1_VALUE, attribute="Make"))


def test_every_lexicon_phrase_lookup_succeeds(cars, cars_trie):
    for phrase, _attr_type, attr in cars.lexicon.phrases():
        ident = cars_trie.lookup(phrase)
        assert ident is not None, phrase
        assert ident.attribute == attr


# --- tagging --------------------------------------------------------------

def test_tag_two_door_red_bmw(cars_trie):
    tokens = strip_nonessential(tag("2 door red BMW", cars_trie))
    assert shown(tokens) == [("2 door", "TII"), ("red", "TII"), ("BMW", "TI")]


def test_tag_superlative_question(cars_trie):
    tokens = strip_nonessential(tag("Cheapest 2dr mazda automatic", cars_trie))
    assert shown(tokens) == [
        ("Cheapest", "TIII-CS"), ("2dr", "TII"), ("mazda", "TI"), ("automatic", "TII")]


def test_tag_boundary_with_unit(cars_trie):
    tokens = strip_nonessential(tag("4 wheel drive less than 20k miles", cars_trie))
    assert shown(tokens) == [
        ("4 wheel drive", "TII"), ("less than", "TIII-PB"), ("20k mi.", "TIII-CB")]
    assert tokens[-1].value == 20000
    assert tokens[-1].identifier.attribute == "Mileage"


def test_tag_currency_prefix(cars_trie):
    tokens = strip_nonessential(tag("less than $2,500", cars_trie))
    number = tokens[-1]
    assert number.shown == "$2,500"
    assert number.value == 2500
    assert number.identifier.attribute == "Price"


def test_hyphen_matches_spaced_phrase(cars_trie):
    tokens = strip_nonessential(tag("not a 2-dr please", cars_trie))
    assert shown(tokens) == [("2-dr", "TII")]


def test_number_word_variant(cars_trie):
    tokens = strip_nonessential(tag("four door honda", cars_trie))
    assert shown(tokens) == [("four door", "TII"), ("honda", "TI")]


def test_unknown_tokens_are_none_then_stripped(cars_trie):
    tokens = tag("Do you have a 2 door red BMW?", cars_trie)
    kinds = [t.kind for t in tokens]
    assert kinds.count(IdentifierKind.NONE) == 4  # do, you, have, a
    assert [t.shown for t in strip_nonessential(tokens)] == ["2 door", "red", "BMW"]


def test_all_stopword_question_strips_to_nothing(cars_trie):
    assert strip_nonessential(tag("do you have any", cars_trie)) == []


def test_spans_ascending_non_overlapping(cars_trie):
    tokens = tag("Cheapest 2dr mazda with automatic transmission", cars_trie)
    spans = [t.char_span for t in tokens]
    assert spans == sorted(spans)
    for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
        assert e1 <= s2


# --- text similarity ------------------------------------------------------

def oracle_common(a, b):
    """Independent recursive longest-common-substring counter."""
    best = (0, 0, 0)
    for i in range(len(a)):
        for j in range(len(b)):
            k = 0
            while i + k < len(a) and j + k < len(b) and a[i + k] == b[j + k]:
                k += 1
            if k > best[0]:
                best = (k, i, j)
    k, i, j = best
    if k == 0:
        return 0
    return k + oracle_common(a[:i], b[:j]) + oracle_common(a[i + k:], b[j + k:])


def oracle_similarity(a, b):
    if not a and not b:
        return 0.0
    return 200.0 * max(oracle_common(a, b), oracle_common(b, a)) / (len(a) + len(b))


def test_similarity_identity():
    assert text_similarity("accord", "accord") == 100.0


def test_similarity_accorr_frozen_oracle_value():
    # LCS "accor" = 5, flanks "d"/"r" share nothing: 200*5/12 = 83.33
    assert oracle_similarity("accord", "accorr") == pytest.approx(83.3333, abs=1e-3)
    assert text_similarity("accord", "accorr") == pytest.approx(83.3333, abs=1e-3)


def test_similarity_disjoint_alphabets():
    assert text_similarity("abc", "xyz") == 0.0


def test_similarity_empty_strings_defined_zero():
    assert text_similarity("", "") == 0.0


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="abcdez", max_size=8), st.text(alphabet="abcdez", max_size=8))
def test_similarity_symmetric_bounded_and_matches_oracle(a, b):
    s = text_similarity(a, b)
    assert s == pytest.approx(text_similarity(b, a))
    assert 0.0 <= s <= 100.0
    assert s == pytest.approx(oracle_similarity(a, b))
    if a == b and a:
        assert s == 100.0
    if a and b and s == 100.0:
        assert a == b


# --- correction -----------------------------------------------------------

def test_missing_space_golden(cars_trie):
    result = correct("Hondaaccord less than $2000", cars_trie)
    assert result.text == "Honda accord less than $2000"
    assert result.edits[0].kind == "missing_space"


def test_misspelling_golden(cars_trie):
    result = correct("honda accorr less than $2000", cars_trie)
    assert result.text == "honda accord less than $2000"
    assert result.edits[0].kind == "misspelling"


def test_correct_is_identity_on_valid_text(cars_trie):
    result = correct("honda accord", cars_trie)
    assert result.text == "honda accord"
    assert not result.edits


def test_correct_idempotent_on_full_questions(cars_trie):
    for q in ["Do you have a 2 door red BMW?",
              "Cheapest 2dr mazda with automatic transmission",
              "I want a 4 wheel drive with less than 20K miles"]:
        once = correct(q, cars_trie)
        assert once.text == q
        assert not once.edits


def test_tag_of_corrected_equals_tag_of_correct_input(cars_trie):
    fixed = correct("Hondaaccord less than $2000", cars_trie).text
    again = correct(fixed, cars_trie)
    assert again.text == fixed and not again.edits
    assert shown(strip_nonessential(tag(fixed, cars_trie))) == \
        shown(strip_nonessential(tag("Honda accord less than $2000", cars_trie)))


def test_unrecognized_below_threshold_left_alone(cars_trie):
    result = correct("zzqqi accord", cars_trie)
    assert result.text == "zzqqi accord"
    assert "zzqqi" in result.unrecognized


def test_generic_short_words_not_rewritten(cars_trie):
    # "car"/"cars" are similar to lexicon models but must never be substituted
    result = correct("Any car priced below $7000 and not less than $2000", cars_trie)
    assert "camry" not in result.text
    assert result.text.startswith("Any car price")


def test_split_with_number_suffix(cars_trie):
    assert correct("under2000 dollars", cars_trie).text == "under 2000 dollars"


# --- shorthand ------------------------------------------------------------

def subsequence_oracle(a, b):
    it = iter(b)
    return all(c in it for c in a)


@pytest.mark.parametrize("candidate,value,expected", [
    ("4dr", "4-door", True),
    ("rd4", "4-door", False),
    ("four door", "4 doors", True),
    ("4 dr", "4-door", True),
    ("4doors", "4-door", True),
    ("2dr", "4-door", False),
    ("awd", "all wheel drive", True),
])
def test_shorthand_cases(candidate, value, expected):
    assert is_shorthand(candidate, value) is expected


def test_every_phrase_is_its_own_shorthand(cars):
    for phrase, _t, _a in cars.lexicon.phrases():
        assert is_shorthand(phrase, phrase)


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="abcd 12-", min_size=1, max_size=10),
       st.text(alphabet="abcd 12-", min_size=1, max_size=10))
def test_shorthand_agrees_with_subsequence_oracle(a, b):
    from adsqa.textnorm import squash

    sa, sb = squash(a), squash(b)
    expected = bool(sa) and bool(sb) and (
        subsequence_oracle(sa, sb) or subsequence_oracle(sb, sa))
    assert is_shorthand(a, b) is expected
