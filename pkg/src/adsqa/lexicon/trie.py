"""Keyword trie and the identifier table that drives tagging.

Each node holds one character; a node's label is the concatenation of the
characters on its root path.  Phrases are inserted in normalized form
(lowercase, hyphens as spaces), so combined keywords like "4 wheel drive"
are found by continuing through a space child after the node for "4".
Looking up a phrase of length m touches m nodes.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterator

from ..corpus import AttrType, DomainLexicon, DomainSchema
from ..errors import TrieBuildError
from ..textnorm import DIGIT_WORDS, NUMBER_WORDS, SEPARATORS, normalize_phrase

NUMBER_RE = re.compile(r"\d[\d,]*(?:\.\d+)?[kK]?")


class IdentifierKind(Enum):
    TYPE1_VALUE = "type1_value"
    TYPE2_VALUE = "type2_value"
    TYPE3_ATTRIBUTE = "type3_attribute"
    TYPE3_NUMBER = "type3_number"
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    BETWEEN = "between"
    SUPERLATIVE_COMPLETE = "superlative_complete"
    SUPERLATIVE_PARTIAL = "superlative_partial"
    UNIT = "unit"
    NONE = "none"


COMPARATOR_KINDS = (IdentifierKind.LESS, IdentifierKind.GREATER,
                    IdentifierKind.EQUAL, IdentifierKind.BETWEEN)

_KIND_TO_COMPARATOR = {
    IdentifierKind.LESS: "lt",
    IdentifierKind.GREATER: "gt",
    IdentifierKind.EQUAL: "eq",
    IdentifierKind.BETWEEN: "between",
}


@dataclass(frozen=True)
class Identifier:
    """Interpretation of a keyword: what the tagger records at a trie node."""

    kind: IdentifierKind
    attribute: str | None = None
    direction: str | None = None        # "min" | "max" for superlatives
    unit_display: str | None = None     # for units: preferred short form
    unit_prefix: bool = False           # "$" renders before the number
    literal: str = ""                   # normalized keyword that was inserted

    @property
    def comparator(self) -> str | None:
        return _KIND_TO_COMPARATOR.get(self.kind)

    @property
    def label(self) -> str:
        """Short type label used when showing a tagged question."""
        k = self.kind
        if k is IdentifierKind.TYPE1_VALUE:
            return "TI"
        if k is IdentifierKind.TYPE2_VALUE:
            return "TII"
        if k is IdentifierKind.TYPE3_ATTRIBUTE:
            return "TIII-A"
        if k is IdentifierKind.TYPE3_NUMBER:
            return "TIII-CB" if self.attribute else "TIII"
        if k in COMPARATOR_KINDS:
            return "TIII-CB" if self.attribute else "TIII-PB"
        if k is IdentifierKind.SUPERLATIVE_COMPLETE:
            return "TIII-CS"
        if k is IdentifierKind.SUPERLATIVE_PARTIAL:
            return "TIII-PS"
        if k is IdentifierKind.UNIT:
            return "TIII-U"
        return "NONE"


NONE_IDENTIFIER = Identifier(kind=IdentifierKind.NONE)


class TrieNode:
    __slots__ = ("value", "label", "children", "identifier", "is_keyword")

    def __init__(self, value: str = "", label: str = ""):
        self.value = value
        self.label = label
        self.children: dict[str, TrieNode] = {}
        self.identifier: Identifier | None = None
        self.is_keyword = False


class Trie:
    def __init__(self):
        self.root = TrieNode()
        self._phrases: dict[str, Identifier] = {}

    def insert(self, phrase: str, identifier: Identifier) -> None:
        norm = normalize_phrase(phrase) if phrase != "$" else "$"
        if not norm:
            raise TrieBuildError("cannot insert an empty phrase")
        prior = self._phrases.get(norm)
        if prior is not None:
            if prior != identifier:
                raise TrieBuildError(
                    f"phrase {norm!r} mapped to two identifiers: {prior} and {identifier}"
                )
            return
        node = self.root
        for ch in norm:
            node = node.children.setdefault(ch, TrieNode(ch, node.label + ch))
        node.is_keyword = True
        node.identifier = identifier
        self._phrases[norm] = identifier

    def lookup(self, phrase: str) -> Identifier | None:
        """Exact lookup of a normalized phrase; O(m) in the phrase length."""
        norm = normalize_phrase(phrase) if phrase != "$" else "$"
        node = self.root
        for ch in norm:
            node = node.children.get(ch)
            if node is None:
                return None
        return node.identifier if node.is_keyword else None

    @property
    def phrases(self) -> dict[str, Identifier]:
        return dict(self._phrases)

    def longest_match(self, text: str, start: int) -> tuple[int, Identifier] | None:
        """Greedy longest keyword match beginning at ``start``.

        Separator runs in the text are crossed through a space child, which is
        how combined keywords are detected.  A match only counts when it ends
        at a word boundary.
        """
        node = self.root
        n = len(text)
        j = start
        best: tuple[int, Identifier] | None = None
        while j < n:
            ch = text[j]
            if ch in SEPARATORS or ch.isspace():
                nxt = node.children.get(" ")
                if nxt is None:
                    break
                k = j
                while k < n and (text[k] in SEPARATORS or text[k].isspace()):
                    k += 1
                if k >= n:
                    break
                node = nxt
                j = k
                continue
            child = node.children.get(ch.lower())
            if child is None:
                break
            node = child
            j += 1
            if node.is_keyword and self._boundary(text, j):
                best = (j, node.identifier)
        return best

    @staticmethod
    def _boundary(text: str, j: int) -> bool:
        if j >= len(text):
            return True
        nxt = text[j]
        if not nxt.isalnum():
            return True
        # punctuation keywords like "$" or "<=" may run straight into digits
        return nxt.isdigit() and not text[j - 1].isalnum()

    def walk_word(self, word: str) -> tuple[TrieNode, int, list[int]]:
        """Walk a single word character by character.

        Returns the deepest node reached, how many characters were consumed,
        and every offset at which the walk passed a complete keyword.
        """
        node = self.root
        offsets: list[int] = []
        consumed = 0
        for ch in word.lower():
            child = node.children.get(ch)
            if child is None:
                break
            node = child
            consumed += 1
            if node.is_keyword:
                offsets.append(consumed)
        return node, consumed, offsets

    def keywords_under(self, node: TrieNode) -> Iterator[tuple[str, Identifier]]:
        stack = [node]
        while stack:
            cur = stack.pop()
            if cur.is_keyword:
                yield cur.label, cur.identifier
            stack.extend(cur.children.values())


@dataclass(frozen=True)
class IdentifierTable:
    """Shared keyword table: comparator synonyms, superlative rows, and the
    attribute-bound boundary phrases.  The same table serves every domain."""

    comparators: dict[str, tuple[str, ...]]
    superlatives_complete: tuple[dict, ...]
    superlatives_partial: tuple[dict, ...]
    complete_boundaries: tuple[dict, ...] = ()


def load_identifier_table(path: str | Path | None = None) -> IdentifierTable:
    if path is None:
        raw = resources.files("adsqa.data").joinpath("identifiers.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    doc = json.loads(raw)
    return IdentifierTable(
        comparators={k: tuple(v) for k, v in doc.get("comparators", {}).items()},
        superlatives_complete=tuple(doc.get("superlatives", {}).get("complete", [])),
        superlatives_partial=tuple(doc.get("superlatives", {}).get("partial", [])),
        complete_boundaries=tuple(doc.get("complete_boundaries", [])),
    )


_COMPARATOR_TO_KIND = {
    "lt": IdentifierKind.LESS,
    "gt": IdentifierKind.GREATER,
    "eq": IdentifierKind.EQUAL,
    "between": IdentifierKind.BETWEEN,
}


def _spelling_variants(phrase: str) -> list[str]:
    """Digit tokens spelled out and number words turned into digits, so the
    trie recognizes both "4 door" and "four door"."""
    tokens = phrase.split()
    options = []
    for tok in tokens:
        alts = {tok}
        if tok in NUMBER_WORDS:
            alts.add(NUMBER_WORDS[tok])
        if tok in DIGIT_WORDS:
            alts.add(DIGIT_WORDS[tok])
        options.append(sorted(alts))
    return [" ".join(combo) for combo in itertools.product(*options)]


def build_trie(lexicon: DomainLexicon, table: IdentifierTable, schema: DomainSchema) -> Trie:
    """Build the tagging trie for one ads domain.

    Inserts every lexicon phrase, every unit keyword, the schema's numeric
    attribute names, and every identifier-table row whose attribute (if any)
    exists in the schema.
    """
    trie = Trie()

    value_kind = {AttrType.TYPE1: IdentifierKind.TYPE1_VALUE,
                  AttrType.TYPE2: IdentifierKind.TYPE2_VALUE}
    for phrase, attr_type, attr in lexicon.phrases():
        ident = Identifier(kind=value_kind[attr_type], attribute=attr, literal=normalize_phrase(phrase))
        for variant in _spelling_variants(normalize_phrase(phrase)):
            trie.insert(variant, ident)

    for keyword, unit in lexicon.type3_units.items():
        trie.insert(keyword, Identifier(
            kind=IdentifierKind.UNIT, attribute=unit.attribute,
            unit_display=unit.display, unit_prefix=unit.prefix, literal=keyword))

    for decl in schema.of_type(AttrType.TYPE3):
        name = decl.name.lower()
        trie.insert(name, Identifier(
            kind=IdentifierKind.TYPE3_ATTRIBUTE, attribute=decl.name, literal=name))

    for comparator, keywords in table.comparators.items():
        kind = _COMPARATOR_TO_KIND[comparator]
        for kw in keywords:
            trie.insert(kw, Identifier(kind=kind, literal=normalize_phrase(kw) or kw))

    for row in table.superlatives_complete:
        if not schema.has_attribute(row["attribute"]):
            continue
        attr = schema.attribute(row["attribute"]).name
        for kw in row["keywords"]:
            trie.insert(kw, Identifier(
                kind=IdentifierKind.SUPERLATIVE_COMPLETE, attribute=attr,
                direction=row["direction"], literal=normalize_phrase(kw)))

    for row in table.superlatives_partial:
        for kw in row["keywords"]:
            trie.insert(kw, Identifier(
                kind=IdentifierKind.SUPERLATIVE_PARTIAL,
                direction=row["direction"], literal=normalize_phrase(kw)))

    for row in table.complete_boundaries:
        if not schema.has_attribute(row["attribute"]):
            continue
        attr = schema.attribute(row["attribute"]).name
        kind = _COMPARATOR_TO_KIND[row["comparator"]]
        for kw in row["keywords"]:
            trie.insert(kw, Identifier(kind=kind, attribute=attr, literal=normalize_phrase(kw)))

    return trie
