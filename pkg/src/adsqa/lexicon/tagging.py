"""Question scanning: greedy keyword tagging and non-essential removal."""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..textnorm import SEPARATORS
from .trie import (
    NONE_IDENTIFIER,
    NUMBER_RE,
    Identifier,
    IdentifierKind,
    Trie,
)


@dataclass(frozen=True)
class TaggedToken:
    """One recognized span of the question.

    ``surface`` is the original text, ``display`` the canonical rendering used
    when showing the tagged question (numbers lowercased, units abbreviated).
    """

    surface: str
    identifier: Identifier
    char_span: tuple[int, int]
    value: float | None = None
    display: str | None = None
    negated: bool = False

    @property
    def kind(self) -> IdentifierKind:
        return self.identifier.kind

    @property
    def label(self) -> str:
        return self.identifier.label

    @property
    def shown(self) -> str:
        return self.display if self.display is not None else self.surface


def parse_number(surface: str) -> float:
    text = surface.replace(",", "")
    if text[-1] in "kK":
        return float(text[:-1]) * 1000.0
    return float(text)


def tag(question: str, trie: Trie) -> list[TaggedToken]:
    """Scan a question left to right, longest keyword match first.

    Tokens the trie does not recognize come back with kind NONE and are
    removed later by :func:`strip_nonessential`.  A number next to a unit
    keyword is folded into a single attribute-bound number token.
    """
    tokens: list[TaggedToken] = []
    n = len(question)
    i = 0
    while i < n:
        ch = question[i]
        if ch.isspace() or ch in SEPARATORS:
            i += 1
            continue
        match = trie.longest_match(question, i)
        if match is not None:
            end, ident = match
            tokens.append(TaggedToken(question[i:end], ident, (i, end)))
            i = end
            continue
        if ch.isdigit():
            m = NUMBER_RE.match(question, i)
            if m is not None and (m.end() >= n or not question[m.end()].isalnum()):
                surface = m.group()
                tokens.append(TaggedToken(
                    surface,
                    Identifier(kind=IdentifierKind.TYPE3_NUMBER, literal=surface.lower()),
                    (i, m.end()),
                    value=parse_number(surface),
                    display=surface.lower(),
                ))
                i = m.end()
                continue
        if ch.isalnum():
            j = i
            while j < n and question[j].isalnum():
                j += 1
            tokens.append(TaggedToken(question[i:j], NONE_IDENTIFIER, (i, j)))
            i = j
            continue
        i += 1
    return _merge_units(question, tokens)


def _adjacent(question: str, left: TaggedToken, right: TaggedToken) -> bool:
    gap = question[left.char_span[1]:right.char_span[0]]
    return all(c.isspace() or c in SEPARATORS for c in gap)


def _merge_units(question: str, tokens: list[TaggedToken]) -> list[TaggedToken]:
    merged: list[TaggedToken] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        pair = None
        if (nxt is not None and tok.kind is IdentifierKind.UNIT
                and nxt.kind is IdentifierKind.TYPE3_NUMBER
                and nxt.identifier.attribute is None
                and _adjacent(question, tok, nxt)):
            pair = (tok, nxt, nxt)  # unit first: "$2000"
        elif (nxt is not None and tok.kind is IdentifierKind.TYPE3_NUMBER
                and tok.identifier.attribute is None
                and nxt.kind is IdentifierKind.UNIT
                and _adjacent(question, tok, nxt)):
            pair = (tok, nxt, tok)  # number first: "20k miles"
        if pair is None:
            merged.append(tok)
            i += 1
            continue
        first, second, number = pair
        unit = first.identifier if first.kind is IdentifierKind.UNIT else second.identifier
        num_text = number.surface.lower()
        if unit.unit_prefix:
            shown = f"{unit.unit_display}{num_text}"
        else:
            shown = f"{num_text} {unit.unit_display}"
        span = (first.char_span[0], second.char_span[1])
        merged.append(TaggedToken(
            question[span[0]:span[1]],
            Identifier(kind=IdentifierKind.TYPE3_NUMBER, attribute=unit.attribute,
                       literal=num_text),
            span,
            value=number.value,
            display=shown,
        ))
        i += 2
    return merged


def strip_nonessential(tokens: list[TaggedToken]) -> list[TaggedToken]:
    """Drop tokens that are neither superlatives/boundaries nor attribute
    values: everything the trie could not interpret."""
    return [t for t in tokens if t.kind is not IdentifierKind.NONE]


def simplified_question(tokens: list[TaggedToken]) -> str:
    return " ".join(t.shown for t in strip_nonessential(tokens))


def negate_token(token: TaggedToken) -> TaggedToken:
    return replace(token, negated=True)
