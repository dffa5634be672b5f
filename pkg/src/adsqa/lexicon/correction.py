"""Spelling and missing-space correction driven by the domain trie.

Two repair paths, applied while scanning a question:

* a word walks past a complete keyword with characters left over -> a space
  was probably forgotten, so one is inserted and the remainder re-checked;
* the trie dead-ends inside a word -> the word is compared against the
  keywords reachable from the deepest node reached and replaced by the most
  similar one, provided it clears the acceptance gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..textnorm import NUMBER_WORDS, SEPARATORS, levenshtein, stopwords
from .trie import NUMBER_RE, Trie

SIMILARITY_THRESHOLD = 60.0
MIN_WORD_LEN = 4


def _common_chars(a: str, b: str) -> int:
    if not a or not b:
        return 0
    best_len = 0
    best_i = 0
    best_j = 0
    for i in range(len(a)):
        if len(a) - i <= best_len:
            break
        for j in range(len(b)):
            if len(b) - j <= best_len:
                break
            k = 0
            while i + k < len(a) and j + k < len(b) and a[i + k] == b[j + k]:
                k += 1
            if k > best_len:
                best_len, best_i, best_j = k, i, j
    if best_len == 0:
        return 0
    return (best_len
            + _common_chars(a[:best_i], b[:best_j])
            + _common_chars(a[best_i + best_len:], b[best_j + best_len:]))


def text_similarity(a: str, b: str) -> float:
    """Similarity percentage in [0, 100] from common characters and their
    positions: twice the recursively-matched character count over the total
    length.  The count is taken over both argument orders so ties in the
    longest-substring choice cannot make the measure asymmetric.  Equal
    strings score 100; disjoint alphabets score 0."""
    if not a and not b:
        return 0.0
    common = max(_common_chars(a, b), _common_chars(b, a))
    return 200.0 * common / (len(a) + len(b))


@dataclass(frozen=True)
class Edit:
    original: str
    replacement: str
    kind: str  # "missing_space" | "misspelling"


@dataclass
class CorrectionResult:
    text: str
    edits: list[Edit] = field(default_factory=list)
    unrecognized: list[str] = field(default_factory=list)

    @property
    def changed(self) -> bool:
        return bool(self.edits)


def _is_full_keyword(trie: Trie, word: str) -> bool:
    node, consumed, _ = trie.walk_word(word)
    return consumed == len(word) and node.is_keyword


def _is_number(word: str) -> bool:
    m = NUMBER_RE.fullmatch(word)
    return m is not None or word.lower() in NUMBER_WORDS


def _split_offsets(trie: Trie, word: str) -> list[int] | None:
    """Offsets at which spaces turn ``word`` into known keywords/numbers."""
    if _is_full_keyword(trie, word) or _is_number(word):
        return []
    _, _, keyword_offsets = trie.walk_word(word)
    for off in sorted(keyword_offsets, reverse=True):
        if off == 0 or off >= len(word):
            continue
        rest = _split_offsets(trie, word[off:])
        if rest is not None:
            return [off] + [off + r for r in rest]
    m = NUMBER_RE.match(word)
    if m is not None and 0 < m.end() < len(word):
        rest = _split_offsets(trie, word[m.end():])
        if rest is not None:
            return [m.end()] + [m.end() + r for r in rest]
    return None


def _insert_spaces(word: str, offsets: list[int]) -> str:
    parts = []
    prev = 0
    for off in offsets:
        parts.append(word[prev:off])
        prev = off
    parts.append(word[prev:])
    return " ".join(parts)


def _best_substitute(trie: Trie, word: str) -> str | None:
    low = word.lower()
    if len(low) < MIN_WORD_LEN:
        return None
    deepest, _, _ = trie.walk_word(low)
    best: tuple[float, str] | None = None
    for label, _ident in trie.keywords_under(deepest):
        sim = text_similarity(low, label)
        if best is None or sim > best[0] or (sim == best[0] and label < best[1]):
            best = (sim, label)
    if best is None or best[0] < SIMILARITY_THRESHOLD:
        return None
    candidate = best[1]
    if levenshtein(low, candidate) > max(1, len(low) // 3):
        return None
    return candidate


def correct(question: str, trie: Trie) -> CorrectionResult:
    """Return the corrected question plus a report of every edit.

    Valid keywords, numbers, and stopwords pass through untouched, so
    correcting already-correct text is the identity.
    """
    out: list[str] = []
    edits: list[Edit] = []
    unrecognized: list[str] = []
    n = len(question)
    stop = stopwords()
    i = 0
    while i < n:
        ch = question[i]
        if ch.isspace() or ch in SEPARATORS:
            out.append(ch)
            i += 1
            continue
        match = trie.longest_match(question, i)
        if match is not None:
            end, _ = match
            out.append(question[i:end])
            i = end
            continue
        if ch.isdigit():
            m = NUMBER_RE.match(question, i)
            if m is not None and (m.end() >= n or not question[m.end()].isalnum()):
                out.append(m.group())
                i = m.end()
                continue
        if not ch.isalnum():
            out.append(ch)
            i += 1
            continue
        j = i
        while j < n and question[j].isalnum():
            j += 1
        word = question[i:j]
        i = j
        low = word.lower()
        if low in stop or _is_number(low):
            out.append(word)
            continue
        offsets = _split_offsets(trie, low)
        if offsets:
            fixed = _insert_spaces(word, offsets)
            out.append(fixed)
            edits.append(Edit(word, fixed, "missing_space"))
            continue
        substitute = _best_substitute(trie, word)
        if substitute is not None:
            out.append(substitute)
            edits.append(Edit(word, substitute, "misspelling"))
            continue
        unrecognized.append(word)
        out.append(word)
    return CorrectionResult(text="".join(out), edits=edits, unrecognized=unrecognized)
