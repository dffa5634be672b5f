"""Shared text normalization helpers: casing, separators, number words,
stopwords, and a light suffix stemmer."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

WORD_RE = re.compile(r"[a-z0-9]+")

# Characters that end a token during scanning.  Hyphens count as soft
# separators so "2-dr" and "2 dr" walk the same trie path.
SEPARATORS = set(" \t\n\r-,;:!?()[]{}'\"/&")

NUMBER_WORDS = {
    "zero": "0", "one": "1", "two": "2", "three": "3", "four": "4",
    "five": "5", "six": "6", "seven": "7", "eight": "8", "nine": "9",
    "ten": "10", "eleven": "11", "twelve": "12", "thirteen": "13",
    "fourteen": "14", "fifteen": "15", "sixteen": "16", "seventeen": "17",
    "eighteen": "18", "nineteen": "19", "twenty": "20",
}
DIGIT_WORDS = {v: k for k, v in NUMBER_WORDS.items()}


def normalize_phrase(text: str) -> str:
    """Lowercase, turn hyphens into spaces, collapse whitespace runs."""
    out = text.lower().replace("-", " ")
    return " ".join(out.split())


def squash(text: str) -> str:
    """Canonical form for shorthand comparison: lowercase, number words
    replaced by digits, then all separators removed."""
    words = normalize_phrase(text).split()
    words = [NUMBER_WORDS.get(w, w) for w in words]
    return "".join(words)


def words(text: str) -> list[str]:
    return WORD_RE.findall(text.lower())


def is_subsequence(shorter: str, longer: str) -> bool:
    it = iter(longer)
    return all(ch in it for ch in shorter)


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    raw = resources.files("adsqa.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in raw.splitlines() if w.strip() and not w.startswith("#"))


_SUFFIXES = ("ingly", "edly", "ings", "ing", "ied", "ies", "ed", "ly", "es", "s")


def stem(word: str) -> str:
    """Light suffix stemmer, enough to fold plural/tense variants."""
    w = word.lower()
    for suf in _SUFFIXES:
        if w.endswith(suf) and len(w) - len(suf) >= 3:
            w = w[: -len(suf)]
            if suf in ("ied", "ies"):
                w += "y"
            break
    if len(w) >= 4 and w[-1] == w[-2]:
        w = w[:-1]
    return w


def content_words(text: str) -> list[str]:
    """Stemmed, stop-filtered word sequence used by the word-correlation store."""
    stop = stopwords()
    return [stem(w) for w in words(text) if w not in stop]


def format_number(x: float) -> str:
    """Render 2000.0 as '2000' but keep true decimals."""
    if float(x).is_integer():
        return str(int(x))
    return f"{x:g}"
