"""Shorthand-notation detection for attribute values.

A notation like "4dr" stands for "4-door" when, after lowercasing, dropping
separators, and writing number words as digits, one string is an ordered
subsequence of the other.
"""

from __future__ import annotations

from ..textnorm import is_subsequence, squash


def is_shorthand(candidate: str, value: str) -> bool:
    a = squash(candidate)
    b = squash(value)
    if not a or not b:
        return False
    return is_subsequence(a, b) or is_subsequence(b, a)


def values_match(question_value: str, record_value: str) -> bool:
    """Equality test used when matching a condition against a record: exact
    after normalization, or related by shorthand in either direction."""
    return is_shorthand(question_value, record_value)
