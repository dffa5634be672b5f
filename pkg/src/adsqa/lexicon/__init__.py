"""Per-domain trie: tokenizes a question, tags keywords with identifiers,
corrects misspellings and missing spaces, and detects shorthand notations."""

from .trie import (
    Identifier,
    IdentifierKind,
    IdentifierTable,
    Trie,
    TrieNode,
    build_trie,
    load_identifier_table,
)
from .tagging import TaggedToken, strip_nonessential, tag
from .correction import CorrectionResult, correct, text_similarity
from .shorthand import is_shorthand, values_match

__all__ = [
    "Identifier",
    "IdentifierKind",
    "IdentifierTable",
    "Trie",
    "TrieNode",
    "build_trie",
    "load_identifier_table",
    "TaggedToken",
    "tag",
    "strip_nonessential",
    "CorrectionResult",
    "correct",
    "text_similarity",
    "is_shorthand",
    "values_match",
]
