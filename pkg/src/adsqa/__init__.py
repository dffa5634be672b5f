"""Question answering over classified-ads records.

Turns natural-language (optionally Boolean) questions into staged structured
queries over an embedded ads store, returning exact matches when they exist
and ranked partially-matched answers otherwise.
"""

__version__ = "0.1.0"
