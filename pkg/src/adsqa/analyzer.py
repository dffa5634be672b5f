"""Turns tagged tokens into typed conditions.

Partial boundaries ("less than") merge with the nearest following number,
partial superlatives ("lowest") with the nearest numeric attribute keyword,
and unit-less numbers are resolved by best-guess attribute inference against
the dataset's value ranges.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .corpus import AttrType, Domain
from .errors import AnalysisError, RangeUnavailableError
from .lexicon.tagging import TaggedToken
from .lexicon.trie import COMPARATOR_KINDS, IdentifierKind
from .textnorm import format_number


@dataclass(frozen=True)
class Superlative:
    direction: str  # "min" | "max"
    attribute: str


@dataclass(frozen=True)
class Condition:
    """A typed, comparator-bearing, possibly negated selection constraint."""

    attr_type: AttrType
    attribute: str | None = None
    comparator: str | None = None  # eq | lt | le | gt | ge | between
    value: str | float | tuple[float, float] | None = None
    negated: bool = False
    superlative: Superlative | None = None
    candidate_attributes: frozenset[str] = field(default_factory=frozenset)
    surface: str = ""
    char_span: tuple[int, int] = (0, 0)
    low_inclusive: bool = True
    high_inclusive: bool = True

    def __post_init__(self):
        if self.comparator == "between":
            low, high = self.value
            if low > high:
                raise ValueError(f"between bounds out of order: {self.value}")
        if self.superlative is not None and self.value is not None:
            raise ValueError("superlative conditions carry no value")
        if (self.attr_type is AttrType.TYPE3 and self.superlative is None
                and self.attribute is None and not self.candidate_attributes):
            raise ValueError("numeric condition without attribute needs candidates")

    @property
    def attributes(self) -> tuple[str, ...]:
        """Attribute(s) this condition can apply to."""
        if self.attribute is not None:
            return (self.attribute,)
        return tuple(sorted(self.candidate_attributes))

    def describe(self) -> str:
        if self.superlative is not None:
            return f"{self.superlative.direction}({self.superlative.attribute})"
        if self.attr_type in (AttrType.TYPE1, AttrType.TYPE2):
            return self.surface or str(self.value)
        attr = self.attribute if self.attribute else "|".join(self.attributes)
        if self.comparator == "between":
            low, high = self.value
            lo_b = "[" if self.low_inclusive else "("
            hi_b = "]" if self.high_inclusive else ")"
            return f"{attr} between {lo_b}{format_number(low)}, {format_number(high)}{hi_b}"
        op = {"eq": "=", "lt": "<", "le": "<=", "gt": ">", "ge": ">="}[self.comparator]
        return f"{attr} {op} {format_number(self.value)}"


def infer_missing_attribute(value: float, domain: Domain) -> frozenset[str]:
    """Every numeric attribute whose dataset range contains the value.

    The caller later unions the alternatives into one selection condition.
    Raises when no attribute fits: the question is unanswerable as stated.
    """
    candidates = []
    for decl in domain.schema.of_type(AttrType.TYPE3):
        try:
            low, high = domain.valid_range(decl.name)
        except RangeUnavailableError:
            continue
        if low <= value <= high:
            candidates.append(decl.name)
    if not candidates:
        raise AnalysisError(
            f"value {format_number(value)} fits no numeric attribute of domain "
            f"{domain.name!r}"
        )
    return frozenset(candidates)


class _PendingComparator:
    __slots__ = ("token", "comparator", "attribute", "negated", "values")

    def __init__(self, token: TaggedToken):
        self.token = token
        self.comparator = token.identifier.comparator
        self.attribute = token.identifier.attribute
        self.negated = token.negated
        self.values: list[TaggedToken] = []


def extract_conditions(tokens: list[TaggedToken], domain: Domain) -> list[Condition]:
    """Build the ordered condition list for a stripped, tagged question.

    Raises :class:`AnalysisError` on a dangling comparator or superlative and
    when an inferred number fits no attribute.
    """
    conditions: list[Condition] = []
    pending_cmp: _PendingComparator | None = None
    pending_attr: TaggedToken | None = None
    pending_sup: TaggedToken | None = None

    def close_comparator(cmp: _PendingComparator):
        values = cmp.values
        span = (cmp.token.char_span[0], values[-1].char_span[1])
        surface_parts = [cmp.token.shown] + [t.shown for t in values]
        negated = cmp.negated or any(t.negated for t in values)
        if cmp.comparator == "between":
            low, high = sorted(v.value for v in values)
            attr = cmp.attribute or next(
                (t.identifier.attribute for t in values if t.identifier.attribute), None)
            conditions.append(_numeric_condition(
                domain, attr, "between", (low, high), negated, " ".join(surface_parts), span))
        else:
            tok = values[0]
            attr = tok.identifier.attribute or cmp.attribute
            conditions.append(_numeric_condition(
                domain, attr, cmp.comparator, tok.value, negated, " ".join(surface_parts), span))

    for tok in tokens:
        kind = tok.kind
        if kind in (IdentifierKind.TYPE1_VALUE, IdentifierKind.TYPE2_VALUE):
            attr_type = (AttrType.TYPE1 if kind is IdentifierKind.TYPE1_VALUE
                         else AttrType.TYPE2)
            conditions.append(Condition(
                attr_type=attr_type,
                attribute=tok.identifier.attribute,
                comparator="eq",
                value=tok.identifier.literal,
                negated=tok.negated,
                surface=tok.surface,
                char_span=tok.char_span,
            ))
        elif kind is IdentifierKind.TYPE3_ATTRIBUTE:
            if pending_sup is not None:
                conditions.append(_superlative_condition(pending_sup, tok))
                pending_sup = None
            elif pending_cmp is not None and pending_cmp.attribute is None and not pending_cmp.values:
                pending_cmp.attribute = tok.identifier.attribute
            else:
                pending_attr = tok
        elif kind is IdentifierKind.SUPERLATIVE_COMPLETE:
            conditions.append(Condition(
                attr_type=AttrType.TYPE3,
                attribute=tok.identifier.attribute,
                superlative=Superlative(tok.identifier.direction, tok.identifier.attribute),
                surface=tok.surface,
                char_span=tok.char_span,
            ))
        elif kind is IdentifierKind.SUPERLATIVE_PARTIAL:
            if pending_attr is not None:
                conditions.append(_superlative_condition(tok, pending_attr))
                pending_attr = None
            else:
                pending_sup = tok
        elif kind in COMPARATOR_KINDS:
            if pending_cmp is not None:
                raise AnalysisError(f"dangling comparator {pending_cmp.token.surface!r}")
            pending_cmp = _PendingComparator(tok)
            if pending_cmp.attribute is None and pending_attr is not None:
                pending_cmp.attribute = pending_attr.identifier.attribute
                pending_attr = None
        elif kind is IdentifierKind.TYPE3_NUMBER:
            if pending_cmp is not None:
                pending_cmp.values.append(tok)
                need = 2 if pending_cmp.comparator == "between" else 1
                if len(pending_cmp.values) == need:
                    close_comparator(pending_cmp)
                    pending_cmp = None
            elif pending_attr is not None:
                conditions.append(_numeric_condition(
                    domain, pending_attr.identifier.attribute, "eq", tok.value,
                    tok.negated, f"{pending_attr.surface} {tok.shown}",
                    (pending_attr.char_span[0], tok.char_span[1])))
                pending_attr = None
            else:
                conditions.append(_numeric_condition(
                    domain, tok.identifier.attribute, "eq", tok.value,
                    tok.negated, tok.shown, tok.char_span))
        # stand-alone units carry no condition of their own

    if pending_cmp is not None:
        raise AnalysisError(f"dangling comparator {pending_cmp.token.surface!r}")
    if pending_sup is not None:
        raise AnalysisError(f"dangling superlative {pending_sup.surface!r}")
    return conditions


def _superlative_condition(sup_token: TaggedToken, attr_token: TaggedToken) -> Condition:
    attr = attr_token.identifier.attribute
    span = (min(sup_token.char_span[0], attr_token.char_span[0]),
            max(sup_token.char_span[1], attr_token.char_span[1]))
    return Condition(
        attr_type=AttrType.TYPE3,
        attribute=attr,
        superlative=Superlative(sup_token.identifier.direction, attr),
        surface=f"{sup_token.surface} {attr_token.surface}",
        char_span=span,
    )


def _numeric_condition(domain: Domain, attribute: str | None, comparator: str,
                       value, negated: bool, surface: str,
                       span: tuple[int, int]) -> Condition:
    candidates: frozenset[str] = frozenset()
    if attribute is None:
        probe = value[0] if comparator == "between" else value
        candidates = infer_missing_attribute(probe, domain)
        if comparator == "between":
            high_ok = infer_missing_attribute(value[1], domain)
            both = candidates & high_ok
            candidates = both or (candidates | high_ok)
        if len(candidates) == 1:
            attribute = next(iter(candidates))
            candidates = frozenset()
    return Condition(
        attr_type=AttrType.TYPE3,
        attribute=attribute,
        comparator=comparator,
        value=value,
        negated=negated,
        candidate_attributes=candidates,
        surface=surface,
        char_span=span,
    )


def strip_negation(condition: Condition) -> Condition:
    return replace(condition, negated=False) if condition.negated else condition


def with_negation(condition: Condition) -> Condition:
    return replace(condition, negated=True) if not condition.negated else condition
