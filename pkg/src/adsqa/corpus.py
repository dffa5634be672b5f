"""Ads corpus: domain schemas, records, lexicons, query logs, and ingestion.

File formats (all UTF-8):

* schema  -- one JSON object::

      {"domain": "cars",
       "attributes": [{"name": "Make", "type": "I", "kind": "categorical"},
                      {"name": "Price", "type": "III", "kind": "numeric", "unit": "usd"}]}

* lexicon -- one JSON object::

      {"domain": "cars",
       "type1": {"Make": ["honda", ...], "Model": [...]},
       "type2": {"Color": ["red", ...], ...},
       "units": {"Price": {"display": "$", "prefix": true,
                           "synonyms": ["$", "usd", "dollars"]}}}

* ads     -- JSON Lines, one record per line::

      {"id": "car-001", "values": {"Make": "Honda", "Price": 6600, ...}}

* query log -- JSON Lines, one session per line (see ``load_query_log``).

A loaded :class:`Domain` is immutable after ingest and safe to share across
threads; ingestion itself is single-writer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import IngestError, RangeUnavailableError, SchemaError
from .textnorm import normalize_phrase


class AttrType(Enum):
    TYPE1 = "I"
    TYPE2 = "II"
    TYPE3 = "III"

    @classmethod
    def from_code(cls, code: str) -> "AttrType":
        try:
            return cls(code)
        except ValueError:
            raise SchemaError(f"unknown attribute type {code!r}; expected I, II, or III")


@dataclass(frozen=True)
class AttributeDecl:
    name: str
    attr_type: AttrType
    value_kind: str  # "categorical" | "numeric"
    unit: str | None = None


@dataclass(frozen=True)
class DomainSchema:
    domain_name: str
    attributes: tuple[AttributeDecl, ...]

    def __post_init__(self):
        names = [a.name.lower() for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate attribute names in schema {self.domain_name!r}")
        if not any(a.attr_type is AttrType.TYPE1 for a in self.attributes):
            raise SchemaError(f"schema {self.domain_name!r} declares no Type I attribute")
        for a in self.attributes:
            if a.attr_type is AttrType.TYPE3 and a.value_kind != "numeric":
                raise SchemaError(f"Type III attribute {a.name!r} must be numeric")
            if a.attr_type in (AttrType.TYPE1, AttrType.TYPE2) and a.value_kind != "categorical":
                raise SchemaError(f"Type {a.attr_type.value} attribute {a.name!r} must be categorical")

    def attribute(self, name: str) -> AttributeDecl:
        low = name.lower()
        for a in self.attributes:
            if a.name.lower() == low:
                return a
        raise SchemaError(f"unknown attribute {name!r} in domain {self.domain_name!r}")

    def has_attribute(self, name: str) -> bool:
        low = name.lower()
        return any(a.name.lower() == low for a in self.attributes)

    def of_type(self, attr_type: AttrType) -> list[AttributeDecl]:
        return [a for a in self.attributes if a.attr_type is attr_type]


@dataclass(frozen=True)
class AdRecord:
    record_id: str
    domain_name: str
    values: Mapping[str, str | float]

    def value(self, attribute: str):
        for k, v in self.values.items():
            if k.lower() == attribute.lower():
                return v
        return None


@dataclass(frozen=True)
class ClickedAd:
    ad_id: str
    rank_position: int
    dwell_seconds: float


@dataclass(frozen=True)
class LogEntry:
    query_text: str
    timestamp: float
    clicked_ads: tuple[ClickedAd, ...] = ()


@dataclass(frozen=True)
class QueryLogSession:
    user_id: str
    entries: tuple[LogEntry, ...]


@dataclass(frozen=True)
class UnitSpec:
    attribute: str
    display: str
    prefix: bool = False


@dataclass(frozen=True)
class DomainLexicon:
    """Phrase vocabulary of one ads domain.

    ``type1_values`` / ``type2_values`` map a lowercase phrase to the attribute
    it is a value of; ``type3_units`` maps a unit keyword ("miles", "$") to the
    numeric attribute it quantifies.
    """

    domain_name: str
    type1_values: Mapping[str, str]
    type2_values: Mapping[str, str]
    type3_units: Mapping[str, UnitSpec]

    def phrases(self) -> Iterable[tuple[str, AttrType, str]]:
        for phrase, attr in self.type1_values.items():
            yield phrase, AttrType.TYPE1, attr
        for phrase, attr in self.type2_values.items():
            yield phrase, AttrType.TYPE2, attr


@dataclass
class Domain:
    """A fully ingested ads domain: schema + lexicon + validated records."""

    schema: DomainSchema
    lexicon: DomainLexicon
    records: dict[str, AdRecord] = field(default_factory=dict)
    ranges: dict[str, tuple[float, float]] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.schema.domain_name

    def valid_range(self, attribute: str) -> tuple[float, float]:
        decl = self.schema.attribute(attribute)
        if decl.attr_type is not AttrType.TYPE3:
            raise SchemaError(f"{attribute!r} is not a Type III attribute")
        try:
            return self.ranges[decl.name]
        except KeyError:
            raise RangeUnavailableError(f"range unavailable for {decl.name!r}: no values present")


def load_schema(path: str | Path) -> DomainSchema:
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestError(f"cannot read schema file {path}: {exc}")
    attrs = []
    for raw in doc.get("attributes", []):
        attrs.append(
            AttributeDecl(
                name=raw["name"],
                attr_type=AttrType.from_code(raw["type"]),
                value_kind=raw.get("kind", "categorical"),
                unit=raw.get("unit"),
            )
        )
    return DomainSchema(domain_name=doc["domain"], attributes=tuple(attrs))


def load_lexicon(path: str | Path, schema: DomainSchema) -> DomainLexicon:
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestError(f"cannot read lexicon file {path}: {exc}")
    seen: dict[str, tuple[str, str]] = {}

    def add(target: dict, phrase: str, attr: str, bucket: str):
        decl = schema.attribute(attr)
        norm = normalize_phrase(phrase)
        if not norm:
            raise IngestError(f"empty phrase under {attr!r} in {path}")
        prior = seen.get(norm)
        if prior is not None and prior != (bucket, decl.name):
            raise IngestError(
                f"phrase {norm!r} maps to both {prior} and {(bucket, decl.name)}"
            )
        seen[norm] = (bucket, decl.name)
        target[norm] = decl.name

    type1: dict[str, str] = {}
    type2: dict[str, str] = {}
    for attr, phrases in doc.get("type1", {}).items():
        for p in phrases:
            add(type1, p, attr, "type1")
    for attr, phrases in doc.get("type2", {}).items():
        for p in phrases:
            add(type2, p, attr, "type2")

    units: dict[str, UnitSpec] = {}
    for attr, spec in doc.get("units", {}).items():
        decl = schema.attribute(attr)
        if decl.attr_type is not AttrType.TYPE3:
            raise IngestError(f"unit keywords declared for non-numeric attribute {attr!r}")
        display = spec.get("display", decl.unit or "")
        prefix = bool(spec.get("prefix", False))
        for syn in spec["synonyms"]:
            norm = syn.lower() if syn == "$" else normalize_phrase(syn)
            prior = seen.get(norm)
            if prior is not None and prior != ("unit", decl.name):
                raise IngestError(f"phrase {norm!r} maps to both {prior} and a unit of {decl.name}")
            seen[norm] = ("unit", decl.name)
            units[norm] = UnitSpec(attribute=decl.name, display=display, prefix=prefix)

    return DomainLexicon(
        domain_name=doc.get("domain", schema.domain_name),
        type1_values=type1,
        type2_values=type2,
        type3_units=units,
    )


def _validate_record(schema: DomainSchema, record_id: str, values: dict) -> dict:
    clean: dict[str, str | float] = {}
    for key, raw in values.items():
        decl = schema.attribute(key)  # raises on unknown attribute
        if decl.value_kind == "numeric":
            try:
                num = float(raw)
            except (TypeError, ValueError):
                raise SchemaError(f"record {record_id!r}: value for {decl.name!r} is not numeric: {raw!r}")
            if not math.isfinite(num):
                raise SchemaError(f"record {record_id!r}: value for {decl.name!r} is not finite")
            clean[decl.name] = num
        else:
            text = " ".join(str(raw).split())
            if not text:
                raise SchemaError(f"record {record_id!r}: empty value for {decl.name!r}")
            clean[decl.name] = text
    for decl in schema.of_type(AttrType.TYPE1):
        if decl.name not in clean:
            raise SchemaError(f"record {record_id!r}: missing required Type I value for {decl.name!r}")
    return clean


def load_domain(schema_file: str | Path, lexicon_file: str | Path, ads_file: str | Path) -> Domain:
    """Load and validate one ads domain.

    Every record is validated against the schema; per-attribute min/max are
    recomputed for all numeric attributes (never cached across datasets).
    """
    schema = load_schema(schema_file)
    lexicon = load_lexicon(lexicon_file, schema)
    records: dict[str, AdRecord] = {}
    with open(ads_file, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{ads_file}:{line_no}: bad JSON: {exc}")
            rid = str(doc.get("id", ""))
            if not rid:
                raise IngestError(f"{ads_file}:{line_no}: record without an id")
            if rid in records:
                raise IngestError(f"{ads_file}:{line_no}: duplicate record id {rid!r}")
            values = _validate_record(schema, rid, doc.get("values", {}))
            records[rid] = AdRecord(record_id=rid, domain_name=schema.domain_name, values=values)

    ranges: dict[str, tuple[float, float]] = {}
    for decl in schema.of_type(AttrType.TYPE3):
        vals = [r.values[decl.name] for r in records.values() if decl.name in r.values]
        if vals:
            ranges[decl.name] = (min(vals), max(vals))
    return Domain(schema=schema, lexicon=lexicon, records=records, ranges=ranges)


def save_ads(records: Iterable[AdRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps({"id": rec.record_id, "values": dict(rec.values)}) + "\n")


def valid_range(domain: Domain, attribute: str) -> tuple[float, float]:
    """Dataset min/max of a numeric attribute (see :meth:`Domain.valid_range`)."""
    return domain.valid_range(attribute)


def load_query_log(path: str | Path) -> tuple[list[QueryLogSession], list[tuple[int, str]]]:
    """Parse a query-log file.

    One session object per line::

        {"user_id": "u1",
         "entries": [{"query": "honda accord", "timestamp": 100,
                      "clicked_ads": [{"ad_id": "car-004", "rank_position": 1,
                                       "dwell_seconds": 35}]}]}

    Returns the well-formed sessions (time-ordered by first entry) plus a
    report of rejected lines as ``(line_number, reason)`` pairs.  A line is
    rejected when its timestamps are unsorted, a dwell is negative, a rank is
    below 1, or its user id repeats an earlier session.
    """
    sessions: list[QueryLogSession] = []
    rejected: list[tuple[int, str]] = []
    seen_users: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                session = _parse_session(doc)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, IngestError) as exc:
                rejected.append((line_no, str(exc)))
                continue
            if session.user_id in seen_users:
                rejected.append((line_no, f"duplicate session for user {session.user_id!r}"))
                continue
            seen_users.add(session.user_id)
            sessions.append(session)
    sessions.sort(key=lambda s: s.entries[0].timestamp if s.entries else 0.0)
    return sessions, rejected


def _parse_session(doc: dict) -> QueryLogSession:
    user_id = str(doc["user_id"])
    entries = []
    last_ts = None
    for raw in doc.get("entries", []):
        ts = float(raw["timestamp"])
        if last_ts is not None and ts < last_ts:
            raise IngestError(f"unsorted timestamps in session {user_id!r}")
        last_ts = ts
        clicks = []
        for c in raw.get("clicked_ads", []):
            rank = int(c["rank_position"])
            dwell = float(c.get("dwell_seconds", 0))
            if rank < 1:
                raise IngestError(f"rank_position {rank} below 1 in session {user_id!r}")
            if dwell < 0:
                raise IngestError(f"negative dwell {dwell} in session {user_id!r}")
            clicks.append(ClickedAd(ad_id=str(c["ad_id"]), rank_position=rank, dwell_seconds=dwell))
        entries.append(LogEntry(query_text=str(raw["query"]), timestamp=ts, clicked_ads=tuple(clicks)))
    return QueryLogSession(user_id=user_id, entries=tuple(entries))
