"""Corpus data model and JSONL I/O.

Documents are immutable values; every mutation constructs a new document.
Offsets count Unicode code points of the document text, never bytes or
UTF-16 units, so Arabic and emoji content round-trips unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable


class CorpusError(ValueError):
    """Raised when a corpus file or document violates the data model."""


class CallForActionLevel(Enum):
    NEGATIVE = "Negative"
    LOW = "Low"
    MODERATE = "Moderate"
    HIGH = "High"
    VERY_HIGH = "VeryHigh"


class NerLabel(Enum):
    PER = "PER"
    PER_IMG = "PER:IMG"
    PER_REL = "PER:REL"
    COMP = "COMP"
    LOC = "LOC"
    LOC_IMG = "LOC:IMG"
    LOC_REL = "LOC:REL"
    ORG = "ORG"
    ORG_MEDIA = "ORG:MEDIA"
    OTH_BOOK = "OTH:BOOK"
    OTH_GAME = "OTH:GAME"
    OTH_MOVIE = "OTH:MOVIE"
    OTH_MUSIC = "OTH:MUSIC"
    OTH_DIS = "OTH:DIS"
    OTH_SYMB = "OTH:SYMB"
    OTH_EVENT = "OTH:EVENT"
    OTH_CONSPI = "OTH:CONSPI"


class PiiCategory(Enum):
    PERSON_NAME = "PERSON_NAME"
    USERNAME = "USERNAME"
    URL = "URL"
    EMAIL = "EMAIL"
    PHONE = "PHONE"
    ADDRESS = "ADDRESS"
    LOCATION = "LOCATION"
    ORG_NAME = "ORG_NAME"
    HASHTAG = "HASHTAG"
    MEDIA_TITLE = "MEDIA_TITLE"
    OTHER = "OTHER"


class SubjectRole(Enum):
    PRIVATE_INDIVIDUAL = "PrivateIndividual"
    PUBLIC_FIGURE = "PublicFigure"
    INFLUENCER = "Influencer"
    DECEASED_PUBLIC_FIGURE = "DeceasedPublicFigure"
    DECEASED_PRIVATE_PERSON = "DeceasedPrivatePerson"
    DECEASED_KNOWN_TERRORIST = "DeceasedKnownTerrorist"
    CONVICTED_UNCLEAR_OR_MINOR = "ConvictedUnclearOrMinor"
    RADICAL_ORG_ACCOUNT = "RadicalOrgAccount"
    GENERIC_ORGANIZATION = "GenericOrganization"
    VULNERABLE_LINKED_ORGANIZATION = "VulnerableLinkedOrganization"
    UNASSIGNED = "Unassigned"


class Decision(Enum):
    KEEP = "keep"
    PSEUDONYMIZE = "pseudonymize"
    INVALIDATE = "invalidate"
    DELETE = "delete"


class Detector(Enum):
    REGEX = "regex"
    GAZETTEER = "gazetteer"
    STANDOFF = "standoff"
    MANUAL = "manual"


@dataclass(frozen=True)
class EntitySpan:
    """A character-offset span over a document's text.

    ``surface`` must equal the text slice at all times.  ``replacement``,
    when set, must be nonempty for pseudonymize/invalidate decisions and
    empty for delete; keep spans never carry a replacement.
    """

    start: int
    end: int
    surface: str
    ner_label: NerLabel | None = None
    pii_category: PiiCategory | None = None
    subject_role: SubjectRole | None = None
    decision: Decision | None = None
    replacement: str | None = None
    detector: Detector = Detector.MANUAL

    def overlaps(self, other: "EntitySpan") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class Document:
    """One corpus item. Spans are kept sorted by (start, end)."""

    id: str
    language: str
    source: str
    text: str
    cfa_label: CallForActionLevel | None = None
    spans: tuple[EntitySpan, ...] = ()
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.spans, key=lambda s: (s.start, s.end)))
        object.__setattr__(self, "spans", ordered)

    def with_spans(self, spans: Iterable[EntitySpan]) -> "Document":
        return replace(self, spans=tuple(spans))


def slice_check(doc: Document) -> list[str]:
    """Return violation messages for surface/slice mismatches and overlaps.

    Empty list iff every span's surface equals its text slice and no two
    spans overlap. Violations are data, not errors.
    """
    violations: list[str] = []
    n = len(doc.text)
    for span in doc.spans:
        if not (0 <= span.start < span.end <= n):
            violations.append(
                f"{doc.id}: span [{span.start},{span.end}) out of bounds for text of length {n}"
            )
            continue
        actual = doc.text[span.start:span.end]
        if span.surface != actual:
            violations.append(
                f"{doc.id}: span [{span.start},{span.end}) surface {span.surface!r} != slice {actual!r}"
            )
    for prev, cur in zip(doc.spans, doc.spans[1:]):
        if prev.overlaps(cur):
            violations.append(
                f"{doc.id}: overlapping spans [{prev.start},{prev.end}) and [{cur.start},{cur.end})"
            )
    return violations


def validate_document(doc: Document) -> None:
    """Enforce the document invariants; raise CorpusError on violation."""
    if not doc.id:
        raise CorpusError("document id must be nonempty")
    if not doc.language:
        raise CorpusError(f"empty language in {doc.id}")
    n = len(doc.text)
    for span in doc.spans:
        if not (0 <= span.start < span.end <= n):
            raise CorpusError(f"span out of bounds in {doc.id}: [{span.start},{span.end}) over {n} chars")
        if span.surface != doc.text[span.start:span.end]:
            raise CorpusError(
                f"span surface mismatch in {doc.id} at [{span.start},{span.end}): "
                f"{span.surface!r} != {doc.text[span.start:span.end]!r}"
            )
        if span.decision is Decision.KEEP and span.replacement is not None:
            raise CorpusError(f"keep span in {doc.id} at [{span.start},{span.end}) carries a replacement")
        if span.replacement is not None:
            if span.decision in (Decision.PSEUDONYMIZE, Decision.INVALIDATE) and not span.replacement:
                raise CorpusError(
                    f"{span.decision.value} span in {doc.id} at [{span.start},{span.end}) has empty replacement"
                )
            if span.decision is Decision.DELETE and span.replacement != "":
                raise CorpusError(
                    f"delete span in {doc.id} at [{span.start},{span.end}) must have empty replacement"
                )
    for prev, cur in zip(doc.spans, doc.spans[1:]):
        if prev.overlaps(cur):
            raise CorpusError(
                f"overlapping spans in {doc.id}: [{prev.start},{prev.end}) and [{cur.start},{cur.end})"
            )


def validate_corpus(docs: Iterable[Document]) -> None:
    seen: set[str] = set()
    for doc in docs:
        validate_document(doc)
        if doc.id in seen:
            raise CorpusError(f"duplicate document id: {doc.id}")
        seen.add(doc.id)


def _parse_enum(enum_cls, value, field_name: str, doc_id: str):
    if value is None:
        return None
    try:
        return enum_cls(value)
    except ValueError:
        raise CorpusError(
            f"unknown value {value!r} for field {field_name!r} in document {doc_id!r}"
        ) from None


def span_from_dict(obj: dict, doc_id: str) -> EntitySpan:
    try:
        start = int(obj["start"])
        end = int(obj["end"])
        surface = obj["surface"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"malformed span in document {doc_id!r}: {exc}") from None
    if not isinstance(surface, str):
        raise CorpusError(f"span surface must be a string in document {doc_id!r}")
    detector = obj.get("detector", "manual")
    return EntitySpan(
        start=start,
        end=end,
        surface=surface,
        ner_label=_parse_enum(NerLabel, obj.get("ner_label"), "ner_label", doc_id),
        pii_category=_parse_enum(PiiCategory, obj.get("pii_category"), "pii_category", doc_id),
        subject_role=_parse_enum(SubjectRole, obj.get("subject_role"), "subject_role", doc_id),
        decision=_parse_enum(Decision, obj.get("decision"), "decision", doc_id),
        replacement=obj.get("replacement"),
        detector=_parse_enum(Detector, detector, "detector", doc_id),
    )


def span_to_dict(span: EntitySpan) -> dict:
    return {
        "start": span.start,
        "end": span.end,
        "surface": span.surface,
        "ner_label": span.ner_label.value if span.ner_label else None,
        "pii_category": span.pii_category.value if span.pii_category else None,
        "subject_role": span.subject_role.value if span.subject_role else None,
        "decision": span.decision.value if span.decision else None,
        "replacement": span.replacement,
        "detector": span.detector.value,
    }


def document_from_dict(obj: dict) -> Document:
    doc_id = obj.get("id")
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusError("document id missing or empty")
    for key in ("language", "source", "text"):
        if not isinstance(obj.get(key), str):
            raise CorpusError(f"field {key!r} missing or not a string in document {doc_id!r}")
    spans = [span_from_dict(s, doc_id) for s in obj.get("spans", [])]
    meta = obj.get("meta") or {}
    if not isinstance(meta, dict):
        raise CorpusError(f"meta must be an object in document {doc_id!r}")
    return Document(
        id=doc_id,
        language=obj["language"],
        source=obj["source"],
        text=obj["text"],
        cfa_label=_parse_enum(CallForActionLevel, obj.get("cfa_label"), "cfa_label", doc_id),
        spans=tuple(spans),
        meta={str(k): str(v) for k, v in meta.items()},
    )


def document_to_dict(doc: Document) -> dict:
    return {
        "id": doc.id,
        "language": doc.language,
        "source": doc.source,
        "text": doc.text,
        "cfa_label": doc.cfa_label.value if doc.cfa_label else None,
        "spans": [span_to_dict(s) for s in doc.spans],
        "meta": dict(doc.meta),
    }


def read_corpus(path: str | Path) -> list[Document]:
    """Read a JSONL corpus file; enforce all document invariants.

    Errors name the offending line number or document id. Input order is
    preserved.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed JSON on line {line_no}: {exc}") from None
            doc = document_from_dict(obj)
            validate_document(doc)
            if doc.id in seen:
                raise CorpusError(f"duplicate document id {doc.id!r} on line {line_no}")
            seen.add(doc.id)
            docs.append(doc)
    return docs


def write_corpus(docs: Iterable[Document], path: str | Path) -> None:
    """Write documents as UTF-8 JSONL, one per line, deterministic key order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(json.dumps(document_to_dict(doc), ensure_ascii=False))
            fh.write("\n")
