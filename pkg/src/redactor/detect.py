"""Candidate span detection: regex patterns, gazetteer lookup, standoff ingestion.

The regex pattern set is versioned (PATTERNS_VERSION) and shipped as a
built-in; configuration can disable kinds but not redefine them, so detector
output is reproducible across deployments. All functions are pure over
immutable inputs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import (
    CorpusError,
    Detector,
    Document,
    EntitySpan,
    NerLabel,
    PiiCategory,
)

PATTERNS_VERSION = "1"


class PatternKind(Enum):
    URL = "URL"
    EMAIL = "EMAIL"
    PHONE = "PHONE"
    HASHTAG = "HASHTAG"
    USERNAME = "USERNAME"


_KIND_TO_CATEGORY = {
    PatternKind.URL: PiiCategory.URL,
    PatternKind.EMAIL: PiiCategory.EMAIL,
    PatternKind.PHONE: PiiCategory.PHONE,
    PatternKind.HASHTAG: PiiCategory.HASHTAG,
    PatternKind.USERNAME: PiiCategory.USERNAME,
}

# Default NerLabel -> PiiCategory mapping used when ingesting standoff
# annotations, so the policy precondition (every span categorised) holds
# before human review. Reviewers can re-categorise any span.
NER_TO_PII = {
    NerLabel.PER: PiiCategory.PERSON_NAME,
    NerLabel.PER_IMG: PiiCategory.OTHER,
    NerLabel.PER_REL: PiiCategory.OTHER,
    NerLabel.COMP: PiiCategory.ORG_NAME,
    NerLabel.LOC: PiiCategory.LOCATION,
    NerLabel.LOC_IMG: PiiCategory.OTHER,
    NerLabel.LOC_REL: PiiCategory.LOCATION,
    NerLabel.ORG: PiiCategory.ORG_NAME,
    NerLabel.ORG_MEDIA: PiiCategory.ORG_NAME,
    NerLabel.OTH_BOOK: PiiCategory.MEDIA_TITLE,
    NerLabel.OTH_GAME: PiiCategory.MEDIA_TITLE,
    NerLabel.OTH_MOVIE: PiiCategory.MEDIA_TITLE,
    NerLabel.OTH_MUSIC: PiiCategory.MEDIA_TITLE,
    NerLabel.OTH_DIS: PiiCategory.OTHER,
    NerLabel.OTH_SYMB: PiiCategory.OTHER,
    NerLabel.OTH_EVENT: PiiCategory.OTHER,
    NerLabel.OTH_CONSPI: PiiCategory.OTHER,
}

# total order over provenance tags and regex pattern kinds; the bare
# "regex" entry ranks regex spans whose category was re-assigned later
DEFAULT_PRIORITY = (
    "manual",
    "standoff",
    "regex:EMAIL",
    "regex:URL",
    "regex:USERNAME",
    "regex:HASHTAG",
    "regex:PHONE",
    "regex",
    "gazetteer",
)

_URL_RE = re.compile(
    r"(?:https?://|www\.)[^\s<>\"']+"
    r"|(?<![\w@.])[A-Za-z0-9][A-Za-z0-9-]*(?:\.[A-Za-z0-9-]+)+/[^\s<>\"']*"
)
_EMAIL_RE = re.compile(
    r"(?<![\w.+@-])[A-Za-z0-9._%+-]+@[A-Za-z0-9](?:[A-Za-z0-9-]*[A-Za-z0-9])?"
    r"(?:\.[A-Za-z0-9](?:[A-Za-z0-9-]*[A-Za-z0-9])?)*\.[A-Za-z]{2,}(?![\w-])"
)
# handle: leading '@' then letters/digits/dot/underscore, not dot-terminal
_USERNAME_RE = re.compile(r"(?<![A-Za-z0-9_.@])@[A-Za-z0-9_](?:[A-Za-z0-9._]*[A-Za-z0-9_])?")
_HASHTAG_RE = re.compile(r"(?<![\w&#])#\w+")
_PHONE_RE = re.compile(r"(?<![\w/+.-])[(+]{0,2}\d[\d\s().-]{5,18}\d(?!\w)")

_TRAILING_URL_JUNK = ".,;:!?'\")]}"
_DATE_SHAPES = (
    re.compile(r"\d{4}-\d{2}-\d{2}$"),
    re.compile(r"\d{4}/\d{2}/\d{2}$"),
    re.compile(r"\d{2}[-/.]\d{2}[-/.]\d{4}$"),
)


@dataclass(frozen=True)
class DetectorConfig:
    """Detector settings: enabled pattern kinds, gazetteer, overlap priority."""

    enabled: frozenset[PatternKind] = frozenset(PatternKind)
    gazetteer: dict[PiiCategory, tuple[str, ...]] = field(default_factory=dict)
    priority: tuple[str, ...] = DEFAULT_PRIORITY


@dataclass(frozen=True)
class StandoffAnnotation:
    doc_id: str
    start: int
    end: int
    ner_label: NerLabel


def _rank(span: EntitySpan, config: DetectorConfig) -> int:
    keys = [span.detector.value]
    if span.detector is Detector.REGEX and span.pii_category is not None:
        keys.insert(0, f"regex:{span.pii_category.value}")
    for key in keys:
        if key in config.priority:
            return config.priority.index(key)
    raise ValueError(
        f"priority order {config.priority!r} does not rank detector {span.detector.value!r}"
    )


def _trim_url(text: str, start: int, end: int) -> tuple[int, int]:
    while end > start and text[end - 1] in _TRAILING_URL_JUNK:
        end -= 1
    return start, end


def _phone_valid(surface: str) -> bool:
    digits = sum(ch.isdigit() for ch in surface)
    if not 7 <= digits <= 15:
        return False
    stripped = surface.strip()
    for shape in _DATE_SHAPES:
        if shape.fullmatch(stripped):
            return False
    # bare space-separated small-digit groups ("4 8 15 16 23 42") are number
    # lists, not phones, unless marked by a '+' country code or a 0 trunk
    groups = stripped.split()
    if (
        len(groups) >= 3
        and all(g.isdigit() and len(g) <= 2 for g in groups)
        and not stripped.startswith(("+", "0"))
    ):
        return False
    return True


def detect_patterns(text: str, config: DetectorConfig) -> list[EntitySpan]:
    """Run the enabled built-in patterns; spans may overlap across kinds.

    Output is deterministic and ordered by (start, end).
    """
    if not config.enabled:
        raise ValueError("detector config has no enabled pattern kinds")
    found: list[EntitySpan] = []
    for kind in config.enabled:
        category = _KIND_TO_CATEGORY[kind]
        if kind is PatternKind.URL:
            for m in _URL_RE.finditer(text):
                s, e = _trim_url(text, m.start(), m.end())
                if e > s:
                    found.append(_regex_span(text, s, e, category))
        elif kind is PatternKind.EMAIL:
            for m in _EMAIL_RE.finditer(text):
                found.append(_regex_span(text, m.start(), m.end(), category))
        elif kind is PatternKind.USERNAME:
            for m in _USERNAME_RE.finditer(text):
                if m.end() - m.start() >= 2:
                    found.append(_regex_span(text, m.start(), m.end(), category))
        elif kind is PatternKind.HASHTAG:
            for m in _HASHTAG_RE.finditer(text):
                if any(ch.isalpha() for ch in m.group()):
                    found.append(_regex_span(text, m.start(), m.end(), category))
        elif kind is PatternKind.PHONE:
            for m in _PHONE_RE.finditer(text):
                surface = m.group()
                start, end = m.start(), m.end()
                # a leading '(' belongs to surrounding text when it never
                # closes, or when it wraps the '+' country marker
                while surface.startswith("(") and (
                    surface[1:2] in ("(", "+") or ")" not in surface
                ):
                    surface = surface[1:]
                    start += 1
                while surface and surface[-1] in " ().-":
                    surface = surface[:-1]
                    end -= 1
                if surface and _phone_valid(surface):
                    found.append(_regex_span(text, start, end, category))
    found.sort(key=lambda s: (s.start, s.end, s.pii_category.value))
    return found


def _regex_span(text: str, start: int, end: int, category: PiiCategory) -> EntitySpan:
    return EntitySpan(
        start=start,
        end=end,
        surface=text[start:end],
        pii_category=category,
        detector=Detector.REGEX,
    )


def gazetteer_scan(text: str, config: DetectorConfig) -> list[EntitySpan]:
    """Whole-word, case-insensitive, accent-sensitive gazetteer matching.

    At a shared start offset the longest entry wins; overlaps with other
    detectors are resolved later.
    """
    by_start: dict[int, EntitySpan] = {}
    for category in sorted(config.gazetteer, key=lambda c: c.value):
        for entry in config.gazetteer[category]:
            if not entry:
                raise ValueError("gazetteer entries must be nonempty")
            pattern = re.compile(r"(?<!\w)" + re.escape(entry) + r"(?!\w)", re.IGNORECASE)
            for m in pattern.finditer(text):
                span = EntitySpan(
                    start=m.start(),
                    end=m.end(),
                    surface=text[m.start():m.end()],
                    pii_category=category,
                    detector=Detector.GAZETTEER,
                )
                best = by_start.get(m.start())
                if best is None or span.end > best.end:
                    by_start[m.start()] = span
    return sorted(by_start.values(), key=lambda s: (s.start, s.end))


def read_standoff(path: str | Path) -> list[StandoffAnnotation]:
    """Read standoff TSV: doc_id, start, end, ner_label; '#' lines ignored."""
    annotations: list[StandoffAnnotation] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise CorpusError(f"standoff line {line_no}: expected 4 columns, got {len(cols)}")
            doc_id, start_s, end_s, label_s = cols
            try:
                start, end = int(start_s), int(end_s)
            except ValueError:
                raise CorpusError(f"standoff line {line_no}: offsets must be integers") from None
            try:
                label = NerLabel(label_s)
            except ValueError:
                raise CorpusError(f"standoff line {line_no}: unknown ner_label {label_s!r}") from None
            annotations.append(StandoffAnnotation(doc_id, start, end, label))
    return annotations


def ingest_standoff(
    docs: Sequence[Document], annotations: Iterable[StandoffAnnotation]
) -> tuple[list[Document], list[str]]:
    """Attach standoff annotations as spans with detector=standoff.

    Returns (documents, diagnostics). Annotations with invalid offsets are
    rejected with a per-item diagnostic; unknown doc ids raise.
    """
    by_id = {doc.id: doc for doc in docs}
    unknown = sorted({a.doc_id for a in annotations if a.doc_id not in by_id})
    if unknown:
        raise CorpusError("standoff annotations reference unknown document ids: " + ", ".join(unknown))
    new_spans: dict[str, list[EntitySpan]] = {doc.id: list(doc.spans) for doc in docs}
    diagnostics: list[str] = []
    for ann in annotations:
        doc = by_id[ann.doc_id]
        if not (0 <= ann.start < ann.end <= len(doc.text)):
            diagnostics.append(
                f"rejected standoff annotation for {ann.doc_id}: offsets [{ann.start},{ann.end}) "
                f"invalid for text of length {len(doc.text)}"
            )
            continue
        new_spans[ann.doc_id].append(
            EntitySpan(
                start=ann.start,
                end=ann.end,
                surface=doc.text[ann.start:ann.end],
                ner_label=ann.ner_label,
                pii_category=NER_TO_PII[ann.ner_label],
                detector=Detector.STANDOFF,
            )
        )
    return [doc.with_spans(new_spans[doc.id]) for doc in docs], diagnostics


def resolve_overlaps(spans: Sequence[EntitySpan], config: DetectorConfig) -> list[EntitySpan]:
    """Reduce overlapping candidates to a non-overlapping set.

    Keep order: configured detector priority, then longer span, then smaller
    start, then input order. Deterministic and input-order independent up to
    the final tie-break.
    """
    indexed = sorted(
        enumerate(spans),
        key=lambda pair: (_rank(pair[1], config), -(pair[1].end - pair[1].start), pair[1].start, pair[0]),
    )
    kept: list[EntitySpan] = []
    for _, candidate in indexed:
        if not any(candidate.overlaps(existing) for existing in kept):
            kept.append(candidate)
    kept.sort(key=lambda s: (s.start, s.end))
    return kept


def detect_document(doc: Document, config: DetectorConfig) -> Document:
    """Run regex + gazetteer detectors over a document and resolve overlaps.

    Pre-existing spans (manual or standoff) participate in overlap
    resolution with their own priority.
    """
    candidates = list(doc.spans)
    candidates.extend(detect_patterns(doc.text, config))
    candidates.extend(gazetteer_scan(doc.text, config))
    return doc.with_spans(resolve_overlaps(candidates, config))
