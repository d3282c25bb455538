"""Corpus-level privacy and consistency verification plus statistics.

All scans are read-only over immutable corpora; outputs are deterministic
and permutation-invariant over document order (reports are sorted).
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Decision, Document, PiiCategory
from .ledger import Ledger
from .policy import PRIVATE_ROLES, IdentifierKind, identifier_kind

# surfaces this short produce too many incidental substring hits in the
# corpus-wide ledger sweep; per-span checks still apply to them
MIN_SWEEP_SURFACE = 3


class AuditError(ValueError):
    pass


@dataclass(frozen=True)
class LeakageViolation:
    doc_id: str
    surface: str
    span: tuple[int, int] | None  # None for corpus-wide ledger sweep hits
    source: str  # "span" or "ledger"

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "surface": self.surface,
            "span": list(self.span) if self.span else None,
            "source": self.source,
        }


@dataclass(frozen=True)
class ConsistencyViolation:
    kind: str  # "divergent" (one original, many replacements) or "injectivity"
    surface: str
    category: PiiCategory
    replacements: tuple[str, ...] = ()
    originals: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "surface": self.surface,
            "category": self.category.value,
            "replacements": list(self.replacements),
            "originals": list(self.originals),
        }


@dataclass(frozen=True)
class QuasiIdFlag:
    doc_id: str
    kept_spans: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        return {"doc_id": self.doc_id, "kept_spans": [list(s) for s in self.kept_spans]}


@dataclass
class EntityStats:
    examples: dict[str, dict[str, int]] = field(default_factory=dict)
    anonymized: dict[str, dict[str, int]] = field(default_factory=dict)
    ner_counts: dict[str, int] = field(default_factory=dict)
    category_counts: dict[str, int] = field(default_factory=dict)

    def total_examples(self) -> int:
        return sum(n for per_split in self.examples.values() for n in per_split.values())

    def total_anonymized(self) -> int:
        return sum(n for per_split in self.anonymized.values() for n in per_split.values())

    def to_dict(self) -> dict:
        return {
            "examples": self.examples,
            "anonymized_entities": self.anonymized,
            "ner_counts": self.ner_counts,
            "category_counts": self.category_counts,
            "total_examples": self.total_examples(),
            "total_anonymized_entities": self.total_anonymized(),
        }


@dataclass
class AuditReport:
    leakage_violations: list[LeakageViolation]
    consistency_violations: list[ConsistencyViolation]
    quasi_id_flags: list[QuasiIdFlag]
    stats: EntityStats

    @property
    def passed(self) -> bool:
        return not (self.leakage_violations or self.consistency_violations or self.quasi_id_flags)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "leakage_violations": [v.to_dict() for v in self.leakage_violations],
            "consistency_violations": [v.to_dict() for v in self.consistency_violations],
            "quasi_id_flags": [f.to_dict() for f in self.quasi_id_flags],
            "stats": self.stats.to_dict(),
        }


_PUNCT_RUN = re.compile(r"[^\w\s]+")
_SPACE_RUN = re.compile(r"\s+")


def normalize_for_match(s: str) -> str:
    """Whitespace/punctuation-normalized form used by the leakage matcher."""
    return _SPACE_RUN.sub(" ", _PUNCT_RUN.sub(" ", s)).strip()


def _occurs(surface: str, text: str, normalized_text: str) -> bool:
    if surface in text:
        return True
    normalized = normalize_for_match(surface)
    return bool(normalized) and normalized in normalized_text


def leakage_scan(
    original_corpus: Sequence[Document],
    output_corpus: Sequence[Document],
    ledger: Ledger | None = None,
) -> list[LeakageViolation]:
    """Find protected surfaces that survive in the output.

    A violation per non-Keep span of the original (decided) corpus whose
    surface still occurs in the corresponding output text (exact substring
    or whitespace/punctuation-normalized), plus a corpus-wide sweep for
    every ledger original of length >= 3. Undecided spans are treated as
    protected, out of caution.
    """
    orig_by_id = {d.id: d for d in original_corpus}
    out_by_id = {d.id: d for d in output_corpus}
    if set(orig_by_id) != set(out_by_id):
        missing = sorted(set(orig_by_id) ^ set(out_by_id))
        raise AuditError(f"corpora not aligned by doc id: {', '.join(missing)}")
    violations: list[LeakageViolation] = []
    normalized_texts = {doc_id: normalize_for_match(d.text) for doc_id, d in out_by_id.items()}
    for doc_id in sorted(orig_by_id):
        original = orig_by_id[doc_id]
        output_text = out_by_id[doc_id].text
        for span in original.spans:
            if span.decision is Decision.KEEP or not span.surface:
                continue
            if _occurs(span.surface, output_text, normalized_texts[doc_id]):
                violations.append(
                    LeakageViolation(doc_id, span.surface, (span.start, span.end), "span")
                )
    if ledger is not None:
        for entry in ledger.entries():
            surface = entry.original_surface
            if len(surface) < MIN_SWEEP_SURFACE:
                continue
            for doc_id in sorted(out_by_id):
                if _occurs(surface, out_by_id[doc_id].text, normalized_texts[doc_id]):
                    violations.append(LeakageViolation(doc_id, surface, None, "ledger"))
    return violations


def consistency_scan(corpus: Sequence[Document]) -> list[ConsistencyViolation]:
    """Check one-replacement-per-entity over a pre-transform snapshot.

    Spans must carry the original surface and the planned replacement.
    Reports both divergent mappings (one original, several replacements)
    and injectivity breaks (several originals, one replacement).
    """
    by_original: dict[tuple[str, PiiCategory], set[str]] = defaultdict(set)
    by_replacement: dict[tuple[str, PiiCategory], set[str]] = defaultdict(set)
    for doc in corpus:
        for span in doc.spans:
            if span.decision in (Decision.KEEP, Decision.DELETE) or not span.replacement:
                continue
            if span.pii_category is None:
                continue
            by_original[(span.surface, span.pii_category)].add(span.replacement)
            by_replacement[(span.replacement, span.pii_category)].add(span.surface)
    violations: list[ConsistencyViolation] = []
    for (surface, category), replacements in sorted(
        by_original.items(), key=lambda kv: (kv[0][1].value, kv[0][0])
    ):
        if len(replacements) > 1:
            violations.append(
                ConsistencyViolation("divergent", surface, category,
                                     replacements=tuple(sorted(replacements)))
            )
    for (replacement, category), originals in sorted(
        by_replacement.items(), key=lambda kv: (kv[0][1].value, kv[0][0])
    ):
        if len(originals) > 1:
            violations.append(
                ConsistencyViolation("injectivity", replacement, category,
                                     originals=tuple(sorted(originals)))
            )
    return violations


def quasi_id_report(corpus: Sequence[Document]) -> list[QuasiIdFlag]:
    """Flag documents keeping >= 2 indirect spans about private persons.

    Post-hoc mirror of the policy's at-least-one-indirect rule.
    """
    flags: list[QuasiIdFlag] = []
    for doc in sorted(corpus, key=lambda d: d.id):
        kept = [
            span
            for span in doc.spans
            if span.decision is Decision.KEEP
            and span.pii_category is not None
            and identifier_kind(span.pii_category) is IdentifierKind.INDIRECT
            and span.subject_role in PRIVATE_ROLES
        ]
        if len(kept) >= 2:
            flags.append(QuasiIdFlag(doc.id, tuple((s.start, s.end) for s in kept)))
    return flags


_SPLIT_ORDER = ("train", "dev", "test", "unsplit")


def entity_stats(corpus: Sequence[Document]) -> EntityStats:
    """Descriptive counts per language/split, NER label, and category.

    Anonymized entities are spans whose decision is set and not Keep.
    """
    stats = EntityStats()
    for doc in corpus:
        split = doc.meta.get("split", "unsplit")
        lang = stats.examples.setdefault(doc.language, {})
        lang[split] = lang.get(split, 0) + 1
        anon = stats.anonymized.setdefault(doc.language, {})
        anon.setdefault(split, 0)
        for span in doc.spans:
            if span.decision is not None and span.decision is not Decision.KEEP:
                anon[split] += 1
            if span.ner_label is not None:
                stats.ner_counts[span.ner_label.value] = stats.ner_counts.get(span.ner_label.value, 0) + 1
            if span.pii_category is not None:
                stats.category_counts[span.pii_category.value] = (
                    stats.category_counts.get(span.pii_category.value, 0) + 1
                )
    return stats


_LANGUAGE_NAMES = {"en": "English", "fr": "French", "ar": "Arabic"}


def render_stats_table(stats: EntityStats) -> str:
    """Text table shaped like the per-language corpus statistics table."""
    splits = [
        s
        for s in _SPLIT_ORDER
        if any(s in per_split for per_split in stats.examples.values())
    ]
    if not splits:
        splits = ["train", "dev", "test"]
    label_width = 23
    col_width = max(8, *(len(s) + 2 for s in splits))
    lines = []
    header = " " * label_width + "".join(s.capitalize().rjust(col_width) for s in splits)
    lines.append(header)
    for lang in sorted(stats.examples):
        lines.append(_LANGUAGE_NAMES.get(lang, lang))
        examples = stats.examples[lang]
        anonymized = stats.anonymized.get(lang, {})
        lines.append(
            "# examples".ljust(label_width)
            + "".join(str(examples.get(s, "-")).rjust(col_width) for s in splits)
        )
        lines.append(
            "# anonymized entities".ljust(label_width)
            + "".join(str(anonymized.get(s, "-")).rjust(col_width) for s in splits)
        )
    return "\n".join(lines)


def render_report(report: AuditReport) -> str:
    lines = []
    status = "PASS" if report.passed else "FAIL"
    lines.append(f"audit: {status}")
    lines.append(f"leakage violations: {len(report.leakage_violations)}")
    for v in report.leakage_violations[:50]:
        where = f"span [{v.span[0]},{v.span[1]})" if v.span else "ledger sweep"
        lines.append(f"  {v.doc_id}: {v.surface!r} ({where})")
    lines.append(f"consistency violations: {len(report.consistency_violations)}")
    for v in report.consistency_violations[:50]:
        if v.kind == "divergent":
            lines.append(f"  {v.surface!r} [{v.category.value}] -> {list(v.replacements)}")
        else:
            lines.append(f"  injectivity: {list(v.originals)} -> {v.surface!r} [{v.category.value}]")
    lines.append(f"quasi-identifier flags: {len(report.quasi_id_flags)}")
    for f in report.quasi_id_flags[:50]:
        lines.append(f"  {f.doc_id}: {len(f.kept_spans)} kept indirect spans")
    lines.append("")
    lines.append(render_stats_table(report.stats))
    return "\n".join(lines)


def run_audit(
    original_corpus: Sequence[Document],
    output_corpus: Sequence[Document],
    ledger: Ledger | None = None,
) -> AuditReport:
    """All scans plus statistics over the output corpus."""
    return AuditReport(
        leakage_violations=leakage_scan(original_corpus, output_corpus, ledger),
        consistency_violations=consistency_scan(original_corpus),
        quasi_id_flags=quasi_id_report(output_corpus),
        stats=entity_stats(output_corpus),
    )
