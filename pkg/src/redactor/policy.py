"""Keep/pseudonymize/invalidate/delete decisions per span.

The rulebook is data (a rules file), not code; the shipped default encodes
the subject-role treatment described in the repository docs. Role
assignment itself is human input (sidecar file or review service) and is
never inferred.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import (
    CorpusError,
    Decision,
    Document,
    EntitySpan,
    PiiCategory,
    SubjectRole,
)

__all__ = [
    "Decision",
    "SubjectRole",
    "IdentifierKind",
    "Rule",
    "RuleSet",
    "PolicyError",
    "DEFAULT_KIND",
    "PRIVATE_ROLES",
    "identifier_kind",
    "parse_rules",
    "load_rules",
    "default_ruleset",
    "decide",
    "enforce_indirect_rule",
    "decide_document",
    "decide_corpus",
    "load_roles_sidecar",
]


class PolicyError(ValueError):
    pass


class IdentifierKind(Enum):
    DIRECT = "Direct"
    INDIRECT = "Indirect"


# Default identifier kind per category. Direct identifiers name a person on
# their own; the rest identify only in combination.
DEFAULT_KIND = {
    PiiCategory.PERSON_NAME: IdentifierKind.DIRECT,
    PiiCategory.USERNAME: IdentifierKind.DIRECT,
    PiiCategory.EMAIL: IdentifierKind.DIRECT,
    PiiCategory.PHONE: IdentifierKind.DIRECT,
    PiiCategory.ADDRESS: IdentifierKind.DIRECT,
    PiiCategory.URL: IdentifierKind.DIRECT,
    PiiCategory.LOCATION: IdentifierKind.INDIRECT,
    PiiCategory.ORG_NAME: IdentifierKind.INDIRECT,
    PiiCategory.HASHTAG: IdentifierKind.INDIRECT,
    PiiCategory.MEDIA_TITLE: IdentifierKind.INDIRECT,
    PiiCategory.OTHER: IdentifierKind.INDIRECT,
}

# Roles treated as private persons by the at-least-one-indirect rule and
# the quasi-identifier audit.
PRIVATE_ROLES = frozenset(
    {
        SubjectRole.PRIVATE_INDIVIDUAL,
        SubjectRole.DECEASED_PRIVATE_PERSON,
        SubjectRole.CONVICTED_UNCLEAR_OR_MINOR,
        SubjectRole.UNASSIGNED,
    }
)


def identifier_kind(category: PiiCategory) -> IdentifierKind:
    return DEFAULT_KIND[category]


@dataclass(frozen=True)
class Rule:
    """One rule line; None fields are wildcards."""

    role: SubjectRole | None
    category: PiiCategory | None
    kind: IdentifierKind | None
    decision: Decision

    def matches(self, role: SubjectRole, category: PiiCategory, kind: IdentifierKind) -> bool:
        return (
            (self.role is None or self.role is role)
            and (self.category is None or self.category is category)
            and (self.kind is None or self.kind is kind)
        )


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    default_decision: Decision = Decision.PSEUDONYMIZE
    anonymize_at_least_one_indirect: bool = True


def _parse_field(enum_cls, token: str, line_no: int):
    if token == "*":
        return None
    try:
        return enum_cls(token)
    except ValueError:
        raise PolicyError(f"rules line {line_no}: unknown value {token!r} for {enum_cls.__name__}") from None


def parse_rules(text: str) -> RuleSet:
    """Parse the declarative rules format: role category kind decision."""
    rules: list[Rule] = []
    default_decision = Decision.PSEUDONYMIZE
    at_least_one = True
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "default":
            if len(tokens) != 2:
                raise PolicyError(f"rules line {line_no}: default takes one decision")
            default_decision = _parse_field(Decision, tokens[1], line_no)
        elif tokens[0] == "anonymize_at_least_one_indirect":
            if len(tokens) != 2 or tokens[1] not in ("on", "off"):
                raise PolicyError(f"rules line {line_no}: expected on|off")
            at_least_one = tokens[1] == "on"
        elif len(tokens) == 4:
            rules.append(
                Rule(
                    role=_parse_field(SubjectRole, tokens[0], line_no),
                    category=_parse_field(PiiCategory, tokens[1], line_no),
                    kind=_parse_field(IdentifierKind, tokens[2], line_no),
                    decision=_parse_field(Decision, tokens[3], line_no),
                )
            )
        else:
            raise PolicyError(f"rules line {line_no}: expected 4 tokens, got {len(tokens)}")
    return RuleSet(tuple(rules), default_decision, at_least_one)


def load_rules(path: str | Path) -> RuleSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_rules(fh.read())


_DEFAULT_RULESET: RuleSet | None = None


def default_ruleset() -> RuleSet:
    """The shipped rulebook (data/default.rules), parsed once."""
    global _DEFAULT_RULESET
    if _DEFAULT_RULESET is None:
        text = resources.files("redactor").joinpath("data/default.rules").read_text("utf-8")
        _DEFAULT_RULESET = parse_rules(text)
    return _DEFAULT_RULESET


def decide(span: EntitySpan, role: SubjectRole, rules: RuleSet) -> Decision:
    """First matching rule wins; falls back to the ruleset default."""
    if span.pii_category is None:
        raise PolicyError(f"undecidable span [{span.start},{span.end}) {span.surface!r}: no pii_category")
    kind = identifier_kind(span.pii_category)
    for rule in rules.rules:
        if rule.matches(role, span.pii_category, kind):
            return rule.decision
    return rules.default_decision


def _is_private_indirect(span: EntitySpan) -> bool:
    return (
        span.pii_category is not None
        and identifier_kind(span.pii_category) is IdentifierKind.INDIRECT
        and span.subject_role in PRIVATE_ROLES
    )


def enforce_indirect_rule(
    doc: Document,
    rules: RuleSet,
    category_counts: Mapping[PiiCategory, int] | None = None,
) -> list[EntitySpan]:
    """De-link aggregated quasi-identifiers of private persons.

    While a document keeps >= 2 indirect spans about private individuals,
    flip the one whose category is rarest corpus-wide (smallest start on
    ties) to pseudonymize. Iterating to a fixpoint keeps decide_document
    idempotent and guarantees at most one such span stays kept.
    """
    if not rules.anonymize_at_least_one_indirect:
        return list(doc.spans)
    if category_counts is None:
        category_counts = Counter(s.pii_category for s in doc.spans if s.pii_category)
    spans = list(doc.spans)
    while True:
        kept = [
            (i, s)
            for i, s in enumerate(spans)
            if s.decision is Decision.KEEP and _is_private_indirect(s)
        ]
        if len(kept) < 2:
            return spans
        idx, chosen = min(kept, key=lambda pair: (category_counts.get(pair[1].pii_category, 0), pair[1].start))
        spans[idx] = replace(chosen, decision=Decision.PSEUDONYMIZE, replacement=None)


def _decide_span(span: EntitySpan, role: SubjectRole, rules: RuleSet) -> EntitySpan:
    decision = decide(span, role, rules)
    replacement = span.replacement
    if decision is not span.decision:
        replacement = None
    if decision is Decision.KEEP:
        replacement = None
    elif decision is Decision.DELETE:
        replacement = ""
    return replace(span, subject_role=role, decision=decision, replacement=replacement)


def decide_document(
    doc: Document,
    roles: Mapping[tuple[int, int], SubjectRole] | None = None,
    rules: RuleSet | None = None,
    category_counts: Mapping[PiiCategory, int] | None = None,
) -> Document:
    """Return a new document with every span decided; indirect rule last.

    Role precedence: explicit roles map, then the span's own subject_role,
    then Unassigned.
    """
    rules = rules or default_ruleset()
    roles = roles or {}
    decided = []
    for span in doc.spans:
        role = roles.get((span.start, span.end)) or span.subject_role or SubjectRole.UNASSIGNED
        decided.append(_decide_span(span, role, rules))
    out = doc.with_spans(decided)
    return out.with_spans(enforce_indirect_rule(out, rules, category_counts))


def decide_corpus(
    docs: Sequence[Document],
    roles_by_doc: Mapping[str, Mapping[tuple[int, int], SubjectRole]] | None = None,
    rules: RuleSet | None = None,
) -> list[Document]:
    """decide_document over a corpus, with corpus-wide category counts."""
    rules = rules or default_ruleset()
    roles_by_doc = roles_by_doc or {}
    counts = Counter(s.pii_category for d in docs for s in d.spans if s.pii_category)
    return [decide_document(d, roles_by_doc.get(d.id), rules, counts) for d in docs]


def load_roles_sidecar(path: str | Path) -> dict[str, dict[tuple[int, int], SubjectRole]]:
    """Roles sidecar TSV: doc_id, start, end, subject_role."""
    roles: dict[str, dict[tuple[int, int], SubjectRole]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise CorpusError(f"roles sidecar line {line_no}: expected 4 columns, got {len(cols)}")
            doc_id, start_s, end_s, role_s = cols
            try:
                start, end = int(start_s), int(end_s)
            except ValueError:
                raise CorpusError(f"roles sidecar line {line_no}: offsets must be integers") from None
            try:
                role = SubjectRole(role_s)
            except ValueError:
                raise CorpusError(f"roles sidecar line {line_no}: unknown role {role_s!r}") from None
            roles.setdefault(doc_id, {})[(start, end)] = role
    return roles
