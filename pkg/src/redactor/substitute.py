"""Text transformation under the five substitution strategies.

S0 deletes spans (with a documented local whitespace cleanup), S1 inserts a
uniform placeholder, S2 the category word, S3 the category word plus a
per-document ordinal, and REALISTIC draws format-preserving pseudonyms from
shipped name pools (invalidating URLs/handles by character perturbation).
All offsets are recomputed; replacements are recorded on each span; the
original text is never mutated.
"""

from __future__ import annotations

import hashlib
import random
import re
import unicodedata
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Mapping

from .corpus import Decision, Document, EntitySpan, PiiCategory
from .ledger import CreatedBy, Ledger


class SubstituteError(ValueError):
    pass


class PoolExhaustedError(SubstituteError):
    """No pool candidate satisfies the constraints; extend the pool."""


class StrategyId(Enum):
    S0 = "S0"
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    REALISTIC = "REALISTIC"


UNIFORM_PLACEHOLDER = "placeholder"

CATEGORY_WORDS = {
    PiiCategory.PERSON_NAME: "name",
    PiiCategory.USERNAME: "username",
    PiiCategory.URL: "url",
    PiiCategory.EMAIL: "email",
    PiiCategory.PHONE: "phone",
    PiiCategory.ADDRESS: "location",
    PiiCategory.LOCATION: "location",
    PiiCategory.ORG_NAME: "org",
    PiiCategory.HASHTAG: "hashtag",
    PiiCategory.MEDIA_TITLE: "title",
    PiiCategory.OTHER: "other",
}

INVALIDATABLE = frozenset(
    {PiiCategory.URL, PiiCategory.USERNAME, PiiCategory.PHONE, PiiCategory.EMAIL}
)

# street-type leading tokens preserved by preserve_address_prefix
STREET_WORDS = {
    "rue", "avenue", "boulevard", "allée", "impasse", "place", "chemin",
    "street", "st", "road", "rd", "lane", "drive", "court", "way",
    "calle", "strasse", "straße", "شارع",
}

_JOIN_PUNCT = ",.;:!?"


@dataclass(frozen=True)
class PseudonymConstraints:
    """Shape constraints a generated pseudonym must satisfy."""

    preserve_token_count: bool = True
    preserve_leading_symbol: bool = True
    preserve_script: bool = True
    preserve_casing_shape: bool = True
    preserve_digit_presence: bool = True
    preserve_address_prefix: bool = True
    language: str = "en"
    name_pools: Mapping[tuple[str, PiiCategory], tuple[str, ...]] = field(default_factory=dict)


def _rng(seed: int, *parts: str) -> random.Random:
    payload = ("%d\x1f" % seed) + "\x1f".join(parts)
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


# ---------------------------------------------------------------------------
# shape classification


def _script_of(s: str) -> str:
    has_arabic = any("؀" <= ch <= "ۿ" or "ݐ" <= ch <= "ݿ" for ch in s)
    has_latin = any(("a" <= ch <= "z") or ("A" <= ch <= "Z") or ("À" <= ch <= "ɏ") for ch in s)
    if has_arabic and not has_latin:
        return "arabic"
    if has_latin and not has_arabic:
        return "latin"
    if has_arabic and has_latin:
        return "mixed"
    return "none"


def _token_case(token: str) -> str:
    letters = [ch for ch in token if ch.isalpha()]
    if not letters or not any(ch.isupper() or ch.islower() for ch in letters):
        return "nocase"
    if all(ch.isupper() for ch in letters):
        return "upper" if len(letters) > 1 else "title"
    if all(ch.islower() for ch in letters):
        return "lower"
    if letters[0].isupper() and all(ch.islower() for ch in letters[1:]):
        return "title"
    return "mixed"


def _casing_shape(s: str) -> tuple[str, ...]:
    return tuple(_token_case(tok) for tok in s.split())


def satisfies_constraints(candidate: str, surface: str, constraints: PseudonymConstraints,
                          category: PiiCategory) -> bool:
    """True when the candidate matches every enabled shape constraint."""
    if constraints.preserve_token_count and len(candidate.split()) != len(surface.split()):
        return False
    if constraints.preserve_leading_symbol:
        for symbol in ("@", "#"):
            if surface.startswith(symbol) != candidate.startswith(symbol):
                return False
    if constraints.preserve_script and _script_of(candidate) != _script_of(surface):
        return False
    if constraints.preserve_casing_shape and _casing_shape(candidate) != _casing_shape(surface):
        return False
    if constraints.preserve_digit_presence:
        if any(ch.isdigit() for ch in candidate) != any(ch.isdigit() for ch in surface):
            return False
    if (
        constraints.preserve_address_prefix
        and category in (PiiCategory.ADDRESS, PiiCategory.LOCATION)
    ):
        tokens = surface.split()
        if tokens and tokens[0].lower() in STREET_WORDS:
            cand_tokens = candidate.split()
            if not cand_tokens or cand_tokens[0].lower() != tokens[0].lower():
                return False
    return True


# ---------------------------------------------------------------------------
# name pools


_CATEGORY_FILES = {
    "person_name": PiiCategory.PERSON_NAME,
    "username": PiiCategory.USERNAME,
    "email": PiiCategory.EMAIL,
    "phone": PiiCategory.PHONE,
    "address": PiiCategory.ADDRESS,
    "location": PiiCategory.LOCATION,
    "org_name": PiiCategory.ORG_NAME,
    "hashtag": PiiCategory.HASHTAG,
    "media_title": PiiCategory.MEDIA_TITLE,
    "other": PiiCategory.OTHER,
}


def load_pools(directory: str | Path) -> dict[tuple[str, PiiCategory], tuple[str, ...]]:
    """Load name pools: one UTF-8 file per (language, category), one
    candidate per line. Comment lines start with '# ' (hash-space), so
    hashtag candidates like '#tag' stay valid entries."""
    directory = Path(directory)
    pools: dict[tuple[str, PiiCategory], tuple[str, ...]] = {}
    for lang_dir in sorted(p for p in directory.iterdir() if p.is_dir()):
        for pool_file in sorted(lang_dir.glob("*.txt")):
            category = _CATEGORY_FILES.get(pool_file.stem)
            if category is None:
                continue
            entries = []
            for line in pool_file.read_text("utf-8").splitlines():
                line = line.strip()
                if line and not line.startswith("# ") and line != "#":
                    entries.append(line)
            if not entries:
                raise SubstituteError(f"empty name pool: {pool_file}")
            pools[(lang_dir.name, category)] = tuple(entries)
    if not pools:
        raise SubstituteError(f"no name pools found under {directory}")
    return pools


def builtin_pools() -> dict[tuple[str, PiiCategory], tuple[str, ...]]:
    """The versioned pools shipped with the package."""
    return load_pools(Path(str(resources.files("redactor").joinpath("pools"))))


def default_constraints(language: str = "en") -> PseudonymConstraints:
    return PseudonymConstraints(language=language, name_pools=builtin_pools())


# ---------------------------------------------------------------------------
# realistic pseudonyms and invalidation


def realistic_pseudonym(
    surface: str,
    category: PiiCategory,
    constraints: PseudonymConstraints,
    ledger: Ledger,
    seed: int,
    language: str | None = None,
    record: bool = True,
) -> str:
    """Pick a pool pseudonym satisfying the constraints, ledger-consistent.

    A repeated (surface, category) returns the recorded replacement; fresh
    picks never collide with another original's replacement in the category
    and never equal any protected surface in the ledger.
    """
    if category is PiiCategory.URL:
        raise SubstituteError("URLs are invalidated, not pseudonymized")
    lang = language or constraints.language
    existing = ledger.lookup(surface, category)
    if existing is not None:
        if record:
            ledger.record(surface, category, existing, lang)
        return existing
    pool = constraints.name_pools.get((lang, category))
    if pool is None:
        raise SubstituteError(f"no name pool for language {lang!r} and category {category.value}")
    candidates = [c for c in pool if satisfies_constraints(c, surface, constraints, category)]
    if not candidates:
        raise PoolExhaustedError(
            f"pool exhausted: no {lang}/{category.value} candidate matches the shape of {surface!r}; "
            "extend the pool"
        )
    rng = _rng(seed, "pseudonym", category.value, surface)
    offset = rng.randrange(len(candidates))
    protected = ledger.protected_surfaces()
    for i in range(len(candidates)):
        candidate = candidates[(offset + i) % len(candidates)]
        if candidate == surface:
            continue
        owner = ledger.replacement_owner(category, candidate)
        if owner is not None and owner != surface:
            continue
        if candidate in protected:
            continue
        if record:
            ledger.record(surface, category, candidate, lang, CreatedBy.GENERATOR)
        return candidate
    raise PoolExhaustedError(
        f"pool exhausted: all matching {lang}/{category.value} candidates for {surface!r} "
        "are taken; extend the pool"
    )


def _perturbable_mask(surface: str, category: PiiCategory) -> list[bool]:
    n = len(surface)
    mask = [False] * n

    def mark(lo: int, hi: int) -> int:
        count = 0
        for i in range(lo, hi):
            if surface[i].isalnum():
                mask[i] = True
                count += 1
        return count

    if category is PiiCategory.URL:
        m = re.match(r"^(https?://|www\.)?([^/\s]+)(/?)", surface)
        host_end = m.end() if m else 0
        if mark(host_end, n) < 3:
            # no informative path: perturb host labels, keep the TLD
            host = m.group(2) if m else surface
            host_start = m.start(2) if m else 0
            tld_at = host.rfind(".")
            end = host_start + (tld_at if tld_at > 0 else len(host))
            mark(host_start, end)
    elif category is PiiCategory.USERNAME:
        mark(1 if surface.startswith("@") else 0, n)
    elif category is PiiCategory.EMAIL:
        at = surface.find("@")
        local_end = at if at > 0 else n
        if mark(0, local_end) < 3 and at > 0:
            tld_at = surface.rfind(".")
            mark(at + 1, tld_at if tld_at > at else n)
    elif category is PiiCategory.PHONE:
        digit_positions = [i for i, ch in enumerate(surface) if ch.isdigit()]
        for skip in (2, 1, 0):
            chosen = digit_positions[skip:]
            if len(chosen) >= 3 or skip == 0:
                for i in chosen:
                    mask[i] = True
                break
    return mask


def _perturb_char(ch: str, rng: random.Random) -> str:
    if ch.isdigit():
        value = unicodedata.digit(ch)
        base = ord(ch) - value
        return chr(base + (value + 1 + rng.randrange(9)) % 10)
    if "a" <= ch <= "z":
        return chr((ord(ch) - 97 + 1 + rng.randrange(25)) % 26 + 97)
    if "A" <= ch <= "Z":
        return chr((ord(ch) - 65 + 1 + rng.randrange(25)) % 26 + 65)
    if "ء" <= ch <= "ي":
        return chr((ord(ch) - 0x0621 + 1 + rng.randrange(0x064A - 0x0621)) % (0x064A - 0x0621 + 1) + 0x0621)
    return ch


def invalidate(surface: str, category: PiiCategory, seed: int, salt: int = 0) -> str:
    """Perturb the identifying tail so direct access fails but shape holds.

    Scheme/host shape is preserved for URLs, the leading symbol for
    handles; every alphanumeric character of the identifying tail changes,
    deterministically per seed.
    """
    if category not in INVALIDATABLE:
        raise SubstituteError(f"category {category.value} cannot be invalidated")
    if len(surface) < 4:
        raise SubstituteError(f"surface {surface!r} too short to perturb safely")
    mask = _perturbable_mask(surface, category)
    if not any(mask):
        raise SubstituteError(f"surface {surface!r} has no perturbable characters")
    rng = _rng(seed, "invalidate", category.value, surface, str(salt))
    chars = [(_perturb_char(ch, rng) if flagged else ch) for ch, flagged in zip(surface, mask)]
    return "".join(chars)


def consistent_invalidate(
    surface: str,
    category: PiiCategory,
    ledger: Ledger,
    seed: int,
    language: str,
    record: bool = True,
) -> str:
    """Ledger-backed invalidation: same surface, same perturbed output."""
    existing = ledger.lookup(surface, category)
    if existing is not None:
        if record:
            ledger.record(surface, category, existing, language)
        return existing
    protected = ledger.protected_surfaces()
    salt = 0
    while True:
        candidate = invalidate(surface, category, seed, salt)
        owner = ledger.replacement_owner(category, candidate)
        if candidate != surface and owner in (None, surface) and candidate not in protected:
            if record:
                ledger.record(surface, category, candidate, language, CreatedBy.GENERATOR)
            return candidate
        salt += 1
        if salt > 10_000:
            raise SubstituteError(f"could not find a fresh invalidation for {surface!r}")


# ---------------------------------------------------------------------------
# strategy application


def _category_word(span: EntitySpan) -> str:
    if span.pii_category is None:
        raise SubstituteError(
            f"span [{span.start},{span.end}) {span.surface!r} has no pii_category"
        )
    return CATEGORY_WORDS[span.pii_category]


def plan_replacements(
    doc: Document,
    strategy: StrategyId,
    ledger: Ledger | None = None,
    constraints: PseudonymConstraints | None = None,
    seed: int = 0,
) -> Document:
    """Fill every span's replacement per its decision; text untouched.

    The returned document is the pre-transform snapshot consumed by the
    audit scans.
    """
    if strategy is StrategyId.REALISTIC and ledger is None:
        raise SubstituteError("REALISTIC requires an open ledger")
    ordinal = 0
    planned: list[EntitySpan] = []
    for span in doc.spans:
        if span.decision is None:
            raise SubstituteError(
                f"span [{span.start},{span.end}) {span.surface!r} in {doc.id} has no decision"
            )
        if span.decision is Decision.KEEP:
            planned.append(replace(span, replacement=None))
            continue
        if span.decision is Decision.DELETE or strategy is StrategyId.S0:
            planned.append(replace(span, replacement=""))
            continue
        if strategy is StrategyId.S1:
            repl = UNIFORM_PLACEHOLDER
        elif strategy is StrategyId.S2:
            repl = _category_word(span)
        elif strategy is StrategyId.S3:
            ordinal += 1
            repl = f"{_category_word(span)}{ordinal}"
        else:  # REALISTIC
            constraints = constraints or default_constraints(doc.language)
            if span.decision is Decision.INVALIDATE and span.pii_category in INVALIDATABLE:
                repl = consistent_invalidate(span.surface, span.pii_category, ledger, seed, doc.language)
            else:
                repl = realistic_pseudonym(
                    span.surface, span.pii_category, constraints, ledger, seed, language=doc.language
                )
        planned.append(replace(span, replacement=repl))
    return doc.with_spans(planned)


def _clamped_whitespace(text: str, p: int, spans: list[EntitySpan]) -> tuple[int, int]:
    """Collapsible [ \\t] runs adjacent to join point p, never crossing a span."""

    def inside_span(q: int) -> bool:
        return any(s.start <= q < s.end for s in spans)

    l = 0
    while p - l - 1 >= 0 and text[p - l - 1] in " \t" and not inside_span(p - l - 1):
        l += 1
    r = 0
    while p + r < len(text) and text[p + r] in " \t" and not inside_span(p + r):
        r += 1
    return l, r


def _cleanup_join(text: str, p: int, spans: list[EntitySpan]) -> tuple[str, list[EntitySpan]]:
    """Local whitespace repair after a span deletion at new-text position p.

    Rule: collapse whitespace meeting at the join to one space; drop it
    entirely before punctuation, at text start, and at text end.
    """
    l, r = _clamped_whitespace(text, p, spans)
    if l + r == 0:
        return text, spans
    next_char = text[p + r] if p + r < len(text) else None
    if next_char in tuple(_JOIN_PUNCT) or next_char is None or p - l == 0:
        keep = 0
    elif l > 0 and r > 0:
        keep = 1
    else:
        keep = l + r
    delta = keep - (l + r)
    if delta == 0:
        return text, spans
    new_text = text[: p - l] + " " * keep + text[p + r :]
    remapped = [
        replace(s, start=s.start + delta, end=s.end + delta) if s.start >= p + r else s
        for s in spans
    ]
    return new_text, remapped


def rewrite_document(doc: Document) -> Document:
    """Apply planned replacements, recomputing text and all offsets.

    Deleted spans vanish from the output span list; replaced spans carry
    new offsets, surface equal to the replacement, and the replacement
    field as the record of what happened.
    """
    parts: list[str] = []
    new_spans: list[EntitySpan] = []
    deletions: list[int] = []
    pos = 0
    out_len = 0
    for span in doc.spans:
        if span.decision is None:
            raise SubstituteError(f"span in {doc.id} has no decision")
        if span.decision is not Decision.KEEP and span.replacement is None:
            raise SubstituteError(
                f"span [{span.start},{span.end}) in {doc.id} was not planned (no replacement)"
            )
        gap = doc.text[pos:span.start]
        parts.append(gap)
        out_len += len(gap)
        if span.decision is Decision.KEEP:
            parts.append(span.surface)
            new_spans.append(replace(span, start=out_len, end=out_len + len(span.surface)))
            out_len += len(span.surface)
        elif span.replacement == "":
            deletions.append(out_len)
        else:
            parts.append(span.replacement)
            new_spans.append(
                replace(
                    span,
                    start=out_len,
                    end=out_len + len(span.replacement),
                    surface=span.replacement,
                )
            )
            out_len += len(span.replacement)
        pos = span.end
    parts.append(doc.text[pos:])
    text = "".join(parts)
    for p in reversed(deletions):
        text, new_spans = _cleanup_join(text, p, new_spans)
    return replace(doc, text=text, spans=tuple(new_spans))


def apply_strategy(
    doc: Document,
    strategy: StrategyId,
    ledger: Ledger | None = None,
    constraints: PseudonymConstraints | None = None,
    seed: int = 0,
) -> Document:
    """Plan and rewrite one document under the given strategy."""
    return rewrite_document(plan_replacements(doc, strategy, ledger, constraints, seed))


def apply_corpus(
    docs: list[Document],
    strategy: StrategyId,
    ledger: Ledger | None = None,
    constraints: PseudonymConstraints | None = None,
    seed: int = 0,
) -> tuple[list[Document], list[Document]]:
    """Transform a corpus; returns (planned snapshot, output documents)."""
    planned = [plan_replacements(d, strategy, ledger, constraints, seed) for d in docs]
    return planned, [rewrite_document(d) for d in planned]
