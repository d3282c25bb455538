"""Synthetic corpora for benchmarks, demos, and the acceptance suite.

Inventories are invented and kept disjoint from the shipped name pools so
generated corpora pass the leakage audit by construction: protected
surfaces never collide with filler vocabulary, kept surfaces, or pool
candidates. Private indirect identifiers (the ones the at-least-one rule
may flip per document) are minted once per use so a surface never ends up
kept in one document and pseudonymized in another.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import (
    CallForActionLevel,
    Decision,
    Document,
    EntitySpan,
    PiiCategory,
    SubjectRole,
)
from .policy import decide_corpus

R = SubjectRole
C = PiiCategory


@dataclass(frozen=True)
class Entity:
    surface: str
    category: C
    role: R


# --- recurring protected entities (stable role corpus-wide) ----------------

EN_PROTECTED = [
    Entity("Tobias Nertling", C.PERSON_NAME, R.PRIVATE_INDIVIDUAL),
    Entity("Wilda Frostham", C.PERSON_NAME, R.PRIVATE_INDIVIDUAL),
    Entity("Casimir Bluntwick", C.PERSON_NAME, R.DECEASED_PRIVATE_PERSON),
    Entity("Odele Varnish", C.PERSON_NAME, R.CONVICTED_UNCLEAR_OR_MINOR),
    Entity("@veldt_runner88", C.USERNAME, R.PRIVATE_INDIVIDUAL),
    Entity("@quiet.cinder", C.USERNAME, R.PRIVATE_INDIVIDUAL),
    Entity("@marrowpike_cell", C.USERNAME, R.RADICAL_ORG_ACCOUNT),
    Entity("tobias.nertling@vexmail.org", C.EMAIL, R.PRIVATE_INDIVIDUAL),
    Entity("wilda.frostham@cryptpost.net", C.EMAIL, R.INFLUENCER),
    Entity("+1 555 734 9921", C.PHONE, R.PRIVATE_INDIVIDUAL),
    Entity("+1 555 682 4417", C.PHONE, R.INFLUENCER),
    Entity("Varnick Hollow Lane", C.ADDRESS, R.PRIVATE_INDIVIDUAL),
    Entity("Gorse Fen Road", C.ADDRESS, R.PRIVATE_INDIVIDUAL),
    Entity("Veldmark Circle", C.ORG_NAME, R.VULNERABLE_LINKED_ORGANIZATION),
    Entity("Brindlehart Union", C.ORG_NAME, R.VULNERABLE_LINKED_ORGANIZATION),
    Entity("#veldtstorm", C.HASHTAG, R.UNASSIGNED),
    Entity("#cinderoath22", C.HASHTAG, R.UNASSIGNED),
    Entity("The Hollow Pact", C.MEDIA_TITLE, R.RADICAL_ORG_ACCOUNT),
    Entity("https://wa.me/+15557349921", C.URL, R.PRIVATE_INDIVIDUAL),
    Entity("https://veldtcast.example/ep/443", C.URL, R.RADICAL_ORG_ACCOUNT),
]

FR_PROTECTED = [
    Entity("Ombeline Crevat", C.PERSON_NAME, R.PRIVATE_INDIVIDUAL),
    Entity("Anselme Drouvet", C.PERSON_NAME, R.PRIVATE_INDIVIDUAL),
    Entity("Perrine Valdoux", C.PERSON_NAME, R.DECEASED_PRIVATE_PERSON),
    Entity("@braise_nocturne", C.USERNAME, R.PRIVATE_INDIVIDUAL),
    Entity("@cendre.vive44", C.USERNAME, R.RADICAL_ORG_ACCOUNT),
    Entity("ombeline.crevat@briquemail.fr", C.EMAIL, R.PRIVATE_INDIVIDUAL),
    Entity("06 77 31 48 26", C.PHONE, R.PRIVATE_INDIVIDUAL),
    Entity("06 81 59 22 74", C.PHONE, R.INFLUENCER),
    Entity("Rue Anselme Picavet", C.ADDRESS, R.PRIVATE_INDIVIDUAL),
    Entity("Cercle Drouvet", C.ORG_NAME, R.VULNERABLE_LINKED_ORGANIZATION),
    Entity("#braisenoire", C.HASHTAG, R.UNASSIGNED),
    Entity("Les Cendres Vives", C.MEDIA_TITLE, R.RADICAL_ORG_ACCOUNT),
    Entity("https://t.me/braise_nocturne", C.URL, R.RADICAL_ORG_ACCOUNT),
]

AR_PROTECTED = [
    Entity("زاهر المقدسي", C.PERSON_NAME, R.PRIVATE_INDIVIDUAL),
    Entity("سميرة الفلوجي", C.PERSON_NAME, R.PRIVATE_INDIVIDUAL),
    Entity("غسان الطوابي", C.PERSON_NAME, R.DECEASED_PRIVATE_PERSON),
    Entity("@sahm_alkhayr3", C.USERNAME, R.PRIVATE_INDIVIDUAL),
    Entity("zahir.maqdisi@ramlmail.net", C.EMAIL, R.PRIVATE_INDIVIDUAL),
    Entity("+20 101 774 5529", C.PHONE, R.PRIVATE_INDIVIDUAL),
    Entity("شارع الرماد القديم", C.ADDRESS, R.PRIVATE_INDIVIDUAL),
    Entity("رابطة الرماد", C.ORG_NAME, R.VULNERABLE_LINKED_ORGANIZATION),
    Entity("#رماد_الغد", C.HASHTAG, R.UNASSIGNED),
    Entity("عهد الرماد", C.MEDIA_TITLE, R.RADICAL_ORG_ACCOUNT),
    Entity("https://t.me/sahm_alkhayr", C.URL, R.RADICAL_ORG_ACCOUNT),
]

# appear in several documents across two languages (consistency anchor)
CROSS_LANGUAGE = [
    Entity("Karim Belhadj", C.PERSON_NAME, R.PRIVATE_INDIVIDUAL),
    Entity("@karim.antenne7", C.USERNAME, R.PRIVATE_INDIVIDUAL),
]

# kept as-is everywhere (public subjects)
EN_PUBLIC = [
    Entity("Alden Marsh", C.PERSON_NAME, R.PUBLIC_FIGURE),
    Entity("Petra Quillon", C.PERSON_NAME, R.INFLUENCER),
    Entity("Harwick Forum", C.ORG_NAME, R.GENERIC_ORGANIZATION),
    Entity("Dustfall Reckoning", C.MEDIA_TITLE, R.PUBLIC_FIGURE),
    Entity("Ostmere", C.LOCATION, R.PUBLIC_FIGURE),
]
FR_PUBLIC = [
    Entity("Honorine Vastel", C.PERSON_NAME, R.PUBLIC_FIGURE),
    Entity("Forum Vastel", C.ORG_NAME, R.GENERIC_ORGANIZATION),
    Entity("Clermonde", C.LOCATION, R.PUBLIC_FIGURE),
]
AR_PUBLIC = [
    Entity("عزمي الركابي", C.PERSON_NAME, R.DECEASED_KNOWN_TERRORIST),
    Entity("مجلس الرواق", C.ORG_NAME, R.GENERIC_ORGANIZATION),
]

PROTECTED = {"en": EN_PROTECTED, "fr": FR_PROTECTED, "ar": AR_PROTECTED}
PUBLIC = {"en": EN_PUBLIC, "fr": FR_PUBLIC, "ar": AR_PUBLIC}

FILLER = {
    "en": ["the", "crew", "met", "again", "tonight", "plans", "moved", "forward", "keep",
           "watch", "until", "dawn", "share", "this", "with", "everyone", "before", "they",
           "take", "it", "down", "stay", "ready", "more", "soon"],
    "fr": ["le", "groupe", "se", "retrouve", "demain", "soir", "partagez", "avant",
           "que", "tout", "disparaisse", "restez", "prudents", "la", "suite", "bientôt",
           "ne", "dites", "rien", "aux", "autres", "tenez", "bon"],
    "ar": ["قال", "اليوم", "هنا",
           "غدا", "نحن", "معا",
           "الى", "اللقاء",
           "صباحا", "مساء",
           "بعد", "قبل", "حيث",
           "لكن", "ثم", "كان",
           "سنبقى", "صامدين"],
}

# stems for one-shot private indirect identifiers (location / other)
_INDIRECT_STEMS = {
    "en": ("Kren", "Vald", "Norl", "Thur", "Blen"),
    "fr": ("Sarv", "Ombr", "Treg", "Luss", "Vanc"),
    "ar": ("رمل", "سدر", "عنب", "جرف", "سفح"),
}
_INDIRECT_TAILS = {
    "en": ("moor", "wick", "holt", "fen", "dale", "mere", "ford", "hurst"),
    "fr": ("ac", "euil", "igny", "onne", "ac-le-Bas", "y-sur-Mer"),
    "ar": ("ان", "ون", "ين", "اء", "ة"),
}
_OTHER_WORDS = {
    "en": ("Veldtish", "Krenish", "Nordavian", "Thurlander", "Blenic",
           "Valdorian", "Ostmerian", "Grelandic", "Fenlandish", "Moorovian",
           "Daleward", "Hurstian", "Wickish", "Holtese"),
    "fr": ("Sarvois", "Ombrien", "Tregois", "Lussois", "Vancien",
           "Clermondais", "Ostalien", "Brumien", "Euillois", "Ignien",
           "Onnais", "Merois", "Basquin", "Luneois"),
    "ar": ("رملاني", "سدراوي",
           "عنباني", "جرفاوي",
           "سفحاني", "رميلاني",
           "سدراني", "عنباوي",
           "جرفاني", "سفحاوي",
           "رملاوي", "سدريني"),
}

LANG_CYCLE = ("en", "en", "fr", "en", "fr", "ar", "fr", "ar")


def _fresh_indirect(lang: str, kind: C, counter: int) -> str:
    stems = _INDIRECT_STEMS[lang]
    if kind is C.LOCATION:
        tails = _INDIRECT_TAILS[lang]
        stem = stems[counter % len(stems)]
        tail = tails[(counter // len(stems)) % len(tails)]
        serial = counter // (len(stems) * len(tails))
        return stem + tail + ("" if serial == 0 else str(serial + 1))
    words = _OTHER_WORDS[lang]
    word = words[counter % len(words)]
    serial = counter // len(words)
    return word + ("" if serial == 0 else str(serial + 1))


def _compose(rng: random.Random, lang: str, entities: list[Entity]) -> tuple[str, list[EntitySpan]]:
    words = [rng.choice(FILLER[lang]) for _ in range(rng.randint(6, 14))]
    slots = sorted(rng.sample(range(len(words) + 1), len(entities)))
    tokens: list[tuple[str, Entity | None]] = [(w, None) for w in words]
    for offset, (slot, entity) in enumerate(zip(slots, entities)):
        tokens.insert(slot + offset, (entity.surface, entity))
    text_parts: list[str] = []
    spans: list[EntitySpan] = []
    pos = 0
    for i, (token, entity) in enumerate(tokens):
        if i > 0:
            text_parts.append(" ")
            pos += 1
        if entity is not None:
            spans.append(
                EntitySpan(pos, pos + len(token), token,
                           pii_category=entity.category, subject_role=entity.role)
            )
        text_parts.append(token)
        pos += len(token)
    return "".join(text_parts), spans


def synthetic_corpus(n_docs: int = 220, seed: int = 0) -> list[Document]:
    """Decided multilingual corpus: >= 500 entities, all 11 categories,
    Latin and Arabic scripts, consistency anchors planted across languages."""
    rng = random.Random(seed)
    docs: list[Document] = []
    indirect_counters = {"en": 0, "fr": 0, "ar": 0}
    labels = list(CallForActionLevel)
    for i in range(n_docs):
        lang = LANG_CYCLE[i % len(LANG_CYCLE)]
        # consistency anchors live in Latin-script documents of both languages
        if i % 16 == 7:
            lang = "en" if (i // 16) % 2 == 0 else "fr"
        elif i % 16 == 11:
            lang = "fr" if (i // 16) % 2 == 0 else "en"
        entities: list[Entity] = []
        n_entities = rng.randint(1, 4)
        pool = PROTECTED[lang] + PUBLIC[lang]
        entities.extend(rng.choice(pool) for _ in range(n_entities))
        if i % 9 == 4:
            # one-shot pair of private indirect identifiers (quasi-id rule food)
            loc = _fresh_indirect(lang, C.LOCATION, indirect_counters[lang])
            other = _fresh_indirect(lang, C.OTHER, indirect_counters[lang])
            indirect_counters[lang] += 1
            entities.append(Entity(loc, C.LOCATION, R.PRIVATE_INDIVIDUAL))
            entities.append(Entity(other, C.OTHER, R.PRIVATE_INDIVIDUAL))
        if i % 16 == 7:
            entities.append(CROSS_LANGUAGE[0])
        if i % 16 == 11:
            entities.append(CROSS_LANGUAGE[1])
        # dedupe surfaces within one document (same entity drawn twice)
        seen: set[str] = set()
        entities = [e for e in entities if not (e.surface in seen or seen.add(e.surface))]
        text, spans = _compose(rng, lang, entities)
        anchor_surfaces = {e.surface for e in CROSS_LANGUAGE}
        deletable = [j for j, s in enumerate(spans) if s.surface not in anchor_surfaces]
        if i % 13 == 6 and deletable:
            # reviewer-style hard deletion of one span (never an anchor)
            victim = rng.choice(deletable)
            spans[victim] = EntitySpan(
                spans[victim].start, spans[victim].end, spans[victim].surface,
                pii_category=spans[victim].pii_category,
                subject_role=spans[victim].subject_role,
                decision=Decision.DELETE, replacement="",
            )
        split = "train" if i < n_docs * 0.70 else ("dev" if i < n_docs * 0.78 else "test")
        docs.append(
            Document(
                id=f"syn-{i:04d}",
                language=lang,
                source=rng.choice(["telegram", "twitter", "forum", "facebook"]),
                text=text,
                cfa_label=rng.choice(labels),
                spans=tuple(spans),
                meta={"split": split},
            )
        )
    decided = decide_corpus(docs)
    # hard deletions survive decide_corpus only if re-applied (decide
    # overwrites decisions); re-mark them from the pre-decision corpus
    out: list[Document] = []
    for before, after in zip(docs, decided):
        spans = list(after.spans)
        for j, span in enumerate(before.spans):
            if span.decision is Decision.DELETE:
                spans[j] = EntitySpan(
                    span.start, span.end, span.surface,
                    ner_label=after.spans[j].ner_label,
                    pii_category=span.pii_category,
                    subject_role=after.spans[j].subject_role,
                    decision=Decision.DELETE, replacement="",
                )
        out.append(after.with_spans(spans))
    return out


# --- labeled corpus with entity-independent labels --------------------------

SIGNALS = {
    CallForActionLevel.NEGATIVE: ("garden", "recipe", "stroll", "harvestfair"),
    CallForActionLevel.LOW: ("gripe", "sneer", "scoff", "grumbling"),
    CallForActionLevel.MODERATE: ("rally", "banner", "leaflet", "gathering"),
    CallForActionLevel.HIGH: ("pledge", "enlist", "muster", "recruitdrive"),
    CallForActionLevel.VERY_HIGH: ("torch", "storming", "onslaught", "strikenow"),
}

_LABELED_ENTITIES = [e for e in EN_PROTECTED if e.category in
                     (C.PERSON_NAME, C.USERNAME, C.EMAIL, C.PHONE, C.URL)] + CROSS_LANGUAGE


def labeled_corpus(n_docs: int = 250, seed: int = 0) -> list[Document]:
    """English decided corpus whose labels depend only on non-entity tokens.

    Each document carries signal tokens of its label (plus an occasional
    distractor); entities are drawn independently of the label, so
    substituting them cannot move the label signal.
    """
    rng = random.Random(seed)
    labels = list(CallForActionLevel)
    docs: list[Document] = []
    for i in range(n_docs):
        label = labels[i % len(labels)]
        entities = [rng.choice(_LABELED_ENTITIES) for _ in range(rng.randint(0, 3))]
        seen: set[str] = set()
        entities = [e for e in entities if not (e.surface in seen or seen.add(e.surface))]
        text, spans = _compose(rng, "en", entities)
        signal_words = [rng.choice(SIGNALS[label]) for _ in range(rng.randint(2, 4))]
        if rng.random() < 0.4:
            distractor_label = rng.choice([l for l in labels if l is not label])
            signal_words.append(rng.choice(SIGNALS[distractor_label]))
        # append signals at the end: span offsets stay valid
        suffix = (" " if text else "") + " ".join(signal_words)
        docs.append(
            Document(
                id=f"lab-{i:04d}",
                language="en",
                source="forum",
                text=text + suffix,
                cfa_label=label,
                spans=tuple(spans),
            )
        )
    return decide_corpus(docs)
