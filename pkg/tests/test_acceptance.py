"""Acceptance criteria, one test per criterion, each printing PASS/FAIL."""

import dataclasses
import functools
import json
import time

import pytest

from redactor.audit import (
    consistency_scan,
    entity_stats,
    leakage_scan,
    quasi_id_report,
    render_stats_table,
)
from redactor.cli import main
from redactor.corpus import (
    Decision,
    Document,
    EntitySpan,
    PiiCategory,
    SubjectRole,
    read_corpus,
    slice_check,
    write_corpus,
)
from redactor.evaluate import (
    cohens_kappa,
    make_split,
    render_testing_table,
    render_training_table,
    variant_grid,
)
from redactor.ledger import (
    Ledger,
    LedgerConflictError,
    LedgerInjectivityError,
    load as ledger_load,
    save as ledger_save,
)
from redactor.policy import decide, default_ruleset, enforce_indirect_rule
from redactor.substitute import StrategyId, apply_corpus, apply_strategy
from redactor.synthetic import labeled_corpus, synthetic_corpus

from conftest import TABLE2_TEXT, build_table2_doc


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {name}: FAIL")
                raise
            print(f"ACCEPTANCE {name}: PASS")
            return result

        return wrapper

    return decorate


@criterion("table2-golden-transforms")
def test_table2_golden_transforms():
    doc = build_table2_doc(decided=True)
    started = time.perf_counter()
    texts = {s: apply_strategy(doc, s).text for s in
             (StrategyId.S0, StrategyId.S1, StrategyId.S2, StrategyId.S3)}
    elapsed = time.perf_counter() - started
    assert texts[StrategyId.S1] == (
        "Hit me up placeholder, placeholder on Insta. "
        "Shoutout to placeholder! At placeholder."
    )
    assert texts[StrategyId.S2] == (
        "Hit me up username, username on Insta. Shoutout to name! At location."
    )
    # documented normalization golden files for S0 / S3
    assert texts[StrategyId.S0] == "Hit me up, on Insta. Shoutout to! At."
    assert texts[StrategyId.S3] == (
        "Hit me up username1, username2 on Insta. Shoutout to name3! At location4."
    )
    assert elapsed < 1.0, f"golden transforms took {elapsed:.3f}s"


@criterion("zero-leakage-all-strategies")
def test_zero_leakage_on_synthetic_corpus():
    started = time.perf_counter()
    docs = synthetic_corpus(220, seed=0)
    assert len(docs) >= 200
    spans = [s for d in docs for s in d.spans]
    assert len(spans) >= 500
    assert {s.pii_category for s in spans} == set(PiiCategory)
    assert {d.language for d in docs} == {"en", "fr", "ar"}
    for strategy in StrategyId:
        ledger = Ledger()
        planned, outputs = apply_corpus(docs, strategy, ledger=ledger, seed=17)
        leaks = leakage_scan(planned, outputs,
                             ledger if strategy is StrategyId.REALISTIC else None)
        assert leaks == [], f"{strategy.value}: {leaks[:5]}"
        offsets = [v for d in outputs for v in slice_check(d)]
        assert offsets == [], f"{strategy.value}: {offsets[:5]}"
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"leakage property took {elapsed:.1f}s"


@criterion("cross-language-consistency")
def test_cross_language_consistency():
    docs = synthetic_corpus(220, seed=0)
    ledger = Ledger()
    planned, _ = apply_corpus(docs, StrategyId.REALISTIC, ledger=ledger, seed=17)
    anchor = "Karim Belhadj"
    hits = [(d.language, s.replacement) for d in planned for s in d.spans
            if s.surface == anchor]
    assert len(hits) >= 3
    assert {language for language, _ in hits} == {"en", "fr"}
    assert len({replacement for _, replacement in hits}) == 1
    entry = ledger.get(anchor, PiiCategory.PERSON_NAME)
    assert entry is not None and set(entry.languages) == {"en", "fr"}
    assert consistency_scan(planned) == []


@criterion("pipeline-determinism")
def test_pipeline_determinism(tmp_path):
    raw = [
        Document(id="t2", language="en", source="twitter", text=TABLE2_TEXT),
        Document(id="d2", language="en", source="forum",
                 text="Reach me at marta.velin@postvex.org or +1 555 014 9983 soon"),
        Document(id="d3", language="fr", source="twitter",
                 text="Suivez @ombre_fine77 et https://t.me/ombre_fine77 ce soir"),
    ]
    gazetteer = tmp_path / "gazetteer.json"
    gazetteer.write_text(json.dumps({
        "PERSON_NAME": ["Moshe Chaya"], "ADDRESS": ["Rue Alphonse Metayer"]}))
    artifacts = []
    for run in ("a", "b"):
        base = tmp_path / run
        base.mkdir()
        src = base / "raw.jsonl"
        write_corpus(raw, src)
        detected, decided, output = base / "det.jsonl", base / "dec.jsonl", base / "out.jsonl"
        ledger_path = base / "ledger.jsonl"
        assert main(["detect", "--input", str(src), "--output", str(detected),
                     "--gazetteer", str(gazetteer)]) == 0
        assert main(["decide", "--input", str(detected), "--output", str(decided)]) == 0
        assert main(["pseudonymize", "--input", str(decided), "--output", str(output),
                     "--strategy", "REALISTIC", "--seed", "11",
                     "--ledger", str(ledger_path)]) == 0
        artifacts.append((output.read_bytes(), ledger_path.read_bytes()))
    assert artifacts[0][0] == artifacts[1][0], "output corpora differ between runs"
    assert artifacts[0][1] == artifacts[1][1], "ledger files differ between runs"


@criterion("policy-enumeration")
def test_policy_enumeration():
    rules = default_ruleset()
    for role in SubjectRole:
        for category in PiiCategory:
            span = EntitySpan(0, 1, "x", pii_category=category)
            assert isinstance(decide(span, role, rules), Decision)
    rulebook_examples = [
        (PiiCategory.PERSON_NAME, SubjectRole.PRIVATE_INDIVIDUAL, Decision.PSEUDONYMIZE),
        (PiiCategory.PERSON_NAME, SubjectRole.PUBLIC_FIGURE, Decision.KEEP),
        (PiiCategory.PHONE, SubjectRole.INFLUENCER, Decision.PSEUDONYMIZE),
        (PiiCategory.ORG_NAME, SubjectRole.GENERIC_ORGANIZATION, Decision.KEEP),
        (PiiCategory.ORG_NAME, SubjectRole.VULNERABLE_LINKED_ORGANIZATION, Decision.PSEUDONYMIZE),
        (PiiCategory.PERSON_NAME, SubjectRole.UNASSIGNED, Decision.PSEUDONYMIZE),
    ]
    for category, role, expected in rulebook_examples:
        span = EntitySpan(0, 1, "x", pii_category=category)
        assert decide(span, role, rules) is expected, (category, role)
    # no document retains >= 2 kept private indirect identifiers
    docs = synthetic_corpus(220, seed=0)
    assert quasi_id_report(docs) == []
    text = "a b c d e f g h i j k l"
    crowded = Document(
        id="q", language="en", source="t", text=text,
        spans=tuple(
            EntitySpan(i * 2, i * 2 + 1, text[i * 2],
                       pii_category=category, subject_role=SubjectRole.PRIVATE_INDIVIDUAL,
                       decision=Decision.KEEP)
            for i, category in enumerate(
                [PiiCategory.LOCATION, PiiCategory.OTHER, PiiCategory.HASHTAG,
                 PiiCategory.ORG_NAME, PiiCategory.MEDIA_TITLE])
        ),
    )
    flipped = crowded.with_spans(enforce_indirect_rule(crowded, rules))
    assert quasi_id_report([flipped]) == []


@criterion("cohens-kappa-oracle")
def test_cohens_kappa_oracle():
    assert abs(cohens_kappa(["A", "B", "A", "C"], ["A", "B", "A", "C"]) - 1.0) <= 1e-9
    assert abs(cohens_kappa(["A", "A", "B", "B"], ["A", "B", "A", "B"]) - 0.0) <= 1e-9
    assert abs(cohens_kappa(["A", "A", "A", "B"], ["A", "A", "B", "B"]) - 0.5) <= 1e-9


@criterion("utility-grid-mechanics")
def test_utility_grid_mechanics():
    started = time.perf_counter()
    lab = labeled_corpus(250, seed=0)
    variants = {"Original": make_split(lab)}
    for strategy in StrategyId:
        ledger = Ledger()
        _, outputs = apply_corpus(lab, strategy, ledger=ledger, seed=3)
        name = "Ours" if strategy is StrategyId.REALISTIC else strategy.value
        variants[name] = make_split(outputs)
    report = variant_grid(variants, seeds=[0, 1, 2, 3, 4])
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"grid took {elapsed:.1f}s"
    training_table = render_training_table(report)
    testing_table = render_testing_table(report)
    for name in ("Original", "S0", "S1", "S2", "S3", "Ours"):
        assert any(line.startswith(name) for line in training_table.splitlines())
        assert any(line.startswith(name) for line in testing_table.splitlines())
    assert "Corresponding Test" in training_table and "Original Test" in training_table
    assert "Macro-F1" in testing_table
    ours = report.cells[("Ours", "Ours")].mean
    original = report.cells[("Original", "Original")].mean
    assert abs(ours - original) <= 0.05, f"|{ours} - {original}| > 0.05"


@criterion("ledger-robustness")
def test_ledger_robustness(tmp_path, monkeypatch):
    import random

    import redactor.ledger as ledger_mod

    rng = random.Random(23)
    ledger = Ledger()
    categories = list(PiiCategory)
    for i in range(1000):
        category = rng.choice(categories)
        ledger.record(f"original-{i}", category, f"replacement-{i}", rng.choice(["en", "fr", "ar"]))
    path = tmp_path / "ledger.jsonl"
    ledger_save(ledger, path)
    assert ledger_load(path) == ledger
    with pytest.raises(LedgerConflictError):
        ledger.record("original-0", ledger.entries()[0].pii_category, "something-else", "en")
    first = ledger.entries()[0]
    with pytest.raises(LedgerInjectivityError):
        ledger.record("brand-new", first.pii_category, first.replacement, "en")
    before = path.read_bytes()

    def exploding(fh, lg):
        fh.write("partial garbage")
        raise RuntimeError("killed mid-save")

    monkeypatch.setattr(ledger_mod, "_write_payload", exploding)
    ledger.record("one-more", PiiCategory.OTHER, "fresh-value", "en")
    with pytest.raises(RuntimeError):
        ledger_save(ledger, path)
    monkeypatch.undo()
    assert path.read_bytes() == before
    assert ledger_load(path).version == 1000


@criterion("stats-report")
def test_stats_report():
    text1 = "ping Tobias Nertling at Varnick Hollow Lane"
    text2 = "call +1 555 734 9921 or mail tobias.nertling@vexmail.org"
    text3 = "rien de neuf"

    def span(text, surface, category):
        start = text.index(surface)
        return EntitySpan(start, start + len(surface), surface, pii_category=category,
                          subject_role=SubjectRole.PRIVATE_INDIVIDUAL,
                          decision=Decision.PSEUDONYMIZE, replacement="x" * len(surface))

    docs = [
        Document(id="d1", language="en", source="t", text=text1, meta={"split": "train"},
                 spans=(span(text1, "Tobias Nertling", PiiCategory.PERSON_NAME),
                        span(text1, "Varnick Hollow Lane", PiiCategory.ADDRESS))),
        Document(id="d2", language="en", source="t", text=text2, meta={"split": "train"},
                 spans=(span(text2, "+1 555 734 9921", PiiCategory.PHONE),
                        span(text2, "tobias.nertling@vexmail.org", PiiCategory.EMAIL),
                        dataclasses.replace(span(text2, "mail", PiiCategory.OTHER),
                                            decision=Decision.KEEP, replacement=None))),
        Document(id="d3", language="fr", source="t", text=text3, meta={"split": "test"}),
    ]
    stats = entity_stats(docs)
    assert stats.examples == {"en": {"train": 2}, "fr": {"test": 1}}
    assert stats.anonymized == {"en": {"train": 4}, "fr": {"test": 0}}
    assert stats.total_examples() == 3
    assert stats.total_anonymized() == 4
    table = render_stats_table(stats)
    assert "Train" in table.splitlines()[0] and "Test" in table.splitlines()[0]
    assert any(line.startswith("English") for line in table.splitlines())
    assert any(line.startswith("# examples") for line in table.splitlines())
    assert any(line.startswith("# anonymized entities") for line in table.splitlines())


@criterion("review-round-trip [SECONDARY]")
def test_review_round_trip_scripted_http(tmp_path):
    from fastapi.testclient import TestClient

    from redactor.service import ReviewService, create_app

    corpus_path = tmp_path / "working.jsonl"
    write_corpus([build_table2_doc(decided=False)], corpus_path)
    service = ReviewService(corpus_path=corpus_path, ledger_path=tmp_path / "ledger.jsonl")
    client = TestClient(create_app(service))
    anna = {"X-Reviewer": "anna"}
    ben = {"X-Reviewer": "ben"}

    doc = client.post("/docs/t2/checkout", headers=anna).json()["doc"]
    assert client.post("/docs/t2/checkout", headers=ben).status_code == 409

    for span in doc["spans"]:
        r = client.patch("/docs/t2/spans", headers=anna, json={
            "start": span["start"], "end": span["end"], "subject_role": "PublicFigure"})
        assert r.status_code == 200
        assert r.json()["span"]["decision"] == "keep"

    # replacement conflict dialog payload carries the existing mapping
    r = client.patch("/docs/t2/spans", headers=anna, json={
        "start": doc["spans"][0]["start"], "end": doc["spans"][0]["end"],
        "subject_role": "PrivateIndividual", "replacement": "@first.pick"})
    assert r.status_code == 200
    conflict = client.patch("/docs/t2/spans", headers=anna, json={
        "start": doc["spans"][0]["start"], "end": doc["spans"][0]["end"],
        "subject_role": "PrivateIndividual", "replacement": "@second.pick"})
    assert conflict.status_code == 409
    assert conflict.json()["detail"]["existing"]["replacement"] == "@first.pick"

    # back to public, then commit: exported corpus shows the span kept
    r = client.patch("/docs/t2/spans", headers=anna, json={
        "start": doc["spans"][0]["start"], "end": doc["spans"][0]["end"],
        "subject_role": "PublicFigure"})
    assert r.status_code == 200
    assert client.post("/docs/t2/commit", headers=anna).status_code == 200
    exported = read_corpus(corpus_path)[0]
    assert all(s.decision is Decision.KEEP for s in exported.spans)
    assert exported.meta["review_status"] == "committed"
