import json
import random

import pytest

from redactor.corpus import (
    CorpusError,
    Decision,
    Detector,
    Document,
    EntitySpan,
    PiiCategory,
    read_corpus,
    slice_check,
    write_corpus,
)


def make_doc(text="hello world", spans=(), doc_id="d1", language="en"):
    return Document(id=doc_id, language=language, source="forum", text=text, spans=tuple(spans))


def test_read_empty_file(tmp_path):
    p = tmp_path / "empty.jsonl"
    p.write_text("")
    assert read_corpus(p) == []


def test_read_minimal_record(tmp_path):
    p = tmp_path / "one.jsonl"
    p.write_text('{"id":"d1","language":"en","source":"forum","text":"hello","spans":[]}\n')
    docs = read_corpus(p)
    assert len(docs) == 1
    assert docs[0].id == "d1"
    assert docs[0].text == "hello"
    assert docs[0].spans == ()


def test_read_rejects_out_of_bounds_span(tmp_path):
    p = tmp_path / "bad.jsonl"
    rec = {
        "id": "d1",
        "language": "en",
        "source": "forum",
        "text": "hello",
        "spans": [{"start": 3, "end": 99, "surface": "lo", "detector": "manual"}],
    }
    p.write_text(json.dumps(rec) + "\n")
    with pytest.raises(CorpusError, match="span out of bounds in d1"):
        read_corpus(p)


def test_read_rejects_malformed_json_with_line_number(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"id":"d1","language":"en","source":"f","text":"a","spans":[]}\n{oops\n')
    with pytest.raises(CorpusError, match="line 2"):
        read_corpus(p)


def test_read_rejects_unknown_enum_naming_field(tmp_path):
    p = tmp_path / "bad.jsonl"
    rec = {
        "id": "d1",
        "language": "en",
        "source": "f",
        "text": "hello",
        "spans": [{"start": 0, "end": 5, "surface": "hello", "ner_label": "WAT", "detector": "manual"}],
    }
    p.write_text(json.dumps(rec) + "\n")
    with pytest.raises(CorpusError, match="ner_label"):
        read_corpus(p)


def test_read_rejects_duplicate_ids(tmp_path):
    p = tmp_path / "dup.jsonl"
    line = '{"id":"d1","language":"en","source":"f","text":"a","spans":[]}\n'
    p.write_text(line + line)
    with pytest.raises(CorpusError, match="duplicate"):
        read_corpus(p)


def test_write_empty_corpus(tmp_path):
    p = tmp_path / "out.jsonl"
    write_corpus([], p)
    assert p.read_text() == ""


def test_roundtrip_identity(tmp_path):
    doc = make_doc(
        text="Hit me up @marie.delattre1 now",
        spans=[
            EntitySpan(10, 26, "@marie.delattre1", pii_category=PiiCategory.USERNAME,
                       decision=Decision.PSEUDONYMIZE, replacement="@jane.doe1",
                       detector=Detector.REGEX),
        ],
    )
    p = tmp_path / "c.jsonl"
    write_corpus([doc], p)
    docs = read_corpus(p)
    assert docs == [doc]


def test_rewrite_is_byte_identical(tmp_path):
    doc = make_doc()
    p1 = tmp_path / "a.jsonl"
    p2 = tmp_path / "b.jsonl"
    write_corpus([doc], p1)
    write_corpus(read_corpus(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_spans_serialized_sorted_by_start(tmp_path):
    text = "aa bb cc dd"
    spans = [
        EntitySpan(6, 8, "cc"),
        EntitySpan(0, 2, "aa"),
        EntitySpan(3, 5, "bb"),
    ]
    doc = make_doc(text=text, spans=spans)
    p = tmp_path / "sorted.jsonl"
    write_corpus([doc], p)
    obj = json.loads(p.read_text())
    starts = [s["start"] for s in obj["spans"]]
    assert starts == sorted(starts) == [0, 3, 6]


def test_arabic_and_emoji_offsets_roundtrip(tmp_path):
    # offsets are code points: the emoji counts as one character
    text = "\U0001f600 مرحبا world"
    start = text.index("م")
    end = start + 5
    doc = make_doc(
        text=text,
        spans=[EntitySpan(start, end, text[start:end], pii_category=PiiCategory.OTHER)],
        language="ar",
    )
    p = tmp_path / "ar.jsonl"
    write_corpus([doc], p)
    back = read_corpus(p)[0]
    assert back.spans[0].start == start
    assert back.spans[0].end == end
    assert back.spans[0].surface == text[start:end]
    assert back == doc


def test_roundtrip_random_corpora(tmp_path):
    rng = random.Random(7)
    docs = []
    for i in range(30):
        words = ["w%d" % rng.randrange(50) for _ in range(rng.randrange(1, 12))]
        text = " ".join(words)
        spans = []
        pos = 0
        for w in words:
            if rng.random() < 0.3:
                spans.append(EntitySpan(pos, pos + len(w), w, pii_category=PiiCategory.OTHER))
            pos += len(w) + 1
        docs.append(make_doc(text=text, spans=spans, doc_id=f"d{i}"))
    p = tmp_path / "rand.jsonl"
    write_corpus(docs, p)
    assert read_corpus(p) == docs


def test_slice_check_clean_doc():
    doc = make_doc(text="hello world", spans=[EntitySpan(0, 5, "hello")])
    assert slice_check(doc) == []


def test_slice_check_surface_mismatch():
    doc = make_doc(text="abd", spans=[EntitySpan(0, 3, "abc")])
    violations = slice_check(doc)
    assert len(violations) == 1
    assert "abc" in violations[0] and "abd" in violations[0]


def test_slice_check_overlap_names_both_spans():
    doc = make_doc(text="abcdef", spans=[EntitySpan(0, 4, "abcd"), EntitySpan(2, 6, "cdef")])
    violations = slice_check(doc)
    assert len(violations) == 1
    assert "[0,4)" in violations[0] and "[2,6)" in violations[0]


def test_keep_span_with_replacement_rejected(tmp_path):
    rec = {
        "id": "d1",
        "language": "en",
        "source": "f",
        "text": "hello",
        "spans": [{"start": 0, "end": 5, "surface": "hello", "decision": "keep",
                   "replacement": "x", "detector": "manual"}],
    }
    p = tmp_path / "keep.jsonl"
    p.write_text(json.dumps(rec) + "\n")
    with pytest.raises(CorpusError, match="replacement"):
        read_corpus(p)


def test_delete_span_requires_empty_replacement(tmp_path):
    rec = {
        "id": "d1",
        "language": "en",
        "source": "f",
        "text": "hello",
        "spans": [{"start": 0, "end": 5, "surface": "hello", "decision": "delete",
                   "replacement": "x", "detector": "manual"}],
    }
    p = tmp_path / "del.jsonl"
    p.write_text(json.dumps(rec) + "\n")
    with pytest.raises(CorpusError, match="empty replacement"):
        read_corpus(p)


def test_synthetic_corpus_roundtrips(tmp_path):
    from redactor.synthetic import synthetic_corpus

    docs = synthetic_corpus(80, seed=2)
    p = tmp_path / "syn.jsonl"
    write_corpus(docs, p)
    assert read_corpus(p) == docs
