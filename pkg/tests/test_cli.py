import json
import subprocess
import sys

from redactor.cli import main
from redactor.corpus import (
    Decision,
    Document,
    EntitySpan,
    PiiCategory,
    SubjectRole,
    read_corpus,
    write_corpus,
)

from conftest import TABLE2_TEXT, build_table2_doc

S2_GOLDEN = "Hit me up username, username on Insta. Shoutout to name! At location."


def write_fixture(tmp_path, docs, name="in.jsonl"):
    path = tmp_path / name
    write_corpus(docs, path)
    return path


def test_detect_empty_corpus(tmp_path, capsys):
    src = write_fixture(tmp_path, [])
    out = tmp_path / "out.jsonl"
    assert main(["detect", "--input", str(src), "--output", str(out)]) == 0
    assert "0 spans" in capsys.readouterr().out
    assert read_corpus(out) == []


def test_detect_table2_reports_four_spans(tmp_path, capsys):
    doc = Document(id="t2", language="en", source="twitter", text=TABLE2_TEXT)
    src = write_fixture(tmp_path, [doc])
    gazetteer = tmp_path / "gazetteer.json"
    gazetteer.write_text(json.dumps({
        "PERSON_NAME": ["Moshe Chaya"],
        "ADDRESS": ["Rue Alphonse Metayer"],
    }))
    out = tmp_path / "out.jsonl"
    code = main(["detect", "--input", str(src), "--output", str(out),
                 "--gazetteer", str(gazetteer)])
    assert code == 0
    assert "4 spans" in capsys.readouterr().out
    assert len(read_corpus(out)[0].spans) == 4


def test_detect_bad_path_exits_2(tmp_path, capsys):
    assert main(["detect", "--input", str(tmp_path / "missing.jsonl"),
                 "--output", str(tmp_path / "o.jsonl")]) == 2
    assert "error" in capsys.readouterr().err


def test_detect_with_standoff(tmp_path, capsys):
    doc = Document(id="d1", language="en", source="t", text="Moshe moved.")
    src = write_fixture(tmp_path, [doc])
    standoff = tmp_path / "ner.tsv"
    standoff.write_text("d1\t0\t5\tPER\n")
    out = tmp_path / "out.jsonl"
    assert main(["detect", "--input", str(src), "--output", str(out),
                 "--standoff", str(standoff)]) == 0
    spans = read_corpus(out)[0].spans
    assert any(s.detector.value == "standoff" for s in spans)


def test_decide_empty_corpus(tmp_path):
    src = write_fixture(tmp_path, [])
    assert main(["decide", "--input", str(src), "--output", str(tmp_path / "o.jsonl")]) == 0


def test_decide_missing_rules_exits_2(tmp_path):
    src = write_fixture(tmp_path, [build_table2_doc(decided=False)])
    assert main(["decide", "--input", str(src), "--output", str(tmp_path / "o.jsonl"),
                 "--rules", str(tmp_path / "missing.rules")]) == 2


def test_decide_undecidable_span_exits_2(tmp_path, capsys):
    text = "hello world"
    doc = Document(id="d", language="en", source="t", text=text,
                   spans=(EntitySpan(0, 5, "hello"),))
    src = write_fixture(tmp_path, [doc])
    assert main(["decide", "--input", str(src), "--output", str(tmp_path / "o.jsonl")]) == 2
    assert "undecidable" in capsys.readouterr().err


def test_decide_with_roles_sidecar(tmp_path):
    src = write_fixture(tmp_path, [build_table2_doc(decided=False)])
    roles = tmp_path / "roles.tsv"
    lines = []
    for span, role in zip(build_table2_doc().spans,
                          ["PublicFigure", "PrivateIndividual", "PrivateIndividual", "PrivateIndividual"]):
        lines.append(f"t2\t{span.start}\t{span.end}\t{role}")
    roles.write_text("\n".join(lines) + "\n")
    out = tmp_path / "decided.jsonl"
    assert main(["decide", "--input", str(src), "--output", str(out), "--roles", str(roles)]) == 0
    decided = read_corpus(out)[0]
    assert decided.spans[0].decision is Decision.KEEP
    assert all(s.decision is Decision.PSEUDONYMIZE for s in decided.spans[1:])


def test_pseudonymize_s2_golden(tmp_path):
    src = write_fixture(tmp_path, [build_table2_doc(decided=True)])
    out = tmp_path / "out.jsonl"
    code = main(["pseudonymize", "--input", str(src), "--output", str(out),
                 "--strategy", "S2", "--seed", "0"])
    assert code == 0
    assert read_corpus(out)[0].text == S2_GOLDEN


def test_pseudonymize_all_keep_is_textually_identical(tmp_path):
    doc = build_table2_doc(decided=True)
    kept = doc.with_spans(
        [EntitySpan(s.start, s.end, s.surface, pii_category=s.pii_category,
                    subject_role=SubjectRole.PUBLIC_FIGURE, decision=Decision.KEEP)
         for s in doc.spans]
    )
    src = write_fixture(tmp_path, [kept])
    out = tmp_path / "out.jsonl"
    assert main(["pseudonymize", "--input", str(src), "--output", str(out),
                 "--strategy", "S2", "--seed", "0"]) == 0
    assert read_corpus(out)[0].text == kept.text


def test_pseudonymize_leak_exits_3(tmp_path, capsys):
    # the protected surface also occurs outside the span: leak by construction
    text = "ping Moshe Chaya again Moshe Chaya"
    span = EntitySpan(5, 16, "Moshe Chaya", pii_category=PiiCategory.PERSON_NAME,
                      subject_role=SubjectRole.PRIVATE_INDIVIDUAL,
                      decision=Decision.PSEUDONYMIZE)
    doc = Document(id="d", language="en", source="t", text=text, spans=(span,))
    src = write_fixture(tmp_path, [doc])
    out = tmp_path / "out.jsonl"
    code = main(["pseudonymize", "--input", str(src), "--output", str(out),
                 "--strategy", "REALISTIC", "--seed", "0",
                 "--ledger", str(tmp_path / "ledger.jsonl")])
    assert code == 3
    assert "leak" in capsys.readouterr().err
    assert not out.exists()


def test_pseudonymize_writes_ledger_and_snapshot(tmp_path):
    src = write_fixture(tmp_path, [build_table2_doc(decided=True)])
    out = tmp_path / "out.jsonl"
    ledger_path = tmp_path / "ledger.jsonl"
    snapshot = tmp_path / "snapshot.jsonl"
    assert main(["pseudonymize", "--input", str(src), "--output", str(out),
                 "--strategy", "REALISTIC", "--seed", "0",
                 "--ledger", str(ledger_path), "--snapshot", str(snapshot)]) == 0
    assert ledger_path.exists()
    snap = read_corpus(snapshot)[0]
    assert snap.text == TABLE2_TEXT
    assert all(s.replacement for s in snap.spans)


def test_pipeline_determinism_byte_identical(tmp_path):
    src = write_fixture(tmp_path, [build_table2_doc(decided=True)])
    outputs = []
    ledgers = []
    for run in ("a", "b"):
        out = tmp_path / f"out-{run}.jsonl"
        ledger_path = tmp_path / f"ledger-{run}.jsonl"
        assert main(["pseudonymize", "--input", str(src), "--output", str(out),
                     "--strategy", "REALISTIC", "--seed", "7",
                     "--ledger", str(ledger_path)]) == 0
        outputs.append(out.read_bytes())
        ledgers.append(ledger_path.read_bytes())
    assert outputs[0] == outputs[1]
    assert ledgers[0] == ledgers[1]


def test_audit_compliant_exits_0(tmp_path, capsys):
    src = write_fixture(tmp_path, [build_table2_doc(decided=True)])
    out = tmp_path / "out.jsonl"
    snapshot = tmp_path / "snap.jsonl"
    ledger_path = tmp_path / "ledger.jsonl"
    main(["pseudonymize", "--input", str(src), "--output", str(out),
          "--strategy", "REALISTIC", "--seed", "0",
          "--ledger", str(ledger_path), "--snapshot", str(snapshot)])
    report_path = tmp_path / "report.json"
    code = main(["audit", "--original", str(snapshot), "--output", str(out),
                 "--ledger", str(ledger_path), "--report", str(report_path)])
    assert code == 0
    assert "PASS" in capsys.readouterr().out
    assert json.loads(report_path.read_text())["passed"] is True


def test_audit_with_leak_exits_1(tmp_path, capsys):
    text = "ping Moshe Chaya now"
    span = EntitySpan(5, 16, "Moshe Chaya", pii_category=PiiCategory.PERSON_NAME,
                      subject_role=SubjectRole.PRIVATE_INDIVIDUAL,
                      decision=Decision.PSEUDONYMIZE, replacement="Raj Avrom")
    original = Document(id="d", language="en", source="t", text=text, spans=(span,))
    unchanged = Document(id="d", language="en", source="t", text=text)
    a = write_fixture(tmp_path, [original], "a.jsonl")
    b = write_fixture(tmp_path, [unchanged], "b.jsonl")
    report_path = tmp_path / "report.json"
    code = main(["audit", "--original", str(a), "--output", str(b),
                 "--report", str(report_path)])
    assert code == 1
    report = json.loads(report_path.read_text())
    assert report["passed"] is False
    assert report["leakage_violations"]


def test_stats_table_matches_hand_count(tmp_path, capsys):
    doc = build_table2_doc(decided=True)
    src = write_fixture(tmp_path, [doc])
    report_path = tmp_path / "stats.json"
    assert main(["stats", "--input", str(src), "--report", str(report_path)]) == 0
    out = capsys.readouterr().out
    assert "# anonymized entities" in out
    stats = json.loads(report_path.read_text())
    assert stats["total_anonymized_entities"] == 4
    assert stats["total_examples"] == 1


def test_eval_kappa_from_files(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("A\nA\nA\nB\n")
    b.write_text("A\nA\nB\nB\n")
    assert main(["eval", "--kappa-a", str(a), "--kappa-b", str(b)]) == 0
    assert "0.5000" in capsys.readouterr().out


def test_eval_requires_variants(tmp_path, capsys):
    assert main(["eval"]) == 2


def test_ledger_export_import_diff(tmp_path, capsys):
    src = write_fixture(tmp_path, [build_table2_doc(decided=True)])
    out = tmp_path / "out.jsonl"
    ledger_path = tmp_path / "ledger.jsonl"
    main(["pseudonymize", "--input", str(src), "--output", str(out),
          "--strategy", "REALISTIC", "--seed", "0", "--ledger", str(ledger_path)])
    export_path = tmp_path / "export.json"
    assert main(["ledger", "export", str(ledger_path), "--out", str(export_path)]) == 0
    entries = json.loads(export_path.read_text())
    assert len(entries) == 4
    fresh = tmp_path / "fresh-ledger.jsonl"
    assert main(["ledger", "import", str(fresh), str(export_path)]) == 0
    assert main(["ledger", "diff", str(ledger_path), str(fresh)]) == 0
    capsys.readouterr()
    other = tmp_path / "other-ledger.jsonl"
    assert main(["ledger", "import", str(other), str(export_path)]) == 0
    import redactor.ledger as ledger_mod
    lg = ledger_mod.load(other)
    lg.record("Extra Person", PiiCategory.PERSON_NAME, "Someone Else", "en")
    ledger_mod.save(lg, other)
    assert main(["ledger", "diff", str(ledger_path), str(other)]) == 1


def test_config_file_with_flag_override(tmp_path, capsys):
    src = write_fixture(tmp_path, [build_table2_doc(decided=True)])
    out_config = tmp_path / "from-config.jsonl"
    out_flag = tmp_path / "from-flag.jsonl"
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "input": str(src), "output": str(out_config), "strategy": "S1", "seed": 0,
    }))
    assert main(["pseudonymize", "--config", str(config)]) == 0
    assert out_config.exists()
    assert main(["pseudonymize", "--config", str(config), "--output", str(out_flag),
                 "--strategy", "S2"]) == 0
    assert read_corpus(out_flag)[0].text == S2_GOLDEN


def test_pools_env_var(tmp_path, monkeypatch):
    pools_dir = tmp_path / "pools" / "en"
    pools_dir.mkdir(parents=True)
    (pools_dir / "person_name.txt").write_text("Stand In\nOther Name\n")
    (pools_dir / "username.txt").write_text("@stand.in1\n@other.handle\n")
    (pools_dir / "address.txt").write_text("Rue Stand In\nRue Other Name\n")
    monkeypatch.setenv("REDACTOR_POOLS", str(tmp_path / "pools"))
    src = write_fixture(tmp_path, [build_table2_doc(decided=True)])
    out = tmp_path / "out.jsonl"
    assert main(["pseudonymize", "--input", str(src), "--output", str(out),
                 "--strategy", "REALISTIC", "--seed", "0"]) == 0
    doc = read_corpus(out)[0]
    assert {s.surface for s in doc.spans[:2]} <= {"@stand.in1", "@other.handle"}


def test_console_entry_point_help():
    result = subprocess.run(
        [sys.executable, "-m", "redactor.cli", "--help"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    for command in ("detect", "decide", "pseudonymize", "audit", "stats", "eval", "ledger", "serve"):
        assert command in result.stdout
