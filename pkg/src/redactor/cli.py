"""Command-line entry point: one subcommand per pipeline stage.

The pipeline is staged via files (detect -> decide -> pseudonymize) so the
human review step can happen in the middle. Exit codes: 0 ok, 1 violations
found, 2 usage or I/O errors, 3 leakage detected.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .audit import render_report, render_stats_table, run_audit, entity_stats
from .corpus import CorpusError, PiiCategory, read_corpus, write_corpus
from .detect import DetectorConfig, PatternKind, detect_document, ingest_standoff, read_standoff
from .evaluate import (
    EvalError,
    cohens_kappa,
    make_split,
    render_testing_table,
    render_training_table,
    variant_grid,
)
from .ledger import (
    Ledger,
    LedgerError,
    diff as ledger_diff,
    load as ledger_load,
    save as ledger_save,
)
from .policy import PolicyError, decide_corpus, default_ruleset, load_roles_sidecar, load_rules
from .substitute import (
    PseudonymConstraints,
    StrategyId,
    SubstituteError,
    apply_corpus,
    builtin_pools,
    load_pools,
)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_LEAKAGE = 3

POOLS_ENV = "REDACTOR_POOLS"


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise CorpusError("config file must hold a JSON object")
    return config


def _setting(args: argparse.Namespace, config: dict, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get(name, default)


def _detector_config(args, config) -> DetectorConfig:
    enabled_names = _setting(args, config, "detectors")
    if enabled_names:
        if isinstance(enabled_names, str):
            enabled_names = enabled_names.split(",")
        enabled = frozenset(PatternKind(name.strip()) for name in enabled_names)
    else:
        enabled = frozenset(PatternKind)
    gazetteer = {}
    gazetteer_path = _setting(args, config, "gazetteer")
    if gazetteer_path:
        with open(gazetteer_path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        gazetteer = {PiiCategory(k): tuple(v) for k, v in raw.items()}
    return DetectorConfig(enabled=enabled, gazetteer=gazetteer)


def _resolve_pools(args, config):
    pools_dir = _setting(args, config, "pools") or os.environ.get(POOLS_ENV)
    return load_pools(pools_dir) if pools_dir else builtin_pools()


def _ruleset(args, config):
    rules_path = _setting(args, config, "rules")
    return load_rules(rules_path) if rules_path else default_ruleset()


def cmd_detect(args) -> int:
    config = _load_config(args.config)
    docs = read_corpus(_setting(args, config, "input"))
    detector_config = _detector_config(args, config)
    standoff_path = _setting(args, config, "standoff")
    if standoff_path:
        docs, diagnostics = ingest_standoff(docs, read_standoff(standoff_path))
        for line in diagnostics:
            print(line, file=sys.stderr)
    detected = [detect_document(d, detector_config) for d in docs]
    write_corpus(detected, _setting(args, config, "output"))
    total = sum(len(d.spans) for d in detected)
    print(f"{total} spans across {len(detected)} documents")
    return EXIT_OK


def cmd_decide(args) -> int:
    config = _load_config(args.config)
    docs = read_corpus(_setting(args, config, "input"))
    rules = _ruleset(args, config)
    roles_path = _setting(args, config, "roles")
    roles = load_roles_sidecar(roles_path) if roles_path else {}
    decided = decide_corpus(docs, roles, rules)
    write_corpus(decided, _setting(args, config, "output"))
    undecided_roles = sum(
        1 for d in decided for s in d.spans if s.subject_role is not None and s.subject_role.value == "Unassigned"
    )
    total = sum(len(d.spans) for d in decided)
    print(f"decided {total} spans across {len(decided)} documents ({undecided_roles} with Unassigned role)")
    return EXIT_OK


def cmd_pseudonymize(args) -> int:
    config = _load_config(args.config)
    docs = read_corpus(_setting(args, config, "input"))
    strategy = StrategyId(_setting(args, config, "strategy", "REALISTIC"))
    seed = int(_setting(args, config, "seed", 0))
    ledger_path = _setting(args, config, "ledger")
    ledger = Ledger()
    if ledger_path and Path(ledger_path).exists():
        ledger = ledger_load(ledger_path)
    constraints = PseudonymConstraints(name_pools=_resolve_pools(args, config))
    planned, outputs = apply_corpus(docs, strategy, ledger=ledger, constraints=constraints, seed=seed)
    from .audit import leakage_scan

    violations = leakage_scan(planned, outputs, ledger if strategy is StrategyId.REALISTIC else None)
    if violations:
        for v in violations[:50]:
            print(f"leak: {v.doc_id}: {v.surface!r}", file=sys.stderr)
        print(f"{len(violations)} leakage violations; output not written", file=sys.stderr)
        return EXIT_LEAKAGE
    write_corpus(outputs, _setting(args, config, "output"))
    snapshot_path = _setting(args, config, "snapshot")
    if snapshot_path:
        write_corpus(planned, snapshot_path)
    if ledger_path:
        ledger_save(ledger, ledger_path)
    replaced = sum(1 for d in planned for s in d.spans if s.replacement)
    print(f"{strategy.value}: rewrote {len(outputs)} documents, {replaced} replacements, ledger v{ledger.version}")
    return EXIT_OK


def cmd_audit(args) -> int:
    config = _load_config(args.config)
    original = read_corpus(_setting(args, config, "original"))
    output = read_corpus(_setting(args, config, "output"))
    ledger_path = _setting(args, config, "ledger")
    ledger = ledger_load(ledger_path) if ledger_path and Path(ledger_path).exists() else None
    report = run_audit(original, output, ledger)
    print(render_report(report))
    report_path = _setting(args, config, "report")
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, ensure_ascii=False, indent=1)
            fh.write("\n")
    return EXIT_OK if report.passed else EXIT_VIOLATIONS


def cmd_stats(args) -> int:
    config = _load_config(args.config)
    docs = read_corpus(_setting(args, config, "input"))
    stats = entity_stats(docs)
    print(render_stats_table(stats))
    report_path = _setting(args, config, "report")
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(stats.to_dict(), fh, ensure_ascii=False, indent=1)
            fh.write("\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    config = _load_config(args.config)
    if args.kappa_a or args.kappa_b:
        if not (args.kappa_a and args.kappa_b):
            print("error: --kappa-a and --kappa-b must be given together", file=sys.stderr)
            return EXIT_USAGE
        ann_a = Path(args.kappa_a).read_text("utf-8").split()
        ann_b = Path(args.kappa_b).read_text("utf-8").split()
        print(f"cohens_kappa: {cohens_kappa(ann_a, ann_b):.4f}")
        return EXIT_OK
    variant_args = args.variant or config.get("variants") or []
    if isinstance(variant_args, dict):
        variant_args = [f"{k}={v}" for k, v in variant_args.items()]
    if not variant_args:
        print("error: no --variant NAME=PATH given", file=sys.stderr)
        return EXIT_USAGE
    variants = {}
    for spec_str in variant_args:
        name, _, path = spec_str.partition("=")
        if not path:
            print(f"error: bad variant spec {spec_str!r}, expected NAME=PATH", file=sys.stderr)
            return EXIT_USAGE
        variants[name] = make_split(read_corpus(path))
    seeds_raw = _setting(args, config, "seeds", "0,1,2,3,4")
    seeds = [int(s) for s in str(seeds_raw).split(",") if s != ""]
    report = variant_grid(variants, seeds)
    print(render_training_table(report))
    print()
    print(render_testing_table(report))
    report_path = _setting(args, config, "report")
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, ensure_ascii=False, indent=1)
            fh.write("\n")
    return EXIT_OK


def cmd_ledger(args) -> int:
    if args.ledger_command == "export":
        ledger = ledger_load(args.path)
        payload = [e.to_dict() for e in ledger.entries()]
        text = json.dumps(payload, ensure_ascii=False, indent=1) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if args.ledger_command == "import":
        from .ledger import LedgerEntry

        target = ledger_load(args.path) if Path(args.path).exists() else Ledger()
        entries = json.loads(Path(args.source).read_text("utf-8"))
        for obj in entries:
            entry = LedgerEntry.from_dict(obj)
            for language in entry.languages:
                target.record(
                    entry.original_surface, entry.pii_category, entry.replacement,
                    language, entry.created_by, entry.note,
                )
        ledger_save(target, args.path)
        print(f"imported {len(entries)} entries; ledger v{target.version}")
        return EXIT_OK
    if args.ledger_command == "diff":
        result = ledger_diff(ledger_load(args.path), ledger_load(args.other))
        print(json.dumps(result, ensure_ascii=False, indent=1))
        different = any(result.values())
        return EXIT_VIOLATIONS if different else EXIT_OK
    print("error: unknown ledger subcommand", file=sys.stderr)
    return EXIT_USAGE


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ReviewService, create_app

    config = _load_config(args.config)
    service = ReviewService(
        corpus_path=_setting(args, config, "input"),
        ledger_path=_setting(args, config, "ledger"),
        rules=_ruleset(args, config),
        pools=_resolve_pools(args, config),
        seed=int(_setting(args, config, "seed", 0)),
        lease_seconds=float(_setting(args, config, "lease_seconds", 900)),
        ui_dir=_setting(args, config, "ui"),
    )
    app = create_app(service)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="redactor",
        description="Pseudonymize multilingual text corpora: detect spans, decide policy, "
        "substitute, audit, evaluate, and review.",
    )
    parser.add_argument("--version", action="version", version=f"redactor {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override its keys")

    p = sub.add_parser("detect", help="detect candidate spans (regex, gazetteer, standoff)")
    common(p)
    p.add_argument("--input", help="input corpus (JSONL)")
    p.add_argument("--output", help="output corpus (JSONL)")
    p.add_argument("--detectors", help="comma list of pattern kinds (default: all)")
    p.add_argument("--gazetteer", help="JSON file: category -> list of surfaces")
    p.add_argument("--standoff", help="standoff TSV with external NER annotations")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("decide", help="apply the policy rulebook to every span")
    common(p)
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--rules", help="rules file (default: shipped rulebook)")
    p.add_argument("--roles", help="roles sidecar TSV (doc_id, start, end, role)")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("pseudonymize", help="rewrite the corpus under a strategy")
    common(p)
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--strategy", choices=[s.value for s in StrategyId])
    p.add_argument("--seed", type=int)
    p.add_argument("--ledger", help="correspondence ledger file (read and updated)")
    p.add_argument("--pools", help=f"name pool directory (or ${POOLS_ENV})")
    p.add_argument("--snapshot", help="also write the pre-transform snapshot corpus")
    p.set_defaults(func=cmd_pseudonymize)

    p = sub.add_parser("audit", help="leakage/consistency/quasi-id scans + stats")
    common(p)
    p.add_argument("--original", help="pre-transform (decided) corpus")
    p.add_argument("--output", help="transformed corpus")
    p.add_argument("--ledger")
    p.add_argument("--report", help="write machine-readable JSON report here")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("stats", help="corpus statistics table")
    common(p)
    p.add_argument("--input")
    p.add_argument("--report")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", help="utility grid over strategy variants; Cohen's kappa")
    common(p)
    p.add_argument("--variant", action="append", metavar="NAME=PATH",
                   help="labelled corpus variant (repeatable; include Original)")
    p.add_argument("--seeds", help="comma list of training seeds (default 0,1,2,3,4)")
    p.add_argument("--report")
    p.add_argument("--kappa-a", help="first annotator labels, one per line")
    p.add_argument("--kappa-b", help="second annotator labels, one per line")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ledger", help="ledger export/import/diff")
    ledger_sub = p.add_subparsers(dest="ledger_command", required=True)
    pe = ledger_sub.add_parser("export")
    pe.add_argument("path")
    pe.add_argument("--out")
    pi = ledger_sub.add_parser("import")
    pi.add_argument("path", help="ledger file to merge into")
    pi.add_argument("source", help="exported JSON entries")
    pd = ledger_sub.add_parser("diff")
    pd.add_argument("path")
    pd.add_argument("other")
    p.set_defaults(func=cmd_ledger)

    p = sub.add_parser("serve", help="start the review service")
    common(p)
    p.add_argument("--input", help="working corpus file (persisted on commit)")
    p.add_argument("--ledger")
    p.add_argument("--rules")
    p.add_argument("--pools")
    p.add_argument("--seed", type=int)
    p.add_argument("--lease-seconds", dest="lease_seconds", type=float)
    p.add_argument("--ui", help="static UI bundle directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CorpusError, PolicyError, SubstituteError, LedgerError, EvalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TypeError as exc:
        # a missing required setting surfaces as open(None)
        print(f"error: missing required path setting ({exc})", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
