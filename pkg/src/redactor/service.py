"""HTTP review service: the human-in-the-loop step of the pipeline.

Reviewers check documents out under expiring leases (one reviewer per
document at a time), patch span roles/decisions/replacements, preview the
transformed text per strategy, and commit. Every action is appended to an
audit log; committed state is persisted atomically so a restart loses
nothing. Reviewer identity is the X-Reviewer header; deployments front the
service with their own auth.
"""

from __future__ import annotations

import copy
import dataclasses
import json
import os
import tempfile
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Header, HTTPException, Query, Request
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from .corpus import (
    Decision,
    Document,
    EntitySpan,
    PiiCategory,
    SubjectRole,
    document_to_dict,
    read_corpus,
    span_to_dict,
    write_corpus,
)
from .audit import quasi_id_report
from .ledger import (
    CreatedBy,
    Ledger,
    LedgerConflictError,
    LedgerError,
    LedgerInjectivityError,
    load as ledger_load,
    save as ledger_save,
)
from .policy import RuleSet, decide, default_ruleset
from .substitute import (
    PseudonymConstraints,
    StrategyId,
    SubstituteError,
    apply_strategy,
    builtin_pools,
    plan_replacements,
)

DEFAULT_LEASE_SECONDS = 900.0


class ReviewService:
    """Working corpus + ledger + leases behind one mutation lock."""

    def __init__(
        self,
        corpus_path: str | Path,
        ledger_path: str | Path | None = None,
        rules: RuleSet | None = None,
        pools: dict | None = None,
        seed: int = 0,
        lease_seconds: float = DEFAULT_LEASE_SECONDS,
        ui_dir: str | Path | None = None,
    ):
        self.corpus_path = Path(corpus_path)
        self.ledger_path = Path(ledger_path) if ledger_path else None
        self.rules = rules or default_ruleset()
        self.constraints = PseudonymConstraints(name_pools=pools or builtin_pools())
        self.seed = seed
        self.lease_seconds = lease_seconds
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self.lock = threading.Lock()
        docs = read_corpus(self.corpus_path)
        self.order = [d.id for d in docs]
        self.docs: dict[str, Document] = {d.id: d for d in docs}
        self.ledger = Ledger()
        if self.ledger_path and self.ledger_path.exists():
            self.ledger = ledger_load(self.ledger_path)
        self.leases: dict[str, tuple[str, float]] = {}
        self.audit_path = Path(str(self.corpus_path) + ".audit.jsonl")
        self.seq = self._last_seq() + 1

    # --- audit log ---------------------------------------------------------

    def _last_seq(self) -> int:
        if not self.audit_path.exists():
            return 0
        last = 0
        for line in self.audit_path.read_text("utf-8").splitlines():
            if line.strip():
                last = json.loads(line).get("seq", last)
        return last

    def log_action(self, reviewer: str, action: str, doc_id: str, payload: dict) -> None:
        event = {
            "seq": self.seq,
            "ts": time.time(),
            "reviewer": reviewer,
            "action": action,
            "doc_id": doc_id,
            "payload": payload,
        }
        self.seq += 1
        with open(self.audit_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False))
            fh.write("\n")

    def audit_events(self, doc_id: str) -> list[dict]:
        if not self.audit_path.exists():
            return []
        events = []
        for line in self.audit_path.read_text("utf-8").splitlines():
            if line.strip():
                event = json.loads(line)
                if event.get("doc_id") == doc_id:
                    events.append(event)
        return events

    # --- leases --------------------------------------------------------------

    def lease_holder(self, doc_id: str) -> str | None:
        lease = self.leases.get(doc_id)
        if lease is None or lease[1] <= time.time():
            return None
        return lease[0]

    def grant_lease(self, doc_id: str, reviewer: str) -> float:
        expires = time.time() + self.lease_seconds
        self.leases[doc_id] = (reviewer, expires)
        return expires

    def require_lease(self, doc_id: str, reviewer: str) -> None:
        holder = self.lease_holder(doc_id)
        if holder != reviewer:
            raise HTTPException(
                status_code=403,
                detail={"error": "no valid lease", "doc_id": doc_id, "holder": holder},
            )

    # --- state ---------------------------------------------------------------

    def undecided_spans(self, doc: Document) -> list[EntitySpan]:
        return [
            s
            for s in doc.spans
            if s.decision is None or s.subject_role in (None, SubjectRole.UNASSIGNED)
        ]

    def persist(self) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.corpus_path.parent, prefix=self.corpus_path.name, suffix=".tmp")
        os.close(fd)
        write_corpus([self.docs[i] for i in self.order], tmp)
        os.replace(tmp, self.corpus_path)
        if self.ledger_path:
            ledger_save(self.ledger, self.ledger_path)

    def suggestion_for(self, span: EntitySpan, language: str) -> str | None:
        if span.pii_category is None or span.pii_category is PiiCategory.URL:
            return None
        try:
            return realistic_preview(
                span.surface, span.pii_category, self.constraints, self.ledger, self.seed, language
            )
        except SubstituteError:
            return None


def realistic_preview(surface, category, constraints, ledger, seed, language):
    from .substitute import realistic_pseudonym

    return realistic_pseudonym(
        surface, category, constraints, ledger, seed, language=language, record=False
    )


def _doc_summary(service: ReviewService, doc: Document) -> dict:
    undecided = len(service.undecided_spans(doc))
    return {
        "id": doc.id,
        "language": doc.language,
        "source": doc.source,
        "spans": len(doc.spans),
        "undecided_spans": undecided,
        "status": "done" if undecided == 0 else "pending",
        "committed": doc.meta.get("review_status") == "committed",
        "leased_by": service.lease_holder(doc.id),
    }


def create_app(service: ReviewService) -> FastAPI:
    # the API contract owns GET /docs; move FastAPI's own docs out of the way
    app = FastAPI(title="redactor review service", version="0.1.0",
                  docs_url=None, redoc_url=None)

    def get_doc(doc_id: str) -> Document:
        doc = service.docs.get(doc_id)
        if doc is None:
            raise HTTPException(status_code=404, detail={"error": f"unknown document {doc_id!r}"})
        return doc

    @app.get("/docs")
    def list_docs(language: str | None = None, status: str | None = None):
        out = []
        for doc_id in sorted(service.order):
            doc = service.docs[doc_id]
            if language and doc.language != language:
                continue
            summary = _doc_summary(service, doc)
            if status and summary["status"] != status:
                continue
            out.append(summary)
        return out

    @app.post("/docs/{doc_id}/checkout")
    def checkout(doc_id: str, x_reviewer: str = Header(default="")):
        reviewer = _require_reviewer(x_reviewer)
        with service.lock:
            doc = get_doc(doc_id)
            holder = service.lease_holder(doc_id)
            if holder is not None and holder != reviewer:
                raise HTTPException(
                    status_code=409,
                    detail={"error": "document is leased", "holder": holder},
                )
            expires = service.grant_lease(doc_id, reviewer)
            suggestions = {}
            for span in doc.spans:
                if span.decision in (None, Decision.PSEUDONYMIZE) and span.replacement is None:
                    suggestion = service.suggestion_for(span, doc.language)
                    if suggestion:
                        suggestions[f"{span.start}-{span.end}"] = suggestion
            service.log_action(reviewer, "checkout", doc_id, {})
            return {
                "doc": document_to_dict(doc),
                "lease_expires": expires,
                "suggestions": suggestions,
            }

    @app.patch("/docs/{doc_id}/spans")
    async def patch_span(doc_id: str, request: Request, x_reviewer: str = Header(default="")):
        reviewer = _require_reviewer(x_reviewer)
        patch = await request.json()
        with service.lock:
            doc = get_doc(doc_id)
            service.require_lease(doc_id, reviewer)
            updated_doc, updated_span = _apply_patch(service, doc, patch, reviewer)
            service.docs[doc_id] = updated_doc
            service.log_action(reviewer, "patch", doc_id, patch)
            warnings = [f.to_dict() for f in quasi_id_report([updated_doc])]
            return {"span": span_to_dict(updated_span), "warnings": warnings}

    @app.post("/docs/{doc_id}/commit")
    def commit(doc_id: str, x_reviewer: str = Header(default="")):
        reviewer = _require_reviewer(x_reviewer)
        with service.lock:
            doc = get_doc(doc_id)
            already = doc.meta.get("review_status") == "committed"
            holder = service.lease_holder(doc_id)
            if holder != reviewer and not already:
                raise HTTPException(
                    status_code=403,
                    detail={"error": "no valid lease", "holder": holder},
                )
            undecided = service.undecided_spans(doc)
            if undecided:
                raise HTTPException(
                    status_code=400,
                    detail={
                        "error": "undecided spans remain",
                        "spans": [
                            {"start": s.start, "end": s.end, "surface": s.surface}
                            for s in undecided
                        ],
                    },
                )
            meta = {**doc.meta, "review_status": "committed"}
            service.docs[doc_id] = dataclasses.replace(doc, meta=meta)
            service.persist()
            service.leases.pop(doc_id, None)
            service.log_action(reviewer, "commit", doc_id, {})
            return {"status": "committed", "doc_id": doc_id}

    @app.get("/audit/{doc_id}")
    def audit_log(doc_id: str):
        get_doc(doc_id)
        return {"doc_id": doc_id, "events": service.audit_events(doc_id)}

    @app.get("/ledger/suggest")
    def ledger_suggest(surface: str = Query(...), category: str = Query(...),
                       language: str = Query(default="en")):
        try:
            pii_category = PiiCategory(category)
        except ValueError:
            raise HTTPException(status_code=400, detail={"error": f"unknown category {category!r}"})
        existing = service.ledger.lookup(surface, pii_category)
        if existing is not None:
            return {"surface": surface, "replacement": existing, "existing": True}
        if pii_category is PiiCategory.URL:
            raise HTTPException(
                status_code=400, detail={"error": "URLs are invalidated, not pseudonymized"}
            )
        try:
            suggestion = realistic_preview(
                surface, pii_category, service.constraints, service.ledger, service.seed, language
            )
        except SubstituteError as exc:
            raise HTTPException(status_code=422, detail={"error": str(exc)})
        return {"surface": surface, "replacement": suggestion, "existing": False}

    @app.get("/docs/{doc_id}/preview")
    def preview(doc_id: str, strategy: str = Query(default="S2")):
        doc = get_doc(doc_id)
        try:
            strategy_id = StrategyId(strategy)
        except ValueError:
            raise HTTPException(status_code=400, detail={"error": f"unknown strategy {strategy!r}"})
        with service.lock:
            working = _with_provisional_decisions(service, doc)
            preview_ledger = copy.deepcopy(service.ledger)
            try:
                planned = plan_replacements(
                    working, strategy_id, ledger=preview_ledger,
                    constraints=service.constraints, seed=service.seed,
                )
                from .substitute import rewrite_document

                transformed = rewrite_document(planned)
            except SubstituteError as exc:
                raise HTTPException(status_code=422, detail={"error": str(exc)})
        return {
            "doc_id": doc_id,
            "strategy": strategy_id.value,
            "text": transformed.text,
            "spans": [span_to_dict(s) for s in transformed.spans],
        }

    if service.ui_dir and service.ui_dir.exists():
        app.mount("/", StaticFiles(directory=service.ui_dir, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return (
                "<html><body><h1>redactor review service</h1>"
                "<p>No UI bundle configured; the JSON API is live under /docs, "
                "/docs/{id}/checkout, /docs/{id}/spans, /docs/{id}/commit, "
                "/audit/{id}, /ledger/suggest.</p></body></html>"
            )

    return app


def _require_reviewer(header_value: str) -> str:
    if not header_value:
        raise HTTPException(status_code=400, detail={"error": "X-Reviewer header required"})
    return header_value


def _with_provisional_decisions(service: ReviewService, doc: Document) -> Document:
    spans = []
    for span in doc.spans:
        if span.decision is None and span.pii_category is not None:
            role = span.subject_role or SubjectRole.UNASSIGNED
            provisional = decide(span, role, service.rules)
            replacement = "" if provisional is Decision.DELETE else None
            spans.append(dataclasses.replace(span, decision=provisional, replacement=replacement))
        else:
            spans.append(span)
    return doc.with_spans(spans)


def _apply_patch(
    service: ReviewService, doc: Document, patch: dict, reviewer: str
) -> tuple[Document, EntitySpan]:
    try:
        start, end = int(patch["start"]), int(patch["end"])
    except (KeyError, TypeError, ValueError):
        raise HTTPException(status_code=400, detail={"error": "patch needs integer start/end"})
    target = next((s for s in doc.spans if s.start == start and s.end == end), None)
    if target is None:
        raise HTTPException(
            status_code=404, detail={"error": f"no span [{start},{end}) on {doc.id}"}
        )
    updates: dict = {}
    if "pii_category" in patch:
        updates["pii_category"] = _parse(PiiCategory, patch["pii_category"], "pii_category")
    if "subject_role" in patch:
        updates["subject_role"] = _parse(SubjectRole, patch["subject_role"], "subject_role")
    if "decision" in patch:
        updates["decision"] = _parse(Decision, patch["decision"], "decision")
    span = dataclasses.replace(target, **updates)
    if ("subject_role" in patch or "pii_category" in patch) and "decision" not in patch:
        if span.pii_category is not None and span.subject_role is not None:
            updates["decision"] = decide(span, span.subject_role, service.rules)
            span = dataclasses.replace(span, decision=updates["decision"])
    if span.decision is Decision.KEEP:
        span = dataclasses.replace(span, replacement=None)
    elif span.decision is Decision.DELETE:
        span = dataclasses.replace(span, replacement="")
    if patch.get("replacement"):
        replacement = patch["replacement"]
        if span.decision not in (Decision.PSEUDONYMIZE, Decision.INVALIDATE):
            raise HTTPException(
                status_code=400,
                detail={"error": "replacement override requires a pseudonymize/invalidate decision"},
            )
        if span.pii_category is None:
            raise HTTPException(status_code=400, detail={"error": "span has no category"})
        try:
            service.ledger.record(
                span.surface, span.pii_category, replacement, doc.language,
                created_by=CreatedBy.REVIEWER, note=patch.get("note"),
            )
        except (LedgerConflictError, LedgerInjectivityError) as exc:
            raise HTTPException(
                status_code=409,
                detail={"error": str(exc), "existing": exc.existing.to_dict()},
            )
        except LedgerError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)})
        span = dataclasses.replace(span, replacement=replacement)
    new_spans = [span if (s.start, s.end) == (start, end) else s for s in doc.spans]
    return doc.with_spans(new_spans), span


def _parse(enum_cls, value, field_name):
    if value is None:
        return None
    try:
        return enum_cls(value)
    except ValueError:
        raise HTTPException(
            status_code=400, detail={"error": f"unknown {field_name} {value!r}"}
        )


def replay_audit_log(initial_corpus_path: str | Path, audit_path: str | Path,
                     rules: RuleSet | None = None) -> dict[str, Document]:
    """Re-apply the audit log to the initial corpus; returns final doc state.

    Used to verify that the log is a faithful record of review actions.
    """
    docs = {d.id: d for d in read_corpus(initial_corpus_path)}
    rules = rules or default_ruleset()
    shadow = ReviewService.__new__(ReviewService)
    shadow.rules = rules
    shadow.ledger = Ledger()
    events = []
    audit_path = Path(audit_path)
    if audit_path.exists():
        for line in audit_path.read_text("utf-8").splitlines():
            if line.strip():
                events.append(json.loads(line))
    for event in sorted(events, key=lambda e: e["seq"]):
        doc = docs.get(event["doc_id"])
        if doc is None:
            continue
        if event["action"] == "patch":
            try:
                updated, _ = _apply_patch(shadow, doc, event["payload"], event["reviewer"])
                docs[event["doc_id"]] = updated
            except HTTPException:
                continue
        elif event["action"] == "commit":
            docs[event["doc_id"]] = dataclasses.replace(
                doc, meta={**doc.meta, "review_status": "committed"}
            )
    return docs
