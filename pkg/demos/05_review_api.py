"""Scripted tour of the review service HTTP API.

Spins the service up in-process (no network) and performs a full review:
checkout under a lease, role patches with live decision recomputation,
a replacement override that lands in the ledger, strategy previews, and a
commit that persists atomically. Run `redactor serve` for the real thing.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from redactor.corpus import Document, EntitySpan, PiiCategory, read_corpus, write_corpus
from redactor.service import ReviewService, create_app

TEXT = "Join @cinder_fox99 and PM Alden Marsh at https://t.me/cinderfox tonight"
ENTITIES = [
    ("@cinder_fox99", PiiCategory.USERNAME),
    ("Alden Marsh", PiiCategory.PERSON_NAME),
    ("https://t.me/cinderfox", PiiCategory.URL),
]
spans = []
for surface, category in ENTITIES:
    start = TEXT.index(surface)
    spans.append(EntitySpan(start, start + len(surface), surface, pii_category=category))

workdir = Path(tempfile.mkdtemp(prefix="redactor-demo-"))
corpus_path = workdir / "working.jsonl"
doc = Document(id="post-1", language="en", source="telegram", text=TEXT, spans=tuple(spans))
write_corpus([doc], corpus_path)

service = ReviewService(corpus_path=corpus_path, ledger_path=workdir / "ledger.jsonl",
                        lease_seconds=900)
client = TestClient(create_app(service))
anna = {"X-Reviewer": "anna"}

print("document queue:", client.get("/docs").json())

body = client.post("/docs/post-1/checkout", headers=anna).json()
print("\nchecked out with generator suggestions:", body["suggestions"])

# a second reviewer bounces off the lease
print("second checkout status:", client.post(
    "/docs/post-1/checkout", headers={"X-Reviewer": "ben"}).status_code)

# live previews are computed server-side
for strategy in ("S2", "REALISTIC"):
    preview = client.get("/docs/post-1/preview", params={"strategy": strategy}).json()
    print(f"preview {strategy:9s}:", preview["text"])

# the reviewer assigns roles; decisions recompute from the rulebook
for span, role in zip(body["doc"]["spans"],
                      ["RadicalOrgAccount", "PublicFigure", "RadicalOrgAccount"]):
    r = client.patch("/docs/post-1/spans", headers=anna, json={
        "start": span["start"], "end": span["end"], "subject_role": role})
    updated = r.json()["span"]
    print(f"{updated['surface']!r}: role={role} -> decision={updated['decision']}")

# a handcrafted handle override, recorded against the ledger
r = client.patch("/docs/post-1/spans", headers=anna, json={
    "start": 5, "end": 18, "subject_role": "RadicalOrgAccount",
    "replacement": "@ash_fox_main", "note": "keep the fox hint"})
print("override accepted:", r.json()["span"]["replacement"])

print("commit:", client.post("/docs/post-1/commit", headers=anna).json())
committed = read_corpus(corpus_path)[0]
print("persisted decisions:", [(s.surface, s.decision.value) for s in committed.spans])
print("audit trail:", [e["action"] for e in client.get("/audit/post-1").json()["events"]])
