"""End-to-end walkthrough: detect -> decide -> pseudonymize -> audit.

Runs the whole pipeline in memory on one social-media style sentence and
prints every intermediate stage. Start here.
"""

from redactor.audit import render_report, run_audit
from redactor.corpus import Document, PiiCategory
from redactor.detect import DetectorConfig, detect_document
from redactor.ledger import Ledger
from redactor.policy import SubjectRole, decide_document
from redactor.substitute import StrategyId, plan_replacements, rewrite_document

TEXT = (
    "Hit me up @marie.delattre1, @handsomephilantropist on Insta. "
    "Shoutout to Moshe Chaya! At Rue Alphonse Metayer."
)

doc = Document(id="demo", language="en", source="twitter", text=TEXT)
print("original:")
print(" ", doc.text)

# 1. detection: regexes find the handles; a tiny gazetteer stands in for an
#    external NER system (real deployments ingest standoff annotations).
config = DetectorConfig(
    gazetteer={
        PiiCategory.PERSON_NAME: ("Moshe Chaya",),
        PiiCategory.ADDRESS: ("Rue Alphonse Metayer",),
    }
)
doc = detect_document(doc, config)
print("\ndetected spans:")
for span in doc.spans:
    print(f"  [{span.start:3d},{span.end:3d}) {span.pii_category.value:12s} {span.surface!r}")

# 2. policy: subject roles are human judgments; here everyone is a private
#    individual, so every direct identifier must be pseudonymized.
roles = {(s.start, s.end): SubjectRole.PRIVATE_INDIVIDUAL for s in doc.spans}
doc = decide_document(doc, roles)
print("\ndecisions:")
for span in doc.spans:
    print(f"  {span.surface!r} -> {span.decision.value}")

# 3. substitution: realistic pseudonyms, recorded in the correspondence
#    ledger that is stored separately from the corpus.
ledger = Ledger()
planned = plan_replacements(doc, StrategyId.REALISTIC, ledger=ledger, seed=0)
output = rewrite_document(planned)
print("\npseudonymized:")
print(" ", output.text)
print("\nledger entries (kept apart from the corpus):")
for entry in ledger.entries():
    print(f"  {entry.original_surface!r} -> {entry.replacement!r} [{entry.pii_category.value}]")

# 4. audit: prove no protected surface survived.
report = run_audit([planned], [output], ledger)
print()
print(render_report(report))
assert report.passed
