import pytest

from redactor.corpus import Decision, Document, EntitySpan, PiiCategory, SubjectRole

TABLE2_TEXT = (
    "Hit me up @marie.delattre1, @handsomephilantropist on Insta. "
    "Shoutout to Moshe Chaya! At Rue Alphonse Metayer."
)

TABLE2_ENTITIES = [
    ("@marie.delattre1", PiiCategory.USERNAME),
    ("@handsomephilantropist", PiiCategory.USERNAME),
    ("Moshe Chaya", PiiCategory.PERSON_NAME),
    ("Rue Alphonse Metayer", PiiCategory.ADDRESS),
]


def build_table2_doc(decided=True):
    spans = []
    for surface, category in TABLE2_ENTITIES:
        start = TABLE2_TEXT.index(surface)
        spans.append(
            EntitySpan(
                start,
                start + len(surface),
                surface,
                pii_category=category,
                subject_role=SubjectRole.PRIVATE_INDIVIDUAL if decided else None,
                decision=Decision.PSEUDONYMIZE if decided else None,
            )
        )
    return Document(
        id="t2", language="en", source="twitter", text=TABLE2_TEXT, spans=tuple(spans)
    )


@pytest.fixture
def table2_doc():
    return build_table2_doc(decided=True)


@pytest.fixture
def table2_undecided():
    return build_table2_doc(decided=False)
