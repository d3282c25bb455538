"""Pseudonymization toolkit for multilingual text corpora."""

__version__ = "0.1.0"

from .corpus import (
    CallForActionLevel,
    CorpusError,
    Decision,
    Detector,
    Document,
    EntitySpan,
    NerLabel,
    PiiCategory,
    SubjectRole,
    read_corpus,
    slice_check,
    write_corpus,
)

__all__ = [
    "CallForActionLevel",
    "CorpusError",
    "Decision",
    "Detector",
    "Document",
    "EntitySpan",
    "NerLabel",
    "PiiCategory",
    "SubjectRole",
    "read_corpus",
    "slice_check",
    "write_corpus",
    "__version__",
]
