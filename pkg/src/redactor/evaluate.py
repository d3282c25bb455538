"""Desk-scale privacy-utility evaluation and inter-annotator agreement.

The classifier is a deterministic hashed bag-of-tokens multinomial
logistic regression trained with seeded-order SGD: a stand-in that runs in
seconds while exercising the same train/test grid as a fine-tuned model.
Absolute scores are not comparable to any transformer results.
"""

from __future__ import annotations

import re
import zlib
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import Document

DEFAULT_DIM = 4096
DEFAULT_EPOCHS = 20
DEFAULT_LR = 0.5
DEFAULT_L2 = 1e-4

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


class EvalError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _hash_features(text: str, dim: int) -> np.ndarray:
    x = np.zeros(dim + 1)
    for token in tokenize(text):
        x[zlib.crc32(token.encode("utf-8")) % dim] += 1.0
    norm = np.linalg.norm(x)
    if norm > 0:
        x /= norm
    x[dim] = 1.0  # bias
    return x


@dataclass(frozen=True)
class Classifier:
    weights: np.ndarray  # (classes, dim + 1)
    classes: tuple[str, ...]
    dim: int

    def predict(self, docs: Sequence[Document]) -> list[str]:
        return [self.predict_text(d.text) for d in docs]

    def predict_text(self, text: str) -> str:
        scores = self.weights @ _hash_features(text, self.dim)
        return self.classes[int(np.argmax(scores))]

    def weight_digest(self) -> str:
        return str(zlib.crc32(self.weights.tobytes()))


def _labels(docs: Sequence[Document], context: str) -> list[str]:
    labels = []
    for doc in docs:
        if doc.cfa_label is None:
            raise EvalError(f"{context}: document {doc.id} has no cfa_label")
        labels.append(doc.cfa_label.value)
    return labels


def train_classifier(
    train: Sequence[Document],
    seed: int,
    dim: int = DEFAULT_DIM,
    epochs: int = DEFAULT_EPOCHS,
    lr: float = DEFAULT_LR,
    l2: float = DEFAULT_L2,
) -> Classifier:
    """Train the proxy classifier; only the sample order depends on the seed.

    Documents are canonically ordered by id before the seeded shuffle so the
    result is independent of input order.
    """
    if not train:
        raise EvalError("empty training set")
    ordered = sorted(train, key=lambda d: d.id)
    labels = _labels(ordered, "train")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise EvalError(f"training set has a single class: {classes[0] if classes else 'none'}")
    class_index = {c: i for i, c in enumerate(classes)}
    features = np.stack([_hash_features(d.text, dim) for d in ordered])
    targets = np.array([class_index[label] for label in labels])
    rng = np.random.default_rng(seed)
    weights = np.zeros((len(classes), dim + 1))
    order = np.arange(len(ordered))
    for epoch in range(epochs):
        rng.shuffle(order)
        step = lr / (1.0 + 0.2 * epoch)
        for i in order:
            x = features[i]
            logits = weights @ x
            logits -= logits.max()
            p = np.exp(logits)
            p /= p.sum()
            p[targets[i]] -= 1.0
            weights -= step * (np.outer(p, x) + l2 * weights)
    return Classifier(weights=weights, classes=classes, dim=dim)


def macro_f1_labels(gold: Sequence[str], predicted: Sequence[str]) -> float:
    """Unweighted mean of per-class F1; classes absent from both gold and
    predictions are excluded from the average."""
    if len(gold) != len(predicted):
        raise EvalError(f"label lists differ in length: {len(gold)} != {len(predicted)}")
    if not gold:
        raise EvalError("empty test set")
    classes = sorted(set(gold) | set(predicted))
    f1s = []
    for c in classes:
        tp = sum(1 for g, p in zip(gold, predicted) if g == c and p == c)
        fp = sum(1 for g, p in zip(gold, predicted) if g != c and p == c)
        fn = sum(1 for g, p in zip(gold, predicted) if g == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * precision * recall / (precision + recall) if precision + recall else 0.0)
    return sum(f1s) / len(f1s)


def macro_f1(model: Classifier, test: Sequence[Document]) -> float:
    if not test:
        raise EvalError("empty test set")
    gold = _labels(test, "test")
    return macro_f1_labels(gold, model.predict(test))


def cohens_kappa(ann_a: Sequence, ann_b: Sequence) -> float:
    """(p_o - p_e) / (1 - p_e) with marginal-product chance agreement."""
    if len(ann_a) != len(ann_b):
        raise EvalError(f"annotation lists differ in length: {len(ann_a)} != {len(ann_b)}")
    if not ann_a:
        raise EvalError("empty annotation lists")
    n = len(ann_a)
    p_o = sum(1 for a, b in zip(ann_a, ann_b) if a == b) / n
    labels = set(ann_a) | set(ann_b)
    p_e = sum(
        (sum(1 for a in ann_a if a == label) / n) * (sum(1 for b in ann_b if b == label) / n)
        for label in labels
    )
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


@dataclass(frozen=True)
class Split:
    train: tuple[Document, ...]
    dev: tuple[Document, ...]
    test: tuple[Document, ...]

    def __post_init__(self) -> None:
        ids = [d.id for part in (self.train, self.dev, self.test) for d in part]
        if len(ids) != len(set(ids)):
            raise EvalError("split parts must have disjoint document ids")

    def ids(self) -> dict[str, frozenset[str]]:
        return {
            "train": frozenset(d.id for d in self.train),
            "dev": frozenset(d.id for d in self.dev),
            "test": frozenset(d.id for d in self.test),
        }


# Table-1-like proportions are the fixture default
DEFAULT_PROPORTIONS = (0.70, 0.08, 0.22)


def make_split(docs: Sequence[Document], proportions: tuple[float, float, float] = DEFAULT_PROPORTIONS) -> Split:
    """Cut a corpus into train/dev/test by position, tagging meta['split']."""
    n = len(docs)
    n_train = round(n * proportions[0])
    n_dev = round(n * proportions[1])
    parts = {
        "train": docs[:n_train],
        "dev": docs[n_train : n_train + n_dev],
        "test": docs[n_train + n_dev :],
    }
    tagged = {
        name: tuple(
            Document(
                id=d.id, language=d.language, source=d.source, text=d.text,
                cfa_label=d.cfa_label, spans=d.spans, meta={**d.meta, "split": name},
            )
            for d in part
        )
        for name, part in parts.items()
    }
    return Split(**tagged)


@dataclass(frozen=True)
class GridCell:
    mean: float
    sd: float
    scores: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"mean": self.mean, "sd": self.sd, "scores": list(self.scores)}


@dataclass
class UtilityReport:
    cells: dict[tuple[str, str], GridCell]
    seeds: tuple[int, ...]
    variants: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "seeds": list(self.seeds),
            "variants": list(self.variants),
            "cells": {
                f"{train}->{test}": cell.to_dict() for (train, test), cell in sorted(self.cells.items())
            },
        }


ORIGINAL = "Original"


def _check_alignment(variants: Mapping[str, Split]) -> None:
    reference = None
    for name, split in variants.items():
        ids = split.ids()
        if reference is None:
            reference = (name, ids)
        elif ids != reference[1]:
            raise EvalError(
                f"variant {name!r} is not aligned by document id with {reference[0]!r}"
            )


def variant_grid(
    variants: Mapping[str, Split],
    seeds: Sequence[int],
    pairs: Sequence[tuple[str, str]] | None = None,
    dim: int = DEFAULT_DIM,
) -> UtilityReport:
    """Fill the train-variant x test-variant macro-F1 grid over seeds.

    Default pairs reproduce both report layouts: every variant tested on
    its own test set and on the original one, plus the original-trained
    model tested on every variant.
    """
    if not variants:
        raise EvalError("no variants given")
    if not seeds:
        raise EvalError("no seeds given")
    _check_alignment(variants)
    names = list(variants)
    if pairs is None:
        pairs = []
        for name in names:
            pairs.append((name, name))
            if ORIGINAL in variants and name != ORIGINAL:
                pairs.append((name, ORIGINAL))
                pairs.append((ORIGINAL, name))
        pairs = list(dict.fromkeys(pairs))
    for train_v, test_v in pairs:
        if train_v not in variants or test_v not in variants:
            raise EvalError(f"unknown variant in pair ({train_v}, {test_v})")
    models: dict[tuple[str, int], Classifier] = {}
    cells: dict[tuple[str, str], GridCell] = {}
    for train_v, test_v in pairs:
        scores = []
        for seed in seeds:
            key = (train_v, seed)
            if key not in models:
                models[key] = train_classifier(variants[train_v].train, seed, dim=dim)
            scores.append(macro_f1(models[key], variants[test_v].test))
        arr = np.array(scores)
        cells[(train_v, test_v)] = GridCell(
            mean=float(arr.mean()), sd=float(arr.std()), scores=tuple(scores)
        )
    return UtilityReport(cells=cells, seeds=tuple(seeds), variants=tuple(names))


def _fmt(cell: GridCell | None) -> str:
    if cell is None:
        return "-".center(18)
    return f"{cell.mean * 100:6.2f} (±{cell.sd * 100:.1f})".center(18)


def render_training_table(report: UtilityReport) -> str:
    """Rows per training variant; corresponding vs original test columns."""
    lines = [
        "Training data".ljust(14) + "Corresponding Test".center(18) + "Original Test".center(18)
    ]
    for name in report.variants:
        corresponding = report.cells.get((name, name))
        original = report.cells.get((name, ORIGINAL))
        if name == ORIGINAL:
            corresponding, original = None, report.cells.get((ORIGINAL, ORIGINAL))
        lines.append(name.ljust(14) + _fmt(corresponding) + _fmt(original))
    return "\n".join(lines)


def render_testing_table(report: UtilityReport) -> str:
    """Original-trained model tested on every variant's test set."""
    lines = ["Testing data".ljust(14) + "Macro-F1".center(18)]
    for name in report.variants:
        lines.append(name.ljust(14) + _fmt(report.cells.get((ORIGINAL, name))))
    return "\n".join(lines)
