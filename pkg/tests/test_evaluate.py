import random

import pytest

from redactor.corpus import CallForActionLevel, Document
from redactor.evaluate import (
    EvalError,
    Split,
    cohens_kappa,
    macro_f1,
    macro_f1_labels,
    make_split,
    render_testing_table,
    render_training_table,
    train_classifier,
    variant_grid,
)

L = CallForActionLevel


def doc(i, text, label, language="en"):
    return Document(id=f"d{i:03d}", language=language, source="t", text=text, cfa_label=label)


def separable_corpus(n_per_class=8):
    vocab = {
        L.NEGATIVE: "calm garden tea",
        L.HIGH: "muster pledge now",
    }
    docs = []
    i = 0
    for label, words in vocab.items():
        for k in range(n_per_class):
            docs.append(doc(i, f"{words} filler{k}", label))
            i += 1
    return docs


def test_separable_training_reaches_perfect_train_accuracy():
    docs = separable_corpus()
    model = train_classifier(docs, seed=0)
    assert model.predict(docs) == [d.cfa_label.value for d in docs]
    assert macro_f1(model, docs) == 1.0


def test_same_seed_identical_weights():
    docs = separable_corpus()
    a = train_classifier(docs, seed=3)
    b = train_classifier(docs, seed=3)
    assert a.weight_digest() == b.weight_digest()
    assert (a.weights == b.weights).all()


def test_five_seeds_distinct_models():
    docs = separable_corpus()
    digests = {train_classifier(docs, seed=s).weight_digest() for s in range(5)}
    assert len(digests) == 5


def test_training_is_input_order_independent():
    docs = separable_corpus()
    shuffled = docs[::-1]
    assert train_classifier(docs, seed=1).weight_digest() == \
        train_classifier(shuffled, seed=1).weight_digest()


def test_empty_train_set_rejected():
    with pytest.raises(EvalError, match="empty"):
        train_classifier([], seed=0)


def test_single_class_train_set_rejected():
    docs = [doc(i, "hello world", L.LOW) for i in range(4)]
    with pytest.raises(EvalError, match="single class"):
        train_classifier(docs, seed=0)


def test_missing_label_rejected():
    docs = separable_corpus()
    docs.append(Document(id="x", language="en", source="t", text="hi", cfa_label=None))
    with pytest.raises(EvalError, match="cfa_label"):
        train_classifier(docs, seed=0)


# --- macro-F1 ---------------------------------------------------------------


def test_macro_f1_perfect_is_one():
    gold = ["A", "B", "C", "A"]
    assert macro_f1_labels(gold, gold) == 1.0


def test_macro_f1_all_one_class_on_balanced_two_class():
    gold = ["A", "A", "B", "B"]
    pred = ["A", "A", "A", "A"]
    # class A: P=0.5, R=1 -> F1=2/3; class B: F1=0; macro = 1/3
    assert abs(macro_f1_labels(gold, pred) - 1 / 3) < 1e-12


def test_macro_f1_excludes_classes_absent_everywhere():
    gold = ["A", "B"]
    pred = ["A", "B"]
    # classes C/D/E never appear; average over {A, B} only
    assert macro_f1_labels(gold, pred) == 1.0


def test_macro_f1_bounded_and_permutation_invariant():
    rng = random.Random(0)
    labels = ["A", "B", "C"]
    gold = [rng.choice(labels) for _ in range(60)]
    pred = [rng.choice(labels) for _ in range(60)]
    score = macro_f1_labels(gold, pred)
    assert 0.0 <= score <= 1.0
    order = list(range(60))
    for _ in range(5):
        rng.shuffle(order)
        assert macro_f1_labels([gold[i] for i in order], [pred[i] for i in order]) == score


def test_macro_f1_empty_test_rejected():
    with pytest.raises(EvalError, match="empty"):
        macro_f1_labels([], [])


def test_macro_f1_ten_doc_fixture():
    docs = separable_corpus(5)
    model = train_classifier(docs, seed=0)
    assert macro_f1(model, docs) == 1.0


# --- Cohen's kappa ----------------------------------------------------------


def test_kappa_identical_is_one():
    assert abs(cohens_kappa(["A", "B", "A"], ["A", "B", "A"]) - 1.0) < 1e-9


def test_kappa_hand_case_zero():
    assert abs(cohens_kappa(["A", "A", "B", "B"], ["A", "B", "A", "B"]) - 0.0) < 1e-9


def test_kappa_hand_case_half():
    assert abs(cohens_kappa(["A", "A", "A", "B"], ["A", "A", "B", "B"]) - 0.5) < 1e-9


def test_kappa_single_class_identical():
    assert cohens_kappa(["A", "A"], ["A", "A"]) == 1.0


def test_kappa_symmetric_and_rename_invariant():
    rng = random.Random(2)
    a = [rng.choice("XYZ") for _ in range(40)]
    b = [rng.choice("XYZ") for _ in range(40)]
    assert abs(cohens_kappa(a, b) - cohens_kappa(b, a)) < 1e-12
    rename = {"X": "P", "Y": "Q", "Z": "R"}
    assert abs(
        cohens_kappa([rename[x] for x in a], [rename[x] for x in b]) - cohens_kappa(a, b)
    ) < 1e-12


def test_kappa_length_mismatch_rejected():
    with pytest.raises(EvalError, match="length"):
        cohens_kappa(["A"], ["A", "B"])


# --- splits and the grid ----------------------------------------------------


def test_make_split_proportions_and_tags():
    docs = [doc(i, "w", L.LOW) for i in range(100)]
    split = make_split(docs)
    assert (len(split.train), len(split.dev), len(split.test)) == (70, 8, 22)
    assert all(d.meta["split"] == "train" for d in split.train)
    assert all(d.meta["split"] == "test" for d in split.test)


def test_split_rejects_duplicate_ids():
    d = doc(0, "w", L.LOW)
    with pytest.raises(EvalError, match="disjoint"):
        Split(train=(d,), dev=(d,), test=())


def grid_fixture():
    docs = separable_corpus(10) + [
        doc(100 + i, f"rally banner march extra{i}", L.MODERATE) for i in range(8)
    ]
    return make_split(docs)


def test_variant_grid_single_cell():
    variants = {"Original": grid_fixture()}
    report = variant_grid(variants, seeds=[0])
    assert set(report.cells) == {("Original", "Original")}
    cell = report.cells[("Original", "Original")]
    assert cell.scores and 0.0 <= cell.mean <= 1.0


def test_variant_grid_misaligned_ids_rejected():
    a = grid_fixture()
    b = Split(train=a.train[:-1], dev=a.dev, test=a.test + (a.train[-1],))
    with pytest.raises(EvalError, match="aligned"):
        variant_grid({"Original": a, "S1": b}, seeds=[0])


def test_variant_grid_deterministic():
    variants = {"Original": grid_fixture()}
    r1 = variant_grid(variants, seeds=[0, 1])
    r2 = variant_grid(variants, seeds=[0, 1])
    assert r1.cells == r2.cells


def test_tables_render_expected_shape():
    split = grid_fixture()
    variants = {"Original": split, "S1": split, "Ours": split}
    report = variant_grid(variants, seeds=[0, 1])
    training = render_training_table(report)
    testing = render_testing_table(report)
    assert "Training data" in training and "Corresponding Test" in training
    assert "Original Test" in training
    for name in variants:
        assert any(line.startswith(name) for line in training.splitlines())
        assert any(line.startswith(name) for line in testing.splitlines())
    assert "Testing data" in testing and "Macro-F1" in testing
    assert report.to_dict()["seeds"] == [0, 1]
