import random

import numpy as np
import pytest

from postforge.classifier import (
    DecisionTreeModel,
    TrainingConfig,
    predict,
    split_dataset,
    train_tree,
    tune_cp,
)
from postforge.classifier.tree import TreeNode, feature_importances, predict_matrix
from postforge.features import LABEL_NO, LABEL_YES, LabeledExample
from postforge.synthetic import (
    deficiency_rule,
    generate_questions,
    labeled_by_rule,
    random_feature_vector,
)


def oracle_walk(model, fv):
    """Independent recursive path walker (the prediction oracle)."""

    def descend(nid):
        node = model.nodes[nid]
        if node.label is not None:
            total = sum(node.class_counts.values())
            return node.label, node.class_counts[node.label] / total
        value = float(getattr(fv, node.feature)) if hasattr(fv, node.feature) else float(fv[node.feature])
        if value < node.threshold:
            return descend(node.left)
        return descend(node.right)

    return descend(0)


def single_split_tree(feature="ssvc", threshold=0.002):
    return DecisionTreeModel(
        nodes=[
            TreeNode(feature=feature, kind="num", threshold=threshold, left=1, right=2, gain=0.5),
            TreeNode(label=LABEL_YES, class_counts={LABEL_YES: 8, LABEL_NO: 2}),
            TreeNode(label=LABEL_NO, class_counts={LABEL_YES: 1, LABEL_NO: 9}),
        ],
        cp_used=0.012,
        feature_subset=("haa", "ac", "s", "sas", "vc", "ssvc", "cc", "fc", "acc", "aar", "ar"),
    )


def test_all_yes_training_set_single_leaf():
    examples = labeled_by_rule(generate_questions(30, seed=1), noise=0.0)
    all_yes = [e for e in examples if e.label == LABEL_YES][:10]
    model = train_tree(all_yes, cp=0.012)
    assert model.node_count == 1
    assert model.nodes[0].label == LABEL_YES


def test_infinite_cp_root_only_majority():
    examples = labeled_by_rule(generate_questions(200, seed=2), seed=3)
    model = train_tree(examples, cp=float("inf"))
    assert model.node_count == 1
    majority = LABEL_YES if sum(e.label == LABEL_YES for e in examples) >= len(examples) / 2 else LABEL_NO
    assert model.nodes[0].label == majority


def test_learned_tree_close_to_generating_rule():
    records = generate_questions(3000, seed=10)
    examples = labeled_by_rule(records, seed=11, noise=0.05)
    train_part, test_part = split_dataset(examples, 0.8, seed=12)
    model = train_tree(train_part, cp=0.012)
    correct = sum(predict(model, e.features)[0] == e.label for e in test_part)
    tree_acc = correct / len(test_part)
    rule_correct = sum(
        (LABEL_YES if deficiency_rule(e.features) else LABEL_NO) == e.label for e in test_part
    )
    rule_acc = rule_correct / len(test_part)
    assert tree_acc >= rule_acc - 0.03


def test_predict_root_only():
    model = DecisionTreeModel(
        nodes=[TreeNode(label=LABEL_YES, class_counts={LABEL_YES: 7, LABEL_NO: 3})],
        cp_used=float("inf"),
        feature_subset=("ssvc",),
    )
    label, confidence = predict(model, {"ssvc": 0.5})
    assert label == LABEL_YES
    assert confidence == pytest.approx(0.7)


def test_predict_single_split():
    model = single_split_tree()
    rng = random.Random(0)
    fv_low = random_feature_vector(rng)
    label, conf = predict(model, {**{n: fv_low.value(n) for n in model.feature_subset}, "ssvc": 0.001})
    assert (label, conf) == (LABEL_YES, 0.8)
    label, _ = predict(model, {**{n: fv_low.value(n) for n in model.feature_subset}, "ssvc": 0.01})
    assert label == LABEL_NO


def test_predict_missing_feature_errors():
    model = single_split_tree()
    with pytest.raises(ValueError, match="missing"):
        predict(model, {"haa": 0.0})


def test_predict_matches_oracle_on_10k_vectors():
    examples = labeled_by_rule(generate_questions(800, seed=20), seed=21)
    model = train_tree(examples, cp=0.005)
    assert model.node_count > 3
    rng = random.Random(99)
    for _ in range(10_000):
        fv = random_feature_vector(rng)
        assert predict(model, fv) == oracle_walk(model, fv)


def test_predict_matrix_agrees_with_predict():
    examples = labeled_by_rule(generate_questions(500, seed=30), seed=31)
    model = train_tree(examples, cp=0.01)
    X = np.array([e.features.as_array(model.feature_subset) for e in examples])
    vectorized = predict_matrix(model, X)
    for i, e in enumerate(examples):
        assert (predict(model, e.features)[0] == LABEL_YES) == vectorized[i]


def test_pruning_monotonicity():
    examples = labeled_by_rule(generate_questions(600, seed=40), seed=41)
    cps = [float("inf"), 0.5, 0.1, 0.05, 0.012, 0.005, 0.0]
    sizes = [train_tree(examples, cp).node_count for cp in cps]
    assert sizes == sorted(sizes)


def test_training_deterministic():
    examples = labeled_by_rule(generate_questions(300, seed=50), seed=51)
    a = train_tree(examples, 0.012)
    b = train_tree(examples, 0.012)
    assert [n.to_dict() for n in a.nodes] == [n.to_dict() for n in b.nodes]


def test_min_leaf_respected():
    examples = labeled_by_rule(generate_questions(400, seed=60), seed=61)
    model = train_tree(examples, cp=0.0, min_leaf=5)
    for node in model.nodes:
        if node.is_leaf:
            assert sum(node.class_counts.values()) >= 5


def test_boolean_feature_split_kind():
    # force a haa-only tree: label equals haa exactly
    examples = []
    for i, q in enumerate(generate_questions(200, seed=70)):
        from postforge.features import extract_features

        fv = extract_features(q)
        examples.append(
            LabeledExample(q.question_id, fv, LABEL_YES if fv.haa else LABEL_NO)
        )
    model = train_tree(examples, cp=0.012, feature_subset=("haa",))
    root = model.nodes[0]
    assert root.kind == "bool"
    assert root.threshold == 0.5


# -- split_dataset -------------------------------------------------------------


def test_split_stratified_counts():
    data = []
    for i in range(100):
        fv = random_feature_vector(random.Random(i))
        data.append(LabeledExample(i, fv, LABEL_YES if i < 50 else LABEL_NO))
    train, test = split_dataset(data, 0.8, seed=5)
    assert len(train) == 80 and len(test) == 20
    assert sum(e.label == LABEL_YES for e in train) == 40
    assert sum(e.label == LABEL_YES for e in test) == 10


def test_split_deterministic():
    data = [
        LabeledExample(i, random_feature_vector(random.Random(i)), LABEL_YES if i % 2 else LABEL_NO)
        for i in range(40)
    ]
    a = split_dataset(data, 0.8, seed=7)
    b = split_dataset(data, 0.8, seed=7)
    assert [e.question_id for e in a[0]] == [e.question_id for e in b[0]]
    assert [e.question_id for e in a[1]] == [e.question_id for e in b[1]]


def test_split_partitions_exactly():
    rng = random.Random(123)
    for trial in range(1000):
        n = rng.randrange(10, 60)
        data = [
            LabeledExample(
                i, random_feature_vector(rng), LABEL_YES if rng.random() < 0.5 else LABEL_NO
            )
            for i in range(n)
        ]
        if len({e.label for e in data}) < 2:
            continue
        ratio = rng.choice([0.5, 0.7, 0.8, 0.9])
        train, test = split_dataset(data, ratio, seed=trial)
        train_ids = {id(e) for e in train}
        test_ids = {id(e) for e in test}
        assert len(train) + len(test) == n
        assert not (train_ids & test_ids)
        assert {id(e) for e in data} == train_ids | test_ids


def test_split_rejects_single_class():
    data = [
        LabeledExample(i, random_feature_vector(random.Random(i)), LABEL_YES) for i in range(20)
    ]
    with pytest.raises(ValueError):
        split_dataset(data, 0.8, seed=0)


def test_iqr_filter_drops_outlier_rows():
    from postforge.classifier.dataset import iqr_filter

    data = []
    for i in range(12):
        fv = random_feature_vector(random.Random(i))
        data.append(LabeledExample(i, fv, LABEL_YES if i % 2 else LABEL_NO))
    spike = random_feature_vector(random.Random(99))
    from dataclasses import replace

    outlier = LabeledExample(99, replace(spike, vc=10**9, ssvc=0.0), LABEL_YES)
    kept = iqr_filter(data + [outlier])
    assert outlier not in kept
    assert len(kept) >= 1


# -- tune_cp -------------------------------------------------------------------


def test_tune_singleton_grid():
    examples = labeled_by_rule(generate_questions(60, seed=80), seed=81)
    cfg = TrainingConfig(cp_grid=(float("inf"),), rng_seed=0)
    assert tune_cp(examples, cfg) == float("inf")


def test_tune_separable_admits_true_split():
    # clean separable data: label is exactly ssvc < 0.002
    examples = []
    rng = random.Random(5)
    for i in range(80):
        fv = random_feature_vector(rng)
        examples.append(
            LabeledExample(i, fv, LABEL_YES if fv.ssvc < 0.002 else LABEL_NO)
        )
    cfg = TrainingConfig(rng_seed=1)
    cp = tune_cp(examples, cfg)
    model = train_tree(examples, cp)
    assert model.depth >= 1


def test_tune_tie_prefers_larger_cp():
    # perfectly separable by one split: every cp <= 1 scores identically
    rng = random.Random(9)
    examples = []
    for i in range(60):
        fv = random_feature_vector(rng)
        examples.append(LabeledExample(i, fv, LABEL_YES if fv.ssvc < 0.002 else LABEL_NO))
    cfg = TrainingConfig(cp_grid=(0.5, 0.1, 0.012), rng_seed=2)
    assert tune_cp(examples, cfg) == 0.5


def test_tune_loocv_mode():
    examples = labeled_by_rule(generate_questions(40, seed=90), seed=91, noise=0.0)
    cfg = TrainingConfig(
        cp_grid=(float("inf"), 0.1, 0.012), tuning_mode="loocv", rng_seed=0, min_leaf=2
    )
    cp = tune_cp(examples, cfg)
    assert cp in cfg.cp_grid


def test_feature_importances_sum_to_total_gain():
    examples = labeled_by_rule(generate_questions(500, seed=95), seed=96)
    model = train_tree(examples, cp=0.01)
    importances = feature_importances(model)
    total = sum(n.gain for n in model.nodes if not n.is_leaf)
    assert sum(importances.values()) == pytest.approx(total)
