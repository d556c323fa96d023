import random

import pytest

from postforge.classifier import TrainingConfig, select_features
from postforge.features import LABEL_NO, LABEL_YES, FeatureVector, LabeledExample
from postforge.synthetic import planted_subset_dataset


@pytest.mark.parametrize("method", ["rfe", "ga", "sa"])
def test_planted_informative_subset_recovered(method):
    examples, plant = planted_subset_dataset(400, seed=7)
    cfg = TrainingConfig(rng_seed=7)
    subset = select_features(examples, method, cfg)
    assert set(plant) <= set(subset.selected)
    assert subset.method == method
    assert 0.0 <= subset.cv_score <= 1.0


@pytest.mark.parametrize("method", ["rfe", "ga", "sa"])
def test_selection_deterministic(method):
    examples, _ = planted_subset_dataset(200, seed=3)
    cfg = TrainingConfig(rng_seed=5)
    a = select_features(examples, method, cfg)
    b = select_features(examples, method, cfg)
    assert a == b


def test_constant_feature_never_selected_by_rfe():
    # one informative feature, one constant
    rng = random.Random(2)
    examples = []
    for i in range(120):
        ssvc = rng.uniform(0, 0.01)
        deficient = ssvc < 0.004
        fv = FeatureVector(
            haa=False, ac=3, s=0, sas=5, vc=100, ssvc=ssvc,
            cc=0, fc=0, acc=0.0, aar=0.0, ar=0,
        )
        examples.append(
            LabeledExample(i, fv, LABEL_YES if deficient else LABEL_NO)
        )
    cfg = TrainingConfig(rng_seed=0, min_leaf=2)
    subset = select_features(examples, "rfe", cfg, feature_names=("ssvc", "ac"))
    assert subset.selected == ("ssvc",)


def test_selected_subset_is_subset_of_names():
    examples, _ = planted_subset_dataset(150, seed=9)
    cfg = TrainingConfig(rng_seed=1)
    for method in ("rfe", "ga", "sa"):
        subset = select_features(examples, method, cfg)
        assert set(subset.selected) <= set(
            ("haa", "ac", "s", "sas", "vc", "ssvc", "cc", "fc", "acc", "aar", "ar")
        )
        assert subset.selected  # never empty


def test_needs_two_features():
    examples, _ = planted_subset_dataset(50, seed=1)
    with pytest.raises(ValueError):
        select_features(examples, "rfe", TrainingConfig(), feature_names=("ssvc",))
