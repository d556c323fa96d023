"""Dataset splitting, folding and array conversion."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..features import FEATURE_NAMES, LABEL_YES, LabeledExample, iqr_bounds


@dataclass
class TrainingConfig:
    split_ratio: float = 0.8
    rng_seed: int = 0
    tuning_mode: str = "kfold"  # "loocv" or "kfold"
    kfold_k: int = 10
    cp_grid: tuple[float, ...] = (
        float("inf"), 0.5, 0.2, 0.1, 0.05, 0.02, 0.012, 0.008, 0.005,
    )
    hidden_units_grid: tuple[int, ...] = (0, 10, 25, 50, 66, 75, 100)
    gamma_grid: tuple[float, ...] = tuple(2.0**e for e in range(-15, 0, 2))
    cost_grid: tuple[float, ...] = tuple(2.0**e for e in range(0, 31, 3))
    svm_degree: int = 3
    min_leaf: int = 5
    max_depth: int = 20
    mlp_learning_rate: float = 0.1
    mlp_max_epochs: int = 200
    mlp_batch_size: int = 32
    selection_cp: float = 0.01
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 < self.split_ratio < 1.0):
            raise ValueError("split_ratio must be in (0, 1)")
        if not self.cp_grid:
            raise ValueError("cp_grid must be non-empty")
        if list(self.cp_grid) != sorted(self.cp_grid, reverse=True):
            raise ValueError("cp_grid must be descending")


def split_dataset(
    dataset: Sequence[LabeledExample], ratio: float = 0.8, seed: int = 0
) -> tuple[list[LabeledExample], list[LabeledExample]]:
    """Stratified train/test split, deterministic per seed.

    Train and test partition the input exactly; each class contributes
    round(n_class * ratio) examples to the training side.
    """
    if len(dataset) < 10:
        raise ValueError(f"dataset too small to split: {len(dataset)}")
    if not (0.0 < ratio < 1.0):
        raise ValueError("ratio must be in (0, 1)")
    by_label: dict[str, list[int]] = {}
    for i, ex in enumerate(dataset):
        by_label.setdefault(ex.label, []).append(i)
    if len(by_label) < 2:
        raise ValueError("cannot split a single-class dataset")
    rng = random.Random(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label in sorted(by_label):
        indices = by_label[label][:]
        rng.shuffle(indices)
        n_train = int(round(len(indices) * ratio))
        train_idx.extend(indices[:n_train])
        test_idx.extend(indices[n_train:])
    train_idx.sort()
    test_idx.sort()
    return [dataset[i] for i in train_idx], [dataset[i] for i in test_idx]


def stratified_folds(labels: Sequence[str], k: int, seed: int = 0) -> list[list[int]]:
    """Index folds for stratified k-fold CV (round-robin per shuffled class)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = random.Random(seed)
    by_label: dict[str, list[int]] = {}
    for i, label in enumerate(labels):
        by_label.setdefault(label, []).append(i)
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in sorted(by_label):
        indices = by_label[label][:]
        rng.shuffle(indices)
        for j, idx in enumerate(indices):
            folds[j % k].append(idx)
    return [sorted(f) for f in folds if f]


def loocv_folds(n: int) -> list[list[int]]:
    return [[i] for i in range(n)]


def to_arrays(
    dataset: Sequence[LabeledExample], feature_names: Sequence[str] = FEATURE_NAMES
) -> tuple[np.ndarray, np.ndarray]:
    """(X, y) arrays; y is True for the positive (deficient) class."""
    X = np.array([ex.features.as_array(feature_names) for ex in dataset], dtype=float)
    y = np.array([ex.label == LABEL_YES for ex in dataset], dtype=bool)
    return X, y


def iqr_filter(
    dataset: Sequence[LabeledExample],
    factor: float = 1.5,
    feature_names: Sequence[str] = FEATURE_NAMES,
) -> list[LabeledExample]:
    """Drop rows falling outside the IQR bounds of any feature.

    Off by default for training; enabled by the --iqr-train experiment flag.
    """
    if len(dataset) < 4:
        return list(dataset)
    bounds = {}
    for name in feature_names:
        values = [ex.features.value(name) for ex in dataset]
        bounds[name] = iqr_bounds(values, factor)
    kept = []
    for ex in dataset:
        if all(bounds[n][0] <= ex.features.value(n) <= bounds[n][1] for n in feature_names):
            kept.append(ex)
    return kept
