"""CART-style decision tree over the post features.

Growth is greedy on Gini impurity. A split is kept only when it reduces the
tree's total impurity, normalized by the root impurity, by at least the
complexity parameter ``cp``; raising cp therefore prunes. Thresholds are
midpoints between consecutive distinct feature values, and ties in gain are
broken toward the lower feature index and lower threshold so training is
deterministic for a fixed input order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..features import BOOLEAN_FEATURES, FEATURE_NAMES, LABEL_NO, LABEL_YES, FeatureVector, LabeledExample
from .dataset import TrainingConfig, loocv_folds, stratified_folds, to_arrays

DEFAULT_MIN_LEAF = 5
DEFAULT_MAX_DEPTH = 20
_GAIN_EPS = 1e-12


@dataclass
class TreeNode:
    # internal nodes
    feature: str | None = None
    kind: str | None = None  # "num" (left: value < threshold) or "bool" (left: false)
    threshold: float | None = None
    left: int = -1
    right: int = -1
    gain: float = 0.0  # normalized impurity decrease achieved by the split
    # leaves
    label: str | None = None
    class_counts: dict[str, int] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.label is not None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"label": self.label, "class_counts": self.class_counts}
        return {
            "feature": self.feature,
            "kind": self.kind,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "gain": self.gain,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TreeNode":
        if "label" in data:
            return cls(label=data["label"], class_counts={k: int(v) for k, v in data["class_counts"].items()})
        return cls(
            feature=data["feature"],
            kind=data["kind"],
            threshold=data["threshold"],
            left=int(data["left"]),
            right=int(data["right"]),
            gain=float(data.get("gain", 0.0)),
        )


@dataclass
class DecisionTreeModel:
    nodes: list[TreeNode]
    cp_used: float
    feature_subset: tuple[str, ...]
    kind: str = "dt"
    meta: dict = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def depth(self) -> int:
        def walk(nid: int) -> int:
            node = self.nodes[nid]
            if node.is_leaf:
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(0)


def _leaf(y: np.ndarray) -> TreeNode:
    n_yes = int(y.sum())
    n_no = len(y) - n_yes
    # positive class wins exact ties
    label = LABEL_YES if n_yes >= n_no else LABEL_NO
    return TreeNode(label=label, class_counts={LABEL_YES: n_yes, LABEL_NO: n_no})


def _weighted_gini(n: int, n_yes: int) -> float:
    # n * gini = n - (n_yes^2 + n_no^2) / n
    if n == 0:
        return 0.0
    n_no = n - n_yes
    return n - (n_yes * n_yes + n_no * n_no) / n


def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int) -> tuple[float, int, float] | None:
    """Best (raw_gain, feature_index, threshold) for this node, or None."""
    n = len(y)
    n_yes = int(y.sum())
    parent = _weighted_gini(n, n_yes)
    best: tuple[float, int, float] | None = None
    for j in range(X.shape[1]):
        col = X[:, j]
        order = np.argsort(col, kind="stable")
        cs = col[order]
        ys = y[order].astype(np.int64)
        boundaries = np.nonzero(cs[1:] != cs[:-1])[0] + 1  # split before these positions
        if len(boundaries) == 0:
            continue
        prefix_yes = np.cumsum(ys)
        nl = boundaries.astype(np.int64)
        yl = prefix_yes[boundaries - 1]
        nr = n - nl
        yr = n_yes - yl
        valid = (nl >= min_leaf) & (nr >= min_leaf)
        if not valid.any():
            continue
        wl = nl - (yl * yl + (nl - yl) * (nl - yl)) / nl
        wr = nr - (yr * yr + (nr - yr) * (nr - yr)) / nr
        gains = parent - wl - wr
        gains[~valid] = -np.inf
        k = int(np.argmax(gains))  # first max = lowest threshold
        if gains[k] > _GAIN_EPS and (best is None or gains[k] > best[0]):
            threshold = float((cs[boundaries[k] - 1] + cs[boundaries[k]]) / 2.0)
            best = (float(gains[k]), j, threshold)
    return best


def train_tree(
    train: Sequence[LabeledExample],
    cp: float,
    feature_subset: Sequence[str] | None = None,
    *,
    min_leaf: int = DEFAULT_MIN_LEAF,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> DecisionTreeModel:
    if not train:
        raise ValueError("training set is empty")
    features = tuple(feature_subset or FEATURE_NAMES)
    X, y = to_arrays(train, features)
    root_weighted = _weighted_gini(len(y), int(y.sum()))
    nodes: list[TreeNode] = []

    def grow(idx: np.ndarray, depth: int) -> int:
        sub_y = y[idx]
        nid = len(nodes)
        n_yes = int(sub_y.sum())
        if n_yes == 0 or n_yes == len(sub_y) or depth >= max_depth or root_weighted <= 0:
            nodes.append(_leaf(sub_y))
            return nid
        best = _best_split(X[idx], sub_y, min_leaf)
        if best is None:
            nodes.append(_leaf(sub_y))
            return nid
        raw_gain, j, threshold = best
        gain = raw_gain / root_weighted
        if gain < cp:
            nodes.append(_leaf(sub_y))
            return nid
        nodes.append(TreeNode())  # placeholder, filled after children exist
        mask = X[idx, j] < threshold
        left = grow(idx[mask], depth + 1)
        right = grow(idx[~mask], depth + 1)
        name = features[j]
        nodes[nid] = TreeNode(
            feature=name,
            kind="bool" if name in BOOLEAN_FEATURES else "num",
            threshold=0.5 if name in BOOLEAN_FEATURES else threshold,
            left=left,
            right=right,
            gain=gain,
        )
        return nid

    grow(np.arange(len(y)), 0)
    return DecisionTreeModel(nodes=nodes, cp_used=cp, feature_subset=features)


def predict(model: DecisionTreeModel, fv: FeatureVector | Mapping[str, float]) -> tuple[str, float]:
    """Label and leaf-fraction confidence for one vector."""

    def value(name: str) -> float:
        if isinstance(fv, FeatureVector):
            return fv.value(name)
        if name not in fv:
            raise ValueError(f"feature missing from vector: {name}")
        return float(fv[name])

    node = model.nodes[0]
    while not node.is_leaf:
        v = value(node.feature)
        node = model.nodes[node.left if v < node.threshold else node.right]
    counts = node.class_counts
    total = counts[LABEL_YES] + counts[LABEL_NO]
    return node.label, counts[node.label] / total


def predict_matrix(model: DecisionTreeModel, X: np.ndarray) -> np.ndarray:
    """Vectorized prediction; X columns follow model.feature_subset. Returns
    a bool array (True = deficient)."""
    out = np.zeros(len(X), dtype=bool)
    col_index = {name: i for i, name in enumerate(model.feature_subset)}
    stack: list[tuple[int, np.ndarray]] = [(0, np.arange(len(X)))]
    while stack:
        nid, idx = stack.pop()
        if len(idx) == 0:
            continue
        node = model.nodes[nid]
        if node.is_leaf:
            out[idx] = node.label == LABEL_YES
            continue
        mask = X[idx, col_index[node.feature]] < node.threshold
        stack.append((node.left, idx[mask]))
        stack.append((node.right, idx[~mask]))
    return out


def feature_importances(model: DecisionTreeModel) -> dict[str, float]:
    """Total normalized impurity decrease attributed to each feature."""
    importances = {name: 0.0 for name in model.feature_subset}
    for node in model.nodes:
        if not node.is_leaf:
            importances[node.feature] += node.gain
    return importances


def _pooled_f1(tp: int, fp: int, fn: int) -> float:
    if tp + fp == 0 or tp + fn == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def cv_f1(
    train: Sequence[LabeledExample],
    cp: float,
    cfg: TrainingConfig,
    feature_subset: Sequence[str] | None = None,
    folds: list[list[int]] | None = None,
) -> float:
    """Cross-validated F1 with predictions pooled across folds (the only
    aggregation that stays defined under leave-one-out)."""
    features = tuple(feature_subset or FEATURE_NAMES)
    labels = [ex.label for ex in train]
    if folds is None:
        if cfg.tuning_mode == "loocv":
            folds = loocv_folds(len(train))
        else:
            folds = stratified_folds(labels, cfg.kfold_k, cfg.rng_seed)
    X, y = to_arrays(train, features)
    tp = fp = fn = 0
    for fold in folds:
        hold = set(fold)
        train_part = [ex for i, ex in enumerate(train) if i not in hold]
        if not train_part:
            continue
        model = train_tree(train_part, cp, features, min_leaf=cfg.min_leaf, max_depth=cfg.max_depth)
        pred = predict_matrix(model, X[fold])
        truth = y[fold]
        tp += int(np.sum(pred & truth))
        fp += int(np.sum(pred & ~truth))
        fn += int(np.sum(~pred & truth))
    return _pooled_f1(tp, fp, fn)


def tune_cp(train: Sequence[LabeledExample], cfg: TrainingConfig) -> float:
    """Pick the cp from the grid maximizing cross-validated F1.

    Ties go to the larger cp (the simpler tree), which the descending grid
    order makes automatic.
    """
    if list(cfg.cp_grid) != sorted(cfg.cp_grid, reverse=True):
        raise ValueError("cp_grid must be descending")
    labels = [ex.label for ex in train]
    if cfg.tuning_mode == "loocv":
        folds = loocv_folds(len(train))
    else:
        folds = stratified_folds(labels, cfg.kfold_k, cfg.rng_seed)
    best_cp = cfg.cp_grid[0]
    best_score = -1.0
    for cp in cfg.cp_grid:
        score = cv_f1(train, cp, cfg, folds=folds)
        if score > best_score:
            best_score = score
            best_cp = cp
    return best_cp
