"""Single-hidden-layer network baseline (logistic activations throughout).

hidden_units=0 degenerates to plain logistic regression. Training is
mini-batch gradient descent with a halve-on-increase learning-rate schedule:
an epoch that raises the full-batch loss is reverted, which makes the
recorded loss history non-increasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..features import FEATURE_NAMES, LABEL_NO, LABEL_YES, FeatureVector
from .dataset import TrainingConfig, to_arrays

_CLIP = 1e-12


class TrainingError(RuntimeError):
    pass


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init_params(n_features: int, hidden_units: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    if hidden_units == 0:
        return {
            "w": rng.normal(0.0, 1.0 / np.sqrt(n_features), size=n_features),
            "b": np.zeros(()),
        }
    return {
        "w1": rng.normal(0.0, 1.0 / np.sqrt(n_features), size=(n_features, hidden_units)),
        "b1": np.zeros(hidden_units),
        "w2": rng.normal(0.0, 1.0 / np.sqrt(hidden_units), size=hidden_units),
        "b2": np.zeros(()),
    }


def forward(params: Mapping[str, np.ndarray], X: np.ndarray) -> np.ndarray:
    if "w" in params:
        return sigmoid(X @ params["w"] + params["b"])
    a1 = sigmoid(X @ params["w1"] + params["b1"])
    return sigmoid(a1 @ params["w2"] + params["b2"])


def loss(params: Mapping[str, np.ndarray], X: np.ndarray, y: np.ndarray) -> float:
    p = np.clip(forward(params, X), _CLIP, 1.0 - _CLIP)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def gradients(params: Mapping[str, np.ndarray], X: np.ndarray, y: np.ndarray) -> dict[str, np.ndarray]:
    n = len(y)
    if "w" in params:
        p = sigmoid(X @ params["w"] + params["b"])
        dz = (p - y) / n
        return {"w": X.T @ dz, "b": np.asarray(dz.sum())}
    a1 = sigmoid(X @ params["w1"] + params["b1"])
    p = sigmoid(a1 @ params["w2"] + params["b2"])
    dz2 = (p - y) / n
    dz1 = np.outer(dz2, params["w2"]) * a1 * (1.0 - a1)
    return {
        "w1": X.T @ dz1,
        "b1": dz1.sum(axis=0),
        "w2": a1.T @ dz2,
        "b2": np.asarray(dz2.sum()),
    }


@dataclass
class MlpModel:
    params: dict[str, np.ndarray]
    mean: np.ndarray
    std: np.ndarray
    feature_subset: tuple[str, ...]
    hidden_units: int
    loss_history: list[float] = field(default_factory=list)
    kind: str = "mlp"
    meta: dict = field(default_factory=dict)


def standardize_stats(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0.0] = 1.0
    return mean, std


def train_mlp(
    train: Sequence[object],
    hidden_units: int,
    cfg: TrainingConfig,
    feature_subset: Sequence[str] | None = None,
) -> MlpModel:
    features = tuple(feature_subset or FEATURE_NAMES)
    X, y = to_arrays(train, features)
    mean, std = standardize_stats(X)
    Xs = (X - mean) / std
    yf = y.astype(float)
    rng = np.random.default_rng(cfg.rng_seed)
    params = init_params(len(features), hidden_units, rng)

    lr = cfg.mlp_learning_rate
    prev = loss(params, Xs, yf)
    history = [prev]
    n = len(yf)
    batch = max(1, min(cfg.mlp_batch_size, n))
    for _ in range(cfg.mlp_max_epochs):
        snapshot = {k: v.copy() for k, v in params.items()}
        order = rng.permutation(n)
        for start in range(0, n, batch):
            sel = order[start : start + batch]
            grads = gradients(params, Xs[sel], yf[sel])
            for key in params:
                params[key] = params[key] - lr * grads[key]
        current = loss(params, Xs, yf)
        if not np.isfinite(current):
            raise TrainingError(
                f"non-finite loss at epoch {len(history)} (lr={lr:.3g}); aborting"
            )
        if current > prev:
            params = snapshot
            lr *= 0.5
            history.append(prev)
            if lr < 1e-10:
                break
        else:
            prev = current
            history.append(current)

    return MlpModel(
        params=params,
        mean=mean,
        std=std,
        feature_subset=features,
        hidden_units=hidden_units,
        loss_history=history,
        meta={
            "learning_rate": cfg.mlp_learning_rate,
            "final_learning_rate": lr,
            "max_epochs": cfg.mlp_max_epochs,
            "batch_size": batch,
            "rng_seed": cfg.rng_seed,
            "standardization": "train-set z-score",
        },
    )


def predict(model: MlpModel, fv: FeatureVector | Mapping[str, float]) -> tuple[str, float]:
    if isinstance(fv, FeatureVector):
        x = fv.as_array(model.feature_subset)
    else:
        try:
            x = np.array([float(fv[n]) for n in model.feature_subset])
        except KeyError as exc:
            raise ValueError(f"feature missing from vector: {exc}") from None
    xs = (x - model.mean) / model.std
    p = float(forward(model.params, xs[None, :])[0])
    if p >= 0.5:
        return LABEL_YES, p
    return LABEL_NO, 1.0 - p
