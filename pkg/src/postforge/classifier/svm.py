"""Soft-margin SVM baseline with a polynomial kernel, trained by SMO.

Kernel: K(x, y) = (gamma * <x, y> + coef0) ** degree. Training iterates
pairwise dual updates until no multiplier moves, then verifies the KKT
conditions; failing the tolerance raises with the residual attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..features import FEATURE_NAMES, LABEL_NO, LABEL_YES, FeatureVector
from .dataset import TrainingConfig, to_arrays
from .mlp import standardize_stats

DEFAULT_COEF0 = 1.0
_ALPHA_EPS = 1e-10


class ConvergenceError(RuntimeError):
    def __init__(self, residual: float, epochs: int):
        super().__init__(f"SMO did not converge: KKT residual {residual:.3g} after {epochs} epochs")
        self.residual = residual
        self.epochs = epochs


def poly_kernel(A: np.ndarray, B: np.ndarray, gamma: float, coef0: float, degree: int) -> np.ndarray:
    return (gamma * (A @ B.T) + coef0) ** degree


@dataclass
class SvmModel:
    support_x: np.ndarray  # standardized support vectors
    alpha_y: np.ndarray  # alpha_i * y_i per support vector
    b: float
    gamma: float
    cost: float
    degree: int
    coef0: float
    mean: np.ndarray
    std: np.ndarray
    feature_subset: tuple[str, ...]
    kkt_residual: float = 0.0
    kind: str = "svm"
    meta: dict = field(default_factory=dict)


def kkt_residual(alphas: np.ndarray, y: np.ndarray, K: np.ndarray, b: float, C: float) -> float:
    """Worst violation of the complementary-slackness conditions:
    alpha=0 wants y*f >= 1, alpha=C wants y*f <= 1, interior wants y*f = 1."""
    margins = y * ((alphas * y) @ K + b)
    at_zero = alphas <= _ALPHA_EPS
    at_cost = alphas >= C - _ALPHA_EPS
    interior = ~(at_zero | at_cost)
    viol = np.zeros_like(margins)
    viol[at_zero] = np.maximum(0.0, 1.0 - margins[at_zero])
    viol[at_cost] = np.maximum(0.0, margins[at_cost] - 1.0)
    viol[interior] = np.abs(margins[interior] - 1.0)
    return float(viol.max(initial=0.0))


def train_svm(
    train: Sequence[object],
    gamma: float,
    cost: float,
    degree: int,
    cfg: TrainingConfig,
    feature_subset: Sequence[str] | None = None,
    *,
    coef0: float = DEFAULT_COEF0,
    tol: float = 1e-4,
    kkt_tol: float = 1e-3,
    max_epochs: int = 500,
) -> SvmModel:
    features = tuple(feature_subset or FEATURE_NAMES)
    X, y_bool = to_arrays(train, features)
    mean, std = standardize_stats(X)
    Xs = (X - mean) / std
    y = np.where(y_bool, 1.0, -1.0)
    m = len(y)
    K = poly_kernel(Xs, Xs, gamma, coef0, degree)

    rng = np.random.default_rng(cfg.rng_seed)
    alphas = np.zeros(m)
    state = {"b": 0.0}
    C = float(cost)

    def error(k: int) -> float:
        return float((alphas * y) @ K[:, k] + state["b"] - y[k])

    def take_step(i: int, j: int, Ei: float) -> bool:
        if i == j:
            return False
        Ej = error(j)
        ai_old, aj_old = alphas[i], alphas[j]
        if y[i] != y[j]:
            low, high = max(0.0, aj_old - ai_old), min(C, C + aj_old - ai_old)
        else:
            low, high = max(0.0, ai_old + aj_old - C), min(C, ai_old + aj_old)
        if low >= high:
            return False
        eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
        if eta >= 0:  # identical points in feature space; no progress possible
            return False
        aj_new = float(np.clip(aj_old - y[j] * (Ei - Ej) / eta, low, high))
        if abs(aj_new - aj_old) < 1e-12 * (aj_new + aj_old + 1e-12):
            return False
        ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new)
        b = state["b"]
        b1 = b - Ei - y[i] * (ai_new - ai_old) * K[i, i] - y[j] * (aj_new - aj_old) * K[i, j]
        b2 = b - Ej - y[i] * (ai_new - ai_old) * K[i, j] - y[j] * (aj_new - aj_old) * K[j, j]
        if 0 < ai_new < C:
            state["b"] = b1
        elif 0 < aj_new < C:
            state["b"] = b2
        else:
            state["b"] = (b1 + b2) / 2.0
        alphas[i], alphas[j] = ai_new, aj_new
        return True

    def examine(i: int) -> bool:
        Ei = error(i)
        r = y[i] * Ei
        if not ((r < -tol and alphas[i] < C) or (r > tol and alphas[i] > 0)):
            return False
        non_bound = np.nonzero((alphas > _ALPHA_EPS) & (alphas < C - _ALPHA_EPS))[0]
        if len(non_bound) > 1:
            errors = np.array([error(k) for k in non_bound])
            j = int(non_bound[np.argmax(np.abs(Ei - errors))])
            if take_step(i, j, Ei):
                return True
        start = int(rng.integers(m))
        for offset in range(len(non_bound)):
            j = int(non_bound[(start + offset) % len(non_bound)])
            if take_step(i, j, Ei):
                return True
        for offset in range(m):
            j = (start + offset) % m
            if take_step(i, j, Ei):
                return True
        return False

    epochs = 0
    examine_all = True
    while epochs < max_epochs:
        epochs += 1
        changed = 0
        if examine_all:
            for i in range(m):
                changed += examine(i)
        else:
            for i in np.nonzero((alphas > _ALPHA_EPS) & (alphas < C - _ALPHA_EPS))[0]:
                changed += examine(int(i))
        if examine_all:
            if changed == 0:
                break
            examine_all = False
        elif changed == 0:
            examine_all = True
    b = state["b"]

    residual = kkt_residual(alphas, y, K, b, C)
    if residual > kkt_tol:
        raise ConvergenceError(residual, epochs)

    support = alphas > _ALPHA_EPS
    return SvmModel(
        support_x=Xs[support],
        alpha_y=(alphas * y)[support],
        b=float(b),
        gamma=gamma,
        cost=C,
        degree=degree,
        coef0=coef0,
        mean=mean,
        std=std,
        feature_subset=features,
        kkt_residual=residual,
        meta={"epochs": epochs, "rng_seed": cfg.rng_seed, "tol": tol, "kkt_tol": kkt_tol},
    )


def decision_value(model: SvmModel, x_std: np.ndarray) -> float:
    k = poly_kernel(model.support_x, x_std[None, :], model.gamma, model.coef0, model.degree)
    return float(model.alpha_y @ k[:, 0] + model.b)


def predict(model: SvmModel, fv: FeatureVector | Mapping[str, float]) -> tuple[str, float]:
    if isinstance(fv, FeatureVector):
        x = fv.as_array(model.feature_subset)
    else:
        try:
            x = np.array([float(fv[n]) for n in model.feature_subset])
        except KeyError as exc:
            raise ValueError(f"feature missing from vector: {exc}") from None
    value = decision_value(model, (x - model.mean) / model.std)
    label = LABEL_YES if value >= 0 else LABEL_NO
    # squash the margin into a [0.5, 1) leaf-fraction-like confidence
    confidence = 1.0 / (1.0 + np.exp(-abs(value)))
    return label, float(confidence)
