"""Model files: structured JSON with config, feature subset and parameters."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Union

import numpy as np

from ..features import FeatureVector
from . import mlp as mlp_mod
from . import svm as svm_mod
from . import tree as tree_mod
from .mlp import MlpModel
from .svm import SvmModel
from .tree import DecisionTreeModel, TreeNode

AnyModel = Union[DecisionTreeModel, MlpModel, SvmModel]


def model_to_dict(model: AnyModel) -> dict:
    if isinstance(model, DecisionTreeModel):
        return {
            "kind": "dt",
            "cp_used": None if model.cp_used == float("inf") else model.cp_used,
            "feature_subset": list(model.feature_subset),
            "nodes": [n.to_dict() for n in model.nodes],
            "meta": model.meta,
        }
    if isinstance(model, MlpModel):
        return {
            "kind": "mlp",
            "feature_subset": list(model.feature_subset),
            "hidden_units": model.hidden_units,
            "params": {k: np.asarray(v).tolist() for k, v in model.params.items()},
            "mean": model.mean.tolist(),
            "std": model.std.tolist(),
            "loss_history": model.loss_history,
            "meta": model.meta,
        }
    if isinstance(model, SvmModel):
        return {
            "kind": "svm",
            "feature_subset": list(model.feature_subset),
            "support_x": model.support_x.tolist(),
            "alpha_y": model.alpha_y.tolist(),
            "b": model.b,
            "gamma": model.gamma,
            "cost": model.cost,
            "degree": model.degree,
            "coef0": model.coef0,
            "mean": model.mean.tolist(),
            "std": model.std.tolist(),
            "kkt_residual": model.kkt_residual,
            "meta": model.meta,
        }
    raise TypeError(f"unknown model type: {type(model)!r}")


def model_from_dict(data: dict) -> AnyModel:
    kind = data.get("kind")
    if kind == "dt":
        cp = data.get("cp_used")
        return DecisionTreeModel(
            nodes=[TreeNode.from_dict(n) for n in data["nodes"]],
            cp_used=float("inf") if cp is None else float(cp),
            feature_subset=tuple(data["feature_subset"]),
            meta=data.get("meta", {}),
        )
    if kind == "mlp":
        return MlpModel(
            params={k: np.asarray(v, dtype=float) for k, v in data["params"].items()},
            mean=np.asarray(data["mean"], dtype=float),
            std=np.asarray(data["std"], dtype=float),
            feature_subset=tuple(data["feature_subset"]),
            hidden_units=int(data["hidden_units"]),
            loss_history=list(data.get("loss_history", [])),
            meta=data.get("meta", {}),
        )
    if kind == "svm":
        return SvmModel(
            support_x=np.asarray(data["support_x"], dtype=float),
            alpha_y=np.asarray(data["alpha_y"], dtype=float),
            b=float(data["b"]),
            gamma=float(data["gamma"]),
            cost=float(data["cost"]),
            degree=int(data["degree"]),
            coef0=float(data["coef0"]),
            mean=np.asarray(data["mean"], dtype=float),
            std=np.asarray(data["std"], dtype=float),
            feature_subset=tuple(data["feature_subset"]),
            kkt_residual=float(data.get("kkt_residual", 0.0)),
            meta=data.get("meta", {}),
        )
    raise ValueError(f"unknown model kind: {kind!r}")


def save_model(model: AnyModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)


def load_model(path: str | Path) -> AnyModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def predict_any(model: AnyModel, fv: FeatureVector | Mapping[str, float]) -> tuple[str, float]:
    """Uniform (label, confidence) prediction across model kinds."""
    if isinstance(model, DecisionTreeModel):
        return tree_mod.predict(model, fv)
    if isinstance(model, MlpModel):
        return mlp_mod.predict(model, fv)
    if isinstance(model, SvmModel):
        return svm_mod.predict(model, fv)
    raise TypeError(f"unknown model type: {type(model)!r}")
