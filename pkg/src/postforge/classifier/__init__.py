"""Deficiency classifiers: decision tree (deployed), MLP and SVM baselines."""

from .dataset import TrainingConfig, split_dataset, stratified_folds, to_arrays
from .metrics import Confusion, EvalMetrics, evaluate, metrics_from_confusion
from .mlp import MlpModel, train_mlp
from .model_io import load_model, predict_any, save_model
from .selection import FeatureSubset, select_features
from .svm import ConvergenceError, SvmModel, train_svm
from .tree import DecisionTreeModel, feature_importances, predict, train_tree, tune_cp

__all__ = [
    "TrainingConfig",
    "split_dataset",
    "stratified_folds",
    "to_arrays",
    "Confusion",
    "EvalMetrics",
    "evaluate",
    "metrics_from_confusion",
    "MlpModel",
    "train_mlp",
    "load_model",
    "predict_any",
    "save_model",
    "FeatureSubset",
    "select_features",
    "ConvergenceError",
    "SvmModel",
    "train_svm",
    "DecisionTreeModel",
    "feature_importances",
    "predict",
    "train_tree",
    "tune_cp",
]
