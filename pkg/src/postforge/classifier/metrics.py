"""Confusion-matrix metrics. YES (deficient) is the positive class."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ..features import LABEL_YES


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class EvalMetrics:
    """Ratios are None when their denominator is zero; never 0-by-convention."""

    recall: float | None
    precision: float | None
    balanced_accuracy: float | None
    kappa: float | None
    f1: float | None
    confusion: Confusion

    def to_dict(self) -> dict:
        return {
            "recall": self.recall,
            "precision": self.precision,
            "balanced_accuracy": self.balanced_accuracy,
            "kappa": self.kappa,
            "f1": self.f1,
            "confusion": self.confusion.to_dict(),
        }


def confusion_from_pairs(pairs: Iterable[tuple[str, str]]) -> Confusion:
    tp = fp = fn = tn = 0
    for predicted, truth in pairs:
        pred_yes = predicted == LABEL_YES
        true_yes = truth == LABEL_YES
        if pred_yes and true_yes:
            tp += 1
        elif pred_yes:
            fp += 1
        elif true_yes:
            fn += 1
        else:
            tn += 1
    return Confusion(tp, fp, fn, tn)


def metrics_from_confusion(c: Confusion) -> EvalMetrics:
    """Exact rational arithmetic on the counts, converted to float at the end."""
    tp, fp, fn, tn = c.tp, c.fp, c.fn, c.tn

    def ratio(num: int, den: int) -> Fraction | None:
        return None if den == 0 else Fraction(num, den)

    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)  # sensitivity
    specificity = ratio(tn, tn + fp)

    balanced = None
    if recall is not None and specificity is not None:
        balanced = (recall + specificity) / 2

    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)

    kappa = None
    n = c.total
    if n > 0:
        po = Fraction(tp + tn, n)
        pe = (
            Fraction(tp + fp, n) * Fraction(tp + fn, n)
            + Fraction(fn + tn, n) * Fraction(fp + tn, n)
        )
        if pe != 1:
            kappa = (po - pe) / (1 - pe)

    def as_float(x: Fraction | None) -> float | None:
        return None if x is None else float(x)

    return EvalMetrics(
        recall=as_float(recall),
        precision=as_float(precision),
        balanced_accuracy=as_float(balanced),
        kappa=as_float(kappa),
        f1=as_float(f1),
        confusion=c,
    )


def evaluate(predictions: Sequence[tuple[str, str]]) -> EvalMetrics:
    """Metrics over (predicted, truth) label pairs."""
    if not predictions:
        raise ValueError("no predictions to evaluate")
    return metrics_from_confusion(confusion_from_pairs(predictions))
