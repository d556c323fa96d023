"""Post-level feature computation, label aggregation and distribution reports.

The eleven features of a question record:

    haa   has an accepted answer
    ac    answer count
    s     question score
    sas   sum of answer scores
    vc    view count
    ssvc  sum of answer scores divided by view count
    cc    comment count on the question
    fc    favorite count
    acc   mean comment count over the answers
    aar   mean answerer reputation
    ar    asker reputation

Zero-answer conventions: with no answers, sas, acc and aar are 0 and haa is
false. With zero views, ssvc is 0. Both degenerate cases are reported via
flags instead of raising.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .records import QuestionRecord

FEATURE_NAMES = ("haa", "ac", "s", "sas", "vc", "ssvc", "cc", "fc", "acc", "aar", "ar")
BOOLEAN_FEATURES = frozenset({"haa"})

LABEL_YES = "YES"  # deficient: the answer set needs improvement
LABEL_NO = "NO"
NEEDS_REVIEW = "NEEDS_REVIEW"


@dataclass(frozen=True)
class FeatureVector:
    haa: bool
    ac: int
    s: int
    sas: int
    vc: int
    ssvc: float
    cc: int
    fc: int
    acc: float
    aar: float
    ar: int

    def value(self, name: str) -> float:
        try:
            raw = getattr(self, name)
        except AttributeError:
            raise KeyError(f"unknown feature: {name}") from None
        return float(raw)

    def as_array(self, names: Sequence[str] = FEATURE_NAMES) -> np.ndarray:
        return np.array([self.value(n) for n in names], dtype=float)

    def to_dict(self) -> dict:
        return {
            "haa": self.haa,
            "ac": self.ac,
            "s": self.s,
            "sas": self.sas,
            "vc": self.vc,
            # 12 significant digits keeps the exact ratio round-trippable
            "ssvc": float(f"{self.ssvc:.12g}"),
            "cc": self.cc,
            "fc": self.fc,
            "acc": self.acc,
            "aar": self.aar,
            "ar": self.ar,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureVector":
        return cls(
            haa=bool(data["haa"]),
            ac=int(data["ac"]),
            s=int(data["s"]),
            sas=int(data["sas"]),
            vc=int(data["vc"]),
            ssvc=float(data["ssvc"]),
            cc=int(data["cc"]),
            fc=int(data["fc"]),
            acc=float(data["acc"]),
            aar=float(data["aar"]),
            ar=int(data["ar"]),
        )


def extract_features(q: QuestionRecord) -> FeatureVector:
    vector, _ = extract_features_with_flags(q)
    return vector


def extract_features_with_flags(q: QuestionRecord) -> tuple[FeatureVector, frozenset[str]]:
    """Compute the 11 features plus degenerate-input flags.

    Flags: ``zero_answers`` (empty-set means defaulted to 0),
    ``zero_views`` (ssvc forced to 0), ``dangling_accepted_ignored``
    (accepted_answer_id present on an answerless question; haa clamped to
    false to keep the zero-answer convention consistent).
    """
    flags: set[str] = set()
    ac = len(q.answers)
    if ac == 0:
        sas = 0
        acc = 0.0
        aar = 0.0
        haa = False
        flags.add("zero_answers")
        if q.accepted_answer_id is not None:
            flags.add("dangling_accepted_ignored")
    else:
        sas = sum(a.score for a in q.answers)
        acc = sum(a.comment_count for a in q.answers) / ac
        aar = sum(a.answerer_reputation for a in q.answers) / ac
        haa = q.accepted_answer_id is not None
    if q.view_count > 0:
        ssvc = float(Fraction(sas, q.view_count))
    else:
        ssvc = 0.0
        flags.add("zero_views")
    vector = FeatureVector(
        haa=haa,
        ac=ac,
        s=q.score,
        sas=sas,
        vc=q.view_count,
        ssvc=ssvc,
        cc=q.comment_count,
        fc=q.favorite_count,
        acc=acc,
        aar=aar,
        ar=q.asker_reputation,
    )
    return vector, frozenset(flags)


# -- labels ----------------------------------------------------------------


class UnresolvableSheetError(ValueError):
    pass


@dataclass(frozen=True)
class VoteSheet:
    question_id: int
    votes: tuple[str, ...]
    criteria: tuple[dict, ...] = ()  # optional per-vote annotations
    override: str | None = None  # externally resolved label for mixed sheets


def aggregate_labels(sheet: VoteSheet) -> str:
    """Resolve a vote sheet to YES, NO or NEEDS_REVIEW.

    Three YES votes with no dissent resolve to YES (symmetrically for NO);
    any mixed sheet needs external review. Sheets with fewer than three votes
    cannot be resolved at all.
    """
    votes = [v.upper() for v in sheet.votes]
    if any(v not in (LABEL_YES, LABEL_NO) for v in votes):
        raise ValueError(f"votes must be YES or NO, got {sheet.votes!r}")
    if len(votes) < 3:
        raise UnresolvableSheetError(f"unresolvable sheet for question {sheet.question_id}")
    if LABEL_NO not in votes:
        return LABEL_YES
    if LABEL_YES not in votes:
        return LABEL_NO
    return NEEDS_REVIEW


@dataclass(frozen=True)
class LabeledExample:
    question_id: int
    features: FeatureVector
    label: str
    provenance: str = "manual"  # manual | synthetic

    def __post_init__(self):
        if self.label not in (LABEL_YES, LABEL_NO):
            raise ValueError(f"label must be YES or NO, got {self.label!r}")

    def to_dict(self) -> dict:
        data = {"question_id": self.question_id}
        data.update(self.features.to_dict())
        data["label"] = self.label
        data["provenance"] = self.provenance
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "LabeledExample":
        return cls(
            question_id=int(data.get("question_id", 0)),
            features=FeatureVector.from_dict(data),
            label=str(data["label"]),
            provenance=str(data.get("provenance", "manual")),
        )


def write_dataset(path: str | Path, examples: Iterable[LabeledExample], header: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header is not None:
            fh.write(json.dumps({"header": header}) + "\n")
        for ex in examples:
            fh.write(json.dumps(ex.to_dict()) + "\n")


def load_dataset(path: str | Path) -> tuple[list[LabeledExample], dict]:
    examples: list[LabeledExample] = []
    header: dict = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            data = json.loads(line)
            if "header" in data and "label" not in data:
                header = data["header"]
                continue
            examples.append(LabeledExample.from_dict(data))
    return examples, header


# -- outlier handling and distribution summaries -----------------------------


def iqr_bounds(values: Sequence[float], factor: float = 1.5) -> tuple[float, float]:
    """Inter-quartile-range outlier bounds.

    Quartiles use linear interpolation between order statistics (the common
    "type 7" convention). Values outside [Q1 - factor*IQR, Q3 + factor*IQR]
    count as outliers.
    """
    if len(values) < 4:
        raise ValueError(f"need at least 4 values for IQR bounds, got {len(values)}")
    q1, q3 = np.percentile(np.asarray(values, dtype=float), [25.0, 75.0])
    iqr = q3 - q1
    return float(q1 - factor * iqr), float(q3 + factor * iqr)


@dataclass(frozen=True)
class FeatureClassSummary:
    feature: str
    label: str
    lower: float | None  # None when the class was too small to filter
    upper: float | None
    removed: int
    retained: int
    edges: tuple[float, ...]
    counts: tuple[int, ...]


@dataclass
class DistributionReport:
    entries: list[FeatureClassSummary]
    class_sizes: dict[str, int]
    iqr_factor: float
    warnings: list[str] = field(default_factory=list)

    def entry(self, feature: str, label: str) -> FeatureClassSummary:
        for e in self.entries:
            if e.feature == feature and e.label == label:
                return e
        raise KeyError((feature, label))

    def to_tsv(self) -> str:
        lines = ["feature\tlabel\tlower\tupper\tremoved\tretained\tedges\tcounts"]
        for e in self.entries:
            lines.append(
                "\t".join(
                    [
                        e.feature,
                        e.label,
                        "" if e.lower is None else f"{e.lower:.6g}",
                        "" if e.upper is None else f"{e.upper:.6g}",
                        str(e.removed),
                        str(e.retained),
                        ",".join(f"{x:.6g}" for x in e.edges),
                        ",".join(str(c) for c in e.counts),
                    ]
                )
            )
        for w in self.warnings:
            lines.append(f"# warning: {w}")
        return "\n".join(lines) + "\n"


def summarize(
    dataset: Sequence[LabeledExample],
    iqr_factor: float = 1.5,
    bins: int = 10,
) -> DistributionReport:
    """Per-feature, per-class histogram report with IQR outlier removal.

    Outlier filtering happens here only; training consumes raw vectors unless
    explicitly asked otherwise. Bin edges are shared across the two classes of
    a feature so their histograms are directly comparable.
    """
    if not dataset:
        raise ValueError("dataset is empty")
    report = DistributionReport(entries=[], class_sizes={}, iqr_factor=iqr_factor)
    labels = [LABEL_YES, LABEL_NO]
    for label in labels:
        report.class_sizes[label] = sum(1 for ex in dataset if ex.label == label)
    for label, size in report.class_sizes.items():
        if size == 0:
            report.warnings.append(f"class {label} is empty")

    for feature in FEATURE_NAMES:
        retained_by_label: dict[str, np.ndarray] = {}
        bounds_by_label: dict[str, tuple[float, float] | None] = {}
        for label in labels:
            values = np.array(
                [ex.features.value(feature) for ex in dataset if ex.label == label], dtype=float
            )
            if len(values) >= 4:
                lo, hi = iqr_bounds(values, iqr_factor)
                bounds_by_label[label] = (lo, hi)
                retained_by_label[label] = values[(values >= lo) & (values <= hi)]
            else:
                if len(values) > 0:
                    report.warnings.append(
                        f"class {label} too small for IQR filtering on {feature}"
                    )
                bounds_by_label[label] = None
                retained_by_label[label] = values

        pooled = np.concatenate([retained_by_label[label] for label in labels])
        if len(pooled) == 0:
            continue
        lo, hi = float(pooled.min()), float(pooled.max())
        if math.isclose(lo, hi):
            # histogram edges must strictly increase
            edges = np.array([lo - 0.5, hi + 0.5])
        else:
            edges = np.linspace(lo, hi, bins + 1)

        for label in labels:
            values = retained_by_label[label]
            total = report.class_sizes[label]
            counts, _ = np.histogram(values, bins=edges)
            b = bounds_by_label[label]
            report.entries.append(
                FeatureClassSummary(
                    feature=feature,
                    label=label,
                    lower=None if b is None else b[0],
                    upper=None if b is None else b[1],
                    removed=total - len(values),
                    retained=len(values),
                    edges=tuple(float(e) for e in edges),
                    counts=tuple(int(c) for c in counts),
                )
            )
    return report


def resolve_vote_sheets(
    sheets: Iterable[VoteSheet],
) -> tuple[dict[int, str], list[int], list[int]]:
    """Aggregate a collection of vote sheets into final labels.

    Returns ``(labels, needs_review, dropped)``; mixed sheets resolve through
    their recorded override when present, otherwise they are left for review.
    Sheets with fewer than three votes are dropped.
    """
    labels: dict[int, str] = {}
    needs_review: list[int] = []
    dropped: list[int] = []
    for sheet in sheets:
        try:
            outcome = aggregate_labels(sheet)
        except UnresolvableSheetError:
            dropped.append(sheet.question_id)
            continue
        if outcome == NEEDS_REVIEW:
            if sheet.override in (LABEL_YES, LABEL_NO):
                labels[sheet.question_id] = sheet.override
            else:
                needs_review.append(sheet.question_id)
            continue
        labels[sheet.question_id] = outcome
    return labels, needs_review, dropped
