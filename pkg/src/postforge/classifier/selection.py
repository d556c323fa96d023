"""Wrapper feature selection: recursive elimination, genetic search, annealing.

All three score candidate subsets by 10-fold cross-validated F1 of a decision
tree trained on the subset, with the folds fixed once per run so scores are
comparable and cacheable. Ties in score prefer the smaller subset.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from ..features import FEATURE_NAMES, LabeledExample
from .dataset import TrainingConfig, stratified_folds
from .tree import cv_f1, feature_importances, train_tree


@dataclass(frozen=True)
class FeatureSubset:
    selected: tuple[str, ...]
    method: str
    cv_score: float

    def to_dict(self) -> dict:
        return {"selected": list(self.selected), "method": self.method, "cv_score": self.cv_score}


class _SubsetScorer:
    def __init__(self, train: Sequence[LabeledExample], cfg: TrainingConfig, feature_names: Sequence[str]):
        self.train = train
        self.cfg = cfg
        self.names = tuple(feature_names)
        self.folds = stratified_folds([ex.label for ex in train], cfg.kfold_k, cfg.rng_seed)
        self._cache: dict[tuple[str, ...], float] = {}

    def score(self, subset: Sequence[str]) -> float:
        key = tuple(sorted(subset))
        if key not in self._cache:
            self._cache[key] = cv_f1(
                self.train, self.cfg.selection_cp, self.cfg, feature_subset=key, folds=self.folds
            )
        return self._cache[key]


def _better(score: float, size: int, best_score: float, best_size: int) -> bool:
    # smaller subsets win exact ties so unused features never linger
    return score > best_score or (score == best_score and size < best_size)


def _mask_to_names(mask: list[bool], names: Sequence[str]) -> tuple[str, ...]:
    return tuple(n for n, keep in zip(names, mask) if keep)


def _rfe(scorer: _SubsetScorer, cfg: TrainingConfig) -> tuple[tuple[str, ...], float]:
    current = list(scorer.names)
    best = tuple(current)
    best_score = scorer.score(current)
    while len(current) > 1:
        importance = {name: 0.0 for name in current}
        for fold in scorer.folds:
            hold = set(fold)
            part = [ex for i, ex in enumerate(scorer.train) if i not in hold]
            model = train_tree(
                part, cfg.selection_cp, current, min_leaf=cfg.min_leaf, max_depth=cfg.max_depth
            )
            for name, value in feature_importances(model).items():
                importance[name] += value
        drop = min(current, key=lambda n: (importance[n], -current.index(n)))
        current.remove(drop)
        score = scorer.score(current)
        if _better(score, len(current), best_score, len(best)):
            best, best_score = tuple(current), score
    return best, best_score


def _random_mask(rng: random.Random, n: int) -> list[bool]:
    mask = [rng.random() < 0.5 for _ in range(n)]
    if not any(mask):
        mask[rng.randrange(n)] = True
    return mask


def _ga(
    scorer: _SubsetScorer,
    rng: random.Random,
    population_size: int = 12,
    generations: int = 10,
    mutation_rate: float | None = None,
    elite: int = 2,
) -> tuple[tuple[str, ...], float]:
    n = len(scorer.names)
    mutation_rate = mutation_rate if mutation_rate is not None else 1.0 / n
    population = [_random_mask(rng, n) for _ in range(population_size)]
    population[0] = [True] * n  # keep the full set in the initial gene pool
    best: tuple[str, ...] = tuple(scorer.names)
    best_score = scorer.score(best)

    def fitness(mask: list[bool]) -> float:
        return scorer.score(_mask_to_names(mask, scorer.names))

    for _ in range(generations):
        scored = sorted(population, key=fitness, reverse=True)
        for mask in scored:
            names = _mask_to_names(mask, scorer.names)
            s = scorer.score(names)
            if _better(s, len(names), best_score, len(best)):
                best, best_score = names, s
        next_gen = [m[:] for m in scored[:elite]]
        while len(next_gen) < population_size:
            a = max(rng.sample(scored, 3), key=fitness)
            b = max(rng.sample(scored, 3), key=fitness)
            child = [ga if rng.random() < 0.5 else gb for ga, gb in zip(a, b)]
            for k in range(n):
                if rng.random() < mutation_rate:
                    child[k] = not child[k]
            if not any(child):
                child[rng.randrange(n)] = True
            next_gen.append(child)
        population = next_gen
    return best, best_score


def _sa(
    scorer: _SubsetScorer,
    rng: random.Random,
    steps: int = 60,
    start_temp: float = 0.05,
    cooling: float = 0.92,
) -> tuple[tuple[str, ...], float]:
    n = len(scorer.names)
    current = [True] * n
    current_score = scorer.score(_mask_to_names(current, scorer.names))
    best = _mask_to_names(current, scorer.names)
    best_score = current_score
    temp = start_temp
    for _ in range(steps):
        candidate = current[:]
        flip = rng.randrange(n)
        candidate[flip] = not candidate[flip]
        if not any(candidate):
            continue
        names = _mask_to_names(candidate, scorer.names)
        score = scorer.score(names)
        delta = score - current_score
        if delta > 0 or rng.random() < math.exp(delta / max(temp, 1e-9)):
            current, current_score = candidate, score
            if _better(score, len(names), best_score, len(best)):
                best, best_score = names, score
        temp *= cooling
    return best, best_score


def select_features(
    train: Sequence[LabeledExample],
    method: str,
    cfg: TrainingConfig,
    feature_names: Sequence[str] = FEATURE_NAMES,
) -> FeatureSubset:
    """Search feature subsets with the requested wrapper, deterministically
    for a fixed cfg.rng_seed."""
    if len(feature_names) < 2:
        raise ValueError("need at least 2 features to select from")
    scorer = _SubsetScorer(train, cfg, feature_names)
    rng = random.Random(cfg.rng_seed)
    if method == "rfe":
        selected, score = _rfe(scorer, cfg)
    elif method == "ga":
        selected, score = _ga(scorer, rng)
    elif method == "sa":
        selected, score = _sa(scorer, rng)
    else:
        raise ValueError(f"unknown selection method: {method}")
    ordered = tuple(n for n in feature_names if n in selected)
    return FeatureSubset(selected=ordered, method=method, cv_score=score)
