"""Synthetic question generators for experiments and the verification suites.

Field distributions loosely mimic the observed sample: most posts have a
handful of answers, views between tens and thousands, small score sums, and
about two thirds carry an accepted answer.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

from .features import LABEL_NO, LABEL_YES, FeatureVector, LabeledExample, extract_features
from .records import AnswerRecord, QuestionRecord

EPOCH = datetime(2019, 6, 1, tzinfo=timezone.utc)

# Known deficiency rule used by the synthetic-oracle suites: a post is
# deficient when nobody accepted an answer and the score-per-view ratio is
# tiny, or when the answers score nonpositive in aggregate.
RULE_SSVC_THRESHOLD = 0.002


def deficiency_rule(fv: FeatureVector) -> bool:
    return (fv.ssvc < RULE_SSVC_THRESHOLD and not fv.haa) or fv.sas <= 0


def generate_question(
    rng: random.Random,
    question_id: int,
    *,
    tags: tuple[str, ...] = ("java",),
    now: datetime = EPOCH,
    stale_days: int | None = None,
    code_blocks: tuple[str, ...] = (),
) -> QuestionRecord:
    n_answers = rng.choices([0, 1, 2, 3, 4, 6], weights=[18, 30, 22, 14, 10, 6])[0]
    answers = tuple(
        AnswerRecord(
            answer_id=question_id * 100 + i + 1,
            score=rng.choice([-2, -1, 0, 0, 1, 1, 2, 3, 5, 8]),
            comment_count=rng.randrange(0, 6),
            answerer_reputation=rng.choice([50, 300, 1200, 5000, 12000, 32000]),
            body=f"answer {i} for question {question_id}",
        )
        for i in range(n_answers)
    )
    accepted = None
    if answers and rng.random() < 0.66:
        accepted = rng.choice(answers).answer_id
    if stale_days is None:
        stale_days = rng.randrange(0, 400)
    last_activity = now - timedelta(days=stale_days)
    created = last_activity - timedelta(days=rng.randrange(1, 900))
    body = f"<p>How do I do thing {question_id}?</p>"
    for block in code_blocks:
        body += f"<pre><code>{block}</code></pre>"
    return QuestionRecord(
        question_id=question_id,
        title=f"Question number {question_id}",
        body=body,
        code_blocks=code_blocks,
        tags=tags,
        creation_date=created,
        last_activity_date=last_activity,
        score=rng.choice([-3, -1, 0, 0, 1, 1, 2, 4, 7, 15]),
        view_count=rng.choice([18, 40, 90, 200, 450, 900, 2000, 8000]),
        favorite_count=rng.choices([0, 1, 2, 5], weights=[66, 20, 9, 5])[0],
        comment_count=rng.randrange(0, 8),
        accepted_answer_id=accepted,
        answers=answers,
        asker_reputation=rng.choice([1, 25, 120, 600, 1500, 9000]),
        closed_or_deleted=False,
        as_of=now,
    )


def generate_questions(n: int, seed: int = 0, **kwargs) -> list[QuestionRecord]:
    rng = random.Random(seed)
    return [generate_question(rng, 1000 + i, **kwargs) for i in range(n)]


def labeled_by_rule(
    records: list[QuestionRecord], seed: int = 0, noise: float = 0.05
) -> list[LabeledExample]:
    """Label records with the known rule, flipping a fraction at random."""
    rng = random.Random(seed)
    examples = []
    for record in records:
        fv = extract_features(record)
        deficient = deficiency_rule(fv)
        if rng.random() < noise:
            deficient = not deficient
        examples.append(
            LabeledExample(
                question_id=record.question_id,
                features=fv,
                label=LABEL_YES if deficient else LABEL_NO,
                provenance="synthetic",
            )
        )
    return examples


def random_feature_vector(rng: random.Random) -> FeatureVector:
    """Unconstrained probe vector for prediction-equivalence checks."""
    vc = rng.randrange(0, 10000)
    ac = rng.randrange(0, 8)
    sas = rng.randrange(-5, 30) if ac else 0
    return FeatureVector(
        haa=bool(ac and rng.random() < 0.6),
        ac=ac,
        s=rng.randrange(-5, 20),
        sas=sas,
        vc=vc,
        ssvc=(sas / vc) if vc else 0.0,
        cc=rng.randrange(0, 10),
        fc=rng.randrange(0, 6),
        acc=rng.uniform(0, 8) if ac else 0.0,
        aar=rng.uniform(0, 40000) if ac else 0.0,
        ar=rng.randrange(0, 20000),
    )


def planted_subset_dataset(
    n: int, seed: int = 0, noise: float = 0.03
) -> tuple[list[LabeledExample], tuple[str, ...]]:
    """Dataset where exactly {ssvc, sas, haa} carry signal.

    The label is the majority vote of three indicators (low ssvc, low sas,
    no accepted answer), so dropping any planted feature costs real CV score;
    every other feature is independent noise.
    """
    rng = random.Random(seed)
    examples = []
    for i in range(n):
        ssvc = rng.uniform(0.0, 0.01)
        sas = rng.randrange(0, 20)
        haa = rng.random() < 0.5
        votes = int(ssvc < 0.005) + int(sas < 10) + int(not haa)
        deficient = votes >= 2
        if rng.random() < noise:
            deficient = not deficient
        vc = rng.randrange(50, 5000)
        fv = FeatureVector(
            haa=haa,
            ac=rng.randrange(0, 8),
            s=rng.randrange(-5, 20),
            sas=sas,
            vc=vc,
            ssvc=ssvc,
            cc=rng.randrange(0, 10),
            fc=rng.randrange(0, 6),
            acc=rng.uniform(0, 8),
            aar=rng.uniform(0, 40000),
            ar=rng.randrange(0, 20000),
        )
        examples.append(
            LabeledExample(
                question_id=5000 + i,
                features=fv,
                label=LABEL_YES if deficient else LABEL_NO,
                provenance="synthetic",
            )
        )
    return examples, ("ssvc", "sas", "haa")
