from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from postforge.records import AnswerRecord, QuestionRecord

NOW = datetime(2019, 6, 1, tzinfo=timezone.utc)


def make_answer(answer_id=1, score=0, comment_count=0, reputation=100, body="a body"):
    return AnswerRecord(
        answer_id=answer_id,
        score=score,
        comment_count=comment_count,
        answerer_reputation=reputation,
        body=body,
    )


def make_question(
    question_id=1,
    answers=(),
    accepted=None,
    score=0,
    view_count=100,
    favorite_count=0,
    comment_count=0,
    asker_reputation=50,
    tags=("java",),
    title="How do I frob the widget?",
    body="<p>frobbing fails</p>",
    code_blocks=(),
    closed=False,
    last_activity_days_ago=120,
    now=NOW,
):
    last_activity = now - timedelta(days=last_activity_days_ago)
    return QuestionRecord(
        question_id=question_id,
        title=title,
        body=body,
        code_blocks=tuple(code_blocks),
        tags=tuple(tags),
        creation_date=last_activity - timedelta(days=30),
        last_activity_date=last_activity,
        score=score,
        view_count=view_count,
        favorite_count=favorite_count,
        comment_count=comment_count,
        accepted_answer_id=accepted,
        answers=tuple(answers),
        asker_reputation=asker_reputation,
        closed_or_deleted=closed,
        as_of=now,
    )


@pytest.fixture
def now():
    return NOW
