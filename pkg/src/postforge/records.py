"""Domain records for ingested Q&A data."""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Any


def parse_timestamp(value: Any) -> datetime:
    """Accept ISO-8601 strings or epoch seconds; always returns aware UTC."""
    if isinstance(value, datetime):
        ts = value
    elif isinstance(value, (int, float)):
        ts = datetime.fromtimestamp(value, tz=timezone.utc)
    elif isinstance(value, str):
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    else:
        raise ValueError(f"not a timestamp: {value!r}")
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


@dataclass(frozen=True)
class AnswerRecord:
    answer_id: int
    score: int
    comment_count: int
    answerer_reputation: int
    body: str
    code_blocks: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "answer_id": self.answer_id,
            "score": self.score,
            "comment_count": self.comment_count,
            "answerer_reputation": self.answerer_reputation,
            "body": self.body,
            "code_blocks": list(self.code_blocks),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnswerRecord":
        return cls(
            answer_id=int(data["answer_id"]),
            score=int(data["score"]),
            comment_count=int(data.get("comment_count", 0)),
            answerer_reputation=int(data.get("answerer_reputation", 0)),
            body=str(data.get("body", "")),
            code_blocks=tuple(data.get("code_blocks", ())),
        )


@dataclass(frozen=True)
class QuestionRecord:
    question_id: int
    title: str
    body: str
    code_blocks: tuple[str, ...]
    tags: tuple[str, ...]
    creation_date: datetime
    last_activity_date: datetime
    score: int
    view_count: int
    favorite_count: int
    comment_count: int
    accepted_answer_id: int | None
    answers: tuple[AnswerRecord, ...]
    asker_reputation: int
    closed_or_deleted: bool
    as_of: datetime | None = None
    flags: tuple[str, ...] = ()

    def with_flags(self, *new_flags: str) -> "QuestionRecord":
        merged = tuple(dict.fromkeys(self.flags + new_flags))
        return replace(self, flags=merged)

    def to_dict(self) -> dict:
        data = {
            "question_id": self.question_id,
            "title": self.title,
            "body": self.body,
            "code_blocks": list(self.code_blocks),
            "tags": list(self.tags),
            "creation_date": format_timestamp(self.creation_date),
            "last_activity_date": format_timestamp(self.last_activity_date),
            "score": self.score,
            "view_count": self.view_count,
            "favorite_count": self.favorite_count,
            "comment_count": self.comment_count,
            "accepted_answer_id": self.accepted_answer_id,
            "answers": [a.to_dict() for a in self.answers],
            "asker_reputation": self.asker_reputation,
            "closed_or_deleted": self.closed_or_deleted,
        }
        if self.as_of is not None:
            data["as_of"] = format_timestamp(self.as_of)
        if self.flags:
            data["flags"] = list(self.flags)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "QuestionRecord":
        accepted = data.get("accepted_answer_id")
        as_of = data.get("as_of")
        return cls(
            question_id=int(data["question_id"]),
            title=str(data.get("title", "")),
            body=str(data.get("body", "")),
            code_blocks=tuple(data.get("code_blocks", ())),
            tags=tuple(str(t).lower() for t in data.get("tags", ())),
            creation_date=parse_timestamp(data["creation_date"]),
            last_activity_date=parse_timestamp(data["last_activity_date"]),
            score=int(data.get("score", 0)),
            view_count=int(data.get("view_count", 0)),
            favorite_count=int(data.get("favorite_count", 0)),
            comment_count=int(data.get("comment_count", 0)),
            accepted_answer_id=None if accepted is None else int(accepted),
            answers=tuple(AnswerRecord.from_dict(a) for a in data.get("answers", ())),
            asker_reputation=int(data.get("asker_reputation", 0)),
            closed_or_deleted=bool(data.get("closed_or_deleted", False)),
            as_of=None if as_of is None else parse_timestamp(as_of),
            flags=tuple(data.get("flags", ())),
        )


@dataclass(frozen=True)
class UserProfile:
    user_id: int
    reputation: int
    top_tags: tuple[str, ...]

    def __post_init__(self):
        lowered = tuple(t.lower() for t in self.top_tags)
        if len(set(lowered)) != len(lowered):
            raise ValueError("top_tags must be distinct")
        object.__setattr__(self, "top_tags", lowered)


def validate_question(q: QuestionRecord) -> tuple[list[str], list[str]]:
    """Check type invariants.

    Returns ``(violations, flags)``: violations quarantine the record, flags
    are recorded on it but do not block storage (e.g. an accepted_answer_id
    that does not resolve to any answer, which the upstream API can produce).
    """
    violations: list[str] = []
    flags: list[str] = []

    if q.question_id <= 0:
        violations.append("question_id must be positive")
    if not q.tags:
        violations.append("tags must be non-empty")
    if q.last_activity_date < q.creation_date:
        violations.append("last_activity_date precedes creation_date")
    for name in ("view_count", "favorite_count", "comment_count", "asker_reputation"):
        if getattr(q, name) < 0:
            violations.append(f"{name} must be non-negative")

    answer_ids = [a.answer_id for a in q.answers]
    if len(set(answer_ids)) != len(answer_ids):
        violations.append("duplicate answer_id within question")
    if any(a.answer_id <= 0 for a in q.answers):
        violations.append("answer_id must be positive")
    if any(a.comment_count < 0 or a.answerer_reputation < 0 for a in q.answers):
        violations.append("answer counters must be non-negative")

    if q.accepted_answer_id is not None and q.accepted_answer_id not in answer_ids:
        flags.append("dangling_accepted_answer")

    return violations, flags
