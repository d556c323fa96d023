"""Assignment sessions and the append-only outbox."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from ..records import format_timestamp
from ..snippets.draft import DraftAnswer

STATE_SUGGESTED = "suggested"
STATE_DRAFTED = "drafted"
STATE_APPROVED = "approved"
STATE_SUBMITTED = "submitted"
STATE_DECLINED = "declined"

# declined is reachable from every pre-submitted state
LEGAL_TRANSITIONS: dict[str, frozenset[str]] = {
    STATE_SUGGESTED: frozenset({STATE_DRAFTED, STATE_APPROVED, STATE_DECLINED}),
    STATE_DRAFTED: frozenset({STATE_APPROVED, STATE_DECLINED}),
    STATE_APPROVED: frozenset({STATE_SUBMITTED, STATE_DECLINED}),
    STATE_SUBMITTED: frozenset(),
    STATE_DECLINED: frozenset(),
}

ACTIVE_STATES = frozenset({STATE_SUGGESTED, STATE_DRAFTED, STATE_APPROVED})


class IllegalTransitionError(RuntimeError):
    def __init__(self, session_id: str, current: str, target: str):
        super().__init__(f"session {session_id}: illegal transition {current} -> {target}")
        self.current = current
        self.target = target


@dataclass
class AssignmentSession:
    session_id: str
    question_id: int
    similarity: float
    component_scores: dict
    created_at: datetime
    state: str = STATE_SUGGESTED
    draft: DraftAnswer | None = None
    edited_body: str | None = None
    note: str = ""
    timestamps: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.timestamps.setdefault(STATE_SUGGESTED, format_timestamp(self.created_at))

    @property
    def active(self) -> bool:
        return self.state in ACTIVE_STATES

    def transition(self, target: str, now: datetime) -> None:
        if target not in LEGAL_TRANSITIONS.get(self.state, frozenset()):
            raise IllegalTransitionError(self.session_id, self.state, target)
        self.state = target
        self.timestamps[target] = format_timestamp(now)

    def answer_body(self) -> str | None:
        """Body to submit: the reviewer's edit wins over the raw draft."""
        if self.edited_body:
            return self.edited_body
        if self.draft is not None and self.draft.snippet:
            return f"```\n{self.draft.snippet}\n```"
        return None


@dataclass(frozen=True)
class OutboxRecord:
    session_id: str
    question_id: int
    answer_body: str
    submitted_at: datetime
    mode: str  # dry_run | live
    failed: bool = False
    remote_answer_id: int | None = None

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "question_id": self.question_id,
            "answer_body": self.answer_body,
            "submitted_at": format_timestamp(self.submitted_at),
            "mode": self.mode,
            "failed": self.failed,
            "remote_answer_id": self.remote_answer_id,
        }


class OutboxError(RuntimeError):
    pass


class Outbox:
    """One file per approved session, written whole via rename so a record is
    either fully present or absent. Successful records are never overwritten."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, session_id: str, failed: bool) -> Path:
        suffix = ".failed.json" if failed else ".json"
        return self.directory / f"{session_id}{suffix}"

    def write(self, record: OutboxRecord) -> Path:
        path = self._path(record.session_id, record.failed)
        if not record.failed and path.exists():
            raise OutboxError(f"outbox already has a record for session {record.session_id}")
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(record.to_dict(), fh, indent=2)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        return path

    def records(self) -> list[dict]:
        out = []
        for path in sorted(self.directory.glob("*.json")):
            if path.name.endswith(".tmp"):
                continue
            with open(path, encoding="utf-8") as fh:
                out.append(json.load(fh))
        return out
