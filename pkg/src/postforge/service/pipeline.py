"""End-to-end suggestion loop.

Stage order: stored posts, staleness filter, context similarity above the
floor, expertise filter, deficiency prediction, probabilistic assignment.
Per-stage candidate counts are kept on every outcome so the narrowing is
auditable.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable

import httpx

from ..classifier.model_io import load_model, predict_any
from ..features import LABEL_YES, extract_features
from ..matcher import (
    ContextMatcher,
    ExpertiseProfile,
    NoAssignableCandidateError,
    ScoredCandidate,
    assign,
    expertise_filter,
    extract_context,
    rate_limit_check,
    sort_candidates,
    staleness_filter,
)
from ..snippets.clones import detect_clones
from ..snippets.draft import DraftAnswer, NoRecommendation, compose_draft
from ..snippets.lexer import lex
from ..store import QuestionStore
from .config import PipelineConfig
from .sessions import (
    STATE_APPROVED,
    STATE_DRAFTED,
    STATE_SUBMITTED,
    AssignmentSession,
    IllegalTransitionError,
    Outbox,
    OutboxRecord,
)

logger = logging.getLogger(__name__)

STAGE_ORDER = ("stored", "stale", "similar", "expertise", "deficient")


@dataclass(frozen=True)
class NoCandidate:
    reason: str  # rate_limited | empty_store | staleness | similarity | expertise | deficiency
    retry_at: datetime
    stage_counts: dict = field(default_factory=dict)


class Pipeline:
    """Loads the store, model, profile and coding context once and runs the
    suggestion loop against them."""

    def __init__(
        self,
        cfg: PipelineConfig,
        store: QuestionStore,
        model,
        profile: ExpertiseProfile,
        context,
    ):
        self.cfg = cfg
        self.store = store
        self.model = model
        self.profile = profile
        self.context = context
        self._session_counter = 0

    @classmethod
    def from_config(cls, cfg: PipelineConfig) -> "Pipeline":
        cfg.validate_paths()
        store = QuestionStore(cfg.store, create=False)
        model = load_model(cfg.model)
        profile = ExpertiseProfile.from_file(cfg.profile)
        sources, names = [], []
        for path in sorted(Path(cfg.context_dir).rglob("*.java")):
            sources.append(path.read_text(encoding="utf-8"))
            names.append(str(path))
        if not sources:
            raise FileNotFoundError(f"no .java sources under {cfg.context_dir}")
        context = extract_context(sources, k=cfg.shingle_k, source_ids=names)
        return cls(cfg, store, model, profile, context)

    def next_session_id(self) -> str:
        self._session_counter += 1
        return f"s-{self._session_counter:04d}"

    def scored_candidates(self, now: datetime) -> tuple[list[ScoredCandidate], dict, str | None]:
        """Filter stages up to assignment. Returns (candidates, stage_counts,
        empty_stage) where empty_stage names the first stage left empty."""
        records = list(self.store)
        counts = {"stored": len(records)}
        if not records:
            return [], counts, "empty_store"

        stale = [q for q in records if staleness_filter(q, now, self.cfg.staleness_days)]
        counts["stale"] = len(stale)
        if not stale:
            return [], counts, "staleness"

        matcher = ContextMatcher(stale, self.cfg.weights, self.cfg.shingle_k)
        scored_pairs = [(matcher.score(self.context, q), q) for q in stale]
        similar = [
            (c, q) for c, q in scored_pairs if c.similarity >= self.cfg.similarity_floor
        ]
        counts["similar"] = len(similar)
        if not similar:
            return [], counts, "similarity"

        experts = [(c, q) for c, q in similar if expertise_filter(q, self.profile)]
        counts["expertise"] = len(experts)
        if not experts:
            return [], counts, "expertise"

        deficient = [
            c for c, q in experts if predict_any(self.model, extract_features(q))[0] == LABEL_YES
        ]
        counts["deficient"] = len(deficient)
        if not deficient:
            return [], counts, "deficiency"
        return sort_candidates(deficient), counts, None

    def run(
        self,
        now: datetime,
        rng: random.Random | None = None,
        record_assignment: bool = True,
    ) -> AssignmentSession | NoCandidate:
        retry_at = now + timedelta(hours=self.cfg.retry_period_hours)
        if not rate_limit_check(self.profile, now):
            return NoCandidate(reason="rate_limited", retry_at=retry_at, stage_counts={})
        candidates, counts, empty_stage = self.scored_candidates(now)
        logger.info("pipeline stage counts: %s", counts)
        if empty_stage is not None:
            return NoCandidate(reason=empty_stage, retry_at=retry_at, stage_counts=counts)

        rng = rng or random.Random(self.cfg.rng_seed)
        try:
            question_id = assign(candidates, rng)
        except NoAssignableCandidateError:
            counts["assignable"] = 0
            return NoCandidate(reason="assignment", retry_at=retry_at, stage_counts=counts)
        chosen = next(c for c in candidates if c.question_id == question_id)

        session = AssignmentSession(
            session_id=self.next_session_id(),
            question_id=question_id,
            similarity=chosen.similarity,
            component_scores=dict(chosen.component_scores),
            created_at=now,
        )
        if record_assignment:
            self.profile.record_assignment(now)
            if self.cfg.profile.exists():
                self.profile.to_file(self.cfg.profile)

        draft = self.generate_draft(question_id, now)
        if isinstance(draft, DraftAnswer):
            session.draft = draft
            session.transition(STATE_DRAFTED, now)
        else:
            session.note = f"no draft: {draft.reason}"
        return session

    def generate_draft(self, question_id: int, now: datetime) -> DraftAnswer | NoRecommendation:
        question = self.store.get(question_id)
        if not question.code_blocks:
            return NoRecommendation(question_id=question_id, reason="no_code")
        corpus_streams = []
        corpus_texts: dict[str, str] = {}
        for path in sorted(Path(self.cfg.context_dir).rglob("*.java")):
            text = path.read_text(encoding="utf-8")
            corpus_texts[str(path)] = text
            corpus_streams.append(lex(text, source_id=str(path)))
        matches = []
        for i, block in enumerate(question.code_blocks):
            needle = lex(block, source_id=f"q{question_id}#{i}")
            matches.extend(
                detect_clones(
                    needle,
                    corpus_streams,
                    min_lines=self.cfg.min_lines,
                    normalize=self.cfg.normalize_clones,
                )
            )
        return compose_draft(question, matches, corpus_texts, now=now)


Submitter = Callable[[OutboxRecord], int]


def post_live(record: OutboxRecord, endpoint: str, api_key: str, timeout: float = 30.0) -> int:
    """Submit an approved answer to the live write API; returns the remote
    answer id."""
    resp = httpx.post(
        endpoint.format(question_id=record.question_id),
        data={"body": record.answer_body, "key": api_key},
        timeout=timeout,
    )
    resp.raise_for_status()
    return int(resp.json()["items"][0]["answer_id"])


def approve_and_submit(
    session: AssignmentSession,
    edited_body: str,
    cfg: PipelineConfig,
    outbox: Outbox,
    now: datetime,
    submitter: Submitter | None = None,
) -> OutboxRecord:
    """Drive a session through approved to submitted.

    Dry-run mode only writes the outbox record. Live mode calls the
    submitter; on failure the session stays approved, the failure is recorded
    in the outbox, and a retry is allowed.
    """
    if not edited_body or not edited_body.strip():
        raise ValueError("edited body must be non-empty")
    if session.state != STATE_APPROVED:
        session.transition(STATE_APPROVED, now)  # raises on illegal states
    session.edited_body = edited_body

    mode = "dry_run" if cfg.dry_run else "live"
    record = OutboxRecord(
        session_id=session.session_id,
        question_id=session.question_id,
        answer_body=edited_body,
        submitted_at=now,
        mode=mode,
    )
    if mode == "live":
        if submitter is None:
            raise ValueError("live submission requires a submitter")
        try:
            remote_id = submitter(record)
        except Exception as exc:
            failed = OutboxRecord(
                session_id=session.session_id,
                question_id=session.question_id,
                answer_body=edited_body,
                submitted_at=now,
                mode=mode,
                failed=True,
            )
            outbox.write(failed)
            logger.warning("live submission failed for %s: %s", session.session_id, exc)
            return failed
        record = OutboxRecord(
            session_id=record.session_id,
            question_id=record.question_id,
            answer_body=record.answer_body,
            submitted_at=record.submitted_at,
            mode=mode,
            remote_answer_id=remote_id,
        )
    outbox.write(record)
    session.transition(STATE_SUBMITTED, now)
    return record
