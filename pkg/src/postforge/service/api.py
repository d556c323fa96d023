"""HTTP surface for the suggestion loop.

GET /assignment is the single entry point the UI polls: it returns the
active session when one exists, lazily runs the pipeline when the retry
period has elapsed, and answers 204 otherwise. Mutating endpoints are
guarded by the session state machine, so replays of the same call fail with
409 instead of double-applying.
"""

from __future__ import annotations

import random
import threading
from datetime import datetime, timezone
from typing import Callable

from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..matcher import SimilarityWeights
from ..records import format_timestamp
from ..snippets.draft import DraftAnswer
from .config import PipelineConfig
from .pipeline import NoCandidate, Pipeline, approve_and_submit
from .schemas import (
    AnswerBodyUpdate,
    AnswerView,
    AssignmentView,
    DraftView,
    OutboxView,
    PostView,
    SettingsUpdate,
    SettingsView,
)
from .sessions import (
    STATE_DECLINED,
    STATE_DRAFTED,
    STATE_SUGGESTED,
    AssignmentSession,
    IllegalTransitionError,
    Outbox,
)

Clock = Callable[[], datetime]


def _utc_now() -> datetime:
    return datetime.now(tz=timezone.utc)


class ServiceState:
    """Shared mutable state behind the handlers; one lock serializes all
    session mutations and pipeline runs (one active session per profile)."""

    def __init__(
        self,
        pipeline: Pipeline,
        outbox: Outbox,
        clock: Clock = _utc_now,
        rng: random.Random | None = None,
    ):
        self.pipeline = pipeline
        self.outbox = outbox
        self.clock = clock
        self.rng = rng or random.Random(pipeline.cfg.rng_seed)
        self.sessions: dict[str, AssignmentSession] = {}
        self.active_session_id: str | None = None
        self.next_retry_at: datetime | None = None
        self.last_no_candidate: NoCandidate | None = None
        self.lock = threading.Lock()

    @property
    def cfg(self) -> PipelineConfig:
        return self.pipeline.cfg

    def active_session(self) -> AssignmentSession | None:
        if self.active_session_id is None:
            return None
        session = self.sessions.get(self.active_session_id)
        if session is None or not session.active:
            return None
        return session

    def poll(self) -> AssignmentSession | NoCandidate | None:
        """Active session, or a fresh pipeline run when due, or None."""
        session = self.active_session()
        if session is not None:
            return session
        now = self.clock()
        if self.next_retry_at is not None and now < self.next_retry_at:
            return self.last_no_candidate
        outcome = self.pipeline.run(now, rng=self.rng)
        if isinstance(outcome, NoCandidate):
            self.next_retry_at = outcome.retry_at
            self.last_no_candidate = outcome
            return outcome
        self.sessions[outcome.session_id] = outcome
        self.active_session_id = outcome.session_id
        self.next_retry_at = None
        self.last_no_candidate = None
        return outcome


def _draft_view(draft: DraftAnswer | None) -> DraftView | None:
    if draft is None:
        return None
    return DraftView(
        snippet=draft.snippet,
        provenance=draft.provenance,
        created_at=format_timestamp(draft.created_at),
    )


def _assignment_view(state: ServiceState, session: AssignmentSession) -> AssignmentView:
    question = state.pipeline.store.get(session.question_id)
    return AssignmentView(
        session_id=session.session_id,
        question_id=session.question_id,
        title=question.title,
        similarity=session.similarity,
        component_scores=session.component_scores,
        state=session.state,
        draft=_draft_view(session.draft),
        edited_body=session.edited_body,
        note=session.note,
        timestamps=dict(session.timestamps),
    )


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="postforge", version="0.1.0")
    app.state.service = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-No-Candidate-Reason", "X-Retry-At"],
    )

    @app.exception_handler(IllegalTransitionError)
    async def illegal_transition(_, exc: IllegalTransitionError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    def get_session_or_404(session_id: str) -> AssignmentSession:
        session = state.sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session

    @app.exception_handler(KeyError)
    async def not_found(_, exc: KeyError):
        return JSONResponse(status_code=404, content={"detail": f"not found: {exc}"})

    @app.exception_handler(ValueError)
    async def invalid(_, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/assignment", response_model=AssignmentView, status_code=200)
    def get_assignment():
        with state.lock:
            outcome = state.poll()
            if isinstance(outcome, AssignmentSession):
                return _assignment_view(state, outcome)
            headers = {}
            if isinstance(outcome, NoCandidate):
                headers["X-No-Candidate-Reason"] = outcome.reason
                headers["X-Retry-At"] = format_timestamp(outcome.retry_at)
            return Response(status_code=204, headers=headers)

    @app.get("/posts/{question_id}", response_model=PostView)
    def get_post(question_id: int):
        q = state.pipeline.store.get(question_id)
        return PostView(
            question_id=q.question_id,
            title=q.title,
            body=q.body,
            tags=list(q.tags),
            score=q.score,
            view_count=q.view_count,
            favorite_count=q.favorite_count,
            comment_count=q.comment_count,
            accepted_answer_id=q.accepted_answer_id,
            creation_date=format_timestamp(q.creation_date),
            last_activity_date=format_timestamp(q.last_activity_date),
            code_blocks=list(q.code_blocks),
            answers=[
                AnswerView(
                    answer_id=a.answer_id,
                    score=a.score,
                    comment_count=a.comment_count,
                    answerer_reputation=a.answerer_reputation,
                    body=a.body,
                    code_blocks=list(a.code_blocks),
                )
                for a in q.answers
            ],
        )

    @app.post("/assignment/{session_id}/draft", response_model=AssignmentView)
    def regenerate_draft(session_id: str):
        with state.lock:
            session = get_session_or_404(session_id)
            if session.state not in (STATE_SUGGESTED, STATE_DRAFTED):
                raise IllegalTransitionError(session_id, session.state, STATE_DRAFTED)
            now = state.clock()
            outcome = state.pipeline.generate_draft(session.question_id, now)
            if isinstance(outcome, DraftAnswer):
                session.draft = outcome
                session.note = ""
                if session.state == STATE_SUGGESTED:
                    session.transition(STATE_DRAFTED, now)
            else:
                session.note = f"no draft: {outcome.reason}"
            return _assignment_view(state, session)

    @app.put("/assignment/{session_id}/answer", response_model=AssignmentView)
    def put_answer(session_id: str, update: AnswerBodyUpdate):
        with state.lock:
            session = get_session_or_404(session_id)
            if session.state not in (STATE_SUGGESTED, STATE_DRAFTED):
                raise IllegalTransitionError(session_id, session.state, session.state)
            session.edited_body = update.body
            return _assignment_view(state, session)

    @app.post("/assignment/{session_id}/approve", response_model=OutboxView)
    def approve(session_id: str):
        with state.lock:
            session = get_session_or_404(session_id)
            body = session.answer_body()
            if body is None:
                return JSONResponse(
                    status_code=422,
                    content={"detail": "session has no draft and no edited body to submit"},
                )
            submitter = None
            if not state.cfg.dry_run:
                import os

                from .pipeline import post_live

                endpoint = state.cfg.live_endpoint
                api_key = os.environ.get("POSTFORGE_API_KEY", "")
                submitter = lambda record: post_live(record, endpoint, api_key)  # noqa: E731
            record = approve_and_submit(
                session, body, state.cfg, state.outbox, now=state.clock(), submitter=submitter
            )
            return OutboxView(
                session_id=record.session_id,
                question_id=record.question_id,
                answer_body=record.answer_body,
                submitted_at=format_timestamp(record.submitted_at),
                mode=record.mode,
                failed=record.failed,
            )

    @app.post("/assignment/{session_id}/decline", response_model=AssignmentView)
    def decline(session_id: str):
        with state.lock:
            session = get_session_or_404(session_id)
            session.transition(STATE_DECLINED, state.clock())
            return _assignment_view(state, session)

    @app.get("/settings", response_model=SettingsView)
    def get_settings():
        return SettingsView(
            max_suggestions_per_day=state.pipeline.profile.max_suggestions_per_day,
            **state.cfg.to_settings_dict(),
        )

    @app.put("/settings", response_model=SettingsView)
    def put_settings(update: SettingsUpdate):
        with state.lock:
            cfg = state.cfg
            if update.weights is not None:
                cfg.weights = SimilarityWeights(
                    code=update.weights.code, api=update.weights.api, text=update.weights.text
                )
            if update.max_suggestions_per_day is not None:
                state.pipeline.profile.max_suggestions_per_day = update.max_suggestions_per_day
            if update.retry_period_hours is not None:
                cfg.retry_period_hours = update.retry_period_hours
            if update.min_lines is not None:
                cfg.min_lines = update.min_lines
            if update.similarity_floor is not None:
                cfg.similarity_floor = update.similarity_floor
            return get_settings()

    return app


def build_service(config_path: str, clock: Clock = _utc_now) -> FastAPI:
    cfg = PipelineConfig.from_file(config_path)
    pipeline = Pipeline.from_config(cfg)
    outbox = Outbox(cfg.outbox)
    return create_app(ServiceState(pipeline, outbox, clock=clock))
