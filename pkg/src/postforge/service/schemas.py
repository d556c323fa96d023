"""Request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class DraftView(BaseModel):
    snippet: str
    provenance: dict
    created_at: str


class AssignmentView(BaseModel):
    session_id: str
    question_id: int
    title: str
    similarity: float
    component_scores: dict[str, float]
    state: str
    draft: DraftView | None = None
    edited_body: str | None = None
    note: str = ""
    timestamps: dict[str, str]


class AnswerView(BaseModel):
    answer_id: int
    score: int
    comment_count: int
    answerer_reputation: int
    body: str
    code_blocks: list[str]


class PostView(BaseModel):
    question_id: int
    title: str
    body: str
    tags: list[str]
    score: int
    view_count: int
    favorite_count: int
    comment_count: int
    accepted_answer_id: int | None
    creation_date: str
    last_activity_date: str
    code_blocks: list[str]
    answers: list[AnswerView]


class AnswerBodyUpdate(BaseModel):
    body: str = Field(min_length=1)


class WeightsUpdate(BaseModel):
    code: float = Field(ge=0)
    api: float = Field(ge=0)
    text: float = Field(ge=0)


class SettingsUpdate(BaseModel):
    max_suggestions_per_day: int | None = Field(default=None, ge=1)
    weights: WeightsUpdate | None = None
    retry_period_hours: float | None = Field(default=None, gt=0)
    min_lines: int | None = Field(default=None, ge=2)
    similarity_floor: float | None = Field(default=None, ge=0, le=1)


class SettingsView(BaseModel):
    max_suggestions_per_day: int
    weights: dict[str, float]
    retry_period_hours: float
    min_lines: int
    similarity_floor: float
    staleness_days: int
    dry_run: bool


class OutboxView(BaseModel):
    session_id: str
    question_id: int
    answer_body: str
    submitted_at: str
    mode: str
    failed: bool


class ErrorView(BaseModel):
    detail: str
