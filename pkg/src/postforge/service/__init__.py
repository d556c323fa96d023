"""Service orchestration: pipeline, sessions, outbox and HTTP API."""

from .api import ServiceState, build_service, create_app
from .config import PipelineConfig
from .pipeline import NoCandidate, Pipeline, approve_and_submit
from .sessions import (
    AssignmentSession,
    IllegalTransitionError,
    Outbox,
    OutboxRecord,
)

__all__ = [
    "ServiceState",
    "build_service",
    "create_app",
    "PipelineConfig",
    "NoCandidate",
    "Pipeline",
    "approve_and_submit",
    "AssignmentSession",
    "IllegalTransitionError",
    "Outbox",
    "OutboxRecord",
]
