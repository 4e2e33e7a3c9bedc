"""HTTP API: hint preview, colorization jobs, sessions, replay."""

from .app import ServiceConfig, create_app
from .jobs import Job, JobQueue, QueueFull
from .sessions import SessionNotFound, SessionStore, replay_session

__all__ = [
    "Job",
    "JobQueue",
    "QueueFull",
    "ServiceConfig",
    "SessionNotFound",
    "SessionStore",
    "create_app",
    "replay_session",
]
