"""Bounded job queue with a single background worker.

Model compute is serialized through a FIFO sized by configuration; request
handlers stay concurrent and observe jobs through monotone state transitions
queued -> running -> done | failed.
"""

from __future__ import annotations

import queue
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Callable

_STATE_ORDER = {"queued": 0, "running": 1, "done": 2, "failed": 2}


@dataclass
class Job:
    id: str
    kind: str
    payload: dict
    state: str = "queued"
    progress_done: int = 0
    progress_total: int = 0
    error: str | None = None
    result: dict = field(default_factory=dict)
    created_at: float = field(default_factory=time.time)
    updated_at: float = field(default_factory=time.time)

    def transition(self, new_state: str) -> None:
        if _STATE_ORDER[new_state] < _STATE_ORDER[self.state]:
            raise RuntimeError(f"illegal job transition {self.state} -> {new_state}")
        self.state = new_state
        self.updated_at = time.time()

    def status_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "state": self.state,
            "progress": {"done": self.progress_done, "total": self.progress_total},
            "error": self.error,
            "result": self.result if self.state == "done" else None,
        }


class QueueFull(RuntimeError):
    pass


class JobQueue:
    """FIFO of jobs consumed by one worker thread."""

    def __init__(self, worker_fn: Callable[[Job], dict], depth: int = 8):
        self._worker_fn = worker_fn
        self._queue: queue.Queue[Job | None] = queue.Queue(maxsize=depth)
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()

    def submit(self, kind: str, payload: dict) -> Job:
        job = Job(id=uuid.uuid4().hex, kind=kind, payload=payload)
        with self._lock:
            try:
                self._queue.put_nowait(job)
            except queue.Full:
                raise QueueFull("job queue is full") from None
            self._jobs[job.id] = job
        return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def _loop(self) -> None:
        while True:
            job = self._queue.get()
            if job is None:
                return
            job.transition("running")
            try:
                job.result = self._worker_fn(job)
                job.transition("done")
            except Exception as exc:
                job.error = f"{type(exc).__name__}: {exc}"
                job.transition("failed")
            finally:
                self._queue.task_done()

    def shutdown(self) -> None:
        self._queue.put(None)

    def wait_idle(self, timeout: float = 60.0) -> None:
        """Testing helper: block until queued work is drained."""
        deadline = time.time() + timeout
        while time.time() < deadline:
            with self._lock:
                busy = any(j.state in ("queued", "running") for j in self._jobs.values())
            if not busy:
                return
            time.sleep(0.01)
        raise TimeoutError("job queue did not drain in time")
