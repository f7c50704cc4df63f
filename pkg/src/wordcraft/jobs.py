"""Asynchronous image generation jobs.

Image generation is slow, so the API returns a job id and the client polls.
At most one job per session may be pending; a re-post with the same
idempotency key returns the existing job instead of starting another.
Completion re-enters the session writer to attach the result.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from .errors import ImageJobPending, UnknownJob, WordcraftError
from .gateway import ImageResult


@dataclass
class Job:
    job_id: str
    session_id: str
    style: str
    status: str = "pending"  # "pending" | "done" | "failed"
    image_ref: str | None = None
    error_code: str | None = None
    error_message: str | None = None
    idempotency_key: str | None = None

    def to_dict(self) -> dict:
        error = None
        if self.error_code is not None:
            error = {"code": self.error_code, "message": self.error_message}
        return {
            "job_id": self.job_id,
            "session_id": self.session_id,
            "style": self.style,
            "status": self.status,
            "image_ref": self.image_ref,
            "error": error,
        }


class JobManager:
    def __init__(self, workers: int = 2) -> None:
        self._executor = ThreadPoolExecutor(max_workers=workers)
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def get(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise UnknownJob(f"unknown job {job_id!r}")
        return job

    def submit(
        self,
        *,
        job_id: str,
        session_id: str,
        style: str,
        idempotency_key: str | None,
        generate: Callable[[], ImageResult],
        attach: Callable[[Job, ImageResult], str],
    ) -> Job:
        """Queue a generation; ``attach`` runs under the session writer."""
        with self._lock:
            for job in self._jobs.values():
                if job.session_id != session_id:
                    continue
                if idempotency_key is not None and job.idempotency_key == idempotency_key:
                    return job
                if job.status == "pending":
                    raise ImageJobPending(
                        f"session {session_id} already has pending job {job.job_id}",
                        job_id=job.job_id,
                    )
            job = Job(
                job_id=job_id,
                session_id=session_id,
                style=style,
                idempotency_key=idempotency_key,
            )
            self._jobs[job_id] = job
        self._executor.submit(self._run, job, generate, attach)
        return job

    def _run(
        self,
        job: Job,
        generate: Callable[[], ImageResult],
        attach: Callable[[Job, ImageResult], str],
    ) -> None:
        try:
            result = generate()
            image_ref = attach(job, result)
        except WordcraftError as exc:
            job.error_code = exc.code
            job.error_message = exc.message
            job.status = "failed"
            return
        except Exception as exc:  # surface unexpected bugs in the job state
            job.error_code = "INTERNAL_ERROR"
            job.error_message = str(exc)
            job.status = "failed"
            return
        job.image_ref = image_ref
        job.status = "done"

    def shutdown(self) -> None:
        self._executor.shutdown(wait=True)
