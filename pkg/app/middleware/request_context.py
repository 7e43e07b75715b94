"""
Request context middleware for logging.

Every log record emitted while serving a request carries the run ID taken
from ``X-Run-ID`` (or freshly generated) and the ``http`` experiment tag.
"""

from starlette.middleware.base import BaseHTTPMiddleware
from starlette.requests import Request

from app.core.logging import generate_run_id, set_run_context

RUN_ID_HEADER = "X-Run-ID"


class RequestContextMiddleware(BaseHTTPMiddleware):
    """Middleware to set run context for logging."""

    async def dispatch(self, request: Request, call_next):
        run_id = request.headers.get(RUN_ID_HEADER) or generate_run_id()
        set_run_context(experiment_id="http", run_id=run_id)

        response = await call_next(request)

        response.headers[RUN_ID_HEADER] = run_id
        return response
