"""
HTTP service.

    POST /respond  {claim}       -> CounterResponse
    POST /retrieve {claim, k?}   -> {claim, documents}
    GET  /health                 -> version, backend and artifact digests

Every failure is answered as {"error": {"code": ..., "message": ...}}; a
failed generation also carries the retrieved evidence under "evidence".
"""

# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
from typing import Any, Dict, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from counterclaim import __version__
from counterclaim.errors import BackendError, CounterclaimError, DataError, UsageError

from .errors.orchestrator_errors import BackendTimeoutError, ResponseGenerationError
from .models.orchestrator_models import (
    CounterResponse,
    HealthReport,
    RespondRequest,
    RetrieveRequest,
    RetrieveResponse,
)
from .service import CounterclaimService


def error_body(code: str, message: str, **extra: Any) -> Dict[str, Any]:
    return {"error": {"code": code, "message": message, **extra}}


def status_for(error: CounterclaimError) -> int:
    """HTTP status of a package error, by family."""
    if isinstance(error, ResponseGenerationError):
        return 504 if error.timed_out else 502
    if isinstance(error, BackendTimeoutError):
        return 504
    if isinstance(error, BackendError):
        return 502
    if isinstance(error, UsageError):
        return 400
    if isinstance(error, DataError):
        return 422
    return 500


def create_app(service: CounterclaimService, title: Optional[str] = None) -> FastAPI:
    """
    Build the FastAPI application around a loaded service.

    Handlers are plain functions, so FastAPI runs them in its worker threads
    against the shared, read-only service.
    """
    app = FastAPI(title=title or "counterclaim", version=__version__)

    @app.exception_handler(CounterclaimError)
    async def handle_package_error(request: Request, error: CounterclaimError) -> JSONResponse:
        status = status_for(error)
        extra = {}
        if isinstance(error, ResponseGenerationError):
            extra["evidence"] = [doc.model_dump(mode="json") for doc in error.evidence]
        log.warning(f"{request.method} {request.url.path} -> {status} {error.error_code}: {error.message}")
        return JSONResponse(status_code=status, content=error_body(error.error_code, error.message, **extra))

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, error: RequestValidationError) -> JSONResponse:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in item['loc'])}: {item['msg']}" for item in error.errors()
        )
        return JSONResponse(status_code=422, content=error_body("invalid_request", problems))

    @app.exception_handler(Exception)
    async def handle_unexpected(request: Request, error: Exception) -> JSONResponse:
        log.error(f"{request.method} {request.url.path} failed: {error!r}")
        return JSONResponse(status_code=500, content=error_body("internal_error", "Internal server error"))

    @app.get("/health", response_model=HealthReport)
    def health() -> HealthReport:
        return service.health()

    @app.post("/retrieve", response_model=RetrieveResponse)
    def retrieve(body: RetrieveRequest) -> RetrieveResponse:
        return RetrieveResponse(claim=body.claim, documents=service.retrieve(body.claim, body.k))

    @app.post("/respond", response_model=CounterResponse)
    def respond(body: RespondRequest) -> CounterResponse:
        return service.respond(body.claim)

    return app
