"""
Generation backends.

A backend turns a rendered prompt into text. Each call makes one attempt and
reports failures as BackendTimeoutError or BackendRequestError;
`generate_with_retry` adds the retry policy on top for every backend alike.

Backends:
    HttpGenerationBackend: JSON POST {prompt, max_tokens, temperature} -> {"text": ...}
    OpenAICompatibleBackend: the `openai` SDK against any OpenAI-compatible completion server
    PolicyBackend: decoding of a local policy checkpoint
    StaticBackend: fixed text, for tests and dry runs
"""

# ------------------ Configure Logging ------------------ #
from counterclaim.logger import configure_logging

log = configure_logging(__name__)

# ------------------ Imports ------------------ #
import time
from typing import Any, Callable, Dict, Optional, Protocol, Tuple

import numpy as np
import requests
from openai import APIConnectionError, APIStatusError, APITimeoutError, OpenAI

from counterclaim.errors import BackendError
from counterclaim.policy_optimizer import BigramPolicy, generate

from .errors.orchestrator_errors import BackendRequestError, BackendTimeoutError
from .models.orchestrator_models import GenerationRequest, GenerationResponse


class GenerationBackend(Protocol):
    backend_id: str

    def generate(self, request: GenerationRequest) -> GenerationResponse: ...


class HttpGenerationBackend:
    """
    Client for a plain HTTP generation service.

    Attributes:
        url: Endpoint receiving the POST
        session: The requests session (headers set once)
    """

    def __init__(self, url: str, headers: Optional[Dict[str, str]] = None, session: Optional[requests.Session] = None):
        self.url = url
        self.backend_id = f"http:{url}"
        self.session = session or requests.Session()
        self.session.headers.update({"Content-Type": "application/json", "Accept": "application/json"})
        if headers:
            self.session.headers.update(headers)

    def _handle_response(self, response: requests.Response) -> str:
        try:
            response.raise_for_status()
            body = response.json()
        except requests.exceptions.HTTPError as e:
            raise BackendRequestError(f"Backend returned HTTP {response.status_code}: {e}", response.status_code) from e
        except ValueError as e:
            raise BackendRequestError("Backend returned invalid JSON", response.status_code) from e
        text = body.get("text") if isinstance(body, dict) else None
        if not isinstance(text, str):
            raise BackendRequestError("Backend response has no 'text' field", response.status_code)
        return text

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        payload = {"prompt": request.prompt, "max_tokens": request.max_tokens, "temperature": request.temperature}
        log.fine(f"POST {self.url} ({len(request.prompt)} prompt chars)")
        started = time.perf_counter()
        try:
            response = self.session.post(self.url, json=payload, timeout=request.timeout)
        except requests.exceptions.Timeout as e:
            raise BackendTimeoutError(f"Backend at {self.url} timed out after {request.timeout}s") from e
        except requests.exceptions.RequestException as e:
            raise BackendRequestError(f"Request to {self.url} failed: {e}") from e
        text = self._handle_response(response)
        return GenerationResponse(text=text, latency_s=time.perf_counter() - started, backend_id=self.backend_id)


class OpenAICompatibleBackend:
    """
    Completion client for a server speaking the OpenAI API, e.g. one hosting the fine-tuned generator.

    The SDK's own retries are disabled; generate_with_retry owns that.
    """

    def __init__(self, model: str, base_url: Optional[str] = None, api_key: Optional[str] = None, client: Any = None):
        self.model = model
        self.backend_id = f"openai:{model}"
        # Self-hosted servers accept any key
        self.client = client or OpenAI(api_key=api_key or "EMPTY", base_url=base_url, max_retries=0)

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        started = time.perf_counter()
        try:
            completion = self.client.completions.create(
                model=self.model,
                prompt=request.prompt,
                max_tokens=request.max_tokens,
                temperature=request.temperature,
                timeout=request.timeout,
            )
        except APITimeoutError as e:
            raise BackendTimeoutError(f"{self.backend_id} timed out after {request.timeout}s") from e
        except APIStatusError as e:
            raise BackendRequestError(f"{self.backend_id} returned HTTP {e.status_code}: {e.message}", e.status_code) from e
        except APIConnectionError as e:
            raise BackendRequestError(f"Could not reach {self.backend_id}: {e}") from e
        if not completion.choices:
            raise BackendRequestError(f"{self.backend_id} returned no choices")
        return GenerationResponse(
            text=completion.choices[0].text or "", latency_s=time.perf_counter() - started, backend_id=self.backend_id
        )


class PolicyBackend:
    """
    Decodes with a local policy; temperature 0 is greedy, anything else samples with `seed`.

    The response is cut at request.max_tokens actions or the policy's max_length, whichever is smaller.
    """

    def __init__(self, policy: BigramPolicy, name: str = "policy", seed: int = 0):
        self.policy = policy
        self.seed = seed
        self.backend_id = f"policy:{name}"

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        started = time.perf_counter()
        greedy = request.temperature == 0.0
        text = generate(
            self.policy,
            request.prompt,
            greedy=greedy,
            rng=np.random.default_rng(self.seed),
            max_length=request.max_tokens,
        )
        return GenerationResponse(text=text, latency_s=time.perf_counter() - started, backend_id=self.backend_id)


class StaticBackend:
    def __init__(self, text: str, backend_id: str = "static"):
        self.text = text
        self.backend_id = backend_id

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        return GenerationResponse(text=self.text, latency_s=0.0, backend_id=self.backend_id)


def generate_with_retry(
    backend: GenerationBackend,
    request: GenerationRequest,
    retries: int = 2,
    backoff: float = 0.5,
    sleep: Callable[[float], None] = time.sleep,
) -> Tuple[GenerationResponse, int]:
    """
    Call a backend, retrying timeouts and transient failures with exponential backoff.

    Waits backoff, 2 * backoff, 4 * backoff, ... between attempts.

    Args:
        backend: Backend to call
        request: The generation request
        retries: Extra attempts after the first
        backoff: First wait in seconds
        sleep: Wait function

    Returns:
        Tuple of (response, attempts used)

    Raises:
        BackendError: The last failure, once retries are exhausted or the failure is not transient
    """
    attempt = 0
    while True:
        attempt += 1
        try:
            return backend.generate(request), attempt
        except BackendError as e:
            transient = isinstance(e, BackendTimeoutError) or (isinstance(e, BackendRequestError) and e.retryable)
            if not transient or attempt > retries:
                log.error(f"{backend.backend_id} failed after {attempt} attempt(s): {e.message}")
                raise
            delay = backoff * 2 ** (attempt - 1)
            log.warning(f"{backend.backend_id} attempt {attempt} failed ({e.message}); retrying in {delay:.2f}s")
            sleep(delay)
