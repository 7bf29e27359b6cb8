"""
Tests for the FastAPI service.
"""

from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from counterclaim.orchestrator import BackendTimeoutError, CounterclaimService, RetrieveResponse, create_app

from .conftest import CLAIM, STATIC_TEXT


class AlwaysFails:
    """Backend raising the given error on every call."""

    backend_id = "failing"

    def __init__(self, error):
        self.error = error

    def generate(self, request):
        raise self.error


def with_backend(service, backend):
    return CounterclaimService(
        service.pipeline, service.reward_config, service.classifiers, backend, generation=service.generation
    )


@pytest.fixture(scope="module")
def client(service):
    """Test client over the shared service."""
    with TestClient(create_app(service)) as client:
        yield client


class TestEndpoints:
    def test_health(self, client, service):
        response = client.get("/health")

        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "ok"
        assert body["backend_id"] == "static"
        assert body["artifacts"] == service.artifacts

    def test_retrieve_matches_service(self, client, service):
        # Execute
        response = client.post("/retrieve", json={"claim": CLAIM, "k": 3})

        # Verify
        assert response.status_code == 200
        expected = RetrieveResponse(claim=CLAIM, documents=service.retrieve(CLAIM, 3))
        assert response.json() == expected.model_dump(mode="json")

    def test_respond(self, client, service):
        response = client.post("/respond", json={"claim": CLAIM})

        assert response.status_code == 200
        body = response.json()
        assert body["response"] == STATIC_TEXT
        assert len(body["evidence"]) == 4
        assert body["reward"]["total"] == pytest.approx(service.respond(CLAIM).reward.total, abs=1e-9)


class TestErrors:
    def test_malformed_body(self, client):
        response = client.post("/retrieve", json={"k": 2})

        assert response.status_code == 422
        assert response.json()["error"]["code"] == "invalid_request"

    def test_k_above_m(self, client):
        response = client.post("/retrieve", json={"claim": CLAIM, "k": 11})

        assert response.status_code == 400
        assert response.json()["error"]["code"] == "invalid_request"

    def test_blank_claim(self, client):
        response = client.post("/retrieve", json={"claim": "   "})

        assert response.status_code == 400

    def test_generation_timeout_returns_evidence(self, service):
        # Setup
        app = create_app(with_backend(service, AlwaysFails(BackendTimeoutError("no answer"))))

        # Execute
        with TestClient(app) as client:
            response = client.post("/respond", json={"claim": CLAIM})

        # Verify
        assert response.status_code == 504
        error = response.json()["error"]
        assert error["code"] == "response_generation_failed"
        assert [doc["doc_id"] for doc in error["evidence"]] == [doc.doc_id for doc in service.retrieve(CLAIM)]

    def test_unexpected_failure_is_500(self, service):
        app = create_app(with_backend(service, AlwaysFails(RuntimeError("boom"))))

        with TestClient(app, raise_server_exceptions=False) as client:
            response = client.post("/respond", json={"claim": CLAIM})

        assert response.status_code == 500
        assert response.json() == {"error": {"code": "internal_error", "message": "Internal server error"}}


class TestConcurrency:
    def test_parallel_retrieve_matches_serial(self, client, service):
        # Setup
        claims = [f"w{i % 12} w{(i * 7) % 40} w{(i * 3) % 40}" for i in range(100)]
        expected = [
            RetrieveResponse(claim=claim, documents=service.retrieve(claim, 3)).model_dump(mode="json")
            for claim in claims
        ]

        # Execute
        with ThreadPoolExecutor(max_workers=16) as pool:
            responses = list(pool.map(lambda claim: client.post("/retrieve", json={"claim": claim, "k": 3}), claims))

        # Verify
        assert all(response.status_code == 200 for response in responses)
        assert [response.json() for response in responses] == expected
