"""
End-to-end tests for the Free Field Invariants API
Tests all endpoints including:
- Health check
- Weight-space bases and character tables
- Invariants, evidence and the property suite
- Validation and domain errors
"""
import pytest
from fastapi.testclient import TestClient

from app.config import settings
from app.main import app


@pytest.fixture
def client(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "output_dir", str(tmp_path / "reports"))
    with TestClient(app) as test_client:
        yield test_client


def test_health_endpoint(client):
    response = client.post("/api/health")
    assert response.status_code == 200
    result = response.json()
    assert result["status"] == "success"
    assert result["message"] == "Server is running"


def test_root(client):
    assert client.post("/").json() == {"message": "Free Field Invariants API is running!"}


def test_basis_endpoint(client):
    response = client.post("/api/basis", json={"n": 2, "k_max": 0})
    assert response.status_code == 200
    report = response.json()
    assert [row["dims"]["basis"] for row in report["tables"]] == [1, 2, 1]
    assert report["properties"][0]["status"] == "pass"


def test_characters_endpoint(client):
    response = client.post("/api/characters", json={"n": 1, "k_max": 1})
    assert response.status_code == 200
    rows = {(row["grade"]["k"], row["grade"]["l"]): row["dim"] for row in response.json()["rows"]}
    assert rows == {(0, 0): 1, (0, 1): 1, (1, -1): 1, (1, 0): 3, (1, 1): 3, (1, 2): 1}


def test_invariants_endpoint(client):
    response = client.post("/api/invariants", json={"n": 2, "k_max": 1})
    assert response.status_code == 200
    report = response.json()
    assert all(row["status"] == "MATCH" for row in report["tables"])
    assert report["notes"][0] == "g1 = 1 x1^2 d2"


def test_evidence_endpoint(client):
    response = client.post("/api/evidence", json={"n": 3, "k_max": 1})
    assert response.status_code == 200
    report = response.json()
    assert report["command"] == "evidence"
    assert {row["type"] for row in report["tables"]} == {"A"}


def test_verify_endpoint(client):
    response = client.post("/api/verify", json={"n": 2, "k_max": 1, "properties": ["closure", "generation"]})
    assert response.status_code == 200
    statuses = {p["name"]: p["status"] for p in response.json()["properties"]}
    assert statuses == {"closure": "pass", "generation": "pass"}


def test_validation_errors(client):
    assert client.post("/api/basis", json={"n": 3, "type": "C"}).status_code == 422
    assert client.post("/api/verify", json={"properties": ["nope"]}).status_code == 422
    assert client.post("/api/characters", json={"n": 2, "source": "moments"}).status_code == 422
    assert client.post("/api/evidence", json={"n": 0}).status_code == 422
    assert client.post("/api/basis", json={"n": 2, "k_max": 99}).status_code == 422
    assert client.post("/api/characters", json={"n": 99, "k_max": 1}).status_code == 422
