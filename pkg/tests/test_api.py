"""API tests for the mixtrace service."""
import json
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from mixtrace.api import app
from mixtrace.fieldio import dumps
from mixtrace.grid_field import sample
from mixtrace.models import Grid


@pytest.fixture
def client():
    return TestClient(app)


def _space(s=1, a=(1, 1), p=(2, 2), q=2):
    return {"s": s, "a": {"a": list(a)}, "p": {"p": list(p)}, "q": q}


def test_health(client):
    r = client.get("/v1/health")
    assert r.status_code == 200
    data = r.json()
    assert data["status"] == "ok"
    assert data["service"] == "mixtrace"
    assert "x-request-id" in r.headers


def test_suites_and_profiles(client):
    r = client.get("/v1/suites")
    assert r.status_code == 200
    data = r.json()
    names = [s["name"] for s in data["suites"]]
    assert "hardy" in names and "trace-rightinv" in names
    assert {p["id"] for p in data["profiles"]} == {"desk", "quick"}


def test_admissible(client):
    r = client.post("/v1/admissible", json={"params": _space(), "trace": {"axis": 2}})
    assert r.status_code == 200
    data = r.json()
    assert data["admissible"] is True
    assert data["trace_space"]["scale"] == "B"


def test_admissible_unsupported_axis(client):
    body = {"params": _space(a=(1, 1, 1), p=(2, 2, 2)), "trace": {"axis": 2}}
    r = client.post("/v1/admissible", json=body)
    assert r.status_code == 400


def test_admissible_invalid(client):
    r = client.post("/v1/admissible", json={"params": {"s": 1}, "trace": {"axis": 1}})
    assert r.status_code == 422


def test_norm(client):
    body = {"grid": {"half_periods": [math.pi, math.pi], "points": [32, 32]}, "params": _space(), "radius": 4}
    r = client.post("/v1/norm", json=body)
    assert r.status_code == 200
    first = r.json()["value"]
    assert first > 0
    assert client.post("/v1/norm", json=body).json()["value"] == first


def test_norm_band_too_wide(client):
    body = {"grid": {"half_periods": [math.pi, math.pi], "points": [16, 16]}, "params": _space(), "radius": 12}
    assert client.post("/v1/norm", json=body).status_code == 400


def test_field_norm_upload(client):
    grid = Grid.cube(2, math.pi, 32)
    u = sample(grid, lambda x1, x2: np.exp(3j * x1))
    files = {"file": ("mode.mtgf", dumps(u), "application/octet-stream")}
    r = client.post("/v1/fields/norm", files=files, data={"params": json.dumps(_space(s=0))})
    assert r.status_code == 200
    assert r.json()["value"] == pytest.approx(2 * math.pi, rel=1e-8)


def test_field_norm_rejects_garbage(client):
    files = {"file": ("x.mtgf", b"not a field", "application/octet-stream")}
    r = client.post("/v1/fields/norm", files=files, data={"params": json.dumps(_space())})
    assert r.status_code == 400


def test_verify_unknown_suite(client):
    assert client.post("/v1/verify/no-such-suite").status_code == 404


def test_verify_hardy(client):
    r = client.post("/v1/verify/hardy", json={"ensemble_size": 2, "seed": 5})
    assert r.status_code == 200
    report = r.json()
    assert report["suite"] == "hardy"
    assert report["passed"] is True
    assert report["config"]["profile"] == "quick"
    again = client.post("/v1/verify/hardy", json={"ensemble_size": 2, "seed": 5})
    assert again.json() == report


def test_verify_bad_profile(client):
    r = client.post("/v1/verify/hardy", json={"profile": "enormous"})
    assert r.status_code == 400


def test_verify_pdf(client):
    r = client.post("/v1/verify/borderline-table/report.pdf")
    assert r.status_code == 200
    assert r.headers["content-type"] == "application/pdf"
    assert r.content.startswith(b"%PDF")


def test_metrics_count_requests_and_runs(client):
    client.get("/v1/health")
    client.post("/v1/verify/hardy", json={"ensemble_size": 2})
    text = client.get("/v1/metrics").text
    assert 'mixtrace_http_requests_total{method="GET",path="/v1/health"} 1' in text
    assert 'mixtrace_suite_runs_total{suite="hardy",outcome="pass"} 1' in text
