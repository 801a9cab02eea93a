import math

import pytest
from fastapi.testclient import TestClient

from app.api.routes.public.sweeps import start as sweep_start
from app.api.server import app

SWEEP = {
    "strategies": ["NoMitigate", "KAK-Approx"],
    "target_family": {"kind": "iswap_grid", "count": 4},
    "parasitic_angles_deg": [9.0],
}


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_kak(client):
    response = client.post("/api/v1/gates/kak", json={"matrix": "cz"})
    assert response.status_code == 200
    body = response.json()
    assert body["alpha"] == pytest.approx(math.pi / 4)
    assert body["beta"] == pytest.approx(0.0, abs=1e-9)
    assert len(body["k1"]) == 2


def test_kak_rejects_non_unitary_matrix(client):
    matrix = [[[1.0, 0.0]] * 4 for _ in range(4)]
    response = client.post("/api/v1/gates/kak", json={"matrix": matrix})
    assert response.status_code == 422
    assert "not unitary" in response.json()["detail"]


def test_unknown_fields_are_rejected(client):
    response = client.post("/api/v1/gates/kak", json={"matrix": "cz", "extra": 1})
    assert response.status_code == 422


def test_mitigate(client):
    response = client.post("/api/v1/gates/mitigate", json={"parasitic": "cphase:9deg"})
    assert response.status_code == 200
    body = response.json()
    assert body["z_only"] is True
    assert 1 - body["predicted_fidelity"] == pytest.approx(0.0012330, abs=1e-7)


def test_recompile(client):
    response = client.post("/api/v1/gates/recompile", json={"target": "sqrt_iswap_dag", "restarts": 5})
    assert response.status_code == 200
    body = response.json()
    assert body["converged"] is True
    assert body["native_gates_used"] == 1
    assert "NAT(q0,q1,native)" in body["circuit"]


def test_recompile_bad_gate_spec(client):
    response = client.post("/api/v1/gates/recompile", json={"target": "toffoli"})
    assert response.status_code == 422


def test_sweep_lifecycle(client):
    response = client.post("/api/v1/sweeps", json=SWEEP)
    assert response.status_code == 202
    sweep_id = response.json()["sweep_id"]

    records = client.get(f"/api/v1/sweeps/{sweep_id}/records").json()
    assert records["status"] == "done"
    assert len(records["records"]) == 8

    report = client.get(f"/api/v1/sweeps/{sweep_id}/report").json()
    means = {row["strategy"]: row["mean_fidelity"] for row in report["summary"]}
    assert 1 - means["NoMitigate"] == pytest.approx(0.01468, abs=1e-5)
    assert 1 - means["KAK-Approx"] == pytest.approx(0.004925, abs=1e-6)


def test_sweep_with_bad_spec(client):
    response = client.post("/api/v1/sweeps", json={"strategies": ["Recompile-12G"]})
    assert response.status_code == 422


def test_missing_sweep(client):
    assert client.get("/api/v1/sweeps/99999/records").status_code == 404
    assert client.get("/api/v1/sweeps/99999/report").status_code == 404


def test_crashed_sweep_is_marked_failed(client, monkeypatch):
    def crash(*args):
        raise FloatingPointError("overflow in matmul")

    monkeypatch.setattr(sweep_start, "run_sweep", crash)
    sweep_id = client.post("/api/v1/sweeps", json=SWEEP).json()["sweep_id"]
    records = client.get(f"/api/v1/sweeps/{sweep_id}/records").json()
    assert records["status"] == "failed"
    assert records["records"] == []


def test_docs_are_served_under_the_api_prefix(client):
    assert client.get("/api/v1/docs").status_code == 200
