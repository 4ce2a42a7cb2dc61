import pytest
from fastapi.testclient import TestClient

from krylov_qse.service import app

client = TestClient(app)


def test_health():
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_system_info_spin_ring():
    response = client.post(
        "/system", json={"spin_ring": {"n": 4, "J": 0.2, "h": 1.0, "seed": 9}}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["n_qubits"] == 4
    assert body["ground_energy"] < 0
    assert len(body["reference_bits"]) == 4


def test_system_rejects_ambiguous_payload():
    response = client.post(
        "/system",
        json={
            "spin_ring": {"n": 4, "J": 0.2, "h": 1.0, "seed": 9},
            "pauli_file": {"path": "nope"},
        },
    )
    assert response.status_code == 422


def test_system_missing_file_is_400():
    response = client.post("/system", json={"pauli_file": {"path": "/does/not/exist"}})
    assert response.status_code == 400


def test_moments_endpoint():
    response = client.post(
        "/moments",
        json={"system": {"spin_ring": {"n": 3, "J": 0.1, "h": 1.0, "seed": 7}}, "kmax": 4},
    )
    assert response.status_code == 200
    mu = response.json()["mu"]
    assert mu[0] == 1.0 and len(mu) == 5


def test_sweep_endpoint_and_histograms():
    request = {
        "system": {"spin_ring": {"n": 4, "J": 0.2, "h": 1.0, "seed": 9}},
        "r_max": 4,
        "deltas": [1e-6],
        "methods": ["qse", "pqse"],
        "instances": 2,
        "master_seed": 3,
    }
    response = client.post("/sweep", json=request)
    assert response.status_code == 200
    body = response.json()
    assert len(body["records"]) == 2 * 4 * 2
    assert body["csv"].startswith("method,R,delta,instance")
    assert len(body["summary"]) == 8
    assert len(body["xi"]) == 2

    # sweeps are deterministic through the service as well
    again = client.post("/sweep", json=request)
    assert again.json()["csv"] == body["csv"]

    hist = client.post("/histograms", json={"records": body["records"]})
    assert hist.status_code == 200
    tables = hist.json()
    orders = [row for row in tables["order_counts"] if row["R"] == 4]
    assert orders and orders[-1]["order"] == 4


def test_sweep_validation_error():
    response = client.post(
        "/sweep",
        json={
            "system": {"spin_ring": {"n": 4, "J": 0.2, "h": 1.0, "seed": 9}},
            "r_max": 0,
        },
    )
    assert response.status_code == 422


def test_sweep_negative_delta_rejected():
    response = client.post(
        "/sweep",
        json={
            "system": {"spin_ring": {"n": 4, "J": 0.2, "h": 1.0, "seed": 9}},
            "r_max": 2,
            "deltas": [-1.0],
        },
    )
    assert response.status_code == 400