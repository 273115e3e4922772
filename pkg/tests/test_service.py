import math

import pytest
from fastapi.testclient import TestClient

from gossipsim.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


class TestSpectral:
    def test_ring_diagnostics(self, client):
        resp = client.post("/spectral", json={"graph": "ring:16", "rounds": 4})
        assert resp.status_code == 200
        body = resp.json()
        assert body["n"] == 16 and body["diameter"] == 8
        lam = body["lam"]
        assert 0 < lam < 1
        assert body["spectral_gap"] == pytest.approx(1 - lam, rel=1e-12)
        s = math.sqrt(1 - lam * lam)
        assert body["eta"] == pytest.approx((1 - s) / (1 + s), rel=1e-12)
        assert body["rho"] == pytest.approx((1 - math.sqrt(1 - lam)) ** 4, rel=1e-12)
        assert body["adjacency"].startswith("0: 1,15")

    def test_kappa_shrinks_gap(self, client):
        g1 = client.post("/spectral", json={"graph": "ring:16"}).json()["spectral_gap"]
        g2 = client.post(
            "/spectral", json={"graph": "ring:16", "kappa": 0.05}
        ).json()["spectral_gap"]
        assert g2 < g1

    def test_bad_graph_is_422(self, client):
        resp = client.post("/spectral", json={"graph": "pentagram:5"})
        assert resp.status_code == 422


class TestFactorize:
    def test_plan_summary(self, client):
        resp = client.post("/factorize", json={"graph": "path:6"})
        body = resp.json()
        assert resp.status_code == 200
        assert body["length"] <= 2 * body["diameter"]
        assert body["max_error"] <= 1e-10
        assert body["factors"] is None

    def test_factor_dump(self, client):
        resp = client.post("/factorize", json={"graph": "path:3", "dump_factors": True})
        factors = resp.json()["factors"]
        assert len(factors) == 2
        assert len(factors[0]) == 3 and len(factors[0][0]) == 3


class TestBounds:
    def test_report(self, client):
        resp = client.post(
            "/bounds",
            json={"delta": 1.0, "smoothness": 1.0, "sigma_sq": 1.0, "n": 8,
                  "diam": 4, "lam": 0.75, "eps": 0.1, "vs0_sq": 1.0, "vs_sq": 1.0},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["upper_defacto"] == pytest.approx(body["lower_general"], rel=1e-12)
        names = [row["algorithm"] for row in body["table"]]
        assert "detag" in names and "dpsgd" in names
        gaps = {row["algorithm"]: row["gap_formula"] for row in body["table"]}
        assert gaps["defacto"] == "O(1)"

    def test_invalid_params_422(self, client):
        resp = client.post("/bounds", json={"delta": -1.0})
        assert resp.status_code == 422


class TestRun:
    def test_run_with_trace_file(self, client, tmp_path):
        out = tmp_path / "trace.csv"
        resp = client.post(
            "/run",
            json={
                "graph": "ring:4",
                "objective": "quad:d=4,vs0=0.5,sigma=0.2",
                "algorithm": "dsgt:alpha=0.05",
                "iterations": 30,
                "seed": 1,
                "eps_grid": [0.5],
                "out": str(out),
                "include_csv": True,
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok"
        assert body["iterations"] == 30
        assert body["queries"] == 4 * 30
        assert out.exists()
        assert body["trace_csv"].splitlines()[0] == "iter,loss,grad_norm,consensus_x,consensus_y,queries"
        assert out.read_text() == body["trace_csv"]

    def test_deterministic_across_requests(self, client):
        payload = {
            "graph": "ring:4",
            "objective": "quad:d=4,vs0=0.5,sigma=0.2",
            "algorithm": "detag:alpha=0.05,R=2",
            "iterations": 25,
            "seed": 7,
            "include_csv": True,
        }
        a = client.post("/run", json=payload).json()
        b = client.post("/run", json=payload).json()
        assert a["trace_csv"] == b["trace_csv"]

    def test_bad_algorithm_is_422(self, client):
        resp = client.post(
            "/run",
            json={"graph": "ring:4", "objective": "quad:d=2,vs0=0,sigma=0",
                  "algorithm": "adam:alpha=0.1"},
        )
        assert resp.status_code == 422


class TestSweep:
    def test_sweep_endpoint(self, client, tmp_path):
        config_text = f"""
[experiment]
graph = ring:4
matrix = metropolis
objective = quad:d=3,vs0=0.5,sigma=0.1
algorithms =
    dpsgd:alpha=0.05
    dsgt:alpha=0.05
seeds = 0,1
iterations = 20
eps_grid = 0.5
out = {tmp_path / "sweepout"}
record_every = 1
"""
        resp = client.post("/sweep", json={"config_text": config_text})
        assert resp.status_code == 200
        body = resp.json()
        assert len(body["runs"]) == 4
        assert sum(r["best"] for r in body["runs"]) == 2
        assert (tmp_path / "sweepout" / "summary.csv").exists()
