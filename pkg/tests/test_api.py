"""HTTP API: endpoint behaviour and thin-adapter equality with the library."""

import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from idss.policies import evaluate_policies
from idss.service.api import create_app
from idss.service.ops import load_fit, resolve_policies
from idss.service.registry import RunRegistry


@pytest.fixture(scope="module")
def client(fit_dir):
    return TestClient(create_app(fit_dir))


class TestEndpoints:
    def test_network_document(self, client):
        r = client.get("/network")
        assert r.status_code == 200
        doc = r.json()
        assert doc["name"] == "uk-food-security"
        assert len(doc["nodes"]) == 17

    def test_series_known_node(self, client):
        r = client.get("/series/Health")
        assert r.status_code == 200
        body = r.json()
        assert len(body["years"]) == 11
        assert all(lo <= hi for lo, hi in zip(body["lo95"], body["hi95"]))

    def test_series_unknown_node_404(self, client):
        assert client.get("/series/Nonexistent").status_code == 404

    def test_policies_builtin(self, client):
        r = client.get("/policies")
        assert r.status_code == 200
        assert [p["name"] for p in r.json()["builtin"]] == ["P1", "P2", "P3", "P4", "P5"]

    def test_post_policy_and_list(self, client):
        doc = {
            "name": "api-demo",
            "interventions": [{"node": "GDP", "kind": "shift", "magnitude": 2.0}],
        }
        r = client.post("/policies", json=doc)
        assert r.status_code == 201
        saved = client.get("/policies").json()["saved"]
        assert any(p["name"] == "api-demo" for p in saved)

    def test_post_policy_nonpositive_scale_422(self, client):
        doc = {
            "name": "bad",
            "interventions": [{"node": "CFood", "kind": "scale", "magnitude": 0.0}],
        }
        assert client.post("/policies", json=doc).status_code == 422

    def test_post_policy_unknown_node_422(self, client):
        doc = {
            "name": "ghost",
            "interventions": [{"node": "Ghost", "kind": "set", "magnitude": 1.0}],
        }
        assert client.post("/policies", json=doc).status_code == 422

    def test_evaluate_round_trip(self, client):
        r = client.post(
            "/evaluate", json={"policies": ["P1", "P2", "P3", "P4", "P5"], "n": 400, "seed": 21}
        )
        assert r.status_code == 200
        run_id = r.json()["run_id"]
        rec = client.get(f"/runs/{run_id}")
        assert rec.status_code == 200
        body = rec.json()
        assert len(body["report"]) == 5
        assert set(body["samples"]) == {"P1", "P2", "P3", "P4", "P5"}
        assert body["ranking"][0] == "P3"

    def test_evaluate_bad_n_422(self, client):
        assert client.post("/evaluate", json={"policies": ["P1"], "n": 0}).status_code == 422

    def test_unknown_run_404(self, client):
        assert client.get("/runs/ffffffffffffffff").status_code == 404

    def test_runs_index(self, client):
        client.post("/evaluate", json={"policies": ["P1"], "n": 120, "seed": 5})
        r = client.get("/runs")
        assert r.status_code == 200
        assert any(len(item["policies"]) == 1 for item in r.json())

    def test_repeated_evaluate_reuses_run(self, client):
        a = client.post("/evaluate", json={"policies": ["P2"], "n": 150, "seed": 3}).json()
        b = client.post("/evaluate", json={"policies": ["P2"], "n": 150, "seed": 3}).json()
        assert a["run_id"] == b["run_id"]

    def test_evaluate_inline_policy_definition(self, client):
        inline = {
            "name": "inline-shift",
            "interventions": [{"node": "GDP", "kind": "shift", "magnitude": 4.0}],
        }
        r = client.post(
            "/evaluate", json={"policies": ["P1", inline], "n": 150, "seed": 19}
        )
        assert r.status_code == 200
        rec = client.get(f"/runs/{r.json()['run_id']}").json()
        assert {row["policy"] for row in rec["report"]} == {"P1", "inline-shift"}


class TestThinAdapter:
    def test_api_equals_library_call(self, client, fit_dir):
        r = client.post("/evaluate", json={"policies": ["P1", "P3"], "n": 250, "seed": 17})
        api_record = client.get(f"/runs/{r.json()['run_id']}").json()

        ctx = load_fit(fit_dir)
        report = evaluate_policies(
            ctx.fitted,
            resolve_policies(fit_dir, ["P1", "P3"]),
            ctx.parsed.utility,
            n_samples=250,
            seed=17,
        )
        assert api_record["ranking"] == report.ranking
        for row in api_record["report"]:
            assert row["expected_utility"] == pytest.approx(
                report.results[row["policy"]].expected_utility, rel=1e-12
            )
        np.testing.assert_allclose(
            api_record["samples"]["P3"], report.results["P3"].samples, rtol=1e-11
        )


class TestAsyncMode:
    def test_large_request_returns_202_then_completes(self, fit_dir):
        app = create_app(fit_dir, sync_limit=100)
        with TestClient(app) as client:
            r = client.post("/evaluate", json={"policies": ["P1"], "n": 300, "seed": 41})
            assert r.status_code == 202
            run_id = r.json()["run_id"]
            assert r.json()["status"] == "pending"
            for _ in range(100):
                rec = client.get(f"/runs/{run_id}").json()
                if rec["status"] == "done":
                    break
                time.sleep(0.05)
            assert rec["status"] == "done"
            assert rec["report"]
