"""Tests for the HTTP service endpoints.

Driven through httpx's ASGI transport, the same in-process route the CLI
client uses, so these tests exercise the exact production call path.
"""
import asyncio

import httpx
import pytest

import igsym
from igsym.service import create_app


class AsgiClient:
    def __init__(self):
        self._app = create_app()

    def _request(self, method, path, **kw):
        async def go():
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://testserver"
            ) as client:
                return await client.request(method, path, **kw)

        return asyncio.run(go())

    def get(self, path):
        return self._request("GET", path)

    def post(self, path, json):
        return self._request("POST", path, json=json)


@pytest.fixture(scope="module")
def client():
    return AsgiClient()


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "version": igsym.__version__}


def test_network_generate_default(client):
    resp = client.post("/network/generate", json={"config": {}})
    assert resp.status_code == 200
    net = resp.json()["network"]
    assert net["input_dim"] == 6
    assert len(net["head_weight"]) == 4
    assert len(net["head_weight"][0]) == 6
    assert [len(t["weight"]) for t in net["tail"]] == [5, 3]


def test_network_generate_is_deterministic(client):
    a = client.post("/network/generate", json={"config": {"seed": 11}})
    b = client.post("/network/generate", json={"config": {"seed": 11}})
    assert a.json() == b.json()


def test_network_generate_rejects_unknown_key(client):
    resp = client.post("/network/generate", json={"config": {"depth": 3}})
    assert resp.status_code == 400
    assert "unknown network config keys" in resp.json()["detail"]


def test_dataset_generate(client):
    resp = client.post(
        "/dataset/generate",
        json={"input_dim": 4, "config": {"count": 7, "low": -2.0, "high": 2.0}},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["rows"]) == 7
    assert len(body["rows"][0]) == 4
    assert body["stats"]["minimum"] == [-2.0] * 4
    assert body["stats"]["maximum"] == [2.0] * 4


def test_attack_run_round_trip(client):
    net = client.post("/network/generate", json={"config": {}}).json()["network"]
    data = client.post(
        "/dataset/generate", json={"input_dim": 6, "config": {"count": 2}}
    ).json()
    resp = client.post(
        "/attack/run",
        json={
            "network": net,
            "rows": data["rows"],
            "stats": data["stats"],
            "config": {"modes": ["translation"], "baselines": ["zero"]},
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["trials"]) == 2
    entry = body["summary"]["translation"]["zero"]
    assert entry["trials"] == 2
    assert entry["success_rate"] == 1.0


def test_attack_run_rejects_inconsistent_network(client):
    resp = client.post(
        "/attack/run",
        json={
            "network": {
                "input_dim": 3,
                "head_weight": [[1.0, 2.0]],  # two columns, not three
                "head_bias": [0.0],
                "tail": [],
            },
            "rows": [[0.0, 0.0, 0.0]],
            "stats": {"minimum": [-1.0] * 3, "maximum": [1.0] * 3},
            "config": {},
        },
    )
    assert resp.status_code == 400


def test_attack_run_missing_field_is_422(client):
    resp = client.post("/attack/run", json={"rows": [[0.0]]})
    assert resp.status_code == 422


def test_verify_run(client):
    resp = client.post("/verify/run", json={"config": {}})
    assert resp.status_code == 200
    body = resp.json()
    assert body["all_passed"] is True
    assert {r["name"] for r in body["invariants"]} >= {
        "ig_completeness",
        "symmetry_linear",
        "equivariance_orthogonal",
    }


def test_verify_run_propagates_config_errors(client):
    resp = client.post("/verify/run", json={"config": {"verify": {"haste": 1}}})
    assert resp.status_code == 400


def test_equivariance_run(client):
    resp = client.post(
        "/equivariance/run", json={"config": {"instances": 2, "seed": 21}}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["steps"] == [16, 64, 256]
    assert len(body["rows"]) == 4
    assert 0.0 <= body["monotone_fraction"] <= 1.0
