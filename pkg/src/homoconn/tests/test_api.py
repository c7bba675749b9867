"""Tests for the HTTP endpoints."""

import pytest


class TestRoot:
    @pytest.mark.anyio
    async def test_root(self, async_client):
        response = await async_client.get("/")
        assert response.status_code == 200
        assert response.json()["status"] == "ok"


# ---------------------------------------------------------------------------
# /api/dims
# ---------------------------------------------------------------------------


class TestDimsEndpoint:
    @pytest.mark.anyio
    async def test_dims(self, async_client):
        response = await async_client.get("/api/dims", params={"n": [3, 4]})
        assert response.status_code == 200
        rows = response.json()["results"]
        assert [(r["n"], r["metric"]) for r in rows] == [(3, 5), (4, 3)]

    @pytest.mark.anyio
    async def test_invalid_n(self, async_client):
        response = await async_client.get("/api/dims", params={"n": 0})
        assert response.status_code == 422

    @pytest.mark.anyio
    async def test_missing_n(self, async_client):
        response = await async_client.get("/api/dims")
        assert response.status_code == 422


# ---------------------------------------------------------------------------
# /api/connection and /api/scan
# ---------------------------------------------------------------------------


class TestConnectionEndpoint:
    @pytest.mark.anyio
    async def test_skew_member(self, async_client):
        response = await async_client.post(
            "/api/connection",
            json={"sphere": "s7", "r": -1, "q": {"re": 0, "im": 1}},
        )
        assert response.status_code == 200
        verdicts = response.json()["verdicts"]
        assert verdicts["curvature_class"] == "totally_skew"
        assert verdicts["is_einstein"] is True

    @pytest.mark.anyio
    async def test_named(self, async_client):
        response = await async_client.post(
            "/api/connection", json={"named": "characteristic", "n": 4}
        )
        assert response.status_code == 200
        assert response.json()["verdicts"]["is_skew_torsion"] is True

    @pytest.mark.anyio
    async def test_incomplete_request(self, async_client):
        response = await async_client.post("/api/connection", json={})
        assert response.status_code == 422
        assert "named" in response.json()["detail"]

    @pytest.mark.anyio
    async def test_unknown_sphere(self, async_client):
        response = await async_client.post(
            "/api/connection", json={"sphere": "s9", "r": 1}
        )
        assert response.status_code == 422


class TestScanEndpoint:
    @pytest.mark.anyio
    async def test_s3_scan(self, async_client):
        response = await async_client.post(
            "/api/scan", json={"sphere": "s3", "r_grid": [-1, 0, 1]}
        )
        assert response.status_code == 200
        assert response.json()["verdicts"]["einstein_points"] == 3

    @pytest.mark.anyio
    async def test_empty_grid(self, async_client):
        response = await async_client.post(
            "/api/scan", json={"sphere": "s7", "r_grid": []}
        )
        assert response.status_code == 422


# ---------------------------------------------------------------------------
# /api/verify
# ---------------------------------------------------------------------------


class TestVerifyEndpoint:
    @pytest.mark.anyio
    async def test_subset(self, async_client):
        response = await async_client.post(
            "/api/verify", json={"batteries": ["octonion"], "trials": 3, "seed": 11}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["verdicts"] == {"octonion": True, "all_passed": True}
        assert body["config"]["seed"] == 11

    @pytest.mark.anyio
    async def test_unknown_battery(self, async_client):
        response = await async_client.post("/api/verify", json={"batteries": ["nope"]})
        assert response.status_code == 422
