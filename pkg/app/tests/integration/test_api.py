import pytest
from httpx import ASGITransport, AsyncClient

LINE_POINTS = [[0.0], [1.0], [10.0], [11.0]]


@pytest.fixture
async def client():
    from app.main import app

    transport = ASGITransport(app=app)
    async with AsyncClient(transport=transport, base_url="http://test") as client:
        yield client


@pytest.mark.asyncio
async def test_seed_qkmeans(client):
    # given
    payload = {"points": [[float(i), float(i % 3)] for i in range(30)], "k": 4, "m": 5, "seed": 3}

    # when
    response = await client.post("/api/seeding/", json=payload)

    # then
    assert response.status_code == 200
    body = response.json()
    assert body["algo"] == "qkmeans"
    assert len(body["center_indices"]) == 4
    assert len(set(body["center_indices"])) == 4
    assert len(body["per_step_proposals"]) == 3


@pytest.mark.asyncio
async def test_seed_is_deterministic(client):
    payload = {"points": LINE_POINTS, "k": 3, "algo": "kmeanspp", "seed": 9}
    first = (await client.post("/api/seeding/", json=payload)).json()
    second = (await client.post("/api/seeding/", json=payload)).json()
    assert first["center_indices"] == second["center_indices"]


@pytest.mark.asyncio
async def test_seed_too_many_clusters(client):
    response = await client.post("/api/seeding/", json={"points": LINE_POINTS, "k": 5})
    assert response.status_code == 422
    assert response.json()["message"]["code"] == "invalid_cluster_count"


@pytest.mark.asyncio
async def test_geom_params(client):
    # when
    response = await client.post(
        "/api/analysis/geom/",
        json={"points": LINE_POINTS, "centers": [[0.5], [10.5]], "include_data": True},
    )

    # then
    assert response.status_code == 200
    body = response.json()
    assert body["beta"] == pytest.approx(101.0)
    assert body["eta_centers"] == pytest.approx(10.0)
    assert body["eta_data"] == pytest.approx(11.0)


@pytest.mark.asyncio
async def test_geom_duplicate_centers_is_null(client):
    response = await client.post(
        "/api/analysis/geom/", json={"points": LINE_POINTS, "centers": [[0.0], [0.0]]}
    )
    assert response.status_code == 200
    assert response.json()["eta_centers"] is None


@pytest.mark.asyncio
async def test_geom_single_center(client):
    response = await client.post("/api/analysis/geom/", json={"points": LINE_POINTS, "centers": [[0.0]]})
    assert response.status_code == 422
    assert response.json()["message"]["code"] == "eta_undefined"


@pytest.mark.asyncio
async def test_power_law(client):
    ks = [1.0, 2.0, 4.0, 8.0, 16.0]
    response = await client.post(
        "/api/analysis/power-law/", json={"ks": ks, "values": [3.0 * k**0.5 for k in ks]}
    )
    assert response.status_code == 200
    assert response.json()["slope"] == pytest.approx(0.5)
    assert response.json()["r_squared"] == pytest.approx(1.0)


@pytest.mark.asyncio
async def test_power_law_too_few_points(client):
    response = await client.post("/api/analysis/power-law/", json={"ks": [1, 2], "values": [1, 2]})
    assert response.status_code == 422
    assert response.json()["message"]["code"] == "too_few_points"


@pytest.mark.asyncio
async def test_intrinsic_dim_hand_example(client):
    response = await client.post(
        "/api/analysis/intrinsic-dim/", json={"points": [[0.0], [1.0], [3.0]], "k_nn": 2}
    )
    assert response.status_code == 200
    assert response.json()["estimate"] == pytest.approx(1.6064, abs=1e-4)
    assert response.json()["n"] == 3


@pytest.mark.slow
@pytest.mark.asyncio
async def test_validate(client):
    response = await client.get("/api/validate/", params={"seed": 0})
    assert response.status_code == 200
    body = response.json()
    assert body["passed"] is True
    assert len(body["checks"]) >= 8
