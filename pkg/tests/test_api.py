"""
Test the HTTP endpoints
"""

import json

from fastapi.testclient import TestClient

from app.core.fixtures import FIXTURE_DIR
from app.main import app

client = TestClient(app)

AND_TWO = {"param_bits": 0, "rand_bits": 2, "out_bits": 1,
           "gates": [{"op": "AND", "in": [0, 1]}], "outputs": [2]}


def _instance(name: str) -> dict:
    return json.loads((FIXTURE_DIR / f"{name}.json").read_text())


def test_list_fixtures():
    response = client.get("/api/v1/families/fixtures")
    assert response.status_code == 200
    assert "and_two" in response.json()


def test_every_listed_fixture_is_a_family():
    names = client.get("/api/v1/families/fixtures").json()
    assert "owpuzz_biased_k4" not in names
    for name in names:
        assert client.get(f"/api/v1/families/fixtures/{name}").status_code == 200, name


def test_instances_have_their_own_route():
    names = client.get("/api/v1/families/instances").json()
    assert "owpuzz_biased_k4" in names
    assert "and_two" not in names
    response = client.get("/api/v1/families/instances/owpuzz_biased_k4")
    assert response.status_code == 200
    assert response.json()["params"] == {"eps": 1, "delta": 10, "t": 64}
    assert client.get("/api/v1/families/fixtures/owpuzz_biased_k4").status_code == 400


def test_get_fixture_with_param():
    response = client.get("/api/v1/families/fixtures/biased_k1", params={"param": "1"})
    assert response.status_code == 200
    assert response.json()["distribution"]["probs"] == {"0": "1/4", "1": "3/4"}


def test_unknown_fixture():
    response = client.get("/api/v1/families/fixtures/nope")
    assert response.status_code == 400


def test_compile_and_probability():
    response = client.post("/api/v1/families/compile", json={"circuit": AND_TWO, "param": ""})
    assert response.status_code == 200
    assert response.json()["gate_count"] == 1

    response = client.post("/api/v1/families/probability",
                           json={"circuit": AND_TWO, "param": "", "outcome": "1"})
    assert response.status_code == 200
    assert response.json()["probability"] == "1/4"


def test_compile_rejects_bad_wire():
    bad = {**AND_TWO, "gates": [{"op": "AND", "in": [0, 99]}]}
    response = client.post("/api/v1/families/compile", json={"circuit": bad})
    assert response.status_code == 422


def test_learn_endpoint():
    response = client.post("/api/v1/experiments/learn",
                           json={"instance": _instance("learn_point_mass_k3"), "mode": "sd", "seed": 4})
    assert response.status_code == 200
    body = response.json()
    assert body["result"]["hypothesis"] == "101"
    assert body["passed"]


def test_learn_with_given_samples():
    response = client.post("/api/v1/experiments/learn", json={
        "instance": _instance("owpuzz_identity_k2"),
        "samples": ["10", "10", "10"],
        "mode": "mle",
    })
    assert response.status_code == 200
    assert response.json()["result"]["argmax_z"] == "10"


def test_puzzle_round_trip():
    instance = _instance("owpuzz_identity_k2")
    puzzle = client.post("/api/v1/experiments/owpuzz/sample", json={"instance": instance, "seed": 8}).json()
    assert set(puzzle["puzzle"]) == {puzzle["answer"]}

    response = client.post("/api/v1/experiments/owpuzz/verify", json={
        "instance": instance, "puzzle": puzzle["puzzle"], "answer": puzzle["answer"],
    })
    assert response.json() == {"accepted": True}


def test_puzzle_size_mismatch():
    response = client.post("/api/v1/experiments/owpuzz/verify", json={
        "instance": _instance("owpuzz_identity_k2"), "puzzle": ["00"], "answer": "00",
    })
    assert response.status_code == 400


def test_owpuzz_report():
    response = client.post("/api/v1/experiments/owpuzz",
                           json={"instance": _instance("owpuzz_identity_k2"), "trials": 10})
    assert response.status_code == 200
    assert response.json()["result"]["completeness"]["successes"] == 10


def test_claims_endpoints():
    ids = client.get("/api/v1/claims/").json()
    assert len(ids) == 16

    response = client.post("/api/v1/claims/verify", json={"claims": ["mle_oracle"], "scale": 0.1})
    assert response.status_code == 200
    assert response.json()["passed"]

    response = client.post("/api/v1/claims/verify", json={"claims": ["unknown"]})
    assert response.status_code == 400
