import pytest
from fastapi.testclient import TestClient

from onevar_tl.embedding import gadget_model_kripke
from onevar_tl.kripke import kripke_to_json
from onevar_tl.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestHealth:
    def test_health(self, client):
        assert client.get("/health").json() == {"status": "ok"}


class TestTranslate:
    def test_ctl_variable(self, client):
        resp = client.post("/translate", json={"formula": "p1", "logic": "ctl"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["n"] == 1 and body["guard"] == 2 and body["out_var"] == 1
        assert set(body["sigma"]) == {"p1", "p2"}
        assert body["sizes"]["star"] > body["sizes"]["source"]

    def test_atlstar_with_agents(self, client):
        resp = client.post("/translate", json={
            "formula": "<<1>> G p1", "logic": "atlstar", "agents": 2})
        assert resp.status_code == 200
        assert resp.json()["agents"] == 2

    def test_parse_error_is_422(self, client):
        resp = client.post("/translate", json={"formula": "p1 ->", "logic": "ctl"})
        assert resp.status_code == 422

    def test_fragment_error_is_422(self, client):
        resp = client.post("/translate", json={"formula": "<<1>> X p1", "logic": "ctl"})
        assert resp.status_code == 422


class TestModelCheck:
    def test_gadget_root(self, client):
        model = kripke_to_json(gadget_model_kripke(1))
        formula = "p1 & E X (!p1 & E X !E (true U !p1)) & E X !E (true U p1)"
        resp = client.post("/modelcheck", json={
            "model": model, "formula": formula, "logic": "ctl", "designated": 0})
        assert resp.status_code == 200
        body = resp.json()
        assert body["satisfying_states"] == [0]
        assert body["state_names"][0] == "r_1"
        assert body["designated_holds"] is True

    def test_true_everywhere(self, client):
        model = kripke_to_json(gadget_model_kripke(1))
        resp = client.post("/modelcheck", json={
            "model": model, "formula": "true", "logic": "ctl"})
        assert resp.json()["satisfying_states"] == [0, 1, 2, 3]

    def test_cgs_model_with_branching_logic_is_422(self, client):
        resp = client.post("/modelcheck", json={
            "model": {"agents": 1, "states": 1, "actions": ["a"],
                      "available": {"1,0": ["a"]}, "delta": {"0|a": 0}, "val": {}},
            "formula": "p1", "logic": "ctl"})
        assert resp.status_code == 422

    def test_atlstar_not_supported(self, client):
        model = kripke_to_json(gadget_model_kripke(1))
        resp = client.post("/modelcheck", json={
            "model": model, "formula": "p1", "logic": "atlstar"})
        assert resp.status_code == 422


class TestSat:
    def test_sat_with_witness(self, client):
        resp = client.post("/sat", json={"formula": "p1", "logic": "ctl",
                                         "max_states": 2})
        body = resp.json()
        assert body["status"] == "SAT"
        assert body["witness"]["model"]["states"] >= 1

    def test_unknown(self, client):
        resp = client.post("/sat", json={"formula": "p1 & !p1", "logic": "ctl",
                                         "max_states": 2})
        assert resp.json()["status"] == "UNKNOWN"

    def test_atl_search(self, client):
        resp = client.post("/sat", json={"formula": "<<1>> X p1", "logic": "atl",
                                         "agents": 2, "max_states": 2,
                                         "max_actions": 2})
        assert resp.json()["status"] == "SAT"


class TestGadget:
    def test_json_round_trips_through_validation(self, client):
        resp = client.post("/gadget", json={"m": 2, "flavor": "kripke"})
        model = resp.json()["model"]
        from onevar_tl.kripke import kripke_from_json, validate
        assert validate(kripke_from_json(model)).ok

    def test_dot(self, client):
        resp = client.post("/gadget", json={"m": 1, "flavor": "kripke",
                                            "format": "dot"})
        dot = resp.json()["dot"]
        assert dot.startswith("digraph") and "r_1" in dot

    def test_cgs_flavor(self, client):
        resp = client.post("/gadget", json={"m": 1, "flavor": "cgs", "agents": 2})
        model = resp.json()["model"]
        assert model["agents"] == 2

    def test_valuation_marks_root_and_even_chain(self, client):
        resp = client.post("/gadget", json={"m": 2, "flavor": "kripke"})
        assert resp.json()["model"]["val"]["1"] == [0, 3, 5]


class TestVerify:
    def test_small_verified_run(self, client):
        resp = client.post("/verify", json={"suites": ["E3"], "max_m": 3})
        body = resp.json()
        assert body["passed"] is True
        assert body["suites"][0]["name"] == "E3"

    def test_unknown_suite_is_422(self, client):
        resp = client.post("/verify", json={"suites": ["E9"]})
        assert resp.status_code == 422
