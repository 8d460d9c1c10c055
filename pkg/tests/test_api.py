import pytest
from fastapi.testclient import TestClient

from conftest import scene_with_piles
from irp.api import create_app
from irp.benchmarks import claw_top_script
from irp.session import Session
from irp.world import CUBE


@pytest.fixture
def client():
    return TestClient(create_app(Session()))


def swap_scene_dict():
    return scene_with_piles(
        {"A": [("obj1", CUBE)], "B": [("obj2", CUBE)]}, positions=["A", "B", "C"]
    ).to_dict()


def teach_via_api(client):
    """Drive the demo endpoints: scene -> begin -> keyframes -> finish."""
    demo_scene = claw_top_script().scene.to_dict()
    assert client.post("/api/scene", json=demo_scene).status_code == 200
    r = client.post("/api/demo/begin", json={})
    assert r.status_code == 200
    assert "on(dobj, dA)" in r.json()["o1"]
    for kf in claw_top_script().keyframes:
        r = client.post(
            "/api/demo/keyframe",
            json={
                "arm": "LEFT_CLAW",
                "position": list(kf.position),
                "gripper": kf.gripper.value,
            },
        )
        assert r.status_code == 200
    r = client.post("/api/demo/finish", json={"name": "claw_top"})
    assert r.status_code == 200
    return r.json()


class TestTeachingFlow:
    def test_demo_cycle_infers_conditions(self, client):
        action = teach_via_api(client)
        pres = {p["text"] for p in action["preconditions"]}
        assert "on(?obj, ?A)" in pres
        assert "not clear(?A)" in pres

    def test_keyframe_reports_assigned_frame(self, client):
        client.post("/api/scene", json=claw_top_script().scene.to_dict())
        client.post("/api/demo/begin", json={})
        r = client.post(
            "/api/demo/keyframe",
            json={"arm": "LEFT_CLAW", "position": [0.4, -0.2, 0.05], "gripper": "OPEN"},
        )
        assert r.json()["frame"]["landmark"] == "dobj"


class TestActionEditing:
    def test_patch_set_param_type_and_toggle_pre(self, client):
        teach_via_api(client)
        r = client.patch(
            "/api/actions/claw_top",
            json={
                "edits": [
                    {"op": "set_param_type", "param": "?B", "type": "ELEMENT"},
                    {
                        "op": "add_pre",
                        "literal": {"pred": "clear", "args": ["?obj"], "positive": True},
                    },
                ]
            },
        )
        assert r.status_code == 200
        pres = {p["english"] for p in r.json()["preconditions"]}
        assert "obj is clear" in pres

    def test_type_violation_maps_to_422(self, client):
        teach_via_api(client)
        r = client.patch(
            "/api/actions/claw_top",
            json={"op": "set_param_type", "param": "?obj", "type": "ELEMENT"},
        )
        assert r.status_code == 422
        assert r.json()["error"] == "TypeViolation"

    def test_copy_endpoint(self, client):
        teach_via_api(client)
        r = client.post("/api/actions/claw_top/copy", json={"new_name": "claw2"})
        assert r.status_code == 200
        assert {a["name"] for a in client.get("/api/actions").json()} == {
            "claw_top",
            "claw2",
        }

    def test_manual_action_creation(self, client):
        body = {
            "name": "tidy",
            "params": [{"name": "?obj", "type": "CUBE"}],
            "pre": [{"pred": "clear", "args": ["?obj"], "positive": True}],
            "eff_plus": [],
            "eff_minus": [{"pred": "clear", "args": ["?obj"]}],
        }
        r = client.post("/api/actions", json=body)
        assert r.status_code == 200
        assert r.json()["name"] == "tidy"


class TestPlanAndExecute:
    def full_cycle(self, client):
        teach_via_api(client)
        client.patch(
            "/api/actions/claw_top",
            json={
                "edits": [
                    {"op": "set_param_type", "param": "?A", "type": "ELEMENT"},
                    {"op": "set_param_type", "param": "?B", "type": "ELEMENT"},
                    {
                        "op": "add_pre",
                        "literal": {"pred": "clear", "args": ["?obj"], "positive": True},
                    },
                ]
            },
        )
        client.post("/api/scene", json=swap_scene_dict())
        r = client.post(
            "/api/problems",
            json={
                "name": "swap",
                "goal": [
                    {"pred": "on", "args": ["obj1", "B"]},
                    {"pred": "on", "args": ["obj2", "A"]},
                ],
            },
        )
        assert r.status_code == 200
        r = client.post("/api/problems/swap/solve", json={})
        assert r.status_code == 200
        return r.json()

    def test_solve_returns_rendered_plan(self, client):
        plan = self.full_cycle(client)
        assert plan["plan"]["cost"] == 3
        assert plan["rendered"][0].startswith("1. claw_top(")

    def test_step_through_with_confirm(self, client):
        plan = self.full_cycle(client)
        plan_id = plan["id"]
        done = False
        rounds = 0
        while not done:
            r = client.post(
                f"/api/plans/{plan_id}/execute/step", json={"confirm": "ok"}
            )
            assert r.status_code == 200
            done = r.json()["done"]
            rounds += 1
            assert rounds <= 4
        assert r.json()["goal_satisfied"] is True

    def test_reject_aborts_plan(self, client):
        plan = self.full_cycle(client)
        plan_id = plan["id"]
        r = client.post(
            f"/api/plans/{plan_id}/execute/step", json={"confirm": "reject"}
        )
        body = r.json()
        assert body["entries"][0]["outcome"] == "REJECTED"
        assert body["plan"]["status"] == "aborted"

    def test_no_solution_returns_debug_hints(self, client):
        teach_via_api(client)
        client.patch(
            "/api/actions/claw_top",
            json={
                "edits": [
                    {
                        "op": "add_pre",
                        "literal": {
                            "pred": "stackable",
                            "args": ["?obj", "?B"],
                            "positive": True,
                        },
                    }
                ]
            },
        )
        client.post("/api/scene", json=swap_scene_dict())
        r = client.post(
            "/api/problems",
            json={
                "name": "impossible",
                "goal": [{"pred": "on", "args": ["obj1", "obj2"]}],
            },
        )
        assert r.status_code == 200
        r = client.post("/api/problems/impossible/solve", json={})
        assert r.status_code == 422
        body = r.json()
        assert body["error"] == "NoSolution"
        hints = [h["message"] for h in body["debug"]["hints"]]
        assert any(
            "make sure the action effects can achieve the goal states" in h
            for h in hints
        )


class TestSceneAndPersistence:
    def test_scene_roundtrip(self, client):
        scene = swap_scene_dict()
        client.post("/api/scene", json=scene)
        assert client.get("/api/scene").json() == scene

    def test_randomize_deterministic_by_seed(self, client):
        a = client.post("/api/scene", json={"randomize": {"seed": 4}}).json()
        b = client.post("/api/scene", json={"randomize": {"seed": 4}}).json()
        assert a == b

    def test_save_and_load(self, client, tmp_path):
        teach_via_api(client)
        path = str(tmp_path / "session.json")
        assert client.post("/api/save", json={"path": path}).status_code == 200
        blob = client.get("/api/save").json()
        assert blob["schema_version"] == 1
        r = client.post("/api/load", json={"path": path})
        assert r.status_code == 200
        assert "claw_top" in r.json()["actions"]

    def test_unknown_resources_404(self, client):
        assert client.get("/api/plans/nope").status_code == 404
        assert client.get("/api/debug/nope").status_code == 404
