"""JSON REST API over a single workbench session.

All mutation goes through the session's single-writer lock; responses are
plain JSON projections of immutable snapshots.  Errors map to HTTP statuses
with the error class name in the body so the UI can render them inline.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import errors
from .actions import (
    AddEffMinus,
    AddEffPlus,
    AddPre,
    HighLevelAction,
    Literal,
    Polarity,
    RemoveEff,
    RemovePre,
    Rename,
    SetParamType,
    make_atom,
    render_literal_english,
)
from .demo import GripperState
from .execution import StateCorrection
from .geometry import Pose
from .planner import SearchMode
from .session import Session, _action_summary
from .world import Arm, Atom, PerceptionMode, Scene

_ERROR_STATUS = {
    errors.DuplicateName: 409,
    errors.StaleSnapshot: 409,
    errors.NoSolution: 422,
    errors.EmptyGoal: 422,
    errors.TypeViolation: 422,
    errors.EffectConflict: 422,
    errors.DanglingVariable: 422,
    errors.InconsistentCorrection: 422,
    errors.NoActionsDefined: 422,
    errors.PreconditionUnsatisfied: 409,
    errors.UnknownInstance: 404,
    errors.ResourceLimit: 503,
}


def _status_for(exc: errors.IrpError) -> int:
    for cls, status in _ERROR_STATUS.items():
        if isinstance(exc, cls):
            return status
    return 400


def _parse_literal(session: Session, data: dict) -> Literal:
    atom = make_atom(data["pred"], *data["args"], schemas=session.domain.schemas)
    positive = bool(data.get("positive", True))
    return Literal(atom, Polarity.POS if positive else Polarity.NEG)


def _parse_atom(session: Session, data: dict) -> Atom:
    return make_atom(data["pred"], *data["args"], schemas=session.domain.schemas)


def _parse_edit(session: Session, data: dict):
    op = data.get("op")
    if op == "set_param_type":
        return SetParamType(data["param"], session.domain.hierarchy.get(data["type"]))
    if op == "add_pre":
        return AddPre(_parse_literal(session, data["literal"]))
    if op == "remove_pre":
        return RemovePre(_parse_literal(session, data["literal"]))
    if op == "add_eff_plus":
        return AddEffPlus(_parse_atom(session, data["atom"]))
    if op == "add_eff_minus":
        return AddEffMinus(_parse_atom(session, data["atom"]))
    if op == "remove_eff":
        return RemoveEff(_parse_atom(session, data["atom"]))
    if op == "rename":
        return Rename(data["new_name"])
    raise errors.IrpError(f"unknown edit op {op!r}")


def _correction(session: Session, data: Optional[dict]) -> Optional[StateCorrection]:
    if not data:
        return None
    return StateCorrection(
        add=frozenset(_parse_atom(session, a) for a in data.get("add", [])),
        remove=frozenset(_parse_atom(session, a) for a in data.get("remove", [])),
    )


def _problem_summary(session: Session, name: str) -> dict:
    problem = session.problems[name]
    return {
        "name": problem.name,
        "init": [str(a) for a in problem.init.sorted_atoms()],
        "goal": [
            {
                "pred": l.atom.schema.name,
                "args": list(l.atom.args),
                "positive": l.positive,
                "english": render_literal_english(l),
            }
            for l in sorted(problem.goal, key=lambda l: l.sort_key)
        ],
        "init_source": problem.init_source,
        "scene": problem.scene.to_dict(),
    }


def create_app(session: Optional[Session] = None) -> FastAPI:
    app = FastAPI(title="irp workbench", version="0.1.0")
    app.state.session = session or Session()

    def sess() -> Session:
        return app.state.session

    @app.exception_handler(errors.IrpError)
    async def irp_error_handler(_request: Request, exc: errors.IrpError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    # -- session ---------------------------------------------------------

    @app.get("/api/session")
    def get_session() -> dict:
        return sess().summary()

    # -- actions ---------------------------------------------------------

    @app.get("/api/actions")
    def list_actions() -> list[dict]:
        return [_action_summary(a) for a in sess().domain.sorted_actions()]

    @app.get("/api/actions/{name}")
    def get_action(name: str) -> dict:
        s = sess()
        if name not in s.domain.actions:
            raise errors.UnknownInstance(f"no action {name!r}")
        return _action_summary(s.domain.actions[name])

    @app.post("/api/actions")
    def create_action(body: dict) -> dict:
        """Manual action entry (the no-inference workflow): full conditions."""
        s = sess()
        from .actions import Parameter

        action = HighLevelAction(
            name=body["name"],
            params=tuple(
                Parameter(p["name"], s.domain.hierarchy.get(p["type"]))
                for p in body.get("params", [])
            ),
            pre=frozenset(_parse_literal(s, l) for l in body.get("pre", [])),
            eff_plus=frozenset(_parse_atom(s, a) for a in body.get("eff_plus", [])),
            eff_minus=frozenset(_parse_atom(s, a) for a in body.get("eff_minus", [])),
        )
        s.add_manual_action(action)
        return _action_summary(action)

    @app.post("/api/actions/{name}/copy")
    def copy_action_endpoint(name: str, body: dict) -> dict:
        return _action_summary(sess().copy_action(name, body["new_name"]))

    @app.patch("/api/actions/{name}")
    def edit_action_endpoint(name: str, body: dict) -> dict:
        s = sess()
        edits_data = body.get("edits", [body] if "op" in body else [])
        edits = [_parse_edit(s, e) for e in edits_data]
        return _action_summary(s.edit_action(name, edits))

    # -- demonstrations -----------------------------------------------------

    @app.post("/api/demo/begin")
    def demo_begin() -> dict:
        s = sess()
        demo = s.demo_begin()
        return {"o1": [str(a) for a in demo.O1.sorted_atoms()]}

    @app.post("/api/demo/keyframe")
    def demo_keyframe(body: dict) -> dict:
        s = sess()
        kf = s.demo_keyframe(
            Arm(body.get("arm", Arm.LEFT_CLAW.value)),
            Pose(tuple(body["position"]), tuple(body.get("orientation", (1, 0, 0, 0)))),
            GripperState(body["gripper"]),
        )
        frame = (
            {"kind": "BASE"}
            if kf.frame.descriptor is None
            else {
                "kind": "LANDMARK",
                "landmark": kf.frame.descriptor.original_id,
                "type": kf.frame.descriptor.type.name,
            }
        )
        return {"frame": frame, "recorded": len(s.active_demo.recorded)}

    @app.post("/api/demo/finish")
    def demo_finish(body: dict) -> dict:
        return _action_summary(sess().demo_finish(body["name"]))

    # -- scene ------------------------------------------------------------

    @app.get("/api/scene")
    def get_scene() -> dict:
        return sess().scene.to_dict()

    @app.post("/api/scene")
    def post_scene(body: dict) -> dict:
        s = sess()
        if "randomize" in body:
            spec = body["randomize"] or {}
            scene = s.randomize_scene(
                seed=int(spec.get("seed", 0)),
                n_positions=int(spec.get("positions", 4)),
                n_objects=int(spec.get("objects", 3)),
            )
        else:
            scene = s.load_scene(Scene.from_dict(body, s.domain.hierarchy))
        return scene.to_dict()

    # -- problems -----------------------------------------------------------

    @app.get("/api/problems")
    def list_problems() -> list[dict]:
        s = sess()
        return [_problem_summary(s, name) for name in sorted(s.problems)]

    @app.get("/api/problems/{name}")
    def get_problem(name: str) -> dict:
        s = sess()
        if name not in s.problems:
            raise errors.UnknownInstance(f"no problem {name!r}")
        return _problem_summary(s, name)

    @app.post("/api/problems")
    def create_problem(body: dict) -> dict:
        s = sess()
        name = body["name"]
        goal = [_parse_literal(s, l) for l in body.get("goal", [])]
        if name in s.problems and body.get("update_goal_only"):
            s.set_goal(name, goal)
        elif body.get("source") == "mental-model":
            s.create_problem_from_model(name, goal)
        else:
            overrides = {
                oid: s.domain.hierarchy.get(t)
                for oid, t in (body.get("type_overrides") or {}).items()
            }
            s.create_problem_from_scene(
                name,
                goal,
                corrections=_correction(s, body.get("corrections")),
                type_overrides=overrides or None,
                mode=PerceptionMode(body.get("perception", "FULL")),
            )
        return _problem_summary(s, name)

    @app.post("/api/problems/{name}/solve")
    def solve_problem(name: str, body: Optional[dict] = None) -> dict:
        body = body or {}
        mode = SearchMode.OPTIMAL if body.get("optimal") else SearchMode.FF
        try:
            record = sess().solve(name, mode=mode)
        except errors.NoSolution as exc:
            report = sess().debug_summary(name, last_failure=str(exc))
            return JSONResponse(
                status_code=422,
                content={
                    "error": "NoSolution",
                    "message": str(exc),
                    "debug": report.to_dict(),
                },
            )
        return record.to_dict()

    # -- plans -------------------------------------------------------------

    @app.get("/api/plans/{plan_id}")
    def get_plan(plan_id: str) -> dict:
        s = sess()
        if plan_id not in s.plans:
            raise errors.UnknownInstance(f"no plan {plan_id!r}")
        return s.plans[plan_id].to_dict()

    @app.post("/api/plans/{plan_id}/execute/step")
    def execute_step(plan_id: str, body: Optional[dict] = None) -> dict:
        body = body or {}
        verdict = body.get("confirm", "ok") != "reject"
        result, done = sess().execute_step(plan_id, verdict)
        return {
            "done": done,
            "goal_satisfied": result.goal_satisfied,
            "entries": [e.to_dict() for e in result.log.entries],
            "scene": result.scene.to_dict(),
            "plan": sess().plans[plan_id].to_dict(),
        }

    # -- debug --------------------------------------------------------------

    @app.get("/api/debug/{problem}")
    def debug(problem: str) -> dict:
        return sess().debug_summary(problem).to_dict()

    # -- persistence ---------------------------------------------------------

    @app.get("/api/save")
    def get_save() -> dict:
        return sess().to_dict()

    @app.post("/api/save")
    def post_save(body: dict) -> dict:
        sess().save(body["path"])
        return {"saved": body["path"]}

    @app.get("/api/load")
    def get_load(path: str) -> dict:
        app.state.session = Session.load(path)
        return app.state.session.summary()

    @app.post("/api/load")
    def post_load(body: dict) -> dict:
        if "path" in body:
            app.state.session = Session.load(body["path"])
        else:
            app.state.session = Session.from_dict(body["session"])
        return app.state.session.summary()

    _mount_ui(app)
    return app


def _mount_ui(app: FastAPI) -> None:
    """Serve the web UI when a compiled frontend is present."""
    import os

    from fastapi.staticfiles import StaticFiles

    here = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    for candidate in (os.path.join(here, "frontend"), os.path.join(os.getcwd(), "frontend")):
        if os.path.isfile(os.path.join(candidate, "index.html")) and os.path.isdir(
            os.path.join(candidate, "dist")
        ):
            app.mount("/", StaticFiles(directory=candidate, html=True), name="ui")
            return
