"""Six benchmark tasks: teach three pick-and-place actions, generalize, solve.

Each task is self-contained: it builds its scenes, teaches the needed actions
from scripted demonstrations, applies the condition edits that generalize
them (destination widened to any element, clear-on-top for top grasps, thin
for the claw / flat for the suction, stackability for the house rules),
solves the goal, and executes the plan in the simulator.  Tasks 3 and 6
continue from their predecessor's mental model without re-detecting the
scene.

    1  build a tower with 3 cubes            claw from the top
    2  build a tower with 4 cubes            claw from the top
    3  rebuild task 2 on another position    claw from the top (chained)
    4  build a tower, move it whole          claw from top and side
    5  build a house (base, cube, roof)      claw and suction from the top
    6  rebuild task 5 on another position    claw and suction (chained)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .actions import AddPre, SetParamType, make_literal
from .config import WorkbenchConfig
from .demo import DemoScript, GripperState, ScriptKeyframe
from .errors import IrpError
from .planner import SearchMode, bfs_oracle
from .session import Session
from .world import (
    BASE,
    CUBE,
    ELEMENT,
    OBJECT,
    ROOF,
    Arm,
    ObjectInstance,
    PerceptionMode,
    PositionInstance,
    Scene,
    perceive,
)

CUBE_DIMS = (0.05, 0.05, 0.05)
BASE_DIMS = (0.18, 0.12, 0.03)
ROOF_DIMS = (0.10, 0.05, 0.06)

TASK_POSITIONS = (
    ("p1", (0.35, -0.3)),
    ("p2", (0.35, 0.0)),
    ("p3", (0.35, 0.3)),
    ("p4", (0.65, 0.0)),
)


def _positions() -> tuple[PositionInstance, ...]:
    return tuple(PositionInstance(pid, xy) for pid, xy in TASK_POSITIONS)


def _obj(oid: str, at: tuple[float, float], dims, tag, z: float = 0.0) -> ObjectInstance:
    return ObjectInstance(oid, (at[0], at[1], z), dims, tag)


def task_scene(spec: dict[str, tuple[str, object]]) -> Scene:
    """spec maps object id -> (position id, type tag)."""
    at = dict(TASK_POSITIONS)
    dims = {CUBE: CUBE_DIMS, BASE: BASE_DIMS, ROOF: ROOF_DIMS}
    objects = tuple(
        _obj(oid, at[pid], dims[tag], tag) for oid, (pid, tag) in spec.items()
    )
    return Scene(objects, _positions())


# --- scripted demonstrations --------------------------------------------------

_DA = (0.4, -0.2)
_DB = (0.4, 0.2)


def _demo_scene(dims, tag) -> Scene:
    return Scene(
        (ObjectInstance("dobj", (_DA[0], _DA[1], 0.0), dims, tag),),
        (PositionInstance("dA", _DA), PositionInstance("dB", _DB)),
    )


def _kf(t, x, y, z, grip) -> ScriptKeyframe:
    return ScriptKeyframe(t=t, position=(x, y, z), gripper=grip)


def claw_top_script(name: str = "claw_top") -> DemoScript:
    """Pick a cube from above, place it on the target position."""
    h = CUBE_DIMS[2]
    return DemoScript(
        name=name,
        arm=Arm.LEFT_CLAW,
        scene=_demo_scene(CUBE_DIMS, CUBE),
        keyframes=(
            _kf(0.0, *_DA, 0.15, GripperState.OPEN),
            _kf(1.0, *_DA, h / 2, GripperState.CLOSE),
            _kf(2.0, *_DA, 0.20, GripperState.CLOSE),
            _kf(3.0, *_DB, 0.20, GripperState.CLOSE),
            _kf(4.0, *_DB, h / 2, GripperState.OPEN),
        ),
    )


def claw_side_script(name: str = "claw_side") -> DemoScript:
    """Approach a cube sideways at grasp height, carry it to the target."""
    h = CUBE_DIMS[2]
    return DemoScript(
        name=name,
        arm=Arm.LEFT_CLAW,
        scene=_demo_scene(CUBE_DIMS, CUBE),
        keyframes=(
            _kf(0.0, _DA[0], _DA[1] - 0.12, h / 2, GripperState.OPEN),
            _kf(1.0, *_DA, h / 2, GripperState.CLOSE),
            _kf(2.0, *_DA, 0.12, GripperState.CLOSE),
            _kf(3.0, *_DB, 0.12, GripperState.CLOSE),
            _kf(4.0, *_DB, h / 2, GripperState.OPEN),
        ),
    )


def suction_top_script(name: str = "suction_top") -> DemoScript:
    """Suction-grip a base plate by its top face, set it down on the target."""
    h = BASE_DIMS[2]
    return DemoScript(
        name=name,
        arm=Arm.RIGHT_SUCTION,
        scene=_demo_scene(BASE_DIMS, BASE),
        keyframes=(
            _kf(0.0, *_DA, 0.15, GripperState.OPEN),
            _kf(1.0, *_DA, h, GripperState.CLOSE),
            _kf(2.0, *_DA, 0.20, GripperState.CLOSE),
            _kf(3.0, *_DB, 0.20, GripperState.CLOSE),
            _kf(4.0, *_DB, h, GripperState.OPEN),
        ),
    )


# --- condition edits (the generalisation step) ---------------------------------

def _top_grasp_edits(widen_obj_to=None, extra=()):
    # both source and destination widened to ELEMENT so towers can be taken
    # apart again (picking off another object) and built up (placing onto one)
    edits = []
    if widen_obj_to is not None:
        edits.append(SetParamType("?obj", widen_obj_to))
    edits.append(SetParamType("?A", ELEMENT))
    edits.append(SetParamType("?B", ELEMENT))
    edits.append(AddPre(make_literal("clear", "?obj")))
    edits.extend(extra)
    return edits


HOUSE_CLAW_EDITS = _top_grasp_edits(
    widen_obj_to=OBJECT,
    extra=(
        AddPre(make_literal("thin", "?obj")),
        AddPre(make_literal("stackable", "?obj", "?B")),
    ),
)

HOUSE_SUCTION_EDITS = _top_grasp_edits(
    widen_obj_to=OBJECT,
    extra=(
        AddPre(make_literal("flat", "?obj")),
        AddPre(make_literal("stackable", "?obj", "?B")),
    ),
)

SIDE_GRASP_EDITS = [SetParamType("?B", ELEMENT)]  # no clear(?obj): piles may move


# --- reports ------------------------------------------------------------------


@dataclass
class PhaseResult:
    problem: str
    plan_lines: list[str]
    plan_length: int
    oracle_length: Optional[int]
    goal_satisfied: bool
    model_matches_perception: bool

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "plan": list(self.plan_lines),
            "plan_length": self.plan_length,
            "oracle_length": self.oracle_length,
            "goal_satisfied": self.goal_satisfied,
            "model_matches_perception": self.model_matches_perception,
        }


@dataclass
class BenchmarkReport:
    task_id: int
    title: str
    mode: str
    actions: list[str]
    phases: list[PhaseResult]
    chained_from: Optional[int] = None

    @property
    def goal_satisfied(self) -> bool:
        return all(p.goal_satisfied for p in self.phases)

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "title": self.title,
            "mode": self.mode,
            "actions": list(self.actions),
            "chained_from": self.chained_from,
            "phases": [p.to_dict() for p in self.phases],
            "goal_satisfied": self.goal_satisfied,
        }

    def render_lines(self) -> list[str]:
        lines = [f"task {self.task_id}: {self.title} [{self.mode}]"]
        for p in self.phases:
            lines.append(
                f"  {p.problem}: {p.plan_length} steps, goal "
                f"{'reached' if p.goal_satisfied else 'NOT reached'}"
            )
            lines.extend(f"    {s}" for s in p.plan_lines)
        return lines


TASK_TITLES = {
    1: "build a tower with 3 cubes",
    2: "build a tower with 4 cubes",
    3: "rebuild the 4-cube tower on another position",
    4: "build a tower and move it without disassembly",
    5: "build a house from base, cube, and roof",
    6: "rebuild the house on another position",
}


def _run_phase(
    session: Session,
    problem_name: str,
    goal,
    mode: str,
    from_model: bool = False,
    corrections=None,
    perception: PerceptionMode = PerceptionMode.FULL,
) -> PhaseResult:
    def stage(label: str, work):
        try:
            return work()
        except IrpError as exc:
            raise IrpError(f"[{problem_name}/{label}] {exc}") from exc

    if from_model:
        stage("problem", lambda: session.create_problem_from_model(problem_name, goal))
    else:
        stage(
            "problem",
            lambda: session.create_problem_from_scene(
                problem_name, goal, corrections=corrections, mode=perception
            ),
        )
    record = stage("solve", lambda: session.solve(problem_name, mode=mode))
    oracle = bfs_oracle(record.task)
    result = stage("execute", lambda: session.execute(record.id))
    full = perceive(
        session.scene,
        session.config.on_threshold,
        session.config.rules,
        PerceptionMode.FULL,
        session.config.stack_tolerance,
    )
    consistent = session.mental_model is not None and (
        session.mental_model.atoms.atoms == full.atoms
    )
    return PhaseResult(
        problem=problem_name,
        plan_lines=record.plan.render_lines(),
        plan_length=record.plan.cost,
        oracle_length=oracle,
        goal_satisfied=bool(result.goal_satisfied),
        model_matches_perception=consistent,
    )


def _tower_goal(ids: list[str], base_position: Optional[str] = None):
    goal = set()
    if base_position is not None:
        goal.add(make_literal("on", ids[0], base_position))
    for lower, upper in zip(ids, ids[1:]):
        goal.add(make_literal("on", upper, lower))
    return goal


def run_benchmark(
    task_id: int,
    optimal: bool = False,
    config: Optional[WorkbenchConfig] = None,
) -> BenchmarkReport:
    """Run one Table-style benchmark task end to end; returns its report."""
    if task_id not in TASK_TITLES:
        raise IrpError(f"unknown benchmark task {task_id} (expected 1..6)")
    mode = SearchMode.OPTIMAL if optimal else SearchMode.FF
    cfg = config or WorkbenchConfig()
    session = Session(config=cfg)
    phases: list[PhaseResult] = []
    chained_from: Optional[int] = None

    if task_id in (1, 2, 3):
        session.teach_script(claw_top_script())
        session.edit_action("claw_top", _top_grasp_edits())
        if task_id == 1:
            session.load_scene(
                task_scene({"c1": ("p1", CUBE), "c2": ("p2", CUBE), "c3": ("p3", CUBE)})
            )
            phases.append(
                _run_phase(session, "task1", _tower_goal(["c1", "c2", "c3"]), mode)
            )
        else:
            session.load_scene(
                task_scene(
                    {
                        "c1": ("p1", CUBE),
                        "c2": ("p2", CUBE),
                        "c3": ("p3", CUBE),
                        "c4": ("p4", CUBE),
                    }
                )
            )
            phases.append(
                _run_phase(session, "task2", _tower_goal(["c1", "c2", "c3", "c4"]), mode)
            )
            if task_id == 3:
                chained_from = 2
                phases.append(
                    _run_phase(
                        session,
                        "task3",
                        _tower_goal(["c1", "c2", "c3", "c4"], base_position="p2"),
                        mode,
                        from_model=True,
                    )
                )

    elif task_id == 4:
        # actions are taught as the task demands them: the side grasp only
        # exists once the tower must move as one pile
        session.teach_script(claw_top_script())
        session.edit_action("claw_top", _top_grasp_edits())
        session.load_scene(
            task_scene({"c1": ("p1", CUBE), "c2": ("p2", CUBE), "c3": ("p3", CUBE)})
        )
        phases.append(
            _run_phase(session, "task4-build", _tower_goal(["c1", "c2", "c3"]), mode)
        )
        session.teach_script(claw_side_script())
        session.edit_action("claw_side", SIDE_GRASP_EDITS)
        phases.append(
            _run_phase(
                session,
                "task4-move",
                _tower_goal(["c1", "c2", "c3"], base_position="p4"),
                mode,
            )
        )

    else:  # tasks 5 and 6
        session.teach_script(claw_top_script())
        session.edit_action("claw_top", HOUSE_CLAW_EDITS)
        session.teach_script(suction_top_script())
        session.edit_action("suction_top", HOUSE_SUCTION_EDITS)
        session.load_scene(
            task_scene({"base1": ("p1", BASE), "cube1": ("p2", CUBE), "roof1": ("p3", ROOF)})
        )
        house_goal = {
            make_literal("on", "cube1", "base1"),
            make_literal("on", "roof1", "cube1"),
        }
        phases.append(_run_phase(session, "task5", house_goal, mode))
        if task_id == 6:
            chained_from = 5
            goal6 = {
                make_literal("on", "base1", "p4"),
                make_literal("on", "cube1", "base1"),
                make_literal("on", "roof1", "cube1"),
            }
            phases.append(_run_phase(session, "task6", goal6, mode, from_model=True))

    return BenchmarkReport(
        task_id=task_id,
        title=TASK_TITLES[task_id],
        mode=mode,
        actions=sorted(session.domain.actions),
        phases=phases,
        chained_from=chained_from,
    )
