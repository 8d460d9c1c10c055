"""Interactive session: the teach / correct / plan / execute cycle.

One session owns the simulated scene, the action domain, problems, pending
plans, and the executor's mental model.  All mutations serialize through a
single lock (single-writer); solving works on immutable snapshots, and a plan
becomes stale (refused for execution) as soon as the domain or its problem is
edited afterwards.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .actions import (
    Domain,
    Edit,
    HighLevelAction,
    Literal,
    Parameter,
    Polarity,
    copy_action,
    edit_action,
    infer_ground_conditions,
    lift_action,
    render_literal_english,
)
from .config import WorkbenchConfig
from .demo import (
    DemoScript,
    DemoSession,
    GripperState,
    LowLevelAction,
    begin_demo,
    execute_low_level,
    finish_demo,
    record_keyframe,
    teach_from_script,
)
from .errors import (
    CorruptFile,
    DuplicateName,
    EmptyGoal,
    InvalidScene,
    NoActionsDefined,
    NoSolution,
    SchemaVersionMismatch,
    StaleSnapshot,
    UnknownInstance,
)
from .execution import (
    ConfirmCallback,
    ExecutionLog,
    ExecutionResult,
    MentalModel,
    StateCorrection,
    StepOutcome,
    auto_confirm,
    execute_plan,
    execute_plan_step,
    init_mental_model,
)
from .geometry import Pose
from .pddl import PddlProblem, emit_domain, emit_problem
from .planner import (
    Plan,
    PlanningTask,
    SearchConfig,
    SearchMode,
    ground_task,
    plan as run_planner,
    validate_plan,
)
from .world import (
    Atom,
    ObjectInstance,
    PerceptionMode,
    PositionInstance,
    Scene,
    TypeTag,
    WorldState,
    classify_type,
    clear_coupling_violations,
    instance_type,
)

SCHEMA_VERSION = 1


@dataclass
class Problem:
    """A named planning problem: scene snapshot, (corrected) init, goal."""

    name: str
    scene: Scene
    init: WorldState
    goal: frozenset[Literal]
    init_source: str = "perception"  # or "mental-model"

    def to_pddl(self, domain: Domain) -> PddlProblem:
        objects = {
            iid: instance_type(inst) for iid, inst in self.init.instances.items()
        }
        return PddlProblem(
            name=self.name,
            domain_name=domain.name,
            objects=objects,
            init=self.init.atoms,
            goal=self.goal,
        )


@dataclass
class PlanRecord:
    id: str
    problem: str
    plan: Plan
    task: PlanningTask
    mode: str
    domain_version: int
    next_step: int = 0
    status: str = "pending"  # pending | executed | aborted

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "problem": self.problem,
            "mode": self.mode,
            "status": self.status,
            "next_step": self.next_step,
            "plan": self.plan.to_dict(),
            "rendered": self.plan.render_lines(),
        }


@dataclass(frozen=True)
class DebugHint:
    code: str
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


@dataclass(frozen=True)
class DebugReport:
    problem: str
    actions: tuple[dict, ...]
    init: tuple[str, ...]
    goal: tuple[str, ...]
    hints: tuple[DebugHint, ...]

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "actions": list(self.actions),
            "init": list(self.init),
            "goal": list(self.goal),
            "hints": [h.to_dict() for h in self.hints],
        }


def _literal_summary(l: Literal) -> dict:
    return {
        "pred": l.atom.schema.name,
        "args": list(l.atom.args),
        "positive": l.positive,
        "text": str(l),
        "english": render_literal_english(l),
    }


def _action_summary(action: HighLevelAction) -> dict:
    return {
        "name": action.name,
        "params": [{"name": p.name, "type": p.type.name} for p in action.params],
        "preconditions": [_literal_summary(l) for l in action.sorted_pre()],
        "effects": [_literal_summary(l) for l in action.sorted_effects()],
        "has_motion": action.low_level is not None,
    }


class Session:
    """Single-writer workbench state machine."""

    def __init__(self, config: Optional[WorkbenchConfig] = None, scene: Optional[Scene] = None):
        self.config = config or WorkbenchConfig.from_env()
        self.domain = Domain()
        self.scene = scene if scene is not None else Scene((), ())
        self.problems: dict[str, Problem] = {}
        self.plans: dict[str, PlanRecord] = {}
        self.mental_model: Optional[MentalModel] = None
        self.active_demo: Optional[DemoSession] = None
        self.events: list[dict] = []
        self.execution_logs: list[dict] = []
        self.artifacts: dict[str, dict[str, str]] = {}
        self.domain_version = 0
        self._plan_seq = 0
        self._lock = threading.RLock()

    # -- bookkeeping -----------------------------------------------------------

    def _log_event(self, kind: str, detail: str) -> None:
        self.events.append({"seq": len(self.events), "kind": kind, "detail": detail})

    def _bump(self) -> None:
        self.domain_version += 1

    # -- scene -----------------------------------------------------------------

    def load_scene(self, scene: Scene) -> Scene:
        with self._lock:
            scene.validate_support(self.config.on_threshold, self.config.stack_tolerance)
            self.scene = scene
            self.mental_model = None
            self._log_event("scene", f"loaded scene with {len(scene.objects)} objects")
            return scene

    def randomize_scene(self, seed: int, n_positions: int = 4, n_objects: int = 3) -> Scene:
        """Deterministic demo scene: objects parked on distinct positions."""
        rng = random.Random(seed)
        protos = sorted(self.config.prototypes.items(), key=lambda kv: kv[0].name)
        xs = [0.35 + 0.22 * (i % 2) for i in range(n_positions)]
        ys = [-0.3 + 0.2 * (i // 2 * 2) for i in range(n_positions)]
        positions = tuple(
            PositionInstance(f"p{i + 1}", (xs[i], ys[i] + 0.05 * (i % 2)))
            for i in range(n_positions)
        )
        objects = []
        slots = rng.sample(range(n_positions), min(n_objects, n_positions))
        for k, slot in enumerate(slots):
            tag, proto = protos[rng.randrange(len(protos))]
            p = positions[slot]
            objects.append(
                ObjectInstance(f"o{k + 1}", (p.pose[0], p.pose[1], 0.0), proto.dims, tag)
            )
        return self.load_scene(Scene(tuple(objects), positions))

    # -- demonstrations -----------------------------------------------------------

    def demo_begin(self) -> DemoSession:
        with self._lock:
            if self.active_demo is not None:
                raise InvalidScene("a demonstration is already in progress")
            self.active_demo = begin_demo(self.scene, self.config)
            self._log_event("demo", "demonstration started")
            return self.active_demo

    def demo_keyframe(self, arm, world_pose: Pose, gripper: GripperState):
        with self._lock:
            if self.active_demo is None:
                raise InvalidScene("no demonstration in progress")
            return record_keyframe(self.active_demo, arm, world_pose, gripper)

    def demo_finish(self, name: str) -> HighLevelAction:
        """Close the active demo: replay it on the scene, infer, lift, store."""
        with self._lock:
            if self.active_demo is None:
                raise InvalidScene("no demonstration in progress")
            if name in self.domain.actions:
                raise DuplicateName(f"action {name!r} already defined")
            session = self.active_demo
            low = LowLevelAction(name, tuple(session.recorded))
            identity = {lid: lid for lid in low.landmark_ids()}
            scene_after = execute_low_level(low, session.scene_before, identity, self.config)
            action_low, o1, o2 = finish_demo(session, scene_after, name)
            ground = infer_ground_conditions(o1, o2)
            action = lift_action(name, ground, o1.instances, action_low)
            self.domain.add_action(action)
            self.scene = scene_after
            self.active_demo = None
            self._bump()
            self._log_event("teach", f"taught action {name}")
            return action

    def teach_script(self, script: DemoScript, name: Optional[str] = None) -> HighLevelAction:
        """Teach from a declarative demo file (does not touch the live scene)."""
        with self._lock:
            action_name = name or script.name
            if action_name in self.domain.actions:
                raise DuplicateName(f"action {action_name!r} already defined")
            recorded = teach_from_script(
                replace(script, name=action_name), self.config
            )
            ground = infer_ground_conditions(recorded.O1, recorded.O2)
            action = lift_action(
                action_name, ground, recorded.O1.instances, recorded.action
            )
            self.domain.add_action(action)
            self._bump()
            self._log_event("teach", f"taught action {action_name} from script")
            return action

    # -- action editing ---------------------------------------------------------

    def edit_action(self, name: str, edits: Sequence[Edit]) -> HighLevelAction:
        with self._lock:
            if name not in self.domain.actions:
                raise UnknownInstance(f"no action {name!r}")
            action = self.domain.actions[name]
            for e in edits:
                action = edit_action(action, e, self.domain.hierarchy)
            self.domain.replace_action(name, action)
            self._bump()
            self._log_event("edit", f"edited action {name} ({len(edits)} edits)")
            return action

    def add_manual_action(self, action: HighLevelAction) -> HighLevelAction:
        """Register a hand-entered action (the no-inference workflow)."""
        with self._lock:
            self.domain.add_action(action)
            self._bump()
            self._log_event("action", f"created action {action.name} manually")
            return action

    def copy_action(self, name: str, new_name: str) -> HighLevelAction:
        with self._lock:
            if name not in self.domain.actions:
                raise UnknownInstance(f"no action {name!r}")
            clone = copy_action(self.domain.actions[name], new_name, self.domain)
            self.domain.add_action(clone)
            self._bump()
            self._log_event("copy", f"copied {name} -> {new_name}")
            return clone

    # -- problems -----------------------------------------------------------------

    def create_problem_from_scene(
        self,
        name: str,
        goal: Iterable[Literal] = (),
        corrections: Optional[StateCorrection] = None,
        type_overrides: Optional[dict[str, TypeTag]] = None,
        scene: Optional[Scene] = None,
        mode: PerceptionMode = PerceptionMode.FULL,
    ) -> Problem:
        """Detect landmarks, apply user corrections, snapshot a problem.

        Detection also (re)initializes the mental model: this is the paper's
        detect-once point in the cycle.
        """
        with self._lock:
            if not self.domain.actions:
                raise NoActionsDefined("at least one action must exist before problems")
            target = scene if scene is not None else self.scene
            if type_overrides:
                retyped = []
                for obj in target.objects:
                    tag = type_overrides.get(obj.id, obj.type)
                    retyped.append(ObjectInstance(obj.id, obj.pose, obj.dims, tag))
                target = Scene(tuple(retyped), target.positions, dict(target.attachments))
            model = init_mental_model(target, mode, corrections, self.config)
            problem = Problem(
                name=name,
                scene=target,
                init=model.atoms,
                goal=frozenset(goal),
                init_source="perception",
            )
            self._validate_goal(problem)
            self.problems[name] = problem
            self.scene = target
            self.mental_model = model
            self._bump()
            self._log_event("problem", f"created problem {name} from perception")
            return problem

    def create_problem_from_model(self, name: str, goal: Iterable[Literal] = ()) -> Problem:
        """Chain a problem off the current mental model without re-detection."""
        with self._lock:
            if not self.domain.actions:
                raise NoActionsDefined("at least one action must exist before problems")
            if self.mental_model is None:
                raise InvalidScene("no mental model yet; create a problem from the scene first")
            problem = Problem(
                name=name,
                scene=self.scene,
                init=self.mental_model.atoms,
                goal=frozenset(goal),
                init_source="mental-model",
            )
            self._validate_goal(problem)
            self.problems[name] = problem
            self._bump()
            self._log_event("problem", f"created problem {name} from the mental model")
            return problem

    def set_goal(self, problem_name: str, goal: Iterable[Literal]) -> Problem:
        with self._lock:
            problem = self._problem(problem_name)
            problem.goal = frozenset(goal)
            self._validate_goal(problem)
            self._bump()
            self._log_event("goal", f"goal of {problem_name} updated")
            return problem

    def _problem(self, name: str) -> Problem:
        if name not in self.problems:
            raise UnknownInstance(f"no problem {name!r}")
        return self.problems[name]

    def _validate_goal(self, problem: Problem) -> None:
        for lit in problem.goal:
            for arg, want in zip(lit.atom.args, lit.atom.schema.params):
                inst = problem.init.instances.get(arg)
                if inst is None:
                    raise UnknownInstance(f"goal {lit} references unknown instance {arg!r}")
                if not instance_type(inst).is_a(want):
                    from .errors import TypeViolation

                    raise TypeViolation(
                        f"goal {lit}: {arg} is {instance_type(inst).name}, "
                        f"schema wants {want.name}"
                    )

    # -- solving --------------------------------------------------------------------

    def solve(
        self,
        problem_name: str,
        mode: str = SearchMode.FF,
        search: Optional[SearchConfig] = None,
    ) -> PlanRecord:
        with self._lock:
            problem = self._problem(problem_name)
            if not problem.goal:
                raise EmptyGoal(f"problem {problem_name!r} has no goal literals")
            pddl_problem = problem.to_pddl(self.domain)
            self.artifacts[problem_name] = {
                "domain.pddl": emit_domain(self.domain),
                "problem.pddl": emit_problem(pddl_problem),
            }
            task = ground_task(self.domain, pddl_problem)
            version = self.domain_version
        cfg = search if search is not None else SearchConfig(mode=mode)
        try:
            result = run_planner(task, cfg)
        except NoSolution as exc:
            raise NoSolution(
                f"{exc} -- open the debug menu for problem {problem_name!r} for hints"
            ) from exc
        with self._lock:
            check = validate_plan(task, result)
            if not check.valid:
                from .errors import InvalidPlan

                raise InvalidPlan(check.reason or "plan failed validation")
            self._plan_seq += 1
            record = PlanRecord(
                id=f"plan-{self._plan_seq}",
                problem=problem_name,
                plan=result,
                task=task,
                mode=cfg.mode,
                domain_version=version,
            )
            self.plans[record.id] = record
            self._log_event("solve", f"{record.id}: {len(result.steps)} steps for {problem_name}")
            return record

    # -- execution ---------------------------------------------------------------------

    def _require_fresh(self, record: PlanRecord) -> None:
        if record.domain_version != self.domain_version:
            raise StaleSnapshot(
                f"{record.id} was computed against an older domain/problem state; re-solve"
            )

    def execute(
        self, plan_id: str, confirm: ConfirmCallback = auto_confirm
    ) -> ExecutionResult:
        with self._lock:
            record = self._plan(plan_id)
            self._require_fresh(record)
            if self.mental_model is None:
                self.mental_model = init_mental_model(
                    self.scene, PerceptionMode.FULL, None, self.config
                )
            goal = self.problems[record.problem].goal
            result = execute_plan(
                self.mental_model, self.scene, record.plan, confirm, goal, self.config
            )
            self.scene = result.scene
            record.status = "executed" if all(
                e.outcome is StepOutcome.OK for e in result.log.entries
            ) else "aborted"
            record.next_step = len(result.log.entries)
            self.execution_logs.append(
                {"plan": plan_id, "log": result.log.to_dict(), "goal_satisfied": result.goal_satisfied}
            )
            self._log_event("execute", f"{plan_id}: {record.status}")
            return result

    def execute_step(
        self, plan_id: str, confirm_verdict: bool = True
    ) -> tuple[ExecutionResult, bool]:
        """Run the next pending step of a plan; returns (result, done)."""
        with self._lock:
            record = self._plan(plan_id)
            self._require_fresh(record)
            if record.next_step >= len(record.plan.steps):
                empty = ExecutionResult(self.scene, ExecutionLog(), None)
                return empty, True
            if self.mental_model is None:
                self.mental_model = init_mental_model(
                    self.scene, PerceptionMode.FULL, None, self.config
                )
            step = record.plan.steps[record.next_step]

            def verdict(_step, _scene) -> bool:
                return confirm_verdict

            scene, model, entry = execute_plan_step(
                self.mental_model, self.scene, step, verdict, self.config, record.next_step
            )
            self.scene = scene
            self.mental_model = model
            log = ExecutionLog([entry])
            if entry.outcome is StepOutcome.OK:
                record.next_step += 1
            else:
                record.status = "aborted"
            done = record.next_step >= len(record.plan.steps)
            if done and record.status == "pending":
                record.status = "executed"
            goal = self.problems[record.problem].goal
            satisfied = self.mental_model.satisfies(goal) if goal else None
            self.execution_logs.append(
                {"plan": plan_id, "log": log.to_dict(), "goal_satisfied": satisfied}
            )
            self._log_event("execute-step", f"{plan_id}[{entry.index}]: {entry.outcome.value}")
            return ExecutionResult(scene, log, satisfied), done

    def _plan(self, plan_id: str) -> PlanRecord:
        if plan_id not in self.plans:
            raise UnknownInstance(f"no plan {plan_id!r}")
        return self.plans[plan_id]

    # -- debug menu ----------------------------------------------------------------------

    def debug_summary(self, problem_name: str, last_failure: Optional[str] = None) -> DebugReport:
        """Summarize the whole domain with natural-language hints."""
        with self._lock:
            problem = self._problem(problem_name)
            hints: list[DebugHint] = []

            init_atoms = problem.init.atoms
            typed_goal: list[Literal] = []
            for lit in sorted(problem.goal, key=lambda l: l.sort_key):
                bad = False
                for arg, want in zip(lit.atom.args, lit.atom.schema.params):
                    inst = problem.init.instances.get(arg)
                    if inst is None or not instance_type(inst).is_a(want):
                        hints.append(
                            DebugHint(
                                "goal-type-mismatch",
                                f"goal {render_literal_english(lit)}: argument {arg!r} does not "
                                f"fit predicate {lit.atom.schema.name}",
                            )
                        )
                        bad = True
                if not bad:
                    typed_goal.append(lit)

            achievable_adds: set[Atom] = set()
            achievable_dels: set[Atom] = set()
            if self.domain.actions and typed_goal:
                task = ground_task(self.domain, problem.to_pddl(self.domain))
                for ga in task.actions:
                    achievable_adds.update(ga.add_atoms)
                    achievable_dels.update(ga.del_atoms)
            for lit in typed_goal:
                if lit.positive and lit.atom not in init_atoms and lit.atom not in achievable_adds:
                    hints.append(
                        DebugHint(
                            "goal-unachievable",
                            "make sure the action effects can achieve the goal states "
                            f"(no action adds {lit.atom})",
                        )
                    )
                if not lit.positive and lit.atom in init_atoms and lit.atom not in achievable_dels:
                    hints.append(
                        DebugHint(
                            "goal-unachievable",
                            "make sure the action effects can achieve the goal states "
                            f"(no action removes {lit.atom})",
                        )
                    )

            provided = {a.schema.name for a in init_atoms}
            for action in self.domain.sorted_actions():
                provided.update(a.schema.name for a in action.eff_plus)
            for action in self.domain.sorted_actions():
                for lit in action.sorted_pre():
                    if lit.positive and lit.atom.schema.name not in provided:
                        hints.append(
                            DebugHint(
                                "precondition-unprovided",
                                f"action {action.name!r} requires "
                                f"{lit.atom.schema.name!r} but no action effect or "
                                f"initial state ever provides it",
                            )
                        )

            for violation in clear_coupling_violations(problem.init):
                hints.append(DebugHint("init-inconsistent", f"initial state: {violation}"))

            if last_failure:
                hints.append(DebugHint("last-failure", last_failure))

            return DebugReport(
                problem=problem_name,
                actions=tuple(_action_summary(a) for a in self.domain.sorted_actions()),
                init=tuple(str(a) for a in problem.init.sorted_atoms()),
                goal=tuple(str(l) for l in sorted(problem.goal, key=lambda l: l.sort_key)),
                hints=tuple(hints),
            )

    # -- persistence --------------------------------------------------------------------

    def to_dict(self) -> dict:
        def literal_dict(l: Literal) -> dict:
            return {"pred": l.atom.schema.name, "args": list(l.atom.args),
                    "positive": l.positive}

        def atom_dict(a: Atom) -> dict:
            return {"pred": a.schema.name, "args": list(a.args)}

        def action_dict(a: HighLevelAction) -> dict:
            return {
                "name": a.name,
                "params": [{"name": p.name, "type": p.type.name} for p in a.params],
                "pre": [literal_dict(l) for l in a.sorted_pre()],
                "eff_plus": [atom_dict(x) for x in sorted(a.eff_plus, key=lambda x: x.sort_key)],
                "eff_minus": [atom_dict(x) for x in sorted(a.eff_minus, key=lambda x: x.sort_key)],
                "demo_binding": dict(sorted(a.demo_binding.items())),
                "low_level": a.low_level.to_dict() if a.low_level else None,
            }

        def state_dict(s: WorldState) -> dict:
            objs = [
                {"id": i.id, "pose": list(i.pose), "dims": list(i.dims), "type": i.type.name}
                for i in sorted(
                    (x for x in s.instances.values() if isinstance(x, ObjectInstance)),
                    key=lambda x: x.id,
                )
            ]
            poss = [
                {"id": i.id, "pose": list(i.pose)}
                for i in sorted(
                    (x for x in s.instances.values() if isinstance(x, PositionInstance)),
                    key=lambda x: x.id,
                )
            ]
            return {
                "atoms": [atom_dict(a) for a in s.sorted_atoms()],
                "objects": objs,
                "positions": poss,
            }

        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "scene": self.scene.to_dict(),
            "domain": {
                "name": self.domain.name,
                "actions": [action_dict(a) for a in self.domain.sorted_actions()],
            },
            "problems": [
                {
                    "name": p.name,
                    "scene": p.scene.to_dict(),
                    "init": state_dict(p.init),
                    "goal": [literal_dict(l) for l in sorted(p.goal, key=lambda l: l.sort_key)],
                    "init_source": p.init_source,
                }
                for p in sorted(self.problems.values(), key=lambda p: p.name)
            ],
            "events": list(self.events),
            "execution_logs": list(self.execution_logs),
            "artifacts": {k: dict(v) for k, v in sorted(self.artifacts.items())},
        }

    @staticmethod
    def from_dict(data: dict) -> "Session":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaVersionMismatch(
                f"session schema {version!r} unsupported (expected {SCHEMA_VERSION})"
            )
        config = WorkbenchConfig.from_dict(data.get("config", {}))
        session = Session(config=config)
        hierarchy = session.domain.hierarchy
        schemas = session.domain.schemas
        session.scene = Scene.from_dict(data["scene"], hierarchy)

        def parse_atom(d: dict) -> Atom:
            return Atom(schemas[d["pred"]], tuple(d["args"]))

        def parse_literal(d: dict) -> Literal:
            return Literal(
                parse_atom(d), Polarity.POS if d["positive"] else Polarity.NEG
            )

        session.domain.name = data["domain"].get("name", session.domain.name)
        for ad in data["domain"]["actions"]:
            low = (
                LowLevelAction.from_dict(ad["low_level"], hierarchy)
                if ad.get("low_level")
                else None
            )
            action = HighLevelAction(
                name=ad["name"],
                params=tuple(
                    Parameter(p["name"], hierarchy.get(p["type"])) for p in ad["params"]
                ),
                pre=frozenset(parse_literal(l) for l in ad["pre"]),
                eff_plus=frozenset(parse_atom(a) for a in ad["eff_plus"]),
                eff_minus=frozenset(parse_atom(a) for a in ad["eff_minus"]),
                low_level=low,
                demo_binding=dict(ad.get("demo_binding", {})),
            )
            session.domain.add_action(action)

        for pd in data.get("problems", []):
            scene = Scene.from_dict(pd["scene"], hierarchy)
            st = pd["init"]
            instances: dict = {}
            for od in st["objects"]:
                instances[od["id"]] = ObjectInstance(
                    od["id"], tuple(od["pose"]), tuple(od["dims"]), hierarchy.get(od["type"])
                )
            for ps in st["positions"]:
                instances[ps["id"]] = PositionInstance(ps["id"], tuple(ps["pose"]))
            init = WorldState(
                frozenset(parse_atom(a) for a in st["atoms"]), instances
            )
            session.problems[pd["name"]] = Problem(
                name=pd["name"],
                scene=scene,
                init=init,
                goal=frozenset(parse_literal(l) for l in pd["goal"]),
                init_source=pd.get("init_source", "perception"),
            )

        session.events = list(data.get("events", []))
        session.execution_logs = list(data.get("execution_logs", []))
        session.artifacts = {
            k: dict(v) for k, v in data.get("artifacts", {}).items()
        }
        return session

    def save(self, path: str) -> None:
        with self._lock:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")

    @staticmethod
    def load(path: str) -> "Session":
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorruptFile(f"{path}: {exc.msg} at byte {exc.pos}") from exc
        if not isinstance(data, dict):
            raise CorruptFile(f"{path}: top-level JSON value is not an object")
        return Session.from_dict(data)

    # -- summaries ----------------------------------------------------------------------

    def summary(self) -> dict:
        with self._lock:
            return {
                "domain": self.domain.name,
                "domain_version": self.domain_version,
                "actions": sorted(self.domain.actions),
                "problems": sorted(self.problems),
                "plans": [self.plans[k].to_dict() for k in sorted(self.plans)],
                "scene": self.scene.to_dict(),
                "types": [t.name for t in self.domain.hierarchy.tags()],
                "predicates": [
                    {"name": s.name, "params": [t.name for t in s.params]}
                    for s in sorted(self.domain.schemas.values(), key=lambda s: s.name)
                ],
                "has_mental_model": self.mental_model is not None,
                "demo_active": self.active_demo is not None,
            }
