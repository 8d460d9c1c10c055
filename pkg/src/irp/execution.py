"""Plan execution on the simulated scene via the taught low-level motions.

Landmarks are detected once when the mental model is initialized; afterwards
the executor trusts its own beliefs.  Each confirmed step updates the model
by exactly the step's symbolic effects plus the simulator poses of whatever
moved; a rejected step throws the beliefs away and re-perceives.  The model
is also the workaround for stack-blind perception: users assert the hidden
on/clear atoms of stacked initial states and everything downstream works
from those beliefs.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .config import WorkbenchConfig
from .demo import execute_low_level
from .errors import (
    GraspFailed,
    InconsistentCorrection,
    InvalidPlan,
    PreconditionUnsatisfied,
    UnknownInstance,
    UnresolvedLandmark,
)
from .planner import GroundAction, Plan
from .actions import Literal
from .world import (
    CLEAR,
    FLAT,
    ON,
    STACKABLE,
    THIN,
    Atom,
    BASE,
    CUBE,
    ROOF,
    Instance,
    ObjectInstance,
    PerceptionMode,
    Scene,
    WorldState,
    apply_effects,
    instance_type,
    perceive,
)


@dataclass(frozen=True)
class StateCorrection:
    """User edits to a perceived state: atoms to assert and to retract."""

    add: frozenset[Atom] = frozenset()
    remove: frozenset[Atom] = frozenset()


@dataclass
class MentalModel:
    """Believed symbolic state plus last believed landmark poses."""

    atoms: WorldState
    poses: dict[str, tuple]
    dirty: set[str] = field(default_factory=set)

    def satisfies(self, literals: Iterable[Literal]) -> bool:
        return all(
            (lit.atom in self.atoms.atoms) == lit.positive for lit in literals
        )


def _derive_full_state(
    on_atoms: set[Atom],
    instances: dict[str, Instance],
    held: set[str],
    config: WorkbenchConfig,
) -> set[Atom]:
    """Close a set of on-atoms under the clear/flat/thin/stackable rules."""
    atoms = set(on_atoms)
    covered = {a.args[1] for a in on_atoms}
    for iid, inst in instances.items():
        if iid in held:
            continue
        if iid not in covered:
            atoms.add(Atom(CLEAR, (iid,)))
    objects = {iid: inst for iid, inst in instances.items() if isinstance(inst, ObjectInstance)}
    for iid, obj in objects.items():
        if obj.type.is_a(BASE) or obj.type.is_a(CUBE):
            atoms.add(Atom(FLAT, (iid,)))
        if obj.type.is_a(CUBE) or obj.type.is_a(ROOF):
            atoms.add(Atom(THIN, (iid,)))
    for iid, obj in objects.items():
        for eid, elem in instances.items():
            if eid == iid:
                continue
            if config.rules.allows(obj.type, instance_type(elem)):
                atoms.add(Atom(STACKABLE, (iid, eid)))
    return atoms


def init_mental_model(
    scene: Scene,
    mode: PerceptionMode = PerceptionMode.FULL,
    corrections: Optional[StateCorrection] = None,
    config: Optional[WorkbenchConfig] = None,
) -> MentalModel:
    """Detect landmarks once and fold in the user's state corrections.

    Corrections may reference instances the perception missed (stack-blind
    occlusion); those are pulled from the scene, standing in for positions
    the model saved before the stack was built.  The clear family is
    re-derived from the corrected on-atoms; corrections that fight the
    clear/on coupling raise InconsistentCorrection.
    """
    cfg = config or WorkbenchConfig()
    corrections = corrections or StateCorrection()
    perceived = perceive(scene, cfg.on_threshold, cfg.rules, mode, cfg.stack_tolerance)

    conflicted = corrections.add & corrections.remove
    if conflicted:
        raise InconsistentCorrection(
            f"atoms both asserted and retracted: {sorted(str(a) for a in conflicted)}"
        )

    instances: dict[str, Instance] = dict(perceived.instances)
    scene_instances = scene.instances
    for atom in corrections.add | corrections.remove:
        for arg in atom.args:
            if arg not in instances:
                inst = scene_instances.get(arg)
                if inst is None:
                    raise UnknownInstance(f"correction {atom} references unknown {arg!r}")
                instances[arg] = inst

    on_atoms = {a for a in perceived.atoms if a.name == ON.name}
    on_atoms -= {a for a in corrections.remove if a.name == ON.name}
    on_atoms |= {a for a in corrections.add if a.name == ON.name}

    held = scene.held_ids()
    atoms = _derive_full_state(on_atoms, instances, held, cfg)
    covered = {a.args[1] for a in on_atoms}

    for atom in corrections.add:
        if atom.name == CLEAR.name and atom.args[0] in covered:
            raise InconsistentCorrection(
                f"clear({atom.args[0]}) asserted while something is on it"
            )
    for atom in corrections.remove:
        if atom.name == CLEAR.name and atom.args[0] not in covered:
            raise InconsistentCorrection(
                f"clear({atom.args[0]}) retracted with nothing on it"
            )

    # property corrections (flat/thin/stackable) override the derived set
    for atom in corrections.remove:
        if atom.name in (FLAT.name, THIN.name, STACKABLE.name):
            atoms.discard(atom)
    for atom in corrections.add:
        if atom.name in (FLAT.name, THIN.name, STACKABLE.name):
            atoms.add(atom)

    poses: dict[str, tuple] = {}
    for iid, inst in instances.items():
        poses[iid] = inst.pose

    return MentalModel(atoms=WorldState(frozenset(atoms), instances), poses=poses)


# --- execution log -----------------------------------------------------------


class StepOutcome(str, enum.Enum):
    OK = "OK"
    REJECTED = "REJECTED"
    FAILED = "FAILED"


@dataclass(frozen=True)
class LogEntry:
    index: int
    action: str
    bindings: dict
    pre_state: tuple[str, ...]
    post_state: tuple[str, ...]
    outcome: StepOutcome
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "action": self.action,
            "bindings": dict(self.bindings),
            "pre_state": list(self.pre_state),
            "post_state": list(self.post_state),
            "outcome": self.outcome.value,
            "detail": self.detail,
        }


@dataclass
class ExecutionLog:
    entries: list[LogEntry] = field(default_factory=list)

    def append(self, entry: LogEntry) -> None:
        self.entries.append(entry)

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries]}

    def transcript(self) -> str:
        lines = []
        for e in self.entries:
            lines.append(f"step {e.index + 1}: {e.action} -> {e.outcome.value}"
                         + (f" ({e.detail})" if e.detail else ""))
        return "\n".join(lines)


ConfirmCallback = Callable[[GroundAction, Scene], bool]


def auto_confirm(step: GroundAction, scene: Scene) -> bool:
    """Headless default: every step executed by the simulator is correct."""
    return True


def _landmark_bindings(step: GroundAction) -> dict[str, str]:
    """Map demo-time landmark ids to this step's bound instances."""
    if step.source is None:
        return {}
    binding = step.source.demo_binding
    return {
        binding[param]: instance
        for param, instance in step.substitution.items()
        if param in binding
    }


def _atom_strings(state: WorldState) -> tuple[str, ...]:
    return tuple(str(a) for a in state.sorted_atoms())


def _ask_confirm(
    confirm: ConfirmCallback, step: GroundAction, scene: Scene, timeout: float
) -> bool:
    if confirm is auto_confirm:
        return True
    with ThreadPoolExecutor(max_workers=1) as pool:
        future = pool.submit(confirm, step, scene)
        try:
            return bool(future.result(timeout=timeout))
        except FutureTimeout:
            return False  # watchdog: treat an unresponsive confirm as rejection


def execute_plan_step(
    model: MentalModel,
    scene: Scene,
    step: GroundAction,
    confirm: ConfirmCallback = auto_confirm,
    config: Optional[WorkbenchConfig] = None,
    index: int = 0,
) -> tuple[Scene, MentalModel, LogEntry]:
    """Run one plan step: symbolic check, motion replay, belief update."""
    cfg = config or WorkbenchConfig()
    pre_atoms = _atom_strings(model.atoms)

    missing = [a for a in step.pre_pos_atoms if a not in model.atoms.atoms]
    violated = [a for a in step.pre_neg_atoms if a in model.atoms.atoms]
    if missing or violated:
        parts = [f"missing {a}" for a in missing] + [f"forbidden {a}" for a in violated]
        raise PreconditionUnsatisfied(f"step {step}: {'; '.join(parts)}")

    if step.source is None or step.source.low_level is None:
        raise InvalidPlan(f"step {step} has no taught low-level motion to execute")
    bindings = _landmark_bindings(step)
    try:
        new_scene = execute_low_level(
            step.source.low_level,
            scene,
            bindings,
            cfg,
            landmark_poses=model.poses,
        )
    except (UnresolvedLandmark, GraspFailed) as exc:
        entry = LogEntry(
            index, str(step), bindings, pre_atoms, pre_atoms, StepOutcome.FAILED, str(exc)
        )
        return scene, model, entry

    if _ask_confirm(confirm, step, new_scene, cfg.confirm_timeout):
        new_atoms = apply_effects(model.atoms, step.add_atoms, step.del_atoms)
        moved = set()
        old_objects = {o.id: o for o in scene.objects}
        for obj in new_scene.objects:
            before = old_objects.get(obj.id)
            if before is None or before.pose != obj.pose:
                moved.add(obj.id)
                model.poses[obj.id] = obj.pose
        model.atoms = new_atoms
        model.dirty |= moved
        entry = LogEntry(
            index, str(step), bindings, pre_atoms, _atom_strings(new_atoms), StepOutcome.OK
        )
        return new_scene, model, entry

    # rejection: beliefs are stale, fall back to full re-perception
    refreshed = init_mental_model(new_scene, PerceptionMode.FULL, None, cfg)
    model.atoms = refreshed.atoms
    model.poses = refreshed.poses
    model.dirty = set()
    entry = LogEntry(
        index,
        str(step),
        bindings,
        pre_atoms,
        _atom_strings(model.atoms),
        StepOutcome.REJECTED,
        "user rejected; model re-perceived",
    )
    return new_scene, model, entry


@dataclass(frozen=True)
class ExecutionResult:
    scene: Scene
    log: ExecutionLog
    goal_satisfied: Optional[bool]


def execute_plan(
    model: MentalModel,
    scene: Scene,
    the_plan: Plan,
    confirm: ConfirmCallback = auto_confirm,
    goal: Optional[Iterable[Literal]] = None,
    config: Optional[WorkbenchConfig] = None,
) -> ExecutionResult:
    """Execute steps in order, stopping at the first FAILED or REJECTED one."""
    cfg = config or WorkbenchConfig()
    log = ExecutionLog()
    current = scene
    for i, step in enumerate(the_plan.steps):
        current, model, entry = execute_plan_step(model, current, step, confirm, cfg, i)
        log.append(entry)
        if entry.outcome is not StepOutcome.OK:
            break
    satisfied: Optional[bool] = None
    if goal is not None:
        satisfied = model.satisfies(goal)
    return ExecutionResult(scene=current, log=log, goal_satisfied=satisfied)
