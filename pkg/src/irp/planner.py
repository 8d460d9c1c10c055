"""Typed STRIPS grounding and a self-contained satisficing planner.

Grounding instantiates every action over all type-respecting substitutions
and prunes statically inconsistent instances.  Search states are bitmasks
over the ground-atom universe.  The default search is enforced hill-climbing
on the relaxed-plan heuristic restricted to helpful actions, with a greedy
best-first restart when EHC dead-ends; OPTIMAL mode is uniform-cost search.
Negative preconditions and goals are handled natively in state transitions
and compiled to complementary "not-p" facts inside the relaxed planning
graph, where deletes are ignored.
"""

from __future__ import annotations

import heapq
import itertools
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .actions import Domain, HighLevelAction
from .errors import (
    Cancelled,
    DomainMismatch,
    InvalidPlan,
    NoSolution,
    ResourceLimit,
    TooLarge,
    UndeclaredObject,
)
from .pddl import PddlProblem
from .world import Atom

INF = float("inf")


@dataclass(frozen=True)
class GroundAction:
    """Fully instantiated action over atom indices, plus materialized atoms."""

    name: str
    args: tuple[str, ...]
    pre_pos: frozenset[int]
    pre_neg: frozenset[int]
    add: frozenset[int]
    delete: frozenset[int]
    pre_pos_mask: int = field(repr=False)
    pre_neg_mask: int = field(repr=False)
    add_mask: int = field(repr=False)
    del_mask: int = field(repr=False)
    add_atoms: tuple[Atom, ...] = field(compare=False, repr=False)
    del_atoms: tuple[Atom, ...] = field(compare=False, repr=False)
    pre_pos_atoms: tuple[Atom, ...] = field(default=(), compare=False, repr=False)
    pre_neg_atoms: tuple[Atom, ...] = field(default=(), compare=False, repr=False)
    source: Optional[HighLevelAction] = field(default=None, compare=False, repr=False)
    substitution: Mapping[str, str] = field(default_factory=dict, compare=False, repr=False)

    def applicable(self, state: int) -> bool:
        return (
            state & self.pre_pos_mask == self.pre_pos_mask
            and state & self.pre_neg_mask == 0
        )

    def apply(self, state: int) -> int:
        return (state & ~self.del_mask) | self.add_mask

    def __str__(self) -> str:
        return f"{self.name}({', '.join(self.args)})"


@dataclass(frozen=True)
class PlanningTask:
    """Indexed ground model: atom universe, actions, init, and goals."""

    atoms: tuple[Atom, ...]
    actions: tuple[GroundAction, ...]
    init: int
    goal_pos: frozenset[int]
    goal_neg: frozenset[int]
    goal_pos_mask: int
    goal_neg_mask: int
    # complementary "not-p" facts for atoms used negatively (RPG compilation)
    comp_of: Mapping[int, int] = field(default_factory=dict)
    cpre: tuple[tuple[int, ...], ...] = ()
    cadd: tuple[tuple[int, ...], ...] = ()
    cadd_sets: tuple[frozenset[int], ...] = ()
    achievers: Mapping[int, tuple[int, ...]] = field(default_factory=dict)
    cgoal: tuple[int, ...] = ()

    @property
    def n_facts(self) -> int:
        return len(self.atoms) + len(self.comp_of)

    def satisfies_goal(self, state: int) -> bool:
        return (
            state & self.goal_pos_mask == self.goal_pos_mask
            and state & self.goal_neg_mask == 0
        )

    def compiled_state(self, state: int) -> list[int]:
        """Fact ids true in ``state``, including complement facts."""
        facts = [i for i in range(len(self.atoms)) if state >> i & 1]
        facts.extend(c for p, c in self.comp_of.items() if not state >> p & 1)
        return facts

    def state_atoms(self, state: int) -> list[Atom]:
        return [a for i, a in enumerate(self.atoms) if state >> i & 1]


@dataclass(frozen=True)
class Plan:
    steps: tuple[GroundAction, ...]

    @property
    def cost(self) -> int:
        return len(self.steps)

    def render_lines(self) -> list[str]:
        return [f"{i + 1}. {step}" for i, step in enumerate(self.steps)]

    def to_dict(self) -> dict:
        return {
            "cost": self.cost,
            "steps": [{"name": s.name, "args": list(s.args)} for s in self.steps],
        }

    def __str__(self) -> str:
        return "\n".join(self.render_lines()) if self.steps else "<empty plan>"


class SearchMode:
    FF = "FF"
    OPTIMAL = "OPTIMAL"


@dataclass(frozen=True)
class SearchConfig:
    mode: str = SearchMode.FF
    node_limit: int = 500_000
    time_limit_ms: int = 60_000
    stop_event: Optional[threading.Event] = field(default=None, compare=False)

    def __post_init__(self):
        if self.node_limit <= 0 or self.time_limit_ms <= 0:
            raise ValueError("search limits must be positive")
        if self.mode not in (SearchMode.FF, SearchMode.OPTIMAL):
            raise ValueError(f"unknown search mode {self.mode!r}")


# --- grounding ---------------------------------------------------------------


def _typed_instances(problem: PddlProblem, tag) -> list[str]:
    return sorted(oid for oid, t in problem.objects.items() if t.is_a(tag))


def ground_task(domain: Domain, problem: PddlProblem) -> PlanningTask:
    """Instantiate the domain over the problem's objects."""
    if problem.domain_name.lower() != domain.name.lower():
        raise DomainMismatch(
            f"problem {problem.name!r} targets domain {problem.domain_name!r}"
        )

    atoms: list[Atom] = []
    index: dict[Atom, int] = {}
    for schema in sorted(domain.schemas.values(), key=lambda s: s.name):
        pools = [_typed_instances(problem, t) for t in schema.params]
        for combo in itertools.product(*pools):
            atom = Atom(schema, combo)
            index[atom] = len(atoms)
            atoms.append(atom)

    for atom in problem.init:
        if atom not in index:
            raise UndeclaredObject(f"init atom {atom} not in the typed universe")
    for lit in problem.goal:
        if lit.atom not in index:
            raise UndeclaredObject(f"goal atom {lit.atom} not in the typed universe")

    ground: list[GroundAction] = []
    for action in domain.sorted_actions():
        pools = [_typed_instances(problem, p.type) for p in action.params]
        names = [p.name for p in action.params]
        for combo in itertools.product(*pools):
            subst = dict(zip(names, combo))
            pre, plus, minus = action.ground(subst)
            pre_pos = frozenset(index[l.atom] for l in pre if l.positive)
            pre_neg = frozenset(index[l.atom] for l in pre if not l.positive)
            add = frozenset(index[a] for a in plus)
            delete = frozenset(index[a] for a in minus)
            if pre_pos & pre_neg or add & delete:
                continue  # statically inconsistent instance
            ground.append(
                GroundAction(
                    name=action.name,
                    args=tuple(combo),
                    pre_pos=pre_pos,
                    pre_neg=pre_neg,
                    add=add,
                    delete=delete,
                    pre_pos_mask=_mask(pre_pos),
                    pre_neg_mask=_mask(pre_neg),
                    add_mask=_mask(add),
                    del_mask=_mask(delete),
                    add_atoms=tuple(sorted((atoms[i] for i in add), key=lambda a: a.sort_key)),
                    del_atoms=tuple(sorted((atoms[i] for i in delete), key=lambda a: a.sort_key)),
                    pre_pos_atoms=tuple(
                        sorted((atoms[i] for i in pre_pos), key=lambda a: a.sort_key)
                    ),
                    pre_neg_atoms=tuple(
                        sorted((atoms[i] for i in pre_neg), key=lambda a: a.sort_key)
                    ),
                    source=action,
                    substitution=subst,
                )
            )

    ground.sort(key=lambda a: (a.name, a.args))
    seen_signatures: set[tuple] = set()
    deduped: list[GroundAction] = []
    for ga in ground:
        sig = (ga.pre_pos, ga.pre_neg, ga.add, ga.delete)
        if sig in seen_signatures:
            continue
        seen_signatures.add(sig)
        deduped.append(ga)

    init_mask = _mask(index[a] for a in problem.init)
    goal_pos = frozenset(index[l.atom] for l in problem.goal if l.positive)
    goal_neg = frozenset(index[l.atom] for l in problem.goal if not l.positive)

    neg_used = sorted(set().union(goal_neg, *(ga.pre_neg for ga in deduped)) if deduped or goal_neg else set())
    comp_of = {p: len(atoms) + k for k, p in enumerate(neg_used)}

    cpre = tuple(
        tuple(sorted(ga.pre_pos) + sorted(comp_of[p] for p in ga.pre_neg))
        for ga in deduped
    )
    cadd = tuple(
        tuple(sorted(ga.add) + sorted(comp_of[p] for p in ga.delete if p in comp_of))
        for ga in deduped
    )
    cadd_sets = tuple(frozenset(f) for f in cadd)
    achievers: dict[int, list[int]] = {}
    for ai, facts in enumerate(cadd):
        for f in facts:
            achievers.setdefault(f, []).append(ai)
    cgoal = tuple(sorted(goal_pos) + sorted(comp_of[p] for p in goal_neg))

    return PlanningTask(
        atoms=tuple(atoms),
        actions=tuple(deduped),
        init=init_mask,
        goal_pos=goal_pos,
        goal_neg=goal_neg,
        goal_pos_mask=_mask(goal_pos),
        goal_neg_mask=_mask(goal_neg),
        comp_of=comp_of,
        cpre=cpre,
        cadd=cadd,
        cadd_sets=cadd_sets,
        achievers={f: tuple(ais) for f, ais in achievers.items()},
        cgoal=cgoal,
    )


def _mask(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


# --- relaxed-plan heuristic -----------------------------------------------------


def h_ff(state: int, task: PlanningTask) -> tuple[float, list[GroundAction]]:
    """Relaxed-plan length from ``state`` plus the helpful actions.

    Builds the delete-free planning graph over the compiled (complement-
    augmented) facts, then extracts an executable relaxed plan back to
    front: repeatedly take the deepest unmet fact, prepend its earliest
    achiever (smallest layer, then lexicographic action order, which is the
    task's action order), discharge everything that achiever provides, and
    queue its own nontrivial preconditions.  Prepending keeps the extracted
    sequence a valid delete-free plan: providers always end up before their
    consumers.  Helpful actions are the relaxed-plan actions applicable in
    the current state.
    """
    level = [-1] * task.n_facts
    for f in task.compiled_state(state):
        level[f] = 0

    if not task.cgoal:
        return 0.0, []

    action_level: dict[int, int] = {}
    layer = 0
    while True:
        if all(level[g] >= 0 for g in task.cgoal):
            break
        new_facts = []
        for ai in range(len(task.actions)):
            if ai in action_level:
                continue
            if all(0 <= level[f] <= layer for f in task.cpre[ai]):
                action_level[ai] = layer
                for f in task.cadd[ai]:
                    if level[f] < 0:
                        new_facts.append(f)
        if not new_facts:
            return INF, []
        layer += 1
        for f in new_facts:
            level[f] = layer

    needed = {g for g in task.cgoal if level[g] > 0}
    chosen_rev: list[int] = []
    guard = 0
    while needed:
        guard += 1
        if guard > 100_000:  # pragma: no cover - defensive
            raise InvalidPlan("relaxed plan extraction failed to terminate")
        fact = min(needed, key=lambda f: (-level[f], f))
        candidates = [ai for ai in task.achievers.get(fact, ()) if ai in action_level]
        best = min(candidates, key=lambda ai: (action_level[ai], ai))
        chosen_rev.append(best)
        needed -= task.cadd_sets[best]
        for f in task.cpre[best]:
            if level[f] > 0:
                needed.add(f)

    chosen = sorted(set(chosen_rev))
    helpful = [task.actions[ai] for ai in chosen if task.actions[ai].applicable(state)]
    return float(len(chosen_rev)), helpful


# --- search ------------------------------------------------------------------


class _Budget:
    def __init__(self, config: SearchConfig):
        self.config = config
        self.expansions = 0
        self.deadline = time.monotonic() + config.time_limit_ms / 1000.0

    def tick(self):
        self.expansions += 1
        if self.config.stop_event is not None and self.config.stop_event.is_set():
            raise Cancelled("planning cancelled by stop flag")
        if self.expansions % 256 == 0 and time.monotonic() > self.deadline:
            raise ResourceLimit(
                f"time limit {self.config.time_limit_ms} ms hit "
                f"after {self.expansions} expansions"
            )
        if self.expansions > self.config.node_limit:
            raise ResourceLimit(f"node limit {self.config.node_limit} hit")


def plan(task: PlanningTask, config: Optional[SearchConfig] = None) -> Plan:
    """Solve the task; the returned plan always passes validate_plan."""
    cfg = config or SearchConfig()
    budget = _Budget(cfg)

    if task.satisfies_goal(task.init):
        return Plan(())

    if cfg.mode == SearchMode.OPTIMAL:
        steps = _uniform_cost(task, budget)
    else:
        steps = _enforced_hill_climbing(task, budget)
        if steps is None:
            steps = _greedy_best_first(task, budget)

    result = Plan(tuple(steps))
    check = validate_plan(task, result)
    if not check.valid:
        raise InvalidPlan(f"internal error: produced invalid plan ({check.reason})")
    return result


def _enforced_hill_climbing(
    task: PlanningTask, budget: _Budget
) -> Optional[list[GroundAction]]:
    """Breadth-first escape to any strictly better h value, helpful actions only.

    Returns None when a plateau/dead end exhausts (caller falls back to GBFS).
    """
    h_cache: dict[int, tuple[float, list[GroundAction]]] = {}

    def describe(state: int) -> tuple[float, list[GroundAction]]:
        if state not in h_cache:
            h_cache[state] = h_ff(state, task)
        return h_cache[state]

    current = task.init
    best_h, _ = describe(current)
    if best_h == INF:
        return None
    plan_steps: list[GroundAction] = []

    while best_h > 0:
        frontier: deque[tuple[int, list[GroundAction]]] = deque([(current, [])])
        seen = {current}
        improved = False
        while frontier and not improved:
            state, path = frontier.popleft()
            budget.tick()
            _, helpful = describe(state)
            for action in helpful:
                succ = action.apply(state)
                if succ in seen:
                    continue
                seen.add(succ)
                h_succ, _ = describe(succ)
                if h_succ == INF:
                    continue
                if h_succ < best_h:
                    current = succ
                    best_h = h_succ
                    plan_steps.extend(path + [action])
                    improved = True
                    break
                frontier.append((succ, path + [action]))
        if not improved:
            return None
    return plan_steps


def _greedy_best_first(task: PlanningTask, budget: _Budget) -> list[GroundAction]:
    """Greedy best-first over all actions; restarts from the initial state."""
    h0, _ = h_ff(task.init, task)
    if h0 == INF:
        raise NoSolution("goal unreachable even under delete relaxation")

    counter = itertools.count()
    heap: list[tuple[float, int, int]] = [(h0, next(counter), task.init)]
    parents: dict[int, tuple[int, GroundAction]] = {}
    closed: set[int] = set()

    while heap:
        h, _, state = heapq.heappop(heap)
        if state in closed:
            continue
        closed.add(state)
        budget.tick()
        if task.satisfies_goal(state):
            return _reconstruct(parents, task.init, state)
        for action in task.actions:
            if not action.applicable(state):
                continue
            succ = action.apply(state)
            if succ in closed or succ in parents or succ == task.init:
                continue  # first parent wins; keeps expansion deterministic
            parents[succ] = (state, action)
            h_succ, _ = h_ff(succ, task)
            if h_succ < INF:
                heapq.heappush(heap, (h_succ, next(counter), succ))
    raise NoSolution(f"search space exhausted: {len(closed)} states explored")


def _uniform_cost(task: PlanningTask, budget: _Budget) -> list[GroundAction]:
    """Unit-cost optimal search (Dijkstra with FIFO tie-breaking)."""
    counter = itertools.count()
    heap: list[tuple[int, int, int]] = [(0, next(counter), task.init)]
    parents: dict[int, tuple[int, GroundAction]] = {}
    best_cost: dict[int, int] = {task.init: 0}
    closed: set[int] = set()

    while heap:
        cost, _, state = heapq.heappop(heap)
        if state in closed:
            continue
        closed.add(state)
        budget.tick()
        if task.satisfies_goal(state):
            return _reconstruct(parents, task.init, state)
        for action in task.actions:
            if not action.applicable(state):
                continue
            succ = action.apply(state)
            new_cost = cost + 1
            if succ in closed or best_cost.get(succ, 1 << 60) <= new_cost:
                continue
            best_cost[succ] = new_cost
            parents[succ] = (state, action)
            heapq.heappush(heap, (new_cost, next(counter), succ))
    raise NoSolution(f"search space exhausted: {len(closed)} states explored")


def _reconstruct(
    parents: Mapping[int, tuple[int, GroundAction]], init: int, state: int
) -> list[GroundAction]:
    steps: list[GroundAction] = []
    while state != init:
        state, action = parents[state]
        steps.append(action)
    steps.reverse()
    return steps


# --- validation and the exhaustive oracle ------------------------------------------


@dataclass(frozen=True)
class PlanValidation:
    valid: bool
    failing_step: Optional[int] = None
    reason: Optional[str] = None


def validate_plan(task: PlanningTask, the_plan: Plan) -> PlanValidation:
    """Simulate the plan from init; report the first failing step if any."""
    state = task.init
    for i, step in enumerate(the_plan.steps):
        missing = step.pre_pos - {k for k in step.pre_pos if state >> k & 1}
        if missing:
            atoms = ", ".join(str(task.atoms[k]) for k in sorted(missing))
            return PlanValidation(False, i, f"step {i + 1} {step}: missing {atoms}")
        violated = {k for k in step.pre_neg if state >> k & 1}
        if violated:
            atoms = ", ".join(str(task.atoms[k]) for k in sorted(violated))
            return PlanValidation(False, i, f"step {i + 1} {step}: forbidden {atoms}")
        state = step.apply(state)
    if not task.satisfies_goal(state):
        return PlanValidation(False, len(the_plan.steps), "goal not satisfied at the end")
    return PlanValidation(True)


def bfs_oracle(task: PlanningTask, max_states: int = 1_000_000) -> Optional[int]:
    """Plain breadth-first optimal plan length; None when unsolvable.

    Independent of the planner's search machinery on purpose: it is the test
    oracle the planner is checked against.
    """
    if task.satisfies_goal(task.init):
        return 0
    frontier = deque([task.init])
    depth = {task.init: 0}
    while frontier:
        state = frontier.popleft()
        for action in task.actions:
            if not action.applicable(state):
                continue
            succ = action.apply(state)
            if succ in depth:
                continue
            depth[succ] = depth[state] + 1
            if task.satisfies_goal(succ):
                return depth[succ]
            if len(depth) > max_states:
                raise TooLarge(f"oracle exceeded {max_states} states")
            frontier.append(succ)
    return None
