"""Randomized small planning tasks built from the taught benchmark actions."""

import random
from dataclasses import dataclass

from irp.actions import Domain, infer_ground_conditions, lift_action, edit_action, make_literal
from irp.benchmarks import (
    HOUSE_CLAW_EDITS,
    HOUSE_SUCTION_EDITS,
    SIDE_GRASP_EDITS,
    claw_side_script,
    claw_top_script,
    suction_top_script,
)
from irp.demo import teach_from_script
from irp.pddl import PddlProblem
from irp.planner import ground_task
from irp.world import CUBE, POSITION, WorldState, perceive
from conftest import scene_with_piles

_POSITIONS = ["A", "B", "C", "D"]


def _taught(script, edits):
    recorded = teach_from_script(script)
    ground = infer_ground_conditions(recorded.O1, recorded.O2)
    action = lift_action(script.name, ground, recorded.O1.instances, recorded.action)
    for e in edits:
        action = edit_action(action, e)
    return action


_TAUGHT_CACHE = None


def taught_actions():
    """The three benchmark operators (claw top/side, suction top), edited."""
    global _TAUGHT_CACHE
    if _TAUGHT_CACHE is None:
        _TAUGHT_CACHE = (
            _taught(claw_top_script(), HOUSE_CLAW_EDITS),
            _taught(claw_side_script(), SIDE_GRASP_EDITS),
            _taught(suction_top_script(), HOUSE_SUCTION_EDITS),
        )
    return _TAUGHT_CACHE


@dataclass
class RandomTask:
    domain: Domain
    problem: PddlProblem
    task: object
    solvable_hint: bool  # goal sampled from a reachable state


def random_init(rng: random.Random, n_objects: int, n_positions: int) -> WorldState:
    pos_ids = _POSITIONS[:n_positions]
    piles: dict[str, list] = {p: [] for p in pos_ids}
    for k in range(n_objects):
        piles[rng.choice(pos_ids)].append((f"o{k + 1}", CUBE))
    piles = {p: s for p, s in piles.items() if s}
    return perceive(scene_with_piles(piles, positions=pos_ids))


def random_task(rng: random.Random) -> RandomTask:
    n_objects = rng.randrange(1, 5)
    n_positions = rng.randrange(2, 5)
    actions = [a for a in taught_actions() if rng.random() < 0.8] or [taught_actions()[0]]

    domain = Domain(name="bench")
    for action in actions:
        domain.add_action(action)

    init_state = random_init(rng, n_objects, n_positions)
    objects = {
        iid: (CUBE if iid.startswith("o") else POSITION)
        for iid in init_state.instances
    }

    base = PddlProblem(
        name="rnd",
        domain_name="bench",
        objects=objects,
        init=init_state.atoms,
        goal=frozenset({make_literal("clear", _POSITIONS[0])}),
    )
    seed_task = ground_task(domain, base)

    adversarial = rng.random() < 0.2
    if adversarial:
        ids = sorted(objects)
        obj_ids = [i for i in ids if i.startswith("o")]
        goal = set()
        for _ in range(rng.randrange(1, 3)):
            a = rng.choice(obj_ids)
            b = rng.choice(ids)
            if a != b:
                goal.add(make_literal("on", a, b))
        if not goal:
            goal = {make_literal("on", obj_ids[0], _POSITIONS[0])}
        solvable_hint = False
    else:
        state = seed_task.init
        for _ in range(rng.randrange(0, 7)):
            applicable = [ga for ga in seed_task.actions if ga.applicable(state)]
            if not applicable:
                break
            state = rng.choice(applicable).apply(state)
        true_on = [
            seed_task.atoms[i]
            for i in range(len(seed_task.atoms))
            if state >> i & 1 and seed_task.atoms[i].name == "on"
        ]
        rng.shuffle(true_on)
        picked = true_on[: rng.randrange(1, min(3, len(true_on)) + 1)] if true_on else []
        goal = {make_literal(a.name, *a.args) for a in picked} or {
            make_literal("clear", _POSITIONS[0])
        }
        solvable_hint = True

    problem = PddlProblem(
        name="rnd",
        domain_name="bench",
        objects=objects,
        init=init_state.atoms,
        goal=frozenset(goal),
    )
    return RandomTask(
        domain=domain,
        problem=problem,
        task=ground_task(domain, problem),
        solvable_hint=solvable_hint,
    )
