import random

import pytest

from irp.actions import Domain, HighLevelAction, Parameter, make_atom, make_literal
from irp.config import WorkbenchConfig
from irp.pddl import PddlProblem
from irp.world import (
    BASE,
    CUBE,
    OBJECT,
    POSITION,
    ROOF,
    ObjectInstance,
    PositionInstance,
    Scene,
)

CUBE_DIMS = (0.05, 0.05, 0.05)
BASE_DIMS = (0.18, 0.12, 0.03)
ROOF_DIMS = (0.10, 0.05, 0.06)
DIMS = {CUBE: CUBE_DIMS, BASE: BASE_DIMS, ROOF: ROOF_DIMS}

POSITION_GRID = {
    "A": (0.35, -0.3),
    "B": (0.35, 0.0),
    "C": (0.35, 0.3),
    "D": (0.65, 0.0),
}


def cube(oid, xy, z=0.0):
    return ObjectInstance(oid, (xy[0], xy[1], z), CUBE_DIMS, CUBE)


def scene_with_piles(piles: dict[str, list[tuple[str, object]]], positions=None) -> Scene:
    """piles: position id -> [(object id, type tag), ...] bottom to top."""
    pos_ids = positions or list(POSITION_GRID)
    objects = []
    for pid, stack in piles.items():
        x, y = POSITION_GRID[pid]
        z = 0.0
        for oid, tag in stack:
            objects.append(ObjectInstance(oid, (x, y, z), DIMS[tag], tag))
            z += DIMS[tag][2]
    return Scene(
        tuple(objects),
        tuple(PositionInstance(p, POSITION_GRID[p]) for p in pos_ids),
    )


def paper_move_action(obj_type=OBJECT):
    """The two-position move operator with inferred-style conditions."""
    return HighLevelAction(
        name="move",
        params=(
            Parameter("?obj", obj_type),
            Parameter("?A", POSITION),
            Parameter("?B", POSITION),
        ),
        pre=frozenset(
            {
                make_literal("on", "?obj", "?A"),
                make_literal("clear", "?B"),
                make_literal("on", "?obj", "?B", positive=False),
                make_literal("clear", "?A", positive=False),
            }
        ),
        eff_plus=frozenset({make_atom("on", "?obj", "?B"), make_atom("clear", "?A")}),
        eff_minus=frozenset({make_atom("on", "?obj", "?A"), make_atom("clear", "?B")}),
    )


def swap_problem(domain_name="tabletop") -> PddlProblem:
    return PddlProblem(
        name="swap",
        domain_name=domain_name,
        objects={
            "obj1": OBJECT,
            "obj2": OBJECT,
            "A": POSITION,
            "B": POSITION,
            "C": POSITION,
        },
        init=frozenset(
            {
                make_atom("on", "obj1", "A"),
                make_atom("on", "obj2", "B"),
                make_atom("clear", "C"),
            }
        ),
        goal=frozenset(
            {make_literal("on", "obj1", "B"), make_literal("on", "obj2", "A")}
        ),
    )


@pytest.fixture
def config():
    return WorkbenchConfig()


@pytest.fixture
def swap_domain():
    dom = Domain(name="tabletop")
    dom.add_action(paper_move_action())
    return dom


@pytest.fixture
def rng():
    return random.Random(20240817)
