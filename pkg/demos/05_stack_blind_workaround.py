"""Occluded stacks and the mental-model workaround.

Under stack-blind perception a covered object is invisible, so a stacked
initial state reads wrong.  The user asserts the hidden on-atoms once; the
mental model carries those beliefs through planning and execution without
ever re-detecting.
"""

from irp import (
    ELEMENT,
    CUBE,
    ObjectInstance,
    PerceptionMode,
    PositionInstance,
    Scene,
    StateCorrection,
    make_atom,
    make_literal,
    perceive,
)
from irp.actions import AddPre, SetParamType
from irp.benchmarks import claw_top_script
from irp.session import Session


def stack(oid, x, y, level):
    return ObjectInstance(oid, (x, y, 0.05 * level), (0.05, 0.05, 0.05), CUBE)


scene = Scene(
    (stack("c1", 0.35, -0.3, 0), stack("c2", 0.35, -0.3, 1), stack("c3", 0.35, 0.0, 0)),
    (
        PositionInstance("A", (0.35, -0.3)),
        PositionInstance("B", (0.35, 0.0)),
        PositionInstance("C", (0.35, 0.3)),
    ),
)

blind = perceive(scene, mode=PerceptionMode.STACK_BLIND)
print("stack-blind perception (c1 is occluded by c2):")
for atom in blind.sorted_atoms():
    print(f"  {atom}")
print("  -> c1 is missing entirely and A wrongly reads clear\n")

session = Session()
session.teach_script(claw_top_script())
session.edit_action(
    "claw_top",
    [
        SetParamType("?A", ELEMENT),
        SetParamType("?B", ELEMENT),
        AddPre(make_literal("clear", "?obj")),
    ],
)
session.load_scene(scene)

corrections = StateCorrection(
    add=frozenset({make_atom("on", "c1", "A"), make_atom("on", "c2", "c1")})
)
session.create_problem_from_scene(
    "stacked",
    [make_literal("on", "c3", "c2")],
    corrections=corrections,
    mode=PerceptionMode.STACK_BLIND,
)
print("after the user's corrections the believed init is:")
for atom in session.problems["stacked"].init.sorted_atoms():
    print(f"  {atom}")

record = session.solve("stacked")
result = session.execute(record.id)
print("\nplan:", "; ".join(record.plan.render_lines()))
print("goal satisfied:", result.goal_satisfied)
print(
    "model matches full perception at the end:",
    session.mental_model.atoms.atoms == perceive(session.scene).atoms,
)
