"""The whole cycle in one session: teach, generalize, solve, execute.

Swaps two cubes through the free position, then prints the execution log and
shows the mental model agreeing with fresh perception at the end.
"""

from irp import (
    ELEMENT,
    CUBE,
    ObjectInstance,
    PositionInstance,
    Scene,
    SearchMode,
    make_literal,
    perceive,
)
from irp.actions import AddPre, SetParamType
from irp.benchmarks import claw_top_script
from irp.session import Session

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

scene = Scene(
    (
        ObjectInstance("obj1", (0.35, -0.3, 0.0), (0.05, 0.05, 0.05), CUBE),
        ObjectInstance("obj2", (0.35, 0.0, 0.0), (0.05, 0.05, 0.05), CUBE),
    ),
    (
        PositionInstance("A", (0.35, -0.3)),
        PositionInstance("B", (0.35, 0.0)),
        PositionInstance("C", (0.35, 0.3)),
    ),
)
session.load_scene(scene)

session.create_problem_from_scene(
    "swap",
    [make_literal("on", "obj1", "B"), make_literal("on", "obj2", "A")],
)
record = session.solve("swap", mode=SearchMode.OPTIMAL)
print("plan:")
for line in record.plan.render_lines():
    print(f"  {line}")

result = session.execute(record.id)
print("\nexecution log:")
print(result.log.transcript())
print("\ngoal satisfied:", result.goal_satisfied)

final = perceive(session.scene)
print("mental model agrees with perception:",
      session.mental_model.atoms.atoms == final.atoms)
print("\ndebug menu for the solved problem (no hints expected):")
print("  hints:", session.debug_summary("swap").hints or "none")
