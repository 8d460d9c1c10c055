"""One kinesthetic demonstration, one reusable operator.

Runs the scripted claw pick-and-place, diffs the before/after observations
into preconditions and effects, lifts them to typed variables, and then
generalizes the action the way a user would in the interface.
"""

import json
import pathlib

from irp import (
    ELEMENT,
    AddPre,
    SetParamType,
    edit_action,
    infer_ground_conditions,
    lift_action,
    make_literal,
    render_literal_english,
    teach_from_script,
)
from irp.benchmarks import claw_top_script

script = claw_top_script("move")
print("demo script keyframes:")
for kf in script.keyframes:
    print(f"  t={kf.t:.0f}  {kf.position}  {kf.gripper.value}")

recorded = teach_from_script(script)
print("\nobserved before (O1):", ", ".join(str(a) for a in recorded.O1.sorted_atoms()))
print("observed after  (O2):", ", ".join(str(a) for a in recorded.O2.sorted_atoms()))

ground = infer_ground_conditions(recorded.O1, recorded.O2)
action = lift_action("move", ground, recorded.O1.instances, recorded.action)
print(f"\ninferred {action.signature()}:")
for lit in action.sorted_pre():
    print(f"  pre: {lit}   ({render_literal_english(lit)})")
for lit in action.sorted_effects():
    print(f"  eff: {lit}")

# the user generalizes: destinations may be any element, tops must be free
action = edit_action(action, SetParamType("?B", ELEMENT))
action = edit_action(action, AddPre(make_literal("clear", "?obj")))
print("\nafter the user's edits:")
print("  params:", ", ".join(str(p) for p in action.params))
print("  pre:   ", ", ".join(str(l) for l in action.sorted_pre()))

out = pathlib.Path(__file__).with_name("claw_top_demo.json")
print(f"\nthe same demonstration as a script file: {out.name}")
print(json.dumps(script.to_dict(), indent=2)[:300], "...")
