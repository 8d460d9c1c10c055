"""Scene geometry in, symbolic state out.

Builds a small tabletop, lets the perceiver turn boxes into ground atoms,
and shows how bounding boxes map to types.
"""

from irp import (
    CUBE,
    BASE,
    ObjectInstance,
    PositionInstance,
    Scene,
    classify_type,
    perceive,
)

positions = (
    PositionInstance("A", (0.35, -0.3)),
    PositionInstance("B", (0.35, 0.0)),
    PositionInstance("C", (0.35, 0.3)),
)
objects = (
    ObjectInstance("plate", (0.35, -0.3, 0.0), (0.18, 0.12, 0.03), BASE),
    ObjectInstance("block", (0.35, 0.0, 0.0), (0.05, 0.05, 0.05), CUBE),
    ObjectInstance("block2", (0.35, 0.0, 0.05), (0.05, 0.05, 0.05), CUBE),
)
scene = Scene(objects, positions)

print("bounding boxes classify to types:")
for dims in [(0.05, 0.05, 0.05), (0.18, 0.12, 0.03), (0.10, 0.05, 0.06)]:
    print(f"  {dims} -> {classify_type(dims).name}")

print("\nperceived world state (closed world: absent = false):")
state = perceive(scene)
for atom in state.sorted_atoms():
    print(f"  {atom}")

print("\nnote: block2 rests on block, so clear(block) and clear(B) are absent.")
