"""Geometric scene model and symbolic perception.

The tabletop world is a set of boxes (objects) and marked table points
(positions).  Perception turns geometry into a closed-world set of ground
atoms over the five built-in predicates; everything downstream (inference,
planning, execution) works on those atoms.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union

from .errors import (
    AmbiguousType,
    ArityMismatch,
    InvalidScene,
    UnknownInstance,
    UnknownType,
)
from .geometry import Vec3, horizontal_dist

# --- type hierarchy ---------------------------------------------------------


@dataclass(frozen=True)
class TypeTag:
    """Node in the rooted type tree; equality and hashing are by name."""

    name: str
    parent: Optional["TypeTag"] = field(default=None, compare=False)

    def is_a(self, other: "TypeTag") -> bool:
        """True iff ``other`` lies on this tag's parent chain (reflexive)."""
        node: Optional[TypeTag] = self
        while node is not None:
            if node.name == other.name:
                return True
            node = node.parent
        return False

    def ancestry(self) -> Iterator["TypeTag"]:
        node: Optional[TypeTag] = self
        while node is not None:
            yield node
            node = node.parent

    def __str__(self) -> str:
        return self.name


ELEMENT = TypeTag("ELEMENT")
POSITION = TypeTag("POSITION", ELEMENT)
OBJECT = TypeTag("OBJECT", ELEMENT)
BASE = TypeTag("BASE", OBJECT)
CUBE = TypeTag("CUBE", OBJECT)
ROOF = TypeTag("ROOF", OBJECT)

BUILTIN_TAGS = (ELEMENT, POSITION, OBJECT, BASE, CUBE, ROOF)


class TypeHierarchy:
    """Registry of type tags forming a rooted tree.

    Tags are registered parent-first; cycles are impossible because a tag's
    parent must already be present.
    """

    def __init__(self, tags: Iterable[TypeTag] = BUILTIN_TAGS):
        self._tags: dict[str, TypeTag] = {}
        for tag in tags:
            self.register(tag)

    def register(self, tag: TypeTag) -> TypeTag:
        if tag.parent is not None and tag.parent.name not in self._tags:
            raise UnknownType(f"parent type {tag.parent.name!r} not registered")
        existing = self._tags.get(tag.name)
        if existing is not None:
            if (existing.parent is None) != (tag.parent is None) or (
                existing.parent and tag.parent and existing.parent.name != tag.parent.name
            ):
                raise UnknownType(f"type {tag.name!r} already registered with a different parent")
            return existing
        self._tags[tag.name] = tag
        return tag

    def get(self, name: str) -> TypeTag:
        # PDDL is case-insensitive for type names; the registry is canonical.
        tag = self._tags.get(name) or self._tags.get(name.upper())
        if tag is None:
            raise UnknownType(f"unknown type {name!r}")
        return tag

    def __contains__(self, name: str) -> bool:
        return name in self._tags or name.upper() in self._tags

    def tags(self) -> tuple[TypeTag, ...]:
        return tuple(self._tags.values())

    def __eq__(self, other) -> bool:
        """Structural equality: same name -> parent-name mapping."""
        if not isinstance(other, TypeHierarchy):
            return NotImplemented
        mine = {t.name: t.parent.name if t.parent else None for t in self._tags.values()}
        theirs = {t.name: t.parent.name if t.parent else None for t in other._tags.values()}
        return mine == theirs

    def roots(self) -> tuple[TypeTag, ...]:
        return tuple(t for t in self._tags.values() if t.parent is None)

    def is_subtype(self, t: TypeTag, u: TypeTag) -> bool:
        if t.name not in self._tags or u.name not in self._tags:
            raise UnknownType(f"unregistered tag in is_subtype({t}, {u})")
        return t.is_a(u)


def default_hierarchy() -> TypeHierarchy:
    return TypeHierarchy(BUILTIN_TAGS)


def is_subtype(t: TypeTag, u: TypeTag) -> bool:
    """Reflexive subtype test on the parent chain."""
    return t.is_a(u)


# --- predicates and atoms ----------------------------------------------------


@dataclass(frozen=True)
class PredicateSchema:
    """Typed relation schema, e.g. on(OBJECT, ELEMENT)."""

    name: str
    params: tuple[TypeTag, ...]

    @property
    def arity(self) -> int:
        return len(self.params)

    def __str__(self) -> str:
        args = " ".join(t.name for t in self.params)
        return f"{self.name}({args})"


CLEAR = PredicateSchema("clear", (ELEMENT,))
ON = PredicateSchema("on", (OBJECT, ELEMENT))
STACKABLE = PredicateSchema("stackable", (OBJECT, ELEMENT))
FLAT = PredicateSchema("flat", (OBJECT,))
THIN = PredicateSchema("thin", (OBJECT,))

BUILTIN_SCHEMAS: dict[str, PredicateSchema] = {
    s.name: s for s in (CLEAR, ON, STACKABLE, FLAT, THIN)
}


@dataclass(frozen=True)
class Atom:
    """A predicate applied to arguments.

    Arguments are instance ids when ground, or ``?``-prefixed variable names
    when lifted; both forms share this class.  Equality and hashing are by
    (predicate name, args).
    """

    schema: PredicateSchema = field(compare=False)
    args: tuple[str, ...] = ()
    name: str = field(init=False)

    def __post_init__(self):
        if len(self.args) != self.schema.arity:
            raise ArityMismatch(
                f"{self.schema.name} expects {self.schema.arity} args, got {len(self.args)}"
            )
        object.__setattr__(self, "name", self.schema.name)

    @property
    def sort_key(self) -> tuple[str, tuple[str, ...]]:
        return (self.name, self.args)

    @property
    def is_ground(self) -> bool:
        return not any(a.startswith("?") for a in self.args)

    def substitute(self, mapping: Mapping[str, str]) -> "Atom":
        return Atom(self.schema, tuple(mapping.get(a, a) for a in self.args))

    def __str__(self) -> str:
        return f"{self.schema.name}({', '.join(self.args)})"


# Backwards-friendly alias: a ground Atom is what world states store.
GroundAtom = Atom


# --- instances ---------------------------------------------------------------


@dataclass(frozen=True)
class ObjectInstance:
    """A detected box: pose is the center of the bounding-box base."""

    id: str
    pose: Vec3
    dims: Vec3  # (width, length, height)
    type: TypeTag

    def __post_init__(self):
        if any(d <= 0 for d in self.dims):
            raise InvalidScene(f"object {self.id!r} has non-positive dims {self.dims}")
        if not self.type.is_a(OBJECT):
            raise InvalidScene(f"object {self.id!r} typed {self.type.name}, not an OBJECT")

    @property
    def top(self) -> float:
        return self.pose[2] + self.dims[2]

    @property
    def center(self) -> Vec3:
        return (self.pose[0], self.pose[1], self.pose[2] + self.dims[2] / 2.0)

    @property
    def top_center(self) -> Vec3:
        return (self.pose[0], self.pose[1], self.top)


@dataclass(frozen=True)
class PositionInstance:
    """A predefined marked point on the table plane."""

    id: str
    pose: tuple[float, float]

    @property
    def center(self) -> Vec3:
        return (self.pose[0], self.pose[1], 0.0)

    @property
    def top_center(self) -> Vec3:
        return self.center


Instance = Union[ObjectInstance, PositionInstance]


def instance_type(inst: Instance) -> TypeTag:
    return inst.type if isinstance(inst, ObjectInstance) else POSITION


# --- world state ---------------------------------------------------------------


@dataclass(frozen=True)
class WorldState:
    """Closed-world set of ground atoms over a fixed instance set."""

    atoms: frozenset[Atom]
    instances: Mapping[str, Instance]

    def __post_init__(self):
        for atom in self.atoms:
            for arg, want in zip(atom.args, atom.schema.params):
                inst = self.instances.get(arg)
                if inst is None:
                    raise UnknownInstance(f"atom {atom} references unknown instance {arg!r}")
                if not instance_type(inst).is_a(want):
                    raise UnknownInstance(
                        f"atom {atom}: {arg!r} is {instance_type(inst).name}, schema wants {want.name}"
                    )

    def holds(self, atom: Atom) -> bool:
        return atom in self.atoms

    def diff(self, after: "WorldState") -> tuple[frozenset[Atom], frozenset[Atom]]:
        """Return (added, removed) going from this state to ``after``."""
        return after.atoms - self.atoms, self.atoms - after.atoms

    def sorted_atoms(self) -> list[Atom]:
        return sorted(self.atoms, key=lambda a: a.sort_key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WorldState):
            return NotImplemented
        return self.atoms == other.atoms and dict(self.instances) == dict(other.instances)

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in self.sorted_atoms()) + "}"


def apply_effects(
    state: WorldState,
    eff_plus: Iterable[Atom],
    eff_minus: Iterable[Atom],
) -> WorldState:
    """Set-semantics state update: (atoms - eff_minus) | eff_plus.

    Deleting an absent atom is a no-op; instances are unchanged.
    """
    plus = frozenset(eff_plus)
    minus = frozenset(eff_minus)
    overlap = plus & minus
    if overlap:
        raise ValueError(f"effect sets overlap: {sorted(str(a) for a in overlap)}")
    for atom in plus | minus:
        for arg in atom.args:
            if arg not in state.instances:
                raise UnknownInstance(f"effect {atom} references unknown instance {arg!r}")
    return WorldState((state.atoms - minus) | plus, state.instances)


def clear_coupling_violations(state: WorldState) -> list[str]:
    """Elements where clear(e) disagrees with the absence of on(., e)."""
    covered = {a.args[1] for a in state.atoms if a.schema.name == ON.name}
    problems = []
    for atom in state.atoms:
        if atom.schema.name == CLEAR.name and atom.args[0] in covered:
            problems.append(f"clear({atom.args[0]}) held while something is on it")
    return problems


# --- scene (simulator substrate) ---------------------------------------------


class Arm(str, enum.Enum):
    LEFT_CLAW = "LEFT_CLAW"
    RIGHT_SUCTION = "RIGHT_SUCTION"


def _boxes_overlap(a: ObjectInstance, b: ObjectInstance) -> bool:
    # positive-volume intersection on all three axes
    for i in range(3):
        if i < 2:
            lo_a, hi_a = a.pose[i] - a.dims[i] / 2, a.pose[i] + a.dims[i] / 2
            lo_b, hi_b = b.pose[i] - b.dims[i] / 2, b.pose[i] + b.dims[i] / 2
        else:
            lo_a, hi_a = a.pose[2], a.pose[2] + a.dims[2]
            lo_b, hi_b = b.pose[2], b.pose[2] + b.dims[2]
        if hi_a <= lo_b + 1e-12 or hi_b <= lo_a + 1e-12:
            return False
    return True


@dataclass(frozen=True)
class Scene:
    """Ground-truth simulator state: boxes, table positions, held objects."""

    objects: tuple[ObjectInstance, ...]
    positions: tuple[PositionInstance, ...]
    attachments: Mapping[str, Optional[str]] = field(default_factory=dict)

    def __post_init__(self):
        ids = [o.id for o in self.objects] + [p.id for p in self.positions]
        if len(ids) != len(set(ids)):
            raise InvalidScene("duplicate instance ids")
        held = [oid for oid in self.attachments.values() if oid]
        if len(held) != len(set(held)):
            raise InvalidScene("object held by more than one arm")
        by_id = {o.id: o for o in self.objects}
        for arm, oid in self.attachments.items():
            if arm not in Arm.__members__:
                raise InvalidScene(f"unknown arm {arm!r}")
            if oid is not None and oid not in by_id:
                raise InvalidScene(f"attachment references unknown object {oid!r}")
        unheld = [o for o in self.objects if o.id not in held]
        for i, a in enumerate(unheld):
            for b in unheld[i + 1 :]:
                if _boxes_overlap(a, b):
                    raise InvalidScene(f"objects {a.id!r} and {b.id!r} overlap")

    # -- lookups ------------------------------------------------------------

    @property
    def instances(self) -> dict[str, Instance]:
        out: dict[str, Instance] = {o.id: o for o in self.objects}
        out.update({p.id: p for p in self.positions})
        return out

    def object(self, oid: str) -> ObjectInstance:
        for o in self.objects:
            if o.id == oid:
                return o
        raise UnknownInstance(f"no object {oid!r}")

    def held_ids(self) -> set[str]:
        return {oid for oid in self.attachments.values() if oid}

    def holder_of(self, oid: str) -> Optional[str]:
        for arm, held in self.attachments.items():
            if held == oid:
                return arm
        return None

    # -- geometry queries -----------------------------------------------------

    def rests_on(self, upper: ObjectInstance, lower: ObjectInstance, d: float, eps: float) -> bool:
        """True iff upper's base sits on lower's top face within tolerances."""
        if upper.id == lower.id:
            return False
        return (
            abs(upper.pose[2] - lower.top) <= eps
            and horizontal_dist(upper.pose, lower.pose) <= d
        )

    def supported_stack(self, base_id: str, d: float, eps: float) -> list[str]:
        """Ids resting (transitively) on ``base_id``, bottom-up order."""
        held = self.held_ids()
        out: list[str] = []
        frontier = [self.object(base_id)]
        while frontier:
            lower = frontier.pop(0)
            for o in sorted(self.objects, key=lambda o: o.id):
                if o.id in held or o.id in out or o.id == base_id:
                    continue
                if self.rests_on(o, lower, d, eps):
                    out.append(o.id)
                    frontier.append(o)
        return out

    def validate_support(self, d: float, eps: float) -> None:
        """Every unheld object must rest on the table or on another object."""
        held = self.held_ids()
        for o in self.objects:
            if o.id in held:
                continue
            if abs(o.pose[2]) <= eps:
                continue
            if any(
                self.rests_on(o, other, d, eps)
                for other in self.objects
                if other.id != o.id and other.id not in held
            ):
                continue
            raise InvalidScene(f"object {o.id!r} floats at z={o.pose[2]:.3f}")

    # -- mutation helpers (return new scenes) ---------------------------------

    def with_objects(self, objects: Iterable[ObjectInstance]) -> "Scene":
        return Scene(tuple(objects), self.positions, dict(self.attachments))

    def with_attachment(self, arm: str, oid: Optional[str]) -> "Scene":
        att = dict(self.attachments)
        att[arm] = oid
        return Scene(self.objects, self.positions, att)

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "objects": [
                {"id": o.id, "pose": list(o.pose), "dims": list(o.dims), "type": o.type.name}
                for o in sorted(self.objects, key=lambda o: o.id)
            ],
            "positions": [
                {"id": p.id, "pose": list(p.pose)}
                for p in sorted(self.positions, key=lambda p: p.id)
            ],
            "attachments": {k: v for k, v in sorted(self.attachments.items()) if v},
        }

    @staticmethod
    def from_dict(data: dict, hierarchy: Optional[TypeHierarchy] = None) -> "Scene":
        hier = hierarchy or default_hierarchy()
        objects = tuple(
            ObjectInstance(
                id=o["id"],
                pose=tuple(o["pose"]),
                dims=tuple(o["dims"]),
                type=hier.get(o["type"]),
            )
            for o in data.get("objects", ())
        )
        positions = tuple(
            PositionInstance(id=p["id"], pose=tuple(p["pose"]))
            for p in data.get("positions", ())
        )
        return Scene(objects, positions, dict(data.get("attachments", {})))

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @staticmethod
    def from_json(text: str, hierarchy: Optional[TypeHierarchy] = None) -> "Scene":
        return Scene.from_dict(json.loads(text), hierarchy)


# --- type classification ---------------------------------------------------------


@dataclass(frozen=True)
class Prototype:
    dims: Vec3
    tolerance: Vec3


PrototypeTable = Mapping[TypeTag, Prototype]

DEFAULT_PROTOTYPES: dict[TypeTag, Prototype] = {
    CUBE: Prototype((0.05, 0.05, 0.05), (0.015, 0.015, 0.015)),
    BASE: Prototype((0.18, 0.12, 0.03), (0.015, 0.015, 0.015)),
    ROOF: Prototype((0.10, 0.05, 0.06), (0.015, 0.015, 0.015)),
}


def classify_type(dims: Vec3, prototypes: Optional[PrototypeTable] = None) -> TypeTag:
    """Match a bounding box against the per-type prototype table."""
    table = prototypes if prototypes is not None else DEFAULT_PROTOTYPES
    matches = [
        tag
        for tag, proto in table.items()
        if all(abs(d - p) <= t for d, p, t in zip(dims, proto.dims, proto.tolerance))
    ]
    if not matches:
        raise UnknownType(f"no prototype matches dims {dims}")
    if len(matches) > 1:
        names = sorted(t.name for t in matches)
        raise AmbiguousType(f"dims {dims} match {names}; tolerances overlap")
    return matches[0]


# --- stackability rules ---------------------------------------------------------


@dataclass(frozen=True)
class StackabilityRules:
    """Type-pair table: (what, onto) pairs matched subtype-aware."""

    pairs: tuple[tuple[TypeTag, TypeTag], ...]

    def allows(self, obj_type: TypeTag, elem_type: TypeTag) -> bool:
        return any(obj_type.is_a(o) and elem_type.is_a(e) for o, e in self.pairs)


DEFAULT_STACKABILITY = StackabilityRules(
    (
        (OBJECT, POSITION),
        (CUBE, BASE),
        (CUBE, CUBE),
        (ROOF, CUBE),
    )
)


# --- perception -------------------------------------------------------------------


class PerceptionMode(str, enum.Enum):
    FULL = "FULL"
    STACK_BLIND = "STACK_BLIND"


def perceive(
    scene: Scene,
    d: float = 0.05,
    rules: Optional[StackabilityRules] = None,
    mode: PerceptionMode = PerceptionMode.FULL,
    stack_tolerance: float = 0.01,
) -> WorldState:
    """Extract the closed-world symbolic state from scene geometry.

    d is the horizontal threshold for both object-on-position and
    object-on-object detection; stack_tolerance is the vertical tolerance for
    resting contact and table height.  In STACK_BLIND mode any object with
    another object on top of it is invisible: it contributes no instance and
    no atoms, so stacks read as their top object floating over a clear
    position (the perception gap the mental model works around).
    """
    rules = rules if rules is not None else DEFAULT_STACKABILITY
    eps = stack_tolerance
    held = scene.held_ids()

    covered: set[str] = set()
    for lower in scene.objects:
        for upper in scene.objects:
            if upper.id in held or lower.id in held:
                continue
            if scene.rests_on(upper, lower, d, eps):
                covered.add(lower.id)

    visible_objects = [
        o
        for o in sorted(scene.objects, key=lambda o: o.id)
        if not (mode is PerceptionMode.STACK_BLIND and o.id in covered)
    ]
    positions = sorted(scene.positions, key=lambda p: p.id)
    instances: dict[str, Instance] = {o.id: o for o in visible_objects}
    instances.update({p.id: p for p in positions})

    atoms: set[Atom] = set()
    on_targets: set[str] = set()

    for o in visible_objects:
        if o.id in held:
            continue
        if abs(o.pose[2]) <= eps:
            # resting at table height: attach to the nearest position within d
            eligible = [
                (horizontal_dist(o.pose, p.pose), p.id, p)
                for p in positions
                if horizontal_dist(o.pose, p.pose) <= d
            ]
            if eligible:
                best = min(eligible)[2]
                atoms.add(Atom(ON, (o.id, best.id)))
                on_targets.add(best.id)
        else:
            supports = [
                s
                for s in visible_objects
                if s.id != o.id and s.id not in held and scene.rests_on(o, s, d, eps)
            ]
            if supports:
                supports.sort(key=lambda s: (horizontal_dist(o.pose, s.pose), s.id))
                atoms.add(Atom(ON, (o.id, supports[0].id)))
                on_targets.add(supports[0].id)

    for o in visible_objects:
        if o.id not in held and o.id not in on_targets:
            atoms.add(Atom(CLEAR, (o.id,)))
    for p in positions:
        if p.id not in on_targets:
            atoms.add(Atom(CLEAR, (p.id,)))

    for o in visible_objects:
        if o.type.is_a(BASE) or o.type.is_a(CUBE):
            atoms.add(Atom(FLAT, (o.id,)))
        if o.type.is_a(CUBE) or o.type.is_a(ROOF):
            atoms.add(Atom(THIN, (o.id,)))

    elements: list[Instance] = list(visible_objects) + list(positions)
    for o in visible_objects:
        for e in elements:
            if e.id == o.id:
                continue
            if rules.allows(o.type, instance_type(e)):
                atoms.add(Atom(STACKABLE, (o.id, e.id)))

    return WorldState(frozenset(atoms), instances)
