"""High-level action model: condition inference, lifting, and user edits.

A single before/after observation pair determines a ground action (changed
atoms become effects; the deleted atoms plus the negations of the added atoms
become preconditions).  Lifting replaces instance ids with typed variables so
the action can be reused on other instances; everything the observation does
not pin down (static properties, wider types) is supplied by explicit user
edits, never guessed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from .demo import LowLevelAction
from .errors import (
    DanglingVariable,
    DuplicateName,
    EffectConflict,
    InstanceMismatch,
    TypeViolation,
    UntypedInstance,
)
from .world import (
    OBJECT,
    POSITION,
    Atom,
    BUILTIN_SCHEMAS,
    PredicateSchema,
    TypeHierarchy,
    TypeTag,
    WorldState,
    default_hierarchy,
    instance_type,
)


class Polarity(str, enum.Enum):
    POS = "POS"
    NEG = "NEG"


@dataclass(frozen=True)
class Literal:
    atom: Atom
    polarity: Polarity = Polarity.POS

    @property
    def positive(self) -> bool:
        return self.polarity is Polarity.POS

    @property
    def sort_key(self) -> tuple:
        # canonical order: by atom, positives before negatives on ties
        return (*self.atom.sort_key, self.polarity is Polarity.NEG)

    def negate(self) -> "Literal":
        return Literal(self.atom, Polarity.NEG if self.positive else Polarity.POS)

    def substitute(self, mapping: Mapping[str, str]) -> "Literal":
        return Literal(self.atom.substitute(mapping), self.polarity)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"not {self.atom}"


@dataclass(frozen=True)
class Parameter:
    name: str  # '?obj', '?A', ...
    type: TypeTag

    def __str__(self) -> str:
        return f"{self.name} - {self.type.name.lower()}"


@dataclass(frozen=True)
class HighLevelAction:
    """Typed STRIPS operator, optionally linked to a taught motion."""

    name: str
    params: tuple[Parameter, ...]
    pre: frozenset[Literal]
    eff_plus: frozenset[Atom]
    eff_minus: frozenset[Atom]
    low_level: Optional[LowLevelAction] = field(default=None, compare=False)
    demo_binding: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        overlap = self.eff_plus & self.eff_minus
        if overlap:
            raise EffectConflict(
                f"{self.name}: atoms in both add and delete: "
                f"{sorted(str(a) for a in overlap)}"
            )
        declared = {p.name for p in self.params}
        if len(declared) != len(self.params):
            raise DuplicateName(f"{self.name}: duplicate parameter names")
        used = self.variables_used()
        if used - declared:
            raise DanglingVariable(
                f"{self.name}: undeclared variables {sorted(used - declared)}"
            )
        if declared - used:
            raise DanglingVariable(
                f"{self.name}: unused parameters {sorted(declared - used)}"
            )

    def variables_used(self) -> set[str]:
        out: set[str] = set()
        for lit in self.pre:
            out.update(a for a in lit.atom.args if a.startswith("?"))
        for atom in self.eff_plus | self.eff_minus:
            out.update(a for a in atom.args if a.startswith("?"))
        return out

    def param(self, name: str) -> Parameter:
        for p in self.params:
            if p.name == name:
                return p
        raise DanglingVariable(f"{self.name}: no parameter {name!r}")

    def type_env(self) -> dict[str, TypeTag]:
        return {p.name: p.type for p in self.params}

    def check_types(self, hierarchy: TypeHierarchy) -> None:
        """Each variable's type must descend from its schema slot everywhere."""
        env = self.type_env()
        for lit in self.pre:
            _check_atom_types(lit.atom, env, hierarchy, self.name)
        for atom in self.eff_plus | self.eff_minus:
            _check_atom_types(atom, env, hierarchy, self.name)

    def ground(self, substitution: Mapping[str, str]) -> tuple[
        frozenset[Literal], frozenset[Atom], frozenset[Atom]
    ]:
        """Apply a variable -> instance substitution to all conditions."""
        pre = frozenset(l.substitute(substitution) for l in self.pre)
        plus = frozenset(a.substitute(substitution) for a in self.eff_plus)
        minus = frozenset(a.substitute(substitution) for a in self.eff_minus)
        return pre, plus, minus

    def signature(self) -> str:
        return f"{self.name}({', '.join(p.name for p in self.params)})"

    def sorted_pre(self) -> list[Literal]:
        return sorted(self.pre, key=lambda l: l.sort_key)

    def sorted_effects(self) -> list[Literal]:
        lits = [Literal(a) for a in self.eff_plus]
        lits += [Literal(a, Polarity.NEG) for a in self.eff_minus]
        return sorted(lits, key=lambda l: l.sort_key)


def _check_atom_types(atom: Atom, env: Mapping[str, TypeTag], hierarchy: TypeHierarchy, owner: str):
    for arg, want in zip(atom.args, atom.schema.params):
        if not arg.startswith("?"):
            continue
        have = env.get(arg)
        if have is None:
            raise DanglingVariable(f"{owner}: variable {arg} not declared")
        if not hierarchy.is_subtype(have, want):
            raise TypeViolation(
                f"{owner}: {arg} is {have.name}, but {atom.schema.name} wants {want.name}"
            )


# --- the domain (action registry) ------------------------------------------------


@dataclass
class Domain:
    """Type hierarchy, predicate vocabulary, and named actions."""

    name: str = "tabletop"
    hierarchy: TypeHierarchy = field(default_factory=default_hierarchy)
    schemas: dict[str, PredicateSchema] = field(default_factory=lambda: dict(BUILTIN_SCHEMAS))
    actions: dict[str, HighLevelAction] = field(default_factory=dict)

    def add_action(self, action: HighLevelAction) -> HighLevelAction:
        if action.name in self.actions:
            raise DuplicateName(f"action {action.name!r} already defined")
        action.check_types(self.hierarchy)
        self.actions[action.name] = action
        return action

    def replace_action(self, old_name: str, action: HighLevelAction) -> HighLevelAction:
        if old_name not in self.actions:
            raise DanglingVariable(f"no action {old_name!r}")
        if action.name != old_name and action.name in self.actions:
            raise DuplicateName(f"action {action.name!r} already defined")
        action.check_types(self.hierarchy)
        del self.actions[old_name]
        self.actions[action.name] = action
        return action

    def sorted_actions(self) -> list[HighLevelAction]:
        return sorted(self.actions.values(), key=lambda a: a.name)


# --- inference from observations ---------------------------------------------------


def infer_ground_conditions(
    o1: WorldState, o2: WorldState
) -> tuple[frozenset[Literal], frozenset[Atom], frozenset[Atom]]:
    """Deduce ground conditions from the atoms that changed between O1 and O2.

    eff- is what stopped holding, eff+ is what started holding; preconditions
    are the deleted atoms (positively) plus the added atoms (negatively).
    Unchanged atoms are discarded.
    """
    if set(o1.instances.keys()) != set(o2.instances.keys()):
        raise InstanceMismatch(
            f"observations cover different instances: "
            f"{sorted(set(o1.instances) ^ set(o2.instances))}"
        )
    eff_minus = o1.atoms - o2.atoms
    eff_plus = o2.atoms - o1.atoms
    pre = frozenset(
        {Literal(a, Polarity.POS) for a in eff_minus}
        | {Literal(a, Polarity.NEG) for a in eff_plus}
    )
    return pre, frozenset(eff_plus), frozenset(eff_minus)


def _variable_namer():
    """Object instances become ?obj, ?obj2, ...; positions ?A, ?B, ..."""
    obj_count = 0
    pos_count = 0

    def next_name(tag: TypeTag) -> str:
        nonlocal obj_count, pos_count
        if tag.is_a(POSITION):
            letter = chr(ord("A") + pos_count % 26)
            suffix = "" if pos_count < 26 else str(pos_count // 26 + 1)
            pos_count += 1
            return f"?{letter}{suffix}"
        obj_count += 1
        return "?obj" if obj_count == 1 else f"?obj{obj_count}"

    return next_name


def lift_action(
    name: str,
    ground: tuple[frozenset[Literal], frozenset[Atom], frozenset[Atom]],
    instances: Mapping[str, object],
    low_level: Optional[LowLevelAction] = None,
) -> HighLevelAction:
    """Replace instance ids with typed variables; the observed leaf type is
    kept, widening to an ancestor is an explicit user edit."""
    pre, eff_plus, eff_minus = ground

    mentioned: list[str] = []
    atoms = sorted(
        {l.atom for l in pre} | set(eff_plus) | set(eff_minus), key=lambda a: a.sort_key
    )
    for atom in atoms:
        for arg in atom.args:
            if arg not in mentioned:
                mentioned.append(arg)

    types: dict[str, TypeTag] = {}
    for iid in mentioned:
        inst = instances.get(iid)
        if inst is None:
            raise UntypedInstance(f"instance {iid!r} has no known type")
        types[iid] = instance_type(inst)

    namer = _variable_namer()
    subst: dict[str, str] = {}
    for iid in mentioned:
        if types[iid].is_a(OBJECT):
            subst[iid] = namer(types[iid])
    for iid in mentioned:
        if iid not in subst:
            subst[iid] = namer(types[iid])

    object_params = [
        Parameter(subst[iid], types[iid]) for iid in mentioned if types[iid].is_a(OBJECT)
    ]
    position_params = [
        Parameter(subst[iid], types[iid]) for iid in mentioned if not types[iid].is_a(OBJECT)
    ]
    params = tuple(object_params + position_params)

    return HighLevelAction(
        name=name,
        params=params,
        pre=frozenset(l.substitute(subst) for l in pre),
        eff_plus=frozenset(a.substitute(subst) for a in eff_plus),
        eff_minus=frozenset(a.substitute(subst) for a in eff_minus),
        low_level=low_level,
        demo_binding={var: iid for iid, var in subst.items()},
    )


# --- user edits ----------------------------------------------------------------------


@dataclass(frozen=True)
class SetParamType:
    param: str
    new_type: TypeTag


@dataclass(frozen=True)
class AddPre:
    literal: Literal


@dataclass(frozen=True)
class RemovePre:
    literal: Literal


@dataclass(frozen=True)
class AddEffPlus:
    atom: Atom


@dataclass(frozen=True)
class AddEffMinus:
    atom: Atom


@dataclass(frozen=True)
class RemoveEff:
    atom: Atom


@dataclass(frozen=True)
class Rename:
    new_name: str


Edit = object  # union of the dataclasses above


def edit_action(
    action: HighLevelAction,
    edit: Edit,
    hierarchy: Optional[TypeHierarchy] = None,
) -> HighLevelAction:
    """Return a new action with one edit applied; the original is untouched."""
    hier = hierarchy or default_hierarchy()

    if isinstance(edit, SetParamType):
        target = action.param(edit.param)
        params = tuple(
            Parameter(p.name, edit.new_type) if p.name == edit.param else p
            for p in action.params
        )
        out = replace(action, params=params)
        out.check_types(hier)  # raises TypeViolation on an illegal widening
        return out

    if isinstance(edit, AddPre):
        _require_known_vars(action, edit.literal.atom)
        out = replace(action, pre=action.pre | {edit.literal})
        out.check_types(hier)
        return out

    if isinstance(edit, RemovePre):
        if edit.literal not in action.pre:
            raise DanglingVariable(f"{action.name}: precondition {edit.literal} not present")
        return _rebuild(action, pre=action.pre - {edit.literal})

    if isinstance(edit, AddEffPlus):
        _require_known_vars(action, edit.atom)
        if edit.atom in action.eff_minus:
            raise EffectConflict(f"{action.name}: {edit.atom} already a delete effect")
        out = replace(action, eff_plus=action.eff_plus | {edit.atom})
        out.check_types(hier)
        return out

    if isinstance(edit, AddEffMinus):
        _require_known_vars(action, edit.atom)
        if edit.atom in action.eff_plus:
            raise EffectConflict(f"{action.name}: {edit.atom} already an add effect")
        out = replace(action, eff_minus=action.eff_minus | {edit.atom})
        out.check_types(hier)
        return out

    if isinstance(edit, RemoveEff):
        if edit.atom in action.eff_plus:
            return _rebuild(action, eff_plus=action.eff_plus - {edit.atom})
        if edit.atom in action.eff_minus:
            return _rebuild(action, eff_minus=action.eff_minus - {edit.atom})
        raise DanglingVariable(f"{action.name}: effect {edit.atom} not present")

    if isinstance(edit, Rename):
        return replace(action, name=edit.new_name)

    raise TypeError(f"unknown edit {edit!r}")


def _require_known_vars(action: HighLevelAction, atom: Atom) -> None:
    declared = {p.name for p in action.params}
    unknown = [a for a in atom.args if a.startswith("?") and a not in declared]
    if unknown:
        raise DanglingVariable(f"{action.name}: unknown variables {unknown} in {atom}")


def _rebuild(
    action: HighLevelAction,
    pre: Optional[frozenset[Literal]] = None,
    eff_plus: Optional[frozenset[Atom]] = None,
    eff_minus: Optional[frozenset[Atom]] = None,
) -> HighLevelAction:
    """Rebuild after a removal, dropping parameters no literal uses anymore."""
    pre = action.pre if pre is None else pre
    eff_plus = action.eff_plus if eff_plus is None else eff_plus
    eff_minus = action.eff_minus if eff_minus is None else eff_minus
    used: set[str] = set()
    for lit in pre:
        used.update(a for a in lit.atom.args if a.startswith("?"))
    for atom in eff_plus | eff_minus:
        used.update(a for a in atom.args if a.startswith("?"))
    params = tuple(p for p in action.params if p.name in used)
    binding = {k: v for k, v in action.demo_binding.items() if k in used}
    return replace(
        action,
        params=params,
        pre=pre,
        eff_plus=eff_plus,
        eff_minus=eff_minus,
        demo_binding=binding,
    )


def copy_action(action: HighLevelAction, new_name: str, domain: Optional[Domain] = None) -> HighLevelAction:
    """Duplicate under a new name, sharing the same low-level motion."""
    if domain is not None and new_name in domain.actions:
        raise DuplicateName(f"action {new_name!r} already defined")
    return replace(action, name=new_name)


# --- small factories --------------------------------------------------------------


def make_atom(pred: str, *args: str, schemas: Optional[Mapping[str, PredicateSchema]] = None) -> Atom:
    table = schemas or BUILTIN_SCHEMAS
    return Atom(table[pred], tuple(args))


def make_literal(
    pred: str,
    *args: str,
    positive: bool = True,
    schemas: Optional[Mapping[str, PredicateSchema]] = None,
) -> Literal:
    return Literal(make_atom(pred, *args, schemas=schemas),
                   Polarity.POS if positive else Polarity.NEG)


# --- English rendering ------------------------------------------------------------

_TEMPLATES = {
    "clear": ("{0} is clear", "{0} is not clear"),
    "on": ("{0} is on {1}", "{0} is not on {1}"),
    "stackable": ("{0} is stackable on {1}", "{0} is not stackable on {1}"),
    "flat": ("{0} is flat", "{0} is not flat"),
    "thin": ("{0} is thin", "{0} is not thin"),
}


def render_atom_english(atom: Atom, negated: bool = False) -> str:
    args = [a.lstrip("?") for a in atom.args]
    template = _TEMPLATES.get(atom.schema.name)
    if template is None:
        rendered = f"{atom.schema.name}({', '.join(args)})"
        return f"not {rendered}" if negated else rendered
    return template[1 if negated else 0].format(*args)


def render_literal_english(literal: Literal) -> str:
    return render_atom_english(literal.atom, negated=not literal.positive)
