"""Canonical PDDL text generation and parsing (typed STRIPS dialect).

The printer is deterministic: lowercase keywords, two-space indents, literal
sets in sorted order, types grouped by parent.  The parser accepts the same
grammar plus harmless variation (case-insensitive keywords, ``;`` comments,
an ``(and ...)`` wrapper around ``:init``) and re-emits the canonical form, so
``emit . parse . emit`` is a fixed point.  Identifiers for objects and
variables are case-sensitive and preserved; type names are canonicalized to
the registry's uppercase form and printed lowercase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .actions import Domain, HighLevelAction, Literal, Parameter, Polarity
from .errors import (
    ArityMismatch,
    DomainMismatch,
    PddlSyntaxError,
    TypeViolation,
    UndeclaredObject,
    UndeclaredPredicate,
    UnknownRequirement,
    UnknownType,
)
from .world import Atom, PredicateSchema, TypeHierarchy, TypeTag

REQUIREMENTS = (":strips", ":typing", ":negative-preconditions")


@dataclass(frozen=True)
class PddlProblem:
    """Objects, initial atoms, and goal literals for one planning problem."""

    name: str
    domain_name: str
    objects: dict[str, TypeTag]
    init: frozenset[Atom]
    goal: frozenset[Literal]

    def sorted_init(self) -> list[Atom]:
        return sorted(self.init, key=lambda a: a.sort_key)

    def sorted_goal(self) -> list[Literal]:
        return sorted(self.goal, key=lambda l: l.sort_key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PddlProblem):
            return NotImplemented
        return (
            self.name == other.name
            and self.domain_name == other.domain_name
            and self.objects == other.objects
            and self.init == other.init
            and self.goal == other.goal
        )


# --- emission ----------------------------------------------------------------


def _fmt_atom(atom: Atom) -> str:
    return "(" + " ".join([atom.schema.name, *atom.args]) + ")"


def _fmt_literal(lit: Literal) -> str:
    inner = _fmt_atom(lit.atom)
    return inner if lit.positive else f"(not {inner})"


def _type_clause_lines(hierarchy: TypeHierarchy) -> list[str]:
    groups: dict[str, list[str]] = {}
    depth: dict[str, int] = {}
    for tag in hierarchy.tags():
        depth[tag.name] = sum(1 for _ in tag.ancestry()) - 1
        if tag.parent is not None:
            groups.setdefault(tag.parent.name, []).append(tag.name)
    ordered = sorted(groups.items(), key=lambda kv: (-depth[kv[0]], kv[0]))
    return [
        " ".join(t.lower() for t in children) + " - " + parent.lower()
        for parent, children in ordered
    ]


def _schema_param_names(schema: PredicateSchema) -> list[str]:
    seen: dict[str, int] = {}
    out = []
    for tag in schema.params:
        initial = tag.name[0].lower()
        seen[initial] = seen.get(initial, 0) + 1
        out.append(f"?{initial}" if seen[initial] == 1 else f"?{initial}{seen[initial]}")
    return out

def _fmt_action(action: HighLevelAction) -> list[str]:
    lines = [f"  (:action {action.name}"]
    params = " ".join(f"{p.name} - {p.type.name.lower()}" for p in action.params)
    lines.append(f"    :parameters ({params})")
    if action.pre:
        pre = " ".join(_fmt_literal(l) for l in action.sorted_pre())
        lines.append(f"    :precondition (and {pre})")
    effects = action.sorted_effects()
    if effects:
        eff = " ".join(_fmt_literal(l) for l in effects)
        lines.append(f"    :effect (and {eff})")
    lines[-1] += ")"
    return lines


def emit_domain(domain: Domain) -> str:
    """Serialize a domain to canonical PDDL text."""
    lines = [f"(define (domain {domain.name})"]
    lines.append(f"  (:requirements {' '.join(REQUIREMENTS)})")
    type_lines = _type_clause_lines(domain.hierarchy)
    if type_lines:
        lines.append("  (:types")
        for tl in type_lines[:-1]:
            lines.append(f"    {tl}")
        lines.append(f"    {type_lines[-1]})")
    schemas = sorted(domain.schemas.values(), key=lambda s: s.name)
    if schemas:
        lines.append("  (:predicates")
        for i, schema in enumerate(schemas):
            names = _schema_param_names(schema)
            inner = " ".join(
                f"{v} - {t.name.lower()}" for v, t in zip(names, schema.params)
            )
            inner = f"({schema.name} {inner})" if inner else f"({schema.name})"
            closer = ")" if i == len(schemas) - 1 else ""
            lines.append(f"    {inner}{closer}")
    for action in domain.sorted_actions():
        lines.extend(_fmt_action(action))
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def emit_problem(problem: PddlProblem) -> str:
    """Serialize a problem to canonical PDDL text."""
    lines = [f"(define (problem {problem.name})"]
    lines.append(f"  (:domain {problem.domain_name})")
    if problem.objects:
        by_type: dict[str, list[str]] = {}
        for oid, tag in problem.objects.items():
            by_type.setdefault(tag.name.lower(), []).append(oid)
        lines.append("  (:objects")
        entries = sorted(by_type.items())
        for i, (tname, ids) in enumerate(entries):
            closer = ")" if i == len(entries) - 1 else ""
            lines.append(f"    {' '.join(sorted(ids))} - {tname}{closer}")
    if problem.init:
        atoms = " ".join(_fmt_atom(a) for a in problem.sorted_init())
        lines.append(f"  (:init {atoms})")
    goal = " ".join(_fmt_literal(l) for l in problem.sorted_goal())
    lines.append(f"  (:goal (and {goal})))" if goal else "  (:goal (and)))")
    return "\n".join(lines) + "\n"


# --- parsing -----------------------------------------------------------------


@dataclass(frozen=True)
class _Sym:
    text: str
    line: int
    col: int

    def lower(self) -> str:
        return self.text.lower()


_Node = Union[_Sym, list]


def _tokenize(text: str):
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield _Sym(ch, line, col)
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < len(text) and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            yield _Sym(text[start:i], line, start_col)


def _read_tree(text: str) -> list:
    stack: list[list] = []
    root: Optional[list] = None
    for tok in _tokenize(text):
        if tok.text == "(":
            node: list = []
            if stack:
                stack[-1].append(node)
            elif root is None:
                root = node
            else:
                raise PddlSyntaxError(f"{tok.line}:{tok.col}: multiple top-level forms")
            stack.append(node)
        elif tok.text == ")":
            if not stack:
                raise PddlSyntaxError(f"{tok.line}:{tok.col}: unbalanced ')'")
            stack.pop()
        else:
            if not stack:
                raise PddlSyntaxError(f"{tok.line}:{tok.col}: token outside any form")
            stack[-1].append(tok)
    if stack:
        raise PddlSyntaxError("unexpected end of input: unbalanced '('")
    if root is None:
        raise PddlSyntaxError("empty document")
    return root


def _sym(node: _Node, context: str) -> _Sym:
    if not isinstance(node, _Sym):
        raise PddlSyntaxError(f"expected a symbol in {context}")
    return node


def _where(node: _Node) -> str:
    if isinstance(node, _Sym):
        return f"{node.line}:{node.col}"
    for child in node:
        return _where(child)
    return "?"


def _parse_typed_list(nodes: Sequence[_Node], context: str) -> list[tuple[str, str]]:
    """Parse `a b - t c - u` into [(a, t), (b, t), (c, u)] preserving order."""
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(nodes):
        tok = _sym(nodes[i], context)
        if tok.text == "-":
            if not pending:
                raise PddlSyntaxError(f"{tok.line}:{tok.col}: dangling '-' in {context}")
            if i + 1 >= len(nodes):
                raise PddlSyntaxError(f"{tok.line}:{tok.col}: missing type after '-'")
            type_name = _sym(nodes[i + 1], context).text
            out.extend((name, type_name) for name in pending)
            pending = []
            i += 2
        else:
            pending.append(tok.text)
            i += 1
    if pending:
        raise PddlSyntaxError(f"untyped entries {pending} in {context}")
    return out


def _build_hierarchy(pairs: list[tuple[str, str]]) -> TypeHierarchy:
    """Register tags preserving textual child order (keeps emit a fixed point)."""
    parent_of = {child.upper(): parent.upper() for child, parent in pairs}
    child_order: list[str] = []
    for child, _ in pairs:
        cu = child.upper()
        if cu not in child_order:
            child_order.append(cu)
    roots: list[str] = []
    for _, parent in pairs:
        pu = parent.upper()
        if pu not in parent_of and pu not in roots:
            roots.append(pu)

    hierarchy = TypeHierarchy([])
    tags: dict[str, TypeTag] = {}
    for root in roots:
        tags[root] = hierarchy.register(TypeTag(root))
    remaining = list(child_order)
    while remaining:
        progressed = False
        rest: list[str] = []
        for child in remaining:
            parent = parent_of[child]
            if parent in tags:
                tags[child] = hierarchy.register(TypeTag(child, tags[parent]))
                progressed = True
            else:
                rest.append(child)
        if not progressed:
            raise PddlSyntaxError(
                f"type cycle or missing parent among {sorted(t.lower() for t in rest)}"
            )
        remaining = rest
    return hierarchy


def _parse_atom(node: _Node, schemas: dict[str, PredicateSchema], context: str) -> Atom:
    if not isinstance(node, list) or not node:
        raise PddlSyntaxError(f"{_where(node)}: expected an atom in {context}")
    head = _sym(node[0], context)
    schema = schemas.get(head.lower())
    if schema is None:
        raise UndeclaredPredicate(f"{head.line}:{head.col}: unknown predicate {head.text!r}")
    args = tuple(_sym(n, context).text for n in node[1:])
    if len(args) != schema.arity:
        raise ArityMismatch(
            f"{head.line}:{head.col}: {schema.name} expects {schema.arity} args, got {len(args)}"
        )
    return Atom(schema, args)


def _parse_literal(node: _Node, schemas: dict[str, PredicateSchema], context: str) -> Literal:
    if isinstance(node, list) and node and isinstance(node[0], _Sym) and node[0].lower() == "not":
        if len(node) != 2:
            raise PddlSyntaxError(f"{_where(node)}: (not ...) takes exactly one atom")
        return Literal(_parse_atom(node[1], schemas, context), Polarity.NEG)
    return Literal(_parse_atom(node, schemas, context), Polarity.POS)


def _parse_condition_list(
    node: Optional[_Node], schemas: dict[str, PredicateSchema], context: str
) -> list[Literal]:
    if node is None:
        return []
    if isinstance(node, list) and node and isinstance(node[0], _Sym) and node[0].lower() == "and":
        return [_parse_literal(n, schemas, context) for n in node[1:]]
    return [_parse_literal(node, schemas, context)]


def parse_domain(text: str) -> Domain:
    """Parse canonical PDDL domain text; diagnostics carry line:column."""
    tree = _read_tree(text)
    if not tree or _sym(tree[0], "define").lower() != "define":
        raise PddlSyntaxError("document must start with (define ...)")
    header = tree[1]
    if (
        not isinstance(header, list)
        or len(header) != 2
        or _sym(header[0], "header").lower() != "domain"
    ):
        raise PddlSyntaxError("expected (domain <name>) after define")
    name = _sym(header[1], "domain name").text

    hierarchy: Optional[TypeHierarchy] = None
    schemas: dict[str, PredicateSchema] = {}
    schema_by_lower: dict[str, PredicateSchema] = {}
    actions: list[HighLevelAction] = []
    action_sections: list[list] = []

    for section in tree[2:]:
        if not isinstance(section, list) or not section:
            raise PddlSyntaxError(f"{_where(section)}: expected a (:section ...)")
        tag = _sym(section[0], "section").lower()
        if tag == ":requirements":
            for req in section[1:]:
                req_text = _sym(req, ":requirements").lower()
                if req_text not in REQUIREMENTS:
                    raise UnknownRequirement(
                        f"{req.line}:{req.col}: unsupported requirement {req.text}"
                    )
        elif tag == ":types":
            pairs = _parse_typed_list(section[1:], ":types")
            hierarchy = _build_hierarchy(pairs)
        elif tag == ":predicates":
            if hierarchy is None:
                hierarchy = TypeHierarchy([])
            for pred in section[1:]:
                if not isinstance(pred, list) or not pred:
                    raise PddlSyntaxError(f"{_where(pred)}: malformed predicate declaration")
                pname = _sym(pred[0], ":predicates").text
                typed = _parse_typed_list(pred[1:], f"predicate {pname}")
                try:
                    params = tuple(hierarchy.get(t) for _, t in typed)
                except UnknownType as exc:
                    raise UnknownType(f"in predicate {pname}: {exc}") from exc
                schema = PredicateSchema(pname, params)
                schemas[pname] = schema
                schema_by_lower[pname.lower()] = schema
        elif tag == ":action":
            action_sections.append(section)
        else:
            raise PddlSyntaxError(f"{_where(section)}: unknown section {tag}")

    if hierarchy is None:
        hierarchy = TypeHierarchy([])

    for section in action_sections:
        actions.append(_parse_action(section, hierarchy, schema_by_lower))

    domain = Domain(name=name, hierarchy=hierarchy, schemas=schemas, actions={})
    for action in actions:
        domain.add_action(action)
    return domain


def _parse_action(
    section: list, hierarchy: TypeHierarchy, schemas: dict[str, PredicateSchema]
) -> HighLevelAction:
    if len(section) < 2:
        raise PddlSyntaxError(f"{_where(section)}: action missing name")
    name = _sym(section[1], ":action").text
    clauses: dict[str, _Node] = {}
    i = 2
    while i < len(section):
        key = _sym(section[i], f"action {name}").lower()
        if i + 1 >= len(section):
            raise PddlSyntaxError(f"{_where(section[i])}: {key} missing its argument")
        clauses[key] = section[i + 1]
        i += 2

    params_node = clauses.get(":parameters", [])
    if not isinstance(params_node, list):
        raise PddlSyntaxError(f"action {name}: :parameters expects a list")
    typed = _parse_typed_list(params_node, f":parameters of {name}")
    for var, _ in typed:
        if not var.startswith("?"):
            raise PddlSyntaxError(f"action {name}: parameter {var!r} must start with '?'")
    params = tuple(Parameter(var, hierarchy.get(t)) for var, t in typed)

    pre = _parse_condition_list(clauses.get(":precondition"), schemas, f"{name} precondition")
    effects = _parse_condition_list(clauses.get(":effect"), schemas, f"{name} effect")
    eff_plus = frozenset(l.atom for l in effects if l.positive)
    eff_minus = frozenset(l.atom for l in effects if not l.positive)

    action = HighLevelAction(
        name=name,
        params=params,
        pre=frozenset(pre),
        eff_plus=eff_plus,
        eff_minus=eff_minus,
    )
    action.check_types(hierarchy)
    return action


def parse_problem(text: str, domain: Domain) -> PddlProblem:
    """Parse problem text against its domain (types and predicates)."""
    tree = _read_tree(text)
    if not tree or _sym(tree[0], "define").lower() != "define":
        raise PddlSyntaxError("document must start with (define ...)")
    header = tree[1]
    if (
        not isinstance(header, list)
        or len(header) != 2
        or _sym(header[0], "header").lower() != "problem"
    ):
        raise PddlSyntaxError("expected (problem <name>) after define")
    name = _sym(header[1], "problem name").text

    schema_by_lower = {s.name.lower(): s for s in domain.schemas.values()}
    domain_name: Optional[str] = None
    objects: dict[str, TypeTag] = {}
    init: set[Atom] = set()
    goal: set[Literal] = set()

    for section in tree[2:]:
        if not isinstance(section, list) or not section:
            raise PddlSyntaxError(f"{_where(section)}: expected a (:section ...)")
        tag = _sym(section[0], "section").lower()
        if tag == ":domain":
            domain_name = _sym(section[1], ":domain").text
        elif tag == ":objects":
            for oid, tname in _parse_typed_list(section[1:], ":objects"):
                objects[oid] = domain.hierarchy.get(tname)
        elif tag == ":init":
            body = section[1:]
            # tolerate the nonstandard (and ...) wrapper around init atoms
            if (
                len(body) == 1
                and isinstance(body[0], list)
                and body[0]
                and isinstance(body[0][0], _Sym)
                and body[0][0].lower() == "and"
            ):
                body = body[0][1:]
            for node in body:
                init.add(_parse_atom(node, schema_by_lower, ":init"))
        elif tag == ":goal":
            if len(section) != 2:
                raise PddlSyntaxError(f"{_where(section)}: :goal takes one condition")
            goal.update(_parse_condition_list(section[1], schema_by_lower, ":goal"))
        else:
            raise PddlSyntaxError(f"{_where(section)}: unknown section {tag}")

    if domain_name is None:
        raise PddlSyntaxError("problem missing (:domain ...) clause")
    if domain_name.lower() != domain.name.lower():
        raise DomainMismatch(f"problem targets {domain_name!r}, domain is {domain.name!r}")

    for atom in list(init) + [l.atom for l in goal]:
        for arg, want in zip(atom.args, atom.schema.params):
            tag_of = objects.get(arg)
            if tag_of is None:
                raise UndeclaredObject(f"atom {atom} references undeclared object {arg!r}")
            if not domain.hierarchy.is_subtype(tag_of, want):
                raise TypeViolation(
                    f"atom {atom}: {arg} is {tag_of.name}, schema wants {want.name}"
                )

    return PddlProblem(
        name=name,
        domain_name=domain.name,
        objects=objects,
        init=frozenset(init),
        goal=frozenset(goal),
    )
