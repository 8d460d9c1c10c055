"""Random domain/problem generator for PDDL round-trip fuzzing."""

import random
import string

from irp.actions import Domain, HighLevelAction, Literal, Parameter, Polarity
from irp.pddl import PddlProblem
from irp.world import Atom, PredicateSchema, TypeHierarchy, TypeTag


def _name(rng: random.Random, prefix: str, k: int) -> str:
    letters = "".join(rng.choice(string.ascii_lowercase) for _ in range(3))
    return f"{prefix}{letters}{k}"


def random_hierarchy(rng: random.Random) -> TypeHierarchy:
    n = rng.randrange(2, 6)
    tags = [TypeTag(_name(rng, "t", 0).upper())]
    for k in range(1, n):
        parent = rng.choice(tags)
        tags.append(TypeTag(_name(rng, "t", k).upper(), parent))
    return TypeHierarchy(tags)


def random_domain(rng: random.Random) -> Domain:
    hierarchy = random_hierarchy(rng)
    tags = list(hierarchy.tags())
    schemas = {}
    for k in range(rng.randrange(1, 5)):
        name = _name(rng, "p", k)
        arity = rng.randrange(0, 3)
        schemas[name] = PredicateSchema(
            name, tuple(rng.choice(tags) for _ in range(arity))
        )
    domain = Domain(name=_name(rng, "dom", 0), hierarchy=hierarchy, schemas=schemas)

    for k in range(rng.randrange(0, 4)):
        n_params = rng.randrange(1, 4)
        params = tuple(
            Parameter(f"?v{i}", rng.choice(tags)) for i in range(n_params)
        )

        def random_atom() -> Atom:
            # choose a schema whose slots can accept some params (subtype-ok)
            for _ in range(30):
                schema = rng.choice(list(schemas.values()))
                args = []
                ok = True
                for want in schema.params:
                    fits = [p.name for p in params if p.type.is_a(want)]
                    if not fits:
                        ok = False
                        break
                    args.append(rng.choice(fits))
                if ok:
                    return Atom(schema, tuple(args))
            zero = [s for s in schemas.values() if s.arity == 0]
            if zero:
                return Atom(rng.choice(zero), ())
            return None

        atoms = [a for a in (random_atom() for _ in range(rng.randrange(1, 6))) if a]
        if not atoms:
            continue
        used = {arg for a in atoms for arg in a.args if arg.startswith("?")}
        kept = tuple(p for p in params if p.name in used)
        if len(kept) < len(params):
            params = kept
        if {p.name for p in params} != used:
            continue
        pool = list(dict.fromkeys(atoms))
        rng.shuffle(pool)
        cut1 = rng.randrange(0, len(pool) + 1)
        pre_atoms, eff_pool = pool[:cut1], pool[cut1:]
        cut2 = rng.randrange(0, len(eff_pool) + 1)
        plus, minus = eff_pool[:cut2], eff_pool[cut2:]
        all_vars = {a for atom in pool for a in atom.args if a.startswith("?")}
        if all_vars != {p.name for p in params}:
            continue
        try:
            action = HighLevelAction(
                name=_name(rng, "act", k),
                params=params,
                pre=frozenset(
                    Literal(a, rng.choice((Polarity.POS, Polarity.NEG)))
                    for a in pre_atoms
                ),
                eff_plus=frozenset(plus),
                eff_minus=frozenset(minus),
            )
            action.check_types(hierarchy)
            domain.add_action(action)
        except Exception:
            continue
    return domain


def random_problem(rng: random.Random, domain: Domain) -> PddlProblem:
    tags = list(domain.hierarchy.tags())
    objects = {
        _name(rng, "o", k): rng.choice(tags) for k in range(rng.randrange(1, 6))
    }

    def ground_atoms(n):
        out = set()
        for _ in range(n * 3):
            schema = rng.choice(list(domain.schemas.values()))
            args = []
            ok = True
            for want in schema.params:
                fits = [oid for oid, t in objects.items() if t.is_a(want)]
                if not fits:
                    ok = False
                    break
                args.append(rng.choice(fits))
            if ok:
                out.add(Atom(schema, tuple(args)))
            if len(out) >= n:
                break
        return out

    init = frozenset(ground_atoms(rng.randrange(0, 5)))
    goal = frozenset(
        Literal(a, rng.choice((Polarity.POS, Polarity.NEG)))
        for a in ground_atoms(rng.randrange(1, 4))
    )
    return PddlProblem(
        name=_name(rng, "prob", 0),
        domain_name=domain.name,
        objects=objects,
        init=init,
        goal=goal,
    )
