"""The PDDL surface: canonical text out, validated structures back in."""

from irp import (
    Domain,
    HighLevelAction,
    OBJECT,
    POSITION,
    Parameter,
    PddlProblem,
    emit_domain,
    emit_problem,
    make_atom,
    make_literal,
    parse_domain,
    parse_problem,
)

domain = Domain(name="tabletop")
domain.add_action(
    HighLevelAction(
        name="move",
        params=(
            Parameter("?obj", OBJECT),
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
)

problem = PddlProblem(
    name="swap",
    domain_name="tabletop",
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
    goal=frozenset({make_literal("on", "obj1", "B"), make_literal("on", "obj2", "A")}),
)

domain_text = emit_domain(domain)
problem_text = emit_problem(problem)
print(domain_text)
print(problem_text)

assert parse_domain(domain_text) == domain
assert parse_problem(problem_text, domain) == problem
assert emit_domain(parse_domain(domain_text)) == domain_text
print("round trip: parse(emit(x)) == x, and emit is a fixed point.")
