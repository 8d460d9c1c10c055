"""Command-line entry points.

    irp serve  --port 8000                 run the REST API (and UI if built)
    irp bench  --task N [--optimal]        run one benchmark task end to end
    irp plan   --domain d.pddl --problem p.pddl [--optimal]
    irp export --session s.json --out dir/ write the session's PDDL artifacts
    irp demo   --script demo.json          teach headlessly from a demo file

Exit codes: 0 success, 2 no solution, 3 validation failure, 1 other errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import errors
from .benchmarks import run_benchmark
from .config import WorkbenchConfig
from .demo import DemoScript, teach_from_script
from .actions import infer_ground_conditions, lift_action
from .pddl import emit_domain, parse_domain, parse_problem
from .planner import SearchConfig, SearchMode, ground_task, plan, validate_plan
from .session import Session

EXIT_OK = 0
EXIT_NO_SOLUTION = 2
EXIT_VALIDATION = 3

_VALIDATION_ERRORS = (
    errors.PddlError,
    errors.InvalidScene,
    errors.InvalidPlan,
    errors.TypeViolation,
    errors.EmptyGoal,
    errors.SchemaVersionMismatch,
    errors.CorruptFile,
)


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(Session(config=WorkbenchConfig.from_env()))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def _cmd_bench(args) -> int:
    report = run_benchmark(args.task, optimal=args.optimal,
                           config=WorkbenchConfig.from_env())
    for line in report.render_lines():
        print(line)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    if not report.goal_satisfied:
        print("benchmark goal NOT satisfied", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_plan(args) -> int:
    with open(args.domain, "r", encoding="utf-8") as fh:
        domain = parse_domain(fh.read())
    with open(args.problem, "r", encoding="utf-8") as fh:
        problem = parse_problem(fh.read(), domain)
    task = ground_task(domain, problem)
    mode = SearchMode.OPTIMAL if args.optimal else SearchMode.FF
    result = plan(task, SearchConfig(mode=mode))
    check = validate_plan(task, result)
    if not check.valid:
        print(f"plan failed validation: {check.reason}", file=sys.stderr)
        return EXIT_VALIDATION
    for line in result.render_lines():
        print(line)
    if not result.steps:
        print("; goal already satisfied (empty plan)")
    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
    return EXIT_OK


def _cmd_export(args) -> int:
    session = Session.load(args.session)
    os.makedirs(args.out, exist_ok=True)
    wrote = []
    domain_path = os.path.join(args.out, f"{session.domain.name}.domain.pddl")
    with open(domain_path, "w", encoding="utf-8") as fh:
        fh.write(emit_domain(session.domain))
    wrote.append(domain_path)
    for name, problem in sorted(session.problems.items()):
        path = os.path.join(args.out, f"{name}.problem.pddl")
        from .pddl import emit_problem

        with open(path, "w", encoding="utf-8") as fh:
            fh.write(emit_problem(problem.to_pddl(session.domain)))
        wrote.append(path)
    for path in wrote:
        print(path)
    return EXIT_OK


def _cmd_demo(args) -> int:
    with open(args.script, "r", encoding="utf-8") as fh:
        script = DemoScript.from_json(fh.read())
    config = WorkbenchConfig.from_env()
    recorded = teach_from_script(script, config)
    ground = infer_ground_conditions(recorded.O1, recorded.O2)
    action = lift_action(script.name, ground, recorded.O1.instances, recorded.action)
    print(f"taught {action.signature()}")
    print("preconditions:")
    for lit in action.sorted_pre():
        print(f"  {lit}")
    print("effects:")
    for lit in action.sorted_effects():
        print(f"  {lit}")
    if args.json:
        from .session import _action_summary

        print(json.dumps(_action_summary(action), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irp", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the REST API server")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.set_defaults(func=_cmd_serve)

    p_bench = sub.add_parser("bench", help="run a benchmark task")
    p_bench.add_argument("--task", type=int, required=True, choices=range(1, 7))
    p_bench.add_argument("--optimal", action="store_true")
    p_bench.add_argument("--json", action="store_true")
    p_bench.set_defaults(func=_cmd_bench)

    p_plan = sub.add_parser("plan", help="solve a PDDL domain/problem pair")
    p_plan.add_argument("--domain", required=True)
    p_plan.add_argument("--problem", required=True)
    p_plan.add_argument("--optimal", action="store_true")
    p_plan.add_argument("--json", action="store_true")
    p_plan.set_defaults(func=_cmd_plan)

    p_export = sub.add_parser("export", help="write a session's PDDL files")
    p_export.add_argument("--session", required=True)
    p_export.add_argument("--out", required=True)
    p_export.set_defaults(func=_cmd_export)

    p_demo = sub.add_parser("demo", help="teach from a scripted demonstration")
    p_demo.add_argument("--script", required=True)
    p_demo.add_argument("--json", action="store_true")
    p_demo.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except errors.NoSolution as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except _VALIDATION_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except errors.IrpError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
