import json

import pytest

from conftest import swap_problem
from irp.benchmarks import claw_top_script
from irp.cli import EXIT_NO_SOLUTION, EXIT_OK, EXIT_VALIDATION, main
from irp.pddl import emit_domain, emit_problem
from irp.session import Session


@pytest.fixture
def pddl_files(tmp_path, swap_domain):
    dom = tmp_path / "domain.pddl"
    prob = tmp_path / "problem.pddl"
    dom.write_text(emit_domain(swap_domain))
    prob.write_text(emit_problem(swap_problem()))
    return str(dom), str(prob)


class TestPlanCommand:
    def test_solves_swap(self, pddl_files, capsys):
        domain, problem = pddl_files
        code = main(["plan", "--domain", domain, "--problem", problem, "--optimal"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert out.splitlines()[0].startswith("1. move(")
        assert len([l for l in out.splitlines() if l and l[0].isdigit()]) == 3

    def test_no_solution_exit_code(self, tmp_path, swap_domain, capsys):
        from dataclasses import replace

        from irp.actions import make_literal

        prob = swap_problem()
        impossible = replace(
            prob, goal=frozenset({make_literal("on", "obj1", "obj2")})
        )
        dom_file = tmp_path / "d.pddl"
        prob_file = tmp_path / "p.pddl"
        dom_file.write_text(emit_domain(swap_domain))
        prob_file.write_text(emit_problem(impossible))
        code = main(["plan", "--domain", str(dom_file), "--problem", str(prob_file)])
        assert code == EXIT_NO_SOLUTION

    def test_validation_failure_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.pddl"
        bad.write_text("(define (domain d) (:requirements :htn))")
        code = main(["plan", "--domain", str(bad), "--problem", str(bad)])
        assert code == EXIT_VALIDATION


class TestBenchCommand:
    def test_task1(self, capsys):
        code = main(["bench", "--task", "1"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "task 1" in out
        assert "goal reached" in out


class TestDemoCommand:
    def test_teaches_from_script(self, tmp_path, capsys):
        script = tmp_path / "demo.json"
        script.write_text(json.dumps(claw_top_script().to_dict()))
        code = main(["demo", "--script", str(script)])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "taught claw_top(?obj, ?A, ?B)" in out
        assert "on(?obj, ?A)" in out


class TestExportCommand:
    def test_writes_pddl_files(self, tmp_path, capsys):
        session = Session()
        session.teach_script(claw_top_script())
        from conftest import scene_with_piles
        from irp.actions import make_literal
        from irp.world import CUBE

        session.load_scene(
            scene_with_piles({"A": [("obj1", CUBE)]}, positions=["A", "B"])
        )
        session.create_problem_from_scene("move1", [make_literal("on", "obj1", "B")])
        session_file = tmp_path / "session.json"
        session.save(str(session_file))
        out_dir = tmp_path / "out"
        code = main(
            ["export", "--session", str(session_file), "--out", str(out_dir)]
        )
        assert code == EXIT_OK
        files = sorted(p.name for p in out_dir.iterdir())
        assert files == ["move1.problem.pddl", "tabletop.domain.pddl"]
        from irp.pddl import parse_domain, parse_problem

        dom = parse_domain((out_dir / "tabletop.domain.pddl").read_text())
        parse_problem((out_dir / "move1.problem.pddl").read_text(), dom)
