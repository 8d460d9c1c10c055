import pytest

from conftest import scene_with_piles
from irp.actions import (
    Domain,
    edit_action,
    infer_ground_conditions,
    lift_action,
    make_atom,
    make_literal,
)
from irp.benchmarks import claw_top_script, _top_grasp_edits
from irp.demo import teach_from_script
from irp.errors import InconsistentCorrection, PreconditionUnsatisfied
from irp.execution import (
    StateCorrection,
    StepOutcome,
    execute_plan,
    execute_plan_step,
    init_mental_model,
)
from irp.pddl import PddlProblem
from irp.planner import SearchConfig, SearchMode, ground_task, plan
from irp.world import CUBE, PerceptionMode, POSITION, perceive


@pytest.fixture(scope="module")
def taught_move():
    recorded = teach_from_script(claw_top_script())
    ground = infer_ground_conditions(recorded.O1, recorded.O2)
    action = lift_action("move", ground, recorded.O1.instances, recorded.action)
    for e in _top_grasp_edits():
        action = edit_action(action, e)
    return action


def swap_scene():
    return scene_with_piles(
        {"A": [("obj1", CUBE)], "B": [("obj2", CUBE)]}, positions=["A", "B", "C"]
    )


def solve_on_scene(action, scene, goal):
    domain = Domain(name="tabletop")
    domain.add_action(action)
    init = perceive(scene)
    problem = PddlProblem(
        name="live",
        domain_name="tabletop",
        objects={i: (CUBE if i.startswith("obj") or i.startswith("c") else POSITION)
                 for i in init.instances},
        init=init.atoms,
        goal=frozenset(goal),
    )
    task = ground_task(domain, problem)
    return task, plan(task, SearchConfig(mode=SearchMode.OPTIMAL))


class TestMentalModel:
    def test_full_perception_no_corrections(self):
        scene = swap_scene()
        model = init_mental_model(scene)
        assert model.atoms == perceive(scene)

    def test_stack_blind_with_corrections(self):
        scene = scene_with_piles(
            {"A": [("c1", CUBE), ("c2", CUBE)]}, positions=["A", "B"]
        )
        corrections = StateCorrection(
            add=frozenset({make_atom("on", "c1", "A"), make_atom("on", "c2", "c1")})
        )
        model = init_mental_model(scene, PerceptionMode.STACK_BLIND, corrections)
        atoms = {str(a) for a in model.atoms.atoms}
        assert {"on(c1, A)", "on(c2, c1)"} <= atoms
        assert "clear(c1)" not in atoms
        assert "clear(A)" not in atoms
        # the corrected model agrees with what full perception would say
        assert model.atoms.atoms == perceive(scene).atoms

    def test_inconsistent_correction_rejected(self):
        scene = scene_with_piles({"B": [("c", CUBE)]}, positions=["A", "B"])
        corrections = StateCorrection(
            add=frozenset({make_atom("clear", "A"), make_atom("on", "c", "A")})
        )
        with pytest.raises(InconsistentCorrection):
            init_mental_model(scene, PerceptionMode.FULL, corrections)

    def test_retracting_clear_with_nothing_on_rejected(self):
        scene = scene_with_piles({}, positions=["A"])
        corrections = StateCorrection(remove=frozenset({make_atom("clear", "A")}))
        with pytest.raises(InconsistentCorrection):
            init_mental_model(scene, PerceptionMode.FULL, corrections)


class TestStepExecution:
    def test_first_swap_step_updates_model_and_scene(self, taught_move):
        scene = swap_scene()
        task, result = solve_on_scene(
            taught_move,
            scene,
            {make_literal("on", "obj1", "B"), make_literal("on", "obj2", "A")},
        )
        model = init_mental_model(scene)
        step = result.steps[0]
        new_scene, model, entry = execute_plan_step(model, scene, step)
        assert entry.outcome is StepOutcome.OK
        moved = step.args[0]
        assert make_atom("on", moved, step.args[2]) in model.atoms.atoms
        assert make_atom("clear", step.args[1]) in model.atoms.atoms
        assert model.atoms.atoms == perceive(new_scene).atoms

    def test_unsatisfied_precondition_raises_before_motion(self, taught_move):
        scene = swap_scene()
        task, result = solve_on_scene(
            taught_move, scene, {make_literal("on", "obj1", "C")}
        )
        model = init_mental_model(scene)
        # claim obj1 is elsewhere: remove on(obj1, A) from beliefs
        model.atoms = model.atoms.__class__(
            model.atoms.atoms - {make_atom("on", "obj1", "A")}, model.atoms.instances
        )
        with pytest.raises(PreconditionUnsatisfied):
            execute_plan_step(model, scene, result.steps[0])

    def test_rejection_reperceives(self, taught_move):
        scene = swap_scene()
        task, result = solve_on_scene(
            taught_move, scene, {make_literal("on", "obj1", "C")}
        )
        model = init_mental_model(scene)

        def reject(step, scene_after):
            return False

        new_scene, model, entry = execute_plan_step(model, scene, result.steps[0], reject)
        assert entry.outcome is StepOutcome.REJECTED
        assert model.atoms == perceive(new_scene)


class TestPlanExecution:
    def test_full_swap_reaches_goal(self, taught_move):
        scene = swap_scene()
        goal = {make_literal("on", "obj1", "B"), make_literal("on", "obj2", "A")}
        task, result = solve_on_scene(taught_move, scene, goal)
        model = init_mental_model(scene)
        outcome = execute_plan(model, scene, result, goal=goal)
        assert outcome.goal_satisfied is True
        final_atoms = perceive(outcome.scene).atoms
        assert make_atom("on", "obj1", "B") in final_atoms
        assert make_atom("on", "obj2", "A") in final_atoms
        assert model.atoms.atoms == final_atoms

    def test_empty_plan_leaves_scene_untouched(self, taught_move):
        scene = swap_scene()
        from irp.planner import Plan

        model = init_mental_model(scene)
        outcome = execute_plan(model, scene, Plan(()))
        assert outcome.scene is scene
        assert outcome.log.entries == []

    def test_stops_at_first_rejection(self, taught_move):
        scene = swap_scene()
        goal = {make_literal("on", "obj1", "B"), make_literal("on", "obj2", "A")}
        task, result = solve_on_scene(taught_move, scene, goal)
        verdicts = iter([True, False])

        def confirm(step, scene_after):
            return next(verdicts)

        model = init_mental_model(scene)
        outcome = execute_plan(model, scene, result, confirm, goal=goal)
        assert len(outcome.log.entries) == 2
        assert outcome.log.entries[-1].outcome is StepOutcome.REJECTED
        assert outcome.goal_satisfied is False

    def test_log_replay_reproduces_final_scene(self, taught_move):
        scene = swap_scene()
        goal = {make_literal("on", "obj1", "B"), make_literal("on", "obj2", "A")}
        task, result = solve_on_scene(taught_move, scene, goal)
        final1 = execute_plan(init_mental_model(scene), scene, result, goal=goal).scene
        final2 = execute_plan(init_mental_model(scene), scene, result, goal=goal).scene
        assert final1.to_dict() == final2.to_dict()
