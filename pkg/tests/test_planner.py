import random

import pytest

from conftest import paper_move_action, swap_problem
from irp.actions import (
    AddPre,
    Domain,
    HighLevelAction,
    SetParamType,
    edit_action,
    make_atom,
    make_literal,
)
from irp.errors import NoSolution, ResourceLimit, TooLarge
from irp.pddl import PddlProblem
from irp.planner import (
    INF,
    Plan,
    SearchConfig,
    SearchMode,
    bfs_oracle,
    ground_task,
    h_ff,
    plan,
    validate_plan,
)
from irp.world import CUBE, ELEMENT, OBJECT, POSITION
from task_gen import random_task


@pytest.fixture
def swap_task(swap_domain):
    return ground_task(swap_domain, swap_problem())


class TestGrounding:
    def test_move_over_2_objects_3_positions_yields_12(self, swap_task):
        # 2 x 3 x 3 = 18 substitutions minus the 6 with ?A = ?B, which are
        # statically inconsistent (on(obj, A) both required and forbidden)
        assert len(swap_task.actions) == 12

    def test_widened_destination_admits_five_bindings(self, swap_domain):
        widened = Domain(name="tabletop")
        widened.add_action(
            edit_action(paper_move_action(), SetParamType("?B", ELEMENT))
        )
        task = ground_task(widened, swap_problem())
        dests = {ga.args[2] for ga in task.actions if ga.args[0] == "obj1"}
        # enumeration: every element is a legal destination for the widened slot
        assert dests == {"A", "B", "C", "obj1", "obj2"}

    def test_zero_param_action_grounds_once(self):
        domain = Domain(name="tabletop")
        domain.add_action(
            HighLevelAction(
                name="ping",
                params=(),
                pre=frozenset(),
                eff_plus=frozenset({make_atom("clear", "A")}),
                eff_minus=frozenset(),
            )
        )
        prob = PddlProblem(
            name="p",
            domain_name="tabletop",
            objects={"A": POSITION},
            init=frozenset(),
            goal=frozenset({make_literal("clear", "A")}),
        )
        task = ground_task(domain, prob)
        assert len(task.actions) == 1

    def test_no_statically_inconsistent_actions(self, swap_task):
        for ga in swap_task.actions:
            assert not (ga.pre_pos & ga.pre_neg)
            assert not (ga.add & ga.delete)


class TestHeuristic:
    def test_swap_initial_state_is_3(self, swap_task):
        value, helpful = h_ff(swap_task.init, swap_task)
        assert value == 3.0
        assert helpful, "relaxed-plan actions applicable in the state expected"
        for ga in helpful:
            assert ga.applicable(swap_task.init)

    def test_goal_state_is_0(self, swap_task):
        goal_state = swap_task.init
        for step in plan(swap_task, SearchConfig(mode=SearchMode.OPTIMAL)).steps:
            goal_state = step.apply(goal_state)
        value, helpful = h_ff(goal_state, swap_task)
        assert value == 0.0 and helpful == []

    def test_unreachable_goal_is_infinite(self, swap_domain):
        prob = swap_problem()
        unreachable = PddlProblem(
            name="swap",
            domain_name="tabletop",
            objects=prob.objects,
            init=prob.init,
            # move never produces on(obj, obj'): destination type is POSITION
            goal=frozenset({make_literal("on", "obj1", "obj2")}),
        )
        task = ground_task(swap_domain, unreachable)
        value, _ = h_ff(task.init, task)
        assert value == INF

    def test_delete_free_bfs_oracle_confirms_swap_value(self, swap_task):
        # independent check: optimal plan length in the delete-relaxed task
        import collections

        start = frozenset(swap_task.compiled_state(swap_task.init))
        goal = set(swap_task.cgoal)
        queue = collections.deque([(start, 0)])
        seen = {start}
        best = None
        while queue:
            facts, depth = queue.popleft()
            if goal <= facts:
                best = depth
                break
            for ai in range(len(swap_task.actions)):
                if all(f in facts for f in swap_task.cpre[ai]):
                    nxt = frozenset(facts | swap_task.cadd_sets[ai])
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append((nxt, depth + 1))
        assert best == 3
        assert h_ff(swap_task.init, swap_task)[0] == best


class TestPlanning:
    def test_swap_ff_three_valid_steps(self, swap_task):
        result = plan(swap_task, SearchConfig(mode=SearchMode.FF))
        assert len(result.steps) == 3
        assert validate_plan(swap_task, result).valid

    def test_swap_optimal_matches_oracle(self, swap_task):
        result = plan(swap_task, SearchConfig(mode=SearchMode.OPTIMAL))
        assert len(result.steps) == bfs_oracle(swap_task) == 3

    def test_goal_equal_init_empty_plan(self, swap_domain):
        prob = swap_problem()
        trivial = PddlProblem(
            name="swap",
            domain_name="tabletop",
            objects=prob.objects,
            init=prob.init,
            goal=frozenset({make_literal("on", "obj1", "A")}),
        )
        task = ground_task(swap_domain, trivial)
        result = plan(task)
        assert result.steps == () and result.cost == 0

    def test_sussman_configuration_optimal_3(self):
        # c on a at A; b at B; C free; goal: a on b, b on c
        domain = Domain(name="tabletop")
        move = paper_move_action(obj_type=OBJECT)
        move = edit_action(move, SetParamType("?A", ELEMENT))
        move = edit_action(move, SetParamType("?B", ELEMENT))
        move = edit_action(move, AddPre(make_literal("clear", "?obj")))
        domain.add_action(move)
        prob = PddlProblem(
            name="sussman",
            domain_name="tabletop",
            objects={
                "a": CUBE,
                "b": CUBE,
                "c": CUBE,
                "A": POSITION,
                "B": POSITION,
                "C": POSITION,
            },
            init=frozenset(
                {
                    make_atom("on", "a", "A"),
                    make_atom("on", "c", "a"),
                    make_atom("on", "b", "B"),
                    make_atom("clear", "c"),
                    make_atom("clear", "b"),
                    make_atom("clear", "C"),
                }
            ),
            goal=frozenset(
                {make_literal("on", "a", "b"), make_literal("on", "b", "c")}
            ),
        )
        task = ground_task(domain, prob)
        assert bfs_oracle(task) == 3
        result = plan(task, SearchConfig(mode=SearchMode.OPTIMAL))
        assert len(result.steps) == 3
        assert validate_plan(task, result).valid

    def test_no_solution_is_a_proof(self, swap_domain):
        prob = swap_problem()
        impossible = PddlProblem(
            name="swap",
            domain_name="tabletop",
            objects=prob.objects,
            init=prob.init,
            goal=frozenset({make_literal("on", "obj1", "obj2")}),
        )
        task = ground_task(swap_domain, impossible)
        with pytest.raises(NoSolution):
            plan(task, SearchConfig(mode=SearchMode.FF))
        with pytest.raises(NoSolution):
            plan(task, SearchConfig(mode=SearchMode.OPTIMAL))
        assert bfs_oracle(task) is None

    def test_resource_limit_distinguished(self, swap_task):
        with pytest.raises(ResourceLimit):
            plan(swap_task, SearchConfig(mode=SearchMode.OPTIMAL, node_limit=1))

    def test_cooperative_stop_flag_cancels(self, swap_task):
        import threading

        from irp.errors import Cancelled

        flag = threading.Event()
        flag.set()  # cancel before the first budget check fires
        with pytest.raises(Cancelled):
            plan(swap_task, SearchConfig(mode=SearchMode.OPTIMAL, stop_event=flag))

    def test_planning_deterministic(self, swap_task):
        p1 = plan(swap_task, SearchConfig(mode=SearchMode.FF))
        p2 = plan(swap_task, SearchConfig(mode=SearchMode.FF))
        assert [str(s) for s in p1.steps] == [str(s) for s in p2.steps]


class TestValidation:
    def test_paper_plan_valid(self, swap_task):
        steps = []
        by_repr = {str(ga): ga for ga in swap_task.actions}
        for name in ("move(obj1, A, C)", "move(obj2, B, A)", "move(obj1, C, B)"):
            steps.append(by_repr[name])
        assert validate_plan(swap_task, Plan(tuple(steps))).valid

    def test_swapped_steps_fail_at_first(self, swap_task):
        by_repr = {str(ga): ga for ga in swap_task.actions}
        steps = (
            by_repr["move(obj2, B, A)"],
            by_repr["move(obj1, A, C)"],
            by_repr["move(obj1, C, B)"],
        )
        check = validate_plan(swap_task, Plan(steps))
        assert not check.valid
        assert check.failing_step == 0
        assert "clear(A)" in check.reason

    def test_empty_plan_on_satisfied_goal(self, swap_domain):
        prob = swap_problem()
        satisfied = PddlProblem(
            name="swap",
            domain_name="tabletop",
            objects=prob.objects,
            init=prob.init,
            goal=frozenset({make_literal("clear", "C")}),
        )
        task = ground_task(swap_domain, satisfied)
        assert validate_plan(task, Plan(())).valid


class TestOracle:
    def test_oracle_guard(self, swap_task):
        with pytest.raises(TooLarge):
            bfs_oracle(swap_task, max_states=1)

    def test_tower_of_three_is_two_steps(self):
        domain = Domain(name="tabletop")
        move = paper_move_action(obj_type=CUBE)
        move = edit_action(move, SetParamType("?A", ELEMENT))
        move = edit_action(move, SetParamType("?B", ELEMENT))
        move = edit_action(move, AddPre(make_literal("clear", "?obj")))
        domain.add_action(move)
        prob = PddlProblem(
            name="tower3",
            domain_name="tabletop",
            objects={
                "c1": CUBE, "c2": CUBE, "c3": CUBE,
                "A": POSITION, "B": POSITION, "C": POSITION,
            },
            init=frozenset(
                {
                    make_atom("on", "c1", "A"),
                    make_atom("on", "c2", "B"),
                    make_atom("on", "c3", "C"),
                    make_atom("clear", "c1"),
                    make_atom("clear", "c2"),
                    make_atom("clear", "c3"),
                }
            ),
            goal=frozenset(
                {make_literal("on", "c2", "c1"), make_literal("on", "c3", "c2")}
            ),
        )
        assert bfs_oracle(ground_task(domain, prob)) == 2


class TestRandomizedProperties:
    def test_optimal_matches_oracle_on_random_tasks(self):
        rng = random.Random(2468)
        checked = 0
        for _ in range(40):
            rt = random_task(rng)
            try:
                oracle = bfs_oracle(rt.task, max_states=200_000)
            except TooLarge:
                continue
            if oracle is None:
                with pytest.raises(NoSolution):
                    plan(rt.task, SearchConfig(mode=SearchMode.OPTIMAL))
                continue
            result = plan(rt.task, SearchConfig(mode=SearchMode.OPTIMAL))
            assert len(result.steps) == oracle
            assert validate_plan(rt.task, result).valid
            checked += 1
        assert checked >= 20

    def test_ff_valid_and_bounded_on_random_tasks(self):
        rng = random.Random(1357)
        for _ in range(40):
            rt = random_task(rng)
            oracle = bfs_oracle(rt.task, max_states=200_000)
            if oracle is None:
                continue
            result = plan(rt.task, SearchConfig(mode=SearchMode.FF))
            assert validate_plan(rt.task, result).valid
            assert len(result.steps) <= 2 * max(oracle, 1)

    def test_h_zero_iff_goal_and_inf_implies_unsolvable(self):
        rng = random.Random(8642)
        for _ in range(40):
            rt = random_task(rng)
            value, _ = h_ff(rt.task.init, rt.task)
            assert (value == 0.0) == rt.task.satisfies_goal(rt.task.init)
            if value == INF:
                assert bfs_oracle(rt.task, max_states=200_000) is None
