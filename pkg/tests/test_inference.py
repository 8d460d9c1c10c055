import pytest

from conftest import scene_with_piles
from irp.actions import (
    AddEffPlus,
    AddPre,
    RemovePre,
    Rename,
    SetParamType,
    copy_action,
    edit_action,
    infer_ground_conditions,
    lift_action,
    make_atom,
    make_literal,
    render_literal_english,
    Domain,
)
from irp.benchmarks import claw_top_script
from irp.demo import teach_from_script
from irp.errors import (
    DanglingVariable,
    DuplicateName,
    EffectConflict,
    InstanceMismatch,
    TypeViolation,
)
from irp.world import CUBE, ELEMENT, POSITION, WorldState, apply_effects, perceive


@pytest.fixture(scope="module")
def move_demo():
    return teach_from_script(claw_top_script())


@pytest.fixture(scope="module")
def move_action(move_demo):
    ground = infer_ground_conditions(move_demo.O1, move_demo.O2)
    return lift_action("move", ground, move_demo.O1.instances, move_demo.action)


class TestInference:
    def test_changed_atom_deduction(self, move_demo):
        pre, plus, minus = infer_ground_conditions(move_demo.O1, move_demo.O2)
        assert {str(l) for l in pre} == {
            "on(dobj, dA)",
            "clear(dB)",
            "not on(dobj, dB)",
            "not clear(dA)",
        }
        assert {str(a) for a in plus} == {"on(dobj, dB)", "clear(dA)"}
        assert {str(a) for a in minus} == {"on(dobj, dA)", "clear(dB)"}

    def test_equal_observations_infer_nothing(self, move_demo):
        pre, plus, minus = infer_ground_conditions(move_demo.O1, move_demo.O1)
        assert pre == frozenset() and plus == frozenset() and minus == frozenset()

    def test_one_sided_difference(self):
        scene1 = scene_with_piles({"A": [("c", CUBE)]}, positions=["A"])
        o1 = perceive(scene1)
        o2 = WorldState(o1.atoms - {make_atom("clear", "c")}, o1.instances)
        pre, plus, minus = infer_ground_conditions(o1, o2)
        assert {str(a) for a in minus} == {"clear(c)"}
        assert plus == frozenset()
        assert {str(l) for l in pre} == {"clear(c)"}

    def test_instance_mismatch(self, move_demo):
        other = perceive(scene_with_piles({"A": [("x", CUBE)]}, positions=["A"]))
        with pytest.raises(InstanceMismatch):
            infer_ground_conditions(move_demo.O1, other)

    def test_pre_satisfied_by_o1(self, move_demo):
        pre, _, _ = infer_ground_conditions(move_demo.O1, move_demo.O2)
        for lit in pre:
            assert (lit.atom in move_demo.O1.atoms) == lit.positive


class TestLifting:
    def test_variable_naming_and_types(self, move_action):
        assert [(p.name, p.type.name) for p in move_action.params] == [
            ("?obj", "CUBE"),
            ("?A", "POSITION"),
            ("?B", "POSITION"),
        ]
        assert {str(l) for l in move_action.pre} == {
            "on(?obj, ?A)",
            "clear(?B)",
            "not on(?obj, ?B)",
            "not clear(?A)",
        }
        assert {str(a) for a in move_action.eff_plus} == {"on(?obj, ?B)", "clear(?A)"}
        assert {str(a) for a in move_action.eff_minus} == {"on(?obj, ?A)", "clear(?B)"}

    def test_empty_conditions_lift_to_empty_action(self):
        action = lift_action("noop", (frozenset(), frozenset(), frozenset()), {})
        assert action.params == ()
        assert action.pre == frozenset()

    def test_repeated_instance_shares_one_variable(self, move_demo):
        ground = infer_ground_conditions(move_demo.O1, move_demo.O2)
        action = lift_action("move", ground, move_demo.O1.instances, move_demo.action)
        vars_used = {a for l in action.pre for a in l.atom.args if a.startswith("?")}
        assert vars_used == {p.name for p in action.params}
        assert len([p for p in action.params if p.name == "?obj"]) == 1

    def test_lift_ground_round_trip(self, move_demo, move_action):
        subst = {p.name: move_action.demo_binding[p.name] for p in move_action.params}
        pre, plus, minus = move_action.ground(subst)
        expected_pre, expected_plus, expected_minus = infer_ground_conditions(
            move_demo.O1, move_demo.O2
        )
        assert pre == expected_pre
        assert plus == expected_plus
        assert minus == expected_minus


class TestEdits:
    def test_widen_destination_to_element(self, move_action):
        widened = edit_action(move_action, SetParamType("?B", ELEMENT))
        assert widened.param("?B").type is ELEMENT
        assert move_action.param("?B").type is POSITION  # original untouched

    def test_widening_obj_to_element_violates_on_schema(self, move_action):
        with pytest.raises(TypeViolation):
            edit_action(move_action, SetParamType("?obj", ELEMENT))

    def test_add_thin_precondition(self, move_action):
        thin = make_literal("thin", "?obj")
        edited = edit_action(move_action, AddPre(thin))
        assert thin in edited.pre

    def test_add_effect_conflicting_with_delete_rejected(self, move_action):
        conflicting = make_atom("on", "?obj", "?A")  # already a delete effect
        with pytest.raises(EffectConflict):
            edit_action(move_action, AddEffPlus(conflicting))

    def test_add_pre_with_unknown_variable_rejected(self, move_action):
        with pytest.raises(DanglingVariable):
            edit_action(move_action, AddPre(make_literal("thin", "?ghost")))

    def test_remove_pre_drops_orphaned_param(self, move_action):
        # strip every literal that mentions ?B, then its param disappears
        edited = move_action
        for lit in list(move_action.pre):
            if "?B" in lit.atom.args:
                edited = edit_action(edited, RemovePre(lit))
        from irp.actions import RemoveEff

        for atom in list(edited.eff_plus | edited.eff_minus):
            if "?B" in atom.args:
                edited = edit_action(edited, RemoveEff(atom))
        assert "?B" not in {p.name for p in edited.params}

    def test_rename(self, move_action):
        assert edit_action(move_action, Rename("shift")).name == "shift"


class TestCopy:
    def test_copy_shares_low_level(self, move_action):
        clone = copy_action(move_action, "move_claw")
        assert clone.name == "move_claw"
        assert clone.low_level is move_action.low_level
        assert clone.pre == move_action.pre

    def test_copy_duplicate_name_rejected(self, move_action):
        domain = Domain()
        domain.add_action(move_action)
        with pytest.raises(DuplicateName):
            copy_action(move_action, "move", domain)

    def test_copy_then_edit_leaves_original(self, move_action):
        clone = copy_action(move_action, "move2")
        edited = edit_action(clone, AddPre(make_literal("thin", "?obj")))
        assert make_literal("thin", "?obj") not in move_action.pre
        assert make_literal("thin", "?obj") in edited.pre


class TestEnglishRendering:
    def test_positive_on(self):
        assert render_literal_english(make_literal("on", "obj", "A")) == "obj is on A"

    def test_negative_on(self):
        lit = make_literal("on", "obj", "A", positive=False)
        assert render_literal_english(lit) == "obj is not on A"

    def test_variables_render_without_question_marks(self):
        assert render_literal_english(make_literal("thin", "?obj")) == "obj is thin"

    def test_all_builtins(self):
        assert render_literal_english(make_literal("clear", "A")) == "A is clear"
        assert (
            render_literal_english(make_literal("stackable", "c", "b"))
            == "c is stackable on b"
        )
        assert render_literal_english(make_literal("flat", "b")) == "b is flat"


class TestInverseProperty:
    def test_apply_effects_recovers_o2_on_random_pairs(self, rng):
        # raw random atom subsets over a fixed instance pool (instances shared)
        scene = scene_with_piles(
            {"A": [("c1", CUBE)], "B": [("c2", CUBE)]}, positions=["A", "B", "C"]
        )
        base = perceive(scene)
        universe = sorted(base.atoms, key=lambda a: a.sort_key)
        for _ in range(500):
            o1 = WorldState(
                frozenset(a for a in universe if rng.random() < 0.5), base.instances
            )
            o2 = WorldState(
                frozenset(a for a in universe if rng.random() < 0.5), base.instances
            )
            pre, plus, minus = infer_ground_conditions(o1, o2)
            assert apply_effects(o1, plus, minus) == o2
            for lit in pre:
                assert (lit.atom in o1.atoms) == lit.positive
