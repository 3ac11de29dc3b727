from __future__ import annotations

import random

import pytest
from hypothesis import given, settings

from goalbc.ltl import And, Atom, Finally, Next, Not, Or, nnf
from goalbc.oracle import equiv, implies
from goalbc.parser import parse
from goalbc.scene import Scene, is_witness, ngd, validate_bc
from goalbc.syntacbc import (
    fresh_atom,
    is_special_case,
    push_negation,
    special_case_by_template,
    syntacbc,
    syntactic_substitution,
    template_candidates,
)
from randltl import random_scene
from test_ltl import formulas

VIA_G1 = parse("(h & X !p) | !G (m -> X !p)")
VIA_G2 = parse("!G (h -> X p) | (m & X p)")


class TestPushNegation:
    def test_keeps_sugar(self):
        assert push_negation(parse("G (call -> F open)")) == parse("F (call & G !open)")
        assert push_negation(parse("G (m -> X !p)")) == parse("F (m & X p)")

    def test_positive_mode_is_identity_on_nnf(self):
        f = parse("G (a -> X !b)")
        assert push_negation(f, False) == f

    @settings(max_examples=60, deadline=None)
    @given(formulas())
    def test_equivalent_to_negation(self, f):
        assert equiv(push_negation(f), Not(f))
        assert equiv(push_negation(f), nnf(Not(f)))


class TestTemplates:
    def test_finally(self):
        f = Finally(Not(parse("m -> X !p")))
        assert template_candidates(f, None) == [f.arg, Next(f.arg)]

    def test_or_picks_a_side(self):
        assert template_candidates(parse("a | b"), None) == [Atom("a"), Atom("b")]

    def test_and_needs_fresh_atom(self):
        assert template_candidates(parse("G a"), None) == []
        assert template_candidates(parse("G a"), "b") == [And(parse("G a"), Atom("b"))]

    def test_true_becomes_fresh_atom(self):
        assert template_candidates(parse("true"), "q") == [Atom("q")]

    def test_until(self):
        f = parse("a U b")
        assert template_candidates(f, None) == [Atom("b"), parse("a & X b")]

    def test_special_case(self):
        assert is_special_case(parse("a"), parse("a | b"))
        assert not is_special_case(parse("a | b"), parse("a | b"))
        assert not is_special_case(parse("a"), parse("b"))

    def test_fresh_atom(self, mpc, atm):
        assert fresh_atom(mpc, 0) == "m"
        assert fresh_atom(Scene("one", ("a",), (), (), (("g1", parse("G a")),)), 0) is None
        # g3 mentions only lock, the others bring money and passok
        assert fresh_atom(atm, 2) == "money"

    def test_template_choice_on_mpc(self, mpc):
        f = push_negation(mpc.goal_formulas[0])
        # F x has no special case of the form x when x is not a state formula
        assert special_case_by_template(f, mpc, 0) == parse("h & X !p")


class TestSubstitution:
    def test_mpc_structure(self, mpc):
        sc2 = parse("h & X !p")
        assert syntactic_substitution(mpc, 0, sc2) == Or(sc2, Not(mpc.goal_formulas[1]))
        sc3 = parse("m & X p")
        assert syntactic_substitution(mpc, 1, sc3) == Or(Not(mpc.goal_formulas[0]), sc3)

    def test_single_goal(self):
        s = Scene("one", ("a", "b"), ("a", "b"), (), (("g1", parse("G a")),))
        sc = parse("F !a & b")
        assert syntactic_substitution(s, 0, sc) == sc


class TestSyntacBC:
    def test_mpc_without_reduction(self, mpc):
        found = [b.formula for b in syntacbc(mpc, reduce=False)]
        assert len(found) == 2
        assert any(equiv(f, VIA_G1) for f in found)
        assert any(equiv(f, VIA_G2) for f in found)
        for f in found:
            assert validate_bc(mpc, f).is_bc

    def test_mpc_bcs_are_mutual_witnesses(self, mpc):
        assert is_witness(mpc, VIA_G1, VIA_G2) and is_witness(mpc, VIA_G2, VIA_G1)
        assert len(syntacbc(mpc)) == 1

    def test_elevator(self, elevator):
        found = [b.formula for b in syntacbc(elevator, reduce=False)]
        assert len(syntacbc(elevator)) == 1
        target = parse("(call & G !open) | !G (X open -> atfloor)")
        assert any(equiv(f, target) for f in found)

    def test_extra_goal_gives_nothing(self, extragoal):
        stats: dict = {}
        assert syntacbc(extragoal, stats=stats) == []
        assert stats["rejected"] == 0

    def test_ngd_witnessed_on_influential(self, influential):
        found = syntacbc(influential)
        assert found
        for b in found:
            assert is_witness(influential, b.formula, ngd(influential))

    def test_every_bc_contradicts_the_goals(self, mpc, elevator, atm):
        for s in (mpc, elevator, atm):
            for b in syntacbc(s):
                assert implies(b.formula, Not(s.all_goals))
                assert b.verdict is not None and b.verdict.is_bc
                assert b.scope == s.goal_names

    @pytest.mark.parametrize("seed", range(4))
    def test_sat_guard_gives_inconsistency_and_minimality(self, seed):
        # non-triviality is not implied by the guard, hence the final validation
        rng = random.Random(seed)
        for _ in range(15):
            s = random_scene(rng)
            for b in syntacbc(s, validate=False):
                v = validate_bc(s, b.formula)
                assert v.logical_inconsistency and all(v.minimality)
            for b in syntacbc(s):
                assert validate_bc(s, b.formula).is_bc
