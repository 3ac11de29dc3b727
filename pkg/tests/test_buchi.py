from __future__ import annotations

import pydot
import pytest
from hypothesis import given, settings

from goalbc import buchi
from goalbc.buchi import (
    BuchiAutomaton,
    Kind,
    LassoTrace,
    ResourceLimitError,
    Transition,
    accepts,
    check_emptiness,
    export_dot,
    find_accepting_run,
    is_empty,
    translate,
)
from goalbc.ltl import Cube
from goalbc.oracle import all_lassos, lasso_eval
from goalbc.parser import parse
from test_ltl import formulas


def lasso(stem, loop):
    return LassoTrace(tuple(Cube.of(*c) for c in stem), tuple(Cube.of(*c) for c in loop))


class TestTranslate:
    def test_false_is_empty(self):
        a = translate(parse("false"))
        assert a.n_states == 1 and not a.accepting and not a.transitions
        assert is_empty(a)

    def test_globally_is_one_accepting_self_loop(self):
        a = translate(parse("G a"))
        assert a.n_states == 1
        assert a.accepting == {0}
        assert [(t.src, str(t.label), t.dst) for t in a.transitions] == [(0, "a", 0)]

    def test_contradiction_is_empty(self):
        assert is_empty(translate(parse("G a & F !a")))
        assert is_empty(translate(parse("X X X X X a & G !a")))

    def test_motivating_goals_are_jointly_satisfiable(self):
        assert not is_empty(translate(parse("G (h -> X p) & G (m -> X !p)")))

    def test_fairness_needs_both_letters(self):
        w = check_emptiness(translate(parse("G F a & G F !a")))
        letters = [c.get("a") for c in w.loop]
        assert True in letters and False in letters

    def test_translation_is_cached(self):
        f = parse("a U (b R c)")
        assert translate(f) is translate(parse("a U (b R c)"))

    @settings(max_examples=120, deadline=None)
    @given(formulas(atoms=("a", "b"), max_leaves=5))
    def test_language_matches_lasso_semantics(self, f):
        a = translate(f)
        for w in all_lassos(["a", "b"], 3):
            assert accepts(a, w) == lasso_eval(w, f), str(w)


class TestEmptiness:
    def test_witness_is_a_real_run(self):
        a = translate(parse("F (h & m) & G (h -> X p)"))
        run = find_accepting_run(a)
        edges = [a.transitions[i] for i in run.stem + run.loop]
        assert edges[0].src == a.initial
        for e1, e2 in zip(edges, edges[1:]):
            assert e1.dst == e2.src
        loop = [a.transitions[i] for i in run.loop]
        assert loop[-1].dst == loop[0].src
        assert any(t.src in a.accepting for t in loop)

    def test_allowed_filter(self):
        a = translate(parse("G F a"))
        assert find_accepting_run(a, allowed=lambda i: False) is None

    def test_stem_is_shortest(self):
        w = check_emptiness(translate(parse("X X a & G (a -> X G !a)")))
        # two free letters, then a, then !a forever
        assert len(w.stem) == 3

    def test_accepts_examples(self):
        a = translate(parse("G (h -> X p)"))
        assert accepts(a, lasso([["h"]], [["p"]]))
        assert not accepts(a, lasso([["h"]], [["!p"]]))
        # unmentioned atoms read as false
        assert accepts(a, lasso([], [[]]))


class TestAutomatonModel:
    def test_rejects_dangling_transition(self):
        with pytest.raises(ValueError):
            BuchiAutomaton(("a",), 1, (Transition(0, Cube.of("a"), 3),), 0, frozenset())

    def test_rejects_undeclared_label_atom(self):
        with pytest.raises(ValueError):
            BuchiAutomaton(("a",), 1, (Transition(0, Cube.of("b"), 0),), 0, frozenset())

    def test_lasso_needs_a_loop(self):
        with pytest.raises(ValueError):
            LassoTrace((Cube(),), ())

    def test_lasso_positions(self):
        w = lasso([["a"], ["b"]], [["c"], []])
        assert len(w) == 4
        assert [w.successor(i) for i in range(4)] == [1, 2, 3, 2]
        assert str(w) == "{a}, {b} ({c}, {true})^w"
        assert w.to_json() == {"stem": [["a"], ["b"]], "loop": [["c"], []]}


class TestLimits:
    def test_state_cap(self):
        try:
            buchi.configure(state_cap=2)
            with pytest.raises(ResourceLimitError):
                translate(parse("X X X X a"))
        finally:
            buchi.configure(state_cap=buchi.DEFAULT_STATE_CAP)
        assert not is_empty(translate(parse("X X X X a")))


class TestDot:
    def test_false_has_no_accepting_state(self):
        dot = export_dot(translate(parse("false")))
        assert "doublecircle" not in dot
        assert len(pydot.graph_from_dot_data(dot)) == 1

    def test_globally_self_loop(self):
        dot = export_dot(translate(parse("G a")))
        (graph,) = pydot.graph_from_dot_data(dot)
        edges = [(e.get_source(), e.get_destination(), e.get_label()) for e in graph.get_edges()]
        assert ("0", "0", '"a"') in edges
        assert "doublecircle" in dot

    def test_fusion_edges_are_marked(self):
        t = Transition(0, Cube.of("h"), 0, Kind.FUSION, "p")
        a = BuchiAutomaton(("h",), 1, (t,), 0, frozenset({0}))
        dot = export_dot(a, "prod")
        assert "fuse:p" in dot and "dashed" in dot
        assert len(pydot.graph_from_dot_data(dot)) == 1

    def test_negated_motivating_goals_render(self):
        dot = export_dot(translate(parse("!(G (h -> X p) & G (m -> X !p))")))
        (graph,) = pydot.graph_from_dot_data(dot)
        assert len(graph.get_edges()) > 2
