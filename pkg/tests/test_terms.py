import pytest
from hypothesis import given, strategies as st

from agentmc.terms import (
    BeliefAtom,
    BeliefRule,
    Comparison,
    Conjunction,
    Const,
    GoalAtom,
    Negation,
    Solver,
    Struct,
    Var,
    apply_subst,
    eval_arith,
    is_ground,
    mk,
    term_vars,
    unify,
)


def c(v):
    return Const(v)


def test_unify_basic():
    s = unify(Var("X"), c("a"))
    assert s is not None and apply_subst(Var("X"), s) == c("a")
    assert unify(c("a"), c("b")) is None
    assert unify(mk("f", Var("X"), c(1)), mk("f", c(2), Var("Y"))) == {
        "X": c(2),
        "Y": c(1),
    }


def test_unify_occurs_check():
    assert unify(Var("X"), mk("f", Var("X"))) is None


def test_unify_arity_mismatch():
    assert unify(mk("f", c(1)), mk("f", c(1), c(2))) is None
    assert unify(mk("f", c(1)), mk("g", c(1))) is None


def test_unify_shared_variable_chains():
    s = unify(mk("p", Var("X"), Var("X")), mk("p", Var("Y"), c(3)))
    assert s is not None
    assert apply_subst(Var("X"), s) == c(3)
    assert apply_subst(Var("Y"), s) == c(3)


# random ground terms for round-trip properties
ground_terms = st.recursive(
    st.sampled_from([c("a"), c("b"), c(0), c(1)]),
    lambda kids: st.builds(lambda args: Struct("f", tuple(args)), st.lists(kids, min_size=1, max_size=3)),
    max_leaves=8,
)


@given(ground_terms)
def test_ground_terms_unify_with_themselves(t):
    assert is_ground(t)
    assert unify(t, t) == {}


@given(ground_terms, ground_terms)
def test_unify_is_symmetric_on_ground_terms(a, b):
    assert (unify(a, b) is None) == (unify(b, a) is None)


def test_term_vars():
    assert term_vars(mk("f", Var("X"), mk("g", Var("Y"), c(1)))) == {"X", "Y"}
    assert term_vars(c("a")) == set()


def test_eval_arith():
    plus = Struct("+", (c(2), c(3)))
    assert eval_arith(plus, {}) == 5
    minus = Struct("-", (Var("I"), c(1)))
    assert eval_arith(minus, {"I": c(4)}) == 3
    assert eval_arith(Struct("+", (c("a"), c(1))), {}) is None


def make_solver(beliefs, rules=(), goals=()):
    return Solver(tuple(beliefs), tuple(rules), tuple(goals))


def test_solver_facts_and_negation():
    s = make_solver([mk("p", c(1)), mk("p", c(2)), c("q")])
    assert s.holds(BeliefAtom(mk("p", Var("X"))))
    assert sorted(sol["X"].value for sol in s.solve(BeliefAtom(mk("p", Var("X"))))) == [1, 2]
    assert s.holds(Negation(BeliefAtom(c("r"))))
    assert not s.holds(Negation(BeliefAtom(c("q"))))


def test_solver_rules_chain():
    # a :- b & c, with c derived from d
    rules = [
        BeliefRule(c("a"), Conjunction((BeliefAtom(c("b")), BeliefAtom(c("cc"))))),
        BeliefRule(c("cc"), BeliefAtom(c("d"))),
    ]
    s = make_solver([c("b"), c("d")], rules)
    assert s.holds(BeliefAtom(c("a")))
    s2 = make_solver([c("b")], rules)
    assert not s2.holds(BeliefAtom(c("a")))


def test_solver_rule_with_variables():
    rules = [
        BeliefRule(
            mk("repairable", Var("X")),
            BeliefAtom(mk("line", Var("X"), c(1))),
        )
    ]
    s = make_solver([mk("line", c("x"), c(1)), mk("line", c("y"), c(2))], rules)
    sols = list(s.solve(BeliefAtom(mk("repairable", Var("W")))))
    assert [apply_subst(Var("W"), sol) for sol in sols] == [c("x")]


def test_solver_goal_atoms():
    s = make_solver([], goals=((c("g"), "achieve"),))
    assert s.holds(GoalAtom(c("g"), "achieve"))
    assert not s.holds(GoalAtom(c("g"), "perform"))
    assert s.holds(Negation(GoalAtom(c("h"), "achieve")))


def test_solver_comparison():
    s = make_solver([])
    assert s.holds(Comparison(c(1), "<", c(2)))
    assert not s.holds(Comparison(c(2), "<", c(1)))
    assert s.holds(Comparison(Struct("+", (c(1), c(1))), "=", c(2)))
    # "=" with an unbound side acts as a computed binding
    sol = s.first(Comparison(Var("J"), "=", Struct("+", (c(1), c(1)))))
    assert sol is not None and apply_subst(Var("J"), sol) == c(2)


def test_solver_negation_scopes_local_variables():
    # lnot B p(X) with X free succeeds only when no p fact exists at all
    s = make_solver([mk("p", c(1))])
    assert not s.holds(Negation(BeliefAtom(mk("p", Var("X")))))
    s2 = make_solver([mk("q", c(1))])
    assert s2.holds(Negation(BeliefAtom(mk("p", Var("X")))))
