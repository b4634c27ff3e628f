import random

import pytest

from agentmc.buchi import to_nnf
from agentmc.checker import (
    StateLimitExceeded,
    _conjunction_automaton,
    _conjuncts,
    check,
    compose,
    prove,
    replay,
)
from agentmc.buchi import is_empty
from agentmc.env import MAS, PerceptGroup
from agentmc.formula import (
    And,
    Eventually,
    Globally,
    Implies,
    Not,
    Or,
    eval_on_lasso,
)
from agentmc.lang.parser import parse_agent
from agentmc.psl import AAtom, BAtom, PAtom
from agentmc.terms import Const

p, q = "p", "q"


# --- validity proving -------------------------------------------------------


def test_prover_accepts_k_axioms():
    assert prove(Implies(Globally(p), p)).provable
    assert prove(Implies(Globally(Implies(p, q)), Implies(Globally(p), Globally(q)))).provable
    assert prove(Not(And(Eventually(p), Globally(Not(p))))).provable


def test_prover_rejects_eventually_p_with_countermodel():
    out = prove(Eventually(p))
    assert not out.provable
    cm = out.countermodel
    assert cm is not None
    # the countermodel never makes p true
    for letter in cm.prefix + cm.cycle:
        assert p not in letter
    # and it genuinely falsifies the formula
    word = cm.prefix + cm.cycle
    assert not eval_on_lasso(Eventually(p), word, len(cm.prefix))


def test_prover_classical_tautologies():
    assert prove(Or(p, Not(p))).provable
    assert prove(Implies(And(p, q), p)).provable
    assert not prove(Implies(Or(p, q), p)).provable


def test_prover_premise_heavy_implication():
    # shaped like a composition obligation: boxes as premises
    f = Implies(
        And(Globally(Implies(p, Eventually(q))), Globally(p)),
        Globally(Eventually(q)),
    )
    assert prove(f).provable


def test_letter_product_matches_tuple_product():
    # formulas whose negation has a global propositional conjunct take
    # the letter-constraint route; cross-check against the plain product
    cases = [
        Implies(Globally(p), Eventually(p)),
        Implies(Globally(Implies(p, q)), Implies(Eventually(p), Eventually(q))),
        Implies(Globally(Not(p)), Not(Eventually(p))),
        Implies(Globally(p), Globally(Eventually(p))),
    ]
    for f in cases:
        parts = _conjuncts(to_nnf(Not(f)))
        via_product = is_empty(_conjunction_automaton(parts, 0)) is None
        assert prove(f).provable == via_product


def test_countermodels_always_falsify(subtests=None):
    rng = random.Random(7)
    from agentmc.ltl_oracle import random_formula

    for _ in range(40):
        f = random_formula(rng, max_ops=5, atoms=(p, q))
        out = prove(f)
        if not out.provable:
            cm = out.countermodel
            word = cm.prefix + cm.cycle
            assert not eval_on_lasso(f, word, len(cm.prefix)), f


# --- system checking --------------------------------------------------------


def braking_mas():
    prog = parse_agent(
        ":name: car\n:Initial Goals:\ncruise [perform];\n"
        ":Plans:\n"
        "+! cruise [perform] : {True} <- perf(start), +! roll [perform];\n"
        "+! roll [perform] : {B danger} <- perf(brake), +! roll [perform];\n"
        "+! roll [perform] : {lnotB danger} <- perf(coast), +! roll [perform];\n"
    )
    return MAS([prog], percept_groups=[PerceptGroup("optional", (Const("danger"),))])


def test_check_holds_for_guarded_action():
    mas = braking_mas()
    f = Globally(Implies(AAtom("car", Const("brake")), BAtom("car", Const("danger"))))
    v = check(mas, f)
    assert v.holds
    assert v.states > 0 and v.transitions >= v.states - 1


def test_check_fails_with_replayable_counterexample():
    mas = braking_mas()
    f = Globally(Not(AAtom("car", Const("brake"))))
    v = check(mas, f)
    assert not v.holds
    assert replay(mas, v)


def test_check_respects_hypotheses():
    mas = braking_mas()
    f = Globally(Not(AAtom("car", Const("brake"))))
    quiet = Globally(Not(PAtom(Const("danger"))))
    v = check(mas, f, hyps=[quiet])
    assert v.holds


def test_check_state_cap():
    mas = braking_mas()
    f = Globally(Not(AAtom("car", Const("brake"))))
    with pytest.raises(StateLimitExceeded):
        check(mas, f, state_cap=3)


def test_replay_rejects_tampered_counterexample():
    mas = braking_mas()
    f = Globally(Not(AAtom("car", Const("brake"))))
    v = check(mas, f)
    v.counterexample.cycle = v.counterexample.cycle + v.counterexample.prefix[:1]
    assert not replay(mas, v)


# --- composition ------------------------------------------------------------


def test_compose_discharges_goal_from_premises():
    prem = [
        ("step1", Globally(Implies(p, Eventually(q))), "verified"),
        ("live", Globally(Eventually(p)), "assumed"),
    ]
    out = compose(prem, Globally(Eventually(q)))
    assert out.provable
    assert out.premises == (("step1", "verified"), ("live", "assumed"))


def test_compose_fails_without_needed_premise():
    out = compose([("only", Globally(Implies(p, Eventually(q))), "verified")], Globally(Eventually(q)))
    assert not out.provable
    assert out.countermodel is not None
