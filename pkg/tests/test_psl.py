import pytest

from agentmc.env import MAS, MASState
from agentmc.formula import And, Eventually, Globally, Implies, Not, Or, Until
from agentmc.interpreter import initial_state
from agentmc.lang.parser import ParseError, parse_agent, parse_term
from agentmc.psl import (
    AAtom,
    BAtom,
    GAtom,
    IAtom,
    PAtom,
    eval_atom,
    expand_quantifiers,
    ground_property,
    parse_props,
    state_letter,
)
from agentmc.terms import Const, Struct, Var

SRC = """
domain cells = { at(1,1), at(1,2) };

hypothesis Fair = [] <> P(tick);

property visits = [] (B(bot, ready) -> <> A(bot, move));
property covered assumes Fair = forall C in cells . <> P(C);
property chained = @Fair -> <> P(done);
"""


def test_parse_props_structure():
    pf = parse_props(SRC)
    assert set(pf.properties) == {"visits", "covered", "chained"}
    assert set(pf.hypotheses) == {"Fair"}
    assert pf.properties["covered"].assumes == ("Fair",)
    f = pf.properties["visits"].formula
    assert isinstance(f, Globally)
    assert isinstance(f.sub, Implies)
    assert f.sub.left == BAtom("bot", Const("ready"))


def test_quantifier_expansion():
    pf = parse_props(SRC)
    g = ground_property(pf, "covered")
    f = g.formula if hasattr(g, "formula") else g
    # forall over two cells becomes a conjunction of two eventualities
    flat = expand_quantifiers(pf.properties["covered"].formula, pf.domains)
    assert isinstance(flat, And)
    assert isinstance(flat.left, Eventually)
    assert flat.left.sub == PAtom(parse_term("at(1,1)"))


def test_splice_reuses_named_formula():
    pf = parse_props(SRC)
    f = pf.properties["chained"].formula
    assert isinstance(f, Implies)
    assert f.left == pf.hypotheses["Fair"]


def test_parse_error_on_unknown_splice():
    with pytest.raises((ParseError, KeyError)):
        parse_props("property p = @missing;")


def mini_mas():
    prog = parse_agent(
        ":name: bot\n:Initial Beliefs:\nready;\n:Initial Goals:\npatrol [achieve];\n"
        ":Plans:\n+! patrol [achieve] : {True} <- perf(move);\n"
    )
    return MAS([prog])


def test_eval_atom_modalities():
    mas = mini_mas()
    (s0,) = mas.initial_states()
    assert eval_atom(BAtom("bot", Const("ready")), mas, s0)
    assert not eval_atom(BAtom("bot", Const("done")), mas, s0)
    assert not eval_atom(BAtom("ghost", Const("ready")), mas, s0)
    # action pulse: matches both the wrapped and the bare term
    s = s0
    while s.last_action is None:
        s = mas.successors(s)[0]
    assert eval_atom(AAtom("bot", Const("move")), mas, s)
    assert eval_atom(AAtom("bot", Struct("perf", (Const("move"),))), mas, s)
    assert not eval_atom(AAtom("bot", Const("jump")), mas, s)
    # the pulse clears on the next non-action state
    nxt = mas.successors(s)[0]
    if nxt.last_action is None:
        assert not eval_atom(AAtom("bot", Const("move")), mas, nxt)


def test_eval_goal_and_intend_atoms():
    mas = mini_mas()
    (s0,) = mas.initial_states()
    # the initial goal event has not been handled yet
    s = s0
    for _ in range(5):
        if eval_atom(GAtom("bot", Const("patrol")), mas, s):
            break
        s = mas.successors(s)[0]
    assert eval_atom(GAtom("bot", Const("patrol")), mas, s)
    # intending needs a selected frame for the goal
    t = s
    for _ in range(5):
        if eval_atom(IAtom("bot", Const("patrol")), mas, t):
            break
        t = mas.successors(t)[0]
    assert eval_atom(IAtom("bot", Const("patrol")), mas, t)


def test_eval_percept_atom_covers_shared_beliefs():
    mas = mini_mas()
    (s0,) = mas.initial_states()
    s = MASState(
        agents=s0.agents,
        sigma=(parse_term("flag(3)"),),
        percepts=(Const("blip"),),
        inboxes=s0.inboxes,
    )
    assert eval_atom(PAtom(Const("blip")), mas, s)
    assert eval_atom(PAtom(parse_term("flag(X)")), mas, s)
    assert not eval_atom(PAtom(Const("other")), mas, s)


def test_belief_atom_uses_rules_and_rec_rewrite():
    prog = parse_agent(
        ":name: bot\n:Rules:\nB ok :- B received(boss, go);\n:Plans:\n+x : {True} <- perf(y);\n"
    )
    mas = MAS([prog])
    (s0,) = mas.initial_states()
    agents = list(s0.agents)
    st = agents[0]
    st = type(st)(**{**st.__dict__, "beliefs": (parse_term("received(boss, go)"),)})
    agents[0] = st
    s = MASState(agents=tuple(agents), inboxes=s0.inboxes)
    assert eval_atom(BAtom("bot", Const("ok")), mas, s)
    # rec(,) in a property is shorthand for received(,)
    assert eval_atom(BAtom("bot", parse_term("rec(boss, go)")), mas, s)


def test_state_letter():
    mas = mini_mas()
    (s0,) = mas.initial_states()
    atoms = (BAtom("bot", Const("ready")), PAtom(Const("nope")))
    assert state_letter(mas, s0, atoms) == frozenset({BAtom("bot", Const("ready"))})
