from pathlib import Path

import pytest

from agentmc.env import EnvError, MAS, PerceptGroup, MessageGroup, load_env
from agentmc.lang.parser import parse_agent, parse_term
from agentmc.terms import Const, Struct

CORPUS = Path(__file__).resolve().parents[1] / "src" / "agentmc" / "corpus"


def single_agent(src):
    return parse_agent(src)


ACTOR = (
    ":name: actor\n:Initial Goals:\ngo [perform];\n"
    ":Plans:\n+! go [perform] : {True} <- perf(a1), perf(a2);\n"
)


def test_percept_group_choices():
    assert PerceptGroup("optional", (Const("p"),)).choices() == [(), (Const("p"),)]
    assert PerceptGroup("always", (Const("p"),)).choices() == [(Const("p"),)]
    assert PerceptGroup("one_of", (Const("a"), Const("b"))).choices() == [
        (Const("a"),),
        (Const("b"),),
    ]
    assert PerceptGroup("maybe_one_of", (Const("a"),)).choices() == [(), (Const("a"),)]
    with pytest.raises(EnvError):
        PerceptGroup("sometimes", (Const("p"),)).choices()


def test_branching_only_at_action_points():
    mas = MAS([single_agent(ACTOR)], percept_groups=[PerceptGroup("optional", (Const("p"),))])
    inits = mas.initial_states()
    assert len(inits) == 2  # the root also branches over percepts
    s = inits[0]
    # walk to the first action point
    while True:
        succs = mas.successors(s)
        if any(t.last_action for t in succs):
            break
        assert len(succs) == 1  # deterministic between actions
        s = succs[0]
    acted = [t for t in mas.successors(s) if t.last_action]
    assert len(acted) == 2  # percept present / absent
    names = {t.last_action[0] for t in acted}
    assert names == {"actor"}


def test_percepts_persist_between_action_points():
    mas = MAS([single_agent(ACTOR)], percept_groups=[PerceptGroup("optional", (Const("p"),))])
    s = mas.initial_states()[0]
    for _ in range(20):
        succs = mas.successors(s)
        s = succs[-1]
        if s.last_action and s.percepts:
            break
    assert s.percepts == (Const("p"),)
    # non-action steps keep the same assignment
    nxt = mas.successors(s)
    if not nxt[0].last_action:
        assert nxt[0].percepts == s.percepts


def test_duplicate_agent_names_rejected():
    with pytest.raises(EnvError):
        MAS([single_agent(ACTOR), single_agent(ACTOR)])


def test_message_once_is_spent():
    prog = parse_agent(
        ":name: recv\n:Initial Goals:\nspin [perform];\n"
        ":Plans:\n"
        "+! spin [perform] : {True} <- perf(tick), +! spin [perform];\n"
        "+note : {True} <- perf(got);\n"
    )
    mas = MAS(
        [prog],
        message_groups=[MessageGroup("recv", "tell", Const("note"), mode="once")],
    )
    inits = mas.initial_states()
    # exhaustively walk a few layers: once a state has the group spent,
    # no successor may deliver it again
    frontier, seen = list(inits), set(inits)
    delivered_twice = False
    for _ in range(400):
        if not frontier:
            break
        s = frontier.pop()
        for t in mas.successors(s):
            if s.delivered and not t.delivered >= s.delivered:
                delivered_twice = True
            if t not in seen:
                seen.add(t)
                frontier.append(t)
    assert not delivered_twice


def test_agent_messages_route_between_agents():
    sender = parse_agent(
        ":name: src\n:Initial Goals:\ngo [perform];\n"
        ":Plans:\n+! go [perform] : {True} <- .send(dst, :tell, hello(1));\n"
    )
    receiver = parse_agent(
        ":name: dst\n:Plans:\n+hello(X) : {True} <- perf(ack(X));\n"
    )
    mas = MAS([sender, receiver])
    # find any run where dst acks
    frontier = list(mas.initial_states())
    seen = set(frontier)
    acked = False
    while frontier and not acked:
        s = frontier.pop()
        for t in mas.successors(s):
            if t.last_action == ("dst", Struct("perf", (Struct("ack", (Const(1),)),))):
                acked = True
            if t not in seen:
                seen.add(t)
                frontier.append(t)
    assert acked


def test_load_env_corpus_files():
    for path in sorted(CORPUS.glob("*/*.env")) + sorted(CORPUS.glob("*/mutants/*.env")):
        mas = load_env(path)
        assert mas.programs
        assert mas.initial_states()


def test_load_env_visibility_and_extras(tmp_path):
    (tmp_path / "a.agent").write_text(
        ":name: placeholder\n:Plans:\n+x : {True} <- perf(y);\n"
    )
    (tmp_path / "e.env").write_text(
        "name: demo\n"
        "agents:\n"
        "  - {file: a.agent, name: ag1, beliefs: [mine(1)], goals: ['run [perform]']}\n"
        "shared: [board]\n"
        "percepts:\n"
        "  - {mode: optional, term: blip, agents: [ag1]}\n"
    )
    mas = load_env(tmp_path / "e.env")
    assert mas.agent_names == ["ag1"]
    prog = mas.programs[0]
    assert parse_term("mine(1)") in prog.beliefs
    assert (parse_term("run"), "perform") in prog.goals
    for s0 in mas.initial_states():
        assert s0.sigma == (Const("board"),)
