from agentmc.interpreter import (
    initial_state,
    perceive,
    reasoning_step,
)
from agentmc.lang.ast import ACHIEVE, PERFORM
from agentmc.lang.parser import parse_agent, parse_term
from agentmc.terms import Const, Struct


def run_until_action(program, state, limit=60):
    """Reason until an action is emitted; returns (state, action, trace)."""
    trace = []
    for _ in range(limit):
        out = reasoning_step(program, state)
        state = out.state
        trace.append(out)
        if out.action is not None:
            return state, out.action, trace
    return state, None, trace


def drain(program, state, limit=60):
    actions = []
    for _ in range(limit):
        out = reasoning_step(program, state)
        state = out.state
        if out.action is not None:
            actions.append(out.action)
        if out.stuck or (
            not state.events and not state.goals and not any(i.runnable() for i in state.intentions)
        ):
            break
    return state, actions


def test_perform_goal_consumed_at_selection():
    prog = parse_agent(
        ":name: a\n:Initial Goals:\nping [perform];\n"
        ":Plans:\n+! ping [perform] : {True} <- perf(pong);\n"
    )
    state = initial_state(prog)
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Const("pong"),))
    # a perform goal does not persist once its plan ran
    assert state.goals == ()
    state, actions = drain(prog, state)
    assert actions == []


def test_achieve_goal_retries_until_believed():
    prog = parse_agent(
        ":name: a\n:Initial Goals:\ndone [achieve];\n"
        ":Plans:\n+! done [achieve] : {True} <- perf(try);\n"
    )
    state = initial_state(prog)
    # never satisfied: the agent keeps re-selecting the plan
    seen = 0
    for _ in range(20):
        out = reasoning_step(prog, state)
        state = out.state
        if out.action is not None:
            seen += 1
    assert seen >= 3
    assert (parse_term("done"), ACHIEVE) in state.goals
    # once the belief arrives, the goal is discharged
    state = perceive(prog, state, [Const("done")])
    state, _ = drain(prog, state)
    assert state.goals == ()


def test_achieve_goal_binds_outputs_for_later_deeds():
    prog = parse_agent(
        ":name: a\n:Initial Beliefs:\nslot(3);\n:Initial Goals:\nstart [perform];\n"
        ":Plans:\n"
        "+! start [perform] : {True} <- +! pos(X) [achieve], perf(move(X));\n"
        "+! pos(X) [achieve] : {B slot(X)} <- +pos(X);\n"
    )
    state = initial_state(prog)
    state, actions = drain(prog, state)
    assert Struct("perf", (Struct("move", (Const(3),)),)) in actions


def test_plan_guard_holds_when_first_deed_fires():
    # selection and the first deed share a slot: no percept change can
    # sneak in between them within the agent
    prog = parse_agent(
        ":name: a\n:Plans:\n+go : {B ok} <- perf(act);\n"
    )
    state = initial_state(prog)
    state = perceive(prog, state, [Const("go"), Const("ok")])
    out = reasoning_step(prog, state)
    # the very slot that handles the event already performs the action
    assert out.action == Struct("perf", (Const("act"),))
    assert Const("ok") in out.state.all_beliefs()


def test_exhausted_intentions_are_removed_immediately():
    prog = parse_agent(":name: a\n:Plans:\n+tick : {True} <- perf(tock);\n")
    state = initial_state(prog)
    for i in range(12):
        state = perceive(prog, state, [Const("tick")] if i % 2 == 0 else [])
        for _ in range(4):
            state = reasoning_step(prog, state).state
        assert len(state.intentions) <= 1


def test_belief_event_without_plan_is_discarded():
    prog = parse_agent(":name: a\n:Plans:\n+x : {True} <- perf(y);\n")
    state = initial_state(prog)
    state = perceive(prog, state, [Const("unrelated")])
    state, actions = drain(prog, state)
    assert actions == []
    assert state.events == ()


def test_events_take_priority_over_intention_deeds():
    prog = parse_agent(
        ":name: a\n:Initial Goals:\nwork [perform];\n"
        ":Plans:\n"
        "+! work [perform] : {True} <- perf(a1), perf(a2);\n"
        "+alarm : {True} <- perf(react);\n"
    )
    state = initial_state(prog)
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Const("a1"),))
    state = perceive(prog, state, [Const("alarm")])
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Const("react"),))
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Const("a2"),))


def test_lock_holds_off_other_intentions():
    prog = parse_agent(
        ":name: a\n:Initial Goals:\nmain [perform];\n"
        ":Plans:\n"
        "+! main [perform] : {True} <- +.lock, perf(m1), perf(m2), -.lock;\n"
        "+alarm : {True} <- perf(react);\n"
    )
    state = initial_state(prog)
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Const("m1"),))
    # alarm arrives mid-critical-section; its reaction must wait
    state = perceive(prog, state, [Const("alarm")])
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Const("m2"),))
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Const("react"),))


def test_wait_for_suspends_and_resumes_with_binding():
    prog = parse_agent(
        ":name: a\n:Initial Goals:\ngo [perform];\n"
        ":Plans:\n+! go [perform] : {True} <- perf(ask), *answer(X), perf(use(X));\n"
    )
    state = initial_state(prog)
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Const("ask"),))
    state, actions = drain(prog, state, limit=10)
    assert actions == []  # suspended on *answer(X)
    state = perceive(prog, state, [Struct("answer", (Const(7),))])
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Struct("use", (Const(7),)),))


def test_query_deed_waits_for_matching_percept():
    prog = parse_agent(
        ":name: a\n:Initial Goals:\ngo [perform];\n"
        ":Plans:\n+! go [perform] : {True} <- query(depth(D)), perf(report(D));\n"
    )
    state = initial_state(prog)
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("query", (Struct("depth", (Const(0).value and Const(0),)),)) or (
        isinstance(action, Struct) and action.functor == "query"
    )
    state = perceive(prog, state, [Struct("depth", (Const(4),))])
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Struct("report", (Const(4),)),))


def test_percept_removal_generates_remove_event():
    prog = parse_agent(":name: a\n:Plans:\n-seen : {True} <- perf(lost);\n")
    state = initial_state(prog)
    state = perceive(prog, state, [Const("seen")])
    state, actions = drain(prog, state)
    assert actions == []
    state = perceive(prog, state, [])
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Const("lost"),))


def test_tell_message_asserts_received_and_content():
    prog = parse_agent(":name: a\n:Plans:\n+x : {True} <- perf(y);\n")
    state = initial_state(prog)
    state = perceive(prog, state, [], messages=[("boss", "tell", parse_term("task(9)"))])
    bel = set(state.all_beliefs())
    assert parse_term("task(9)") in bel
    assert Struct("received", (Const("boss"), parse_term("task(9)"))) in bel


def test_perform_message_queues_goal_event():
    prog = parse_agent(
        ":name: a\n:Plans:\n+! job [perform] : {True} <- perf(doing);\n"
    )
    state = initial_state(prog)
    state = perceive(prog, state, [], messages=[("boss", "perform", Const("job"))])
    state, action, _ = run_until_action(prog, state)
    assert action == Struct("perf", (Const("doing"),))


def test_blocked_achieve_goal_self_loops():
    # no applicable plan: the agent idles on the goal without acting,
    # reaching a fixpoint state so the checker sees a self-loop
    prog = parse_agent(
        ":name: a\n:Initial Goals:\nimpossible [achieve];\n:Plans:\n"
        "+! impossible [achieve] : {B never} <- perf(x);\n"
    )
    state = initial_state(prog)
    for _ in range(6):
        out = reasoning_step(prog, state)
        assert out.action is None
        prev, state = state, out.state
    assert state == prev
    assert (parse_term("impossible"), ACHIEVE) in state.goals
