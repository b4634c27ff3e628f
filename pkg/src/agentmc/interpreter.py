"""Deterministic single-agent reasoning cycle.

One reasoning slot does exactly one unit of work: handle an event or
execute one deed.  Plan selection is free and the selected body's first
deed runs in the same slot, so a guard checked at selection still holds
when the deed it licensed fires.  Everything an agent does between two
of its actions is therefore a deterministic sequence of slots, and all
nondeterminism lives in the environment.

States are immutable and hashable so the model checker can store them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .lang.ast import (
    ACHIEVE,
    PERFORM,
    Action,
    AddBelief,
    AddGoal,
    AgentProgram,
    AssertShared,
    Calculate,
    Compute,
    DropGoal,
    Lock,
    Perf,
    Plan,
    Query,
    RemoveBelief,
    RemoveShared,
    Send,
    TriggerEvent,
    Unlock,
    WaitFor,
)
from .terms import (
    BeliefAtom,
    Const,
    Guard,
    Solver,
    Struct,
    Term,
    apply_guard_subst,
    apply_subst,
    rename_apart,
    rename_guard,
    term_vars,
    unify,
)


@dataclass(frozen=True)
class Frame:
    """One entry of an intention's goal stack."""

    goal: Optional[Term]  # None for belief-event plans
    goal_kind: Optional[str]
    deeds: tuple
    selected: bool  # a plan body is currently loaded


@dataclass(frozen=True)
class Intention:
    frames: tuple
    waiting: Optional[Guard] = None
    locked: bool = False

    def runnable(self) -> bool:
        return self.waiting is None and bool(self.frames)


@dataclass(frozen=True)
class AgentState:
    name: str
    beliefs: tuple = ()  # asserted by deeds / messages, insertion order
    percept_beliefs: tuple = ()  # sourced from perception, insertion order
    goals: tuple = ()  # ((term, kind), ...)
    events: tuple = ()
    intentions: tuple = ()
    rr: int = 0  # round-robin pointer

    def all_beliefs(self) -> tuple:
        return self.beliefs + self.percept_beliefs


@dataclass
class StepOutcome:
    state: AgentState
    action: Optional[Term] = None  # perf(t) / query(t) / send(r, c) / plain t
    messages: tuple = ()  # ((recipient, performative, content), ...)
    shared_ops: tuple = ()  # (("+"|"-", term), ...)
    stuck: bool = False


def initial_state(program: AgentProgram) -> AgentState:
    events = tuple(TriggerEvent("add_goal", g, kind) for g, kind in program.goals)
    return AgentState(name=program.name, beliefs=tuple(program.beliefs), events=events)


def make_solver(program: AgentProgram, state: AgentState) -> Solver:
    return Solver(state.all_beliefs(), program.rules, state.goals)


# ---------------------------------------------------------------------------
# perception and message intake


def perceive(program: AgentProgram, state: AgentState, percepts, messages=()) -> AgentState:
    """Update perception-sourced beliefs by diffing against the previous
    snapshot, and consume queued messages."""
    new_p: list = []
    seen = set()
    for t in percepts:
        if t not in seen:
            seen.add(t)
            new_p.append(t)
    before = set(state.beliefs) | set(state.percept_beliefs)
    after = set(state.beliefs) | seen
    events = list(state.events)
    for t in new_p:
        if t not in before:
            events.append(TriggerEvent("add_belief", t))
    for t in state.percept_beliefs:
        if t not in after:
            events.append(TriggerEvent("remove_belief", t))
    beliefs = list(state.beliefs)
    known = set(beliefs)
    for sender, performative, content in messages:
        if performative == "perform":
            events.append(TriggerEvent("add_goal", content, PERFORM))
            continue
        received = Struct("received", (Const(sender), content))
        for t in (received, content):
            if t not in known and t not in seen:
                beliefs.append(t)
                known.add(t)
                events.append(TriggerEvent("add_belief", t))
    return replace(
        state,
        beliefs=tuple(beliefs),
        percept_beliefs=tuple(new_p),
        events=tuple(events),
    )


# ---------------------------------------------------------------------------
# plan selection


def select_plan(program: AgentProgram, solver: Solver, event: TriggerEvent):
    """First applicable plan in textual order with the first guard
    solution; returns (plan, substitution) or None."""
    for plan in program.plans:
        if plan.trigger.kind != event.kind:
            continue
        if event.kind == "add_goal" and plan.trigger.goal_kind != event.goal_kind:
            continue
        mapping: dict = {}
        trig = rename_apart(plan.trigger.term, mapping)
        s0 = unify(trig, event.term)
        if s0 is None:
            continue
        guard = rename_guard(plan.guard, mapping)
        sol = solver.first(guard, s0)
        if sol is None:
            continue
        body = tuple(subst_deed(rename_deed(d, mapping), sol) for d in plan.body)
        return plan, sol, body
    return None


def rename_deed(d, mapping: dict):
    if isinstance(d, (AddBelief, RemoveBelief, Action, Perf, Query, AssertShared, RemoveShared)):
        return type(d)(rename_apart(d.term, mapping))
    if isinstance(d, (AddGoal, DropGoal)):
        return type(d)(rename_apart(d.term, mapping), d.goal_kind)
    if isinstance(d, WaitFor):
        return WaitFor(rename_guard(d.guard, mapping))
    if isinstance(d, Send):
        return Send(rename_apart(d.recipient, mapping), d.performative, rename_apart(d.content, mapping))
    if isinstance(d, Compute):
        return Compute(rename_apart(d.var, mapping), rename_apart(d.expr, mapping))
    if isinstance(d, Calculate):
        return Calculate(rename_apart(d.expr, mapping), rename_apart(d.result, mapping))
    return d


def subst_deed(d, s) -> object:
    if isinstance(d, (AddBelief, RemoveBelief, Action, Perf, Query, AssertShared, RemoveShared)):
        return type(d)(apply_subst(d.term, s))
    if isinstance(d, (AddGoal, DropGoal)):
        return type(d)(apply_subst(d.term, s), d.goal_kind)
    if isinstance(d, WaitFor):
        return WaitFor(apply_guard_subst(d.guard, s))
    if isinstance(d, Send):
        return Send(apply_subst(d.recipient, s), d.performative, apply_subst(d.content, s))
    if isinstance(d, Compute):
        return Compute(apply_subst(d.var, s), apply_subst(d.expr, s))
    if isinstance(d, Calculate):
        return Calculate(apply_subst(d.expr, s), apply_subst(d.result, s))
    return d


def _subst_frames(frames: tuple, s: dict) -> tuple:
    if not s:
        return frames
    return tuple(
        Frame(
            apply_subst(f.goal, s) if f.goal is not None else None,
            f.goal_kind,
            tuple(subst_deed(d, s) for d in f.deeds),
            f.selected,
        )
        for f in frames
    )


# ---------------------------------------------------------------------------
# the reasoning slot


class _Ctx:
    """Mutable scratch copy of an agent state during one slot."""

    def __init__(self, program: AgentProgram, state: AgentState):
        self.program = program
        self.beliefs = list(state.beliefs)
        self.percepts = list(state.percept_beliefs)
        self.goals = list(state.goals)
        self.events = list(state.events)
        self.intentions = [it for it in state.intentions]
        self.rr = state.rr
        self.name = state.name
        self.action: Optional[Term] = None
        self.messages: list = []
        self.shared_ops: list = []

    def solver(self) -> Solver:
        return Solver(self.beliefs + self.percepts, self.program.rules, self.goals)

    def freeze(self) -> AgentState:
        return AgentState(
            self.name,
            tuple(self.beliefs),
            tuple(self.percepts),
            tuple(self.goals),
            tuple(self.events),
            tuple(self.intentions),
            self.rr,
        )

    # --- belief/goal base edits ------------------------------------------

    def add_belief(self, t: Term):
        union = set(self.beliefs) | set(self.percepts)
        if t in union:
            if t not in self.beliefs:
                self.beliefs.append(t)
            return
        self.beliefs.append(t)
        self.events.append(TriggerEvent("add_belief", t))

    def remove_belief(self, t: Term):
        target = None
        for b in self.beliefs:
            if unify(t, b) is not None:
                target = b
                break
        if target is None:
            return
        self.beliefs.remove(target)
        if target not in self.percepts and target not in self.beliefs:
            self.events.append(TriggerEvent("remove_belief", target))

    def add_goal(self, g: Term, kind: str):
        if (g, kind) not in self.goals:
            self.goals.append((g, kind))

    def drop_goal(self, g: Term, kind: str):
        self.goals = [(t, k) for (t, k) in self.goals if not (k == kind and unify(g, t) is not None)]
        survivors = []
        for it in self.intentions:
            cut = None
            for i, f in enumerate(it.frames):
                if f.goal is not None and f.goal_kind == kind and unify(g, f.goal) is not None:
                    cut = i
                    break
            if cut is None:
                survivors.append(it)
            elif cut > 0:
                survivors.append(replace(it, frames=it.frames[:cut], waiting=None))
            # cut == 0: whole intention dropped
        self.intentions = survivors


def reasoning_step(program: AgentProgram, state: AgentState) -> StepOutcome:
    ctx = _Ctx(program, state)

    _resume_waiters(ctx)
    _goal_hygiene(ctx)

    locked = [i for i, it in enumerate(ctx.intentions) if it.locked]
    if locked:
        idx = locked[0]
        if ctx.intentions[idx].runnable():
            _intention_slot(ctx, idx)
        return _finish(ctx, stuck=False)

    if ctx.events:
        _handle_event(ctx)
        return _finish(ctx, stuck=False)

    runnable = [i for i, it in enumerate(ctx.intentions) if it.runnable()]
    if runnable:
        start = ctx.rr % max(len(ctx.intentions), 1)
        ordered = sorted(runnable, key=lambda i: (i < start, i))
        idx = ordered[0]
        ctx.rr = (idx + 1) % max(len(ctx.intentions), 1)
        _intention_slot(ctx, idx)
        return _finish(ctx, stuck=False)

    stuck = bool(ctx.goals) or bool(ctx.intentions)
    return _finish(ctx, stuck=stuck)


def _finish(ctx: _Ctx, stuck: bool) -> StepOutcome:
    return StepOutcome(
        ctx.freeze(),
        action=ctx.action,
        messages=tuple(ctx.messages),
        shared_ops=tuple(ctx.shared_ops),
        stuck=stuck,
    )


def _resume_waiters(ctx: _Ctx):
    solver = ctx.solver()
    out = []
    for it in ctx.intentions:
        if it.waiting is not None:
            sol = solver.first(it.waiting)
            if sol is not None:
                from .terms import guard_vars

                binding = {v: t for v, t in sol.items() if v in guard_vars(it.waiting)}
                it = Intention(_subst_frames(it.frames, binding), None, it.locked)
        out.append(it)
    ctx.intentions = out


def _goal_hygiene(ctx: _Ctx):
    """Drop achieve goals that are already believed and not being pursued
    by any frame (their events would otherwise requeue forever)."""
    pursued = {
        (f.goal, f.goal_kind) for it in ctx.intentions for f in it.frames if f.goal is not None
    }
    solver = ctx.solver()
    kept = []
    for g, kind in ctx.goals:
        if kind == ACHIEVE and (g, kind) not in pursued and solver.first(BeliefAtom(g)) is not None:
            continue
        kept.append((g, kind))
    ctx.goals = kept


def _handle_event(ctx: _Ctx):
    """Handle one pending event: select a plan and, when one applies, start
    its body immediately. Running the first deed in the same slot keeps the
    guard that licensed the plan true when that deed fires."""
    ev = ctx.events.pop(0)
    solver = ctx.solver()
    if ev.kind == "add_goal":
        if ev.goal_kind == ACHIEVE and solver.first(BeliefAtom(ev.term)) is not None:
            return
        picked = select_plan(ctx.program, solver, ev)
        if picked is not None:
            _, _, body = picked
            if ev.goal_kind == ACHIEVE:
                ctx.add_goal(ev.term, ev.goal_kind)
                frame = Frame(ev.term, ev.goal_kind, body, True)
            else:
                # a perform goal is consumed by executing one plan; once the
                # plan is picked there is no pending goal left to drop
                frame = Frame(None, None, body, True)
            ctx.intentions.append(Intention((frame,)))
            _intention_slot(ctx, len(ctx.intentions) - 1)
        elif ev.goal_kind == ACHIEVE:
            # keep attempting: pursued by an unselected frame
            ctx.add_goal(ev.term, ev.goal_kind)
            ctx.intentions.append(Intention((Frame(ev.term, ev.goal_kind, (), False),)))
        # an unplannable perform goal is dropped
        return
    picked = select_plan(ctx.program, solver, ev)
    if picked is not None:
        _, _, body = picked
        ctx.intentions.append(Intention((Frame(None, None, body, True),)))
        _intention_slot(ctx, len(ctx.intentions) - 1)
    # belief events without an applicable plan are discarded


def _intention_slot(ctx: _Ctx, idx: int) -> bool:
    """Run one slot of intention idx. Returns False when the intention is
    blocked (an achieve goal with no applicable plan) so the scheduler can
    hand the slot sequence to another intention."""
    it = ctx.intentions[idx]
    frames = list(it.frames)

    # frame maintenance is free; the slot is spent on a deed or a selection
    while True:
        if not frames:
            ctx.intentions = [x for i, x in enumerate(ctx.intentions) if i != idx]
            return True
        f = frames[-1]
        if f.deeds:
            break
        if f.goal is None:
            frames.pop()
            continue
        solver = ctx.solver()
        if f.goal_kind == ACHIEVE:
            sol = solver.first(BeliefAtom(f.goal))
            if sol is not None:
                binding = {v: t for v, t in sol.items() if v in term_vars(f.goal)}
                ctx.goals = [(t, k) for (t, k) in ctx.goals if not (t == f.goal and k == f.goal_kind)]
                frames.pop()
                frames = list(_subst_frames(tuple(frames), binding))
                continue
            picked = select_plan(ctx.program, solver, TriggerEvent("add_goal", f.goal, f.goal_kind))
            if picked is not None:
                _, _, body = picked
                if not body:
                    # an empty body cannot fill the slot; burn it as a retry
                    ctx.intentions[idx] = Intention(tuple(frames), None, it.locked)
                    return True
                frames[-1] = Frame(f.goal, f.goal_kind, body, True)
                continue  # selection is free; the body's first deed fills the slot
            ctx.intentions[idx] = Intention(tuple(frames), None, it.locked)
            return False  # blocked goal: retried once beliefs change
        # pending perform goal: consumed from the goal base as soon as a
        # plan is picked, so a later goal-drop only cancels pending ones
        picked = select_plan(ctx.program, solver, TriggerEvent("add_goal", f.goal, f.goal_kind))
        ctx.goals = [(t, k) for (t, k) in ctx.goals if not (t == f.goal and k == f.goal_kind)]
        if picked is not None:
            _, _, body = picked
            frames[-1] = Frame(None, None, body, True)
        else:
            frames.pop()
        continue  # selection is free here too

    deed = frames[-1].deeds[0]
    rest = frames[-1].deeds[1:]
    frames[-1] = replace(frames[-1], deeds=rest)
    locked = it.locked
    waiting: Optional[Guard] = None

    if isinstance(deed, AddBelief):
        ctx.intentions[idx] = Intention(tuple(frames), None, locked)
        ctx.add_belief(deed.term)
        return True
    if isinstance(deed, RemoveBelief):
        ctx.intentions[idx] = Intention(tuple(frames), None, locked)
        ctx.remove_belief(deed.term)
        return True
    if isinstance(deed, AddGoal):
        solver = ctx.solver()
        if deed.goal_kind == ACHIEVE:
            sol = solver.first(BeliefAtom(deed.term))
            if sol is not None:
                binding = {v: t for v, t in sol.items() if v in term_vars(deed.term)}
                frames = list(_subst_frames(tuple(frames), binding))
                ctx.intentions[idx] = Intention(tuple(frames), None, locked)
                return True
        ctx.add_goal(deed.term, deed.goal_kind)
        # exhausted goalless frames beneath carry no pending work; keeping
        # them would let tail-recursive goals grow the stack without bound
        frames = [f for f in frames if f.deeds or f.goal is not None]
        frames.append(Frame(deed.term, deed.goal_kind, (), False))
        ctx.intentions[idx] = Intention(tuple(frames), None, locked)
        return True
    if isinstance(deed, DropGoal):
        ctx.intentions[idx] = Intention(tuple(frames), None, locked)
        ctx.drop_goal(deed.term, deed.goal_kind)
        return True
    if isinstance(deed, Action):
        ctx.action = deed.term
    elif isinstance(deed, Perf):
        ctx.action = Struct("perf", (deed.term,))
    elif isinstance(deed, Query):
        ctx.action = Struct("query", (deed.term,))
        waiting = BeliefAtom(deed.term)
    elif isinstance(deed, WaitFor):
        sol = ctx.solver().first(deed.guard)
        if sol is None:
            waiting = deed.guard
        else:
            from .terms import guard_vars

            binding = {v: t for v, t in sol.items() if v in guard_vars(deed.guard)}
            frames = list(_subst_frames(tuple(frames), binding))
    elif isinstance(deed, Lock):
        locked = True
    elif isinstance(deed, Unlock):
        locked = False
    elif isinstance(deed, Send):
        rec, _ = _functor_name(deed.recipient)
        ctx.messages.append((rec, deed.performative, deed.content))
        ctx.action = Struct("send", (deed.recipient, deed.content))
    elif isinstance(deed, AssertShared):
        ctx.shared_ops.append(("+", deed.term))
    elif isinstance(deed, RemoveShared):
        ctx.shared_ops.append(("-", deed.term))
    elif isinstance(deed, Compute):
        from .terms import eval_arith

        val = eval_arith(deed.expr, {})
        if val is not None and hasattr(deed.var, "name"):
            frames = list(_subst_frames(tuple(frames), {deed.var.name: Const(val)}))
    elif isinstance(deed, Calculate):
        pass  # only meaningful to an abstraction layer; inert here
    if waiting is None:
        # drop exhausted goalless frames now rather than spending a later
        # slot on them; events would otherwise starve the cleanup
        frames = [f for f in frames if f.deeds or f.goal is not None]
        if not frames:
            # a lock dies with its intention
            ctx.intentions = [x for i, x in enumerate(ctx.intentions) if i != idx]
            return True
    ctx.intentions[idx] = Intention(tuple(frames), waiting, locked)
    return True


def _functor_name(t: Term) -> tuple:
    if isinstance(t, Const):
        return str(t.value), 0
    if isinstance(t, Struct):
        return t.functor, len(t.args)
    return repr(t), 0
