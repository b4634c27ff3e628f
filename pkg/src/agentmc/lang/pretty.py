"""Render agent programs back to their surface syntax."""

from __future__ import annotations

from ..terms import (
    BeliefAtom,
    Comparison,
    Conjunction,
    Const,
    GoalAtom,
    Guard,
    Negation,
    Struct,
    Term,
    TrueGuard,
    Var,
)
from .ast import (
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


def fmt_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        if isinstance(t.value, str) and not t.value.isidentifier():
            return '"%s"' % t.value
        return str(t.value)
    if isinstance(t, Struct):
        if t.functor in ("+", "-") and len(t.args) == 2:
            return "%s %s %s" % (fmt_term(t.args[0]), t.functor, fmt_term(t.args[1]))
        return "%s(%s)" % (t.functor, ", ".join(fmt_term(a) for a in t.args))
    raise TypeError(t)


def fmt_guard(g: Guard) -> str:
    if isinstance(g, TrueGuard):
        return "True"
    if isinstance(g, BeliefAtom):
        return "B %s" % fmt_term(g.term)
    if isinstance(g, GoalAtom):
        k = " [%s]" % g.kind if g.kind else ""
        return "G %s%s" % (fmt_term(g.term), k)
    if isinstance(g, Negation):
        if isinstance(g.body, (Conjunction,)):
            return "lnot (%s)" % fmt_guard(g.body)
        return "lnot %s" % fmt_guard(g.body)
    if isinstance(g, Conjunction):
        return ", ".join(
            "(%s)" % fmt_guard(p) if isinstance(p, Conjunction) else fmt_guard(p) for p in g.parts
        )
    if isinstance(g, Comparison):
        return "%s %s %s" % (fmt_term(g.left), g.op, fmt_term(g.right))
    raise TypeError(g)


def fmt_deed(d) -> str:
    if isinstance(d, AddBelief):
        return "+%s" % fmt_term(d.term)
    if isinstance(d, RemoveBelief):
        return "-%s" % fmt_term(d.term)
    if isinstance(d, AddGoal):
        return "+!%s [%s]" % (fmt_term(d.term), d.goal_kind)
    if isinstance(d, DropGoal):
        return "-!%s [%s]" % (fmt_term(d.term), d.goal_kind)
    if isinstance(d, Action):
        return fmt_term(d.term)
    if isinstance(d, Perf):
        return "perf(%s)" % fmt_term(d.term)
    if isinstance(d, Query):
        return ".query(%s)" % fmt_term(d.term)
    if isinstance(d, WaitFor):
        if isinstance(d.guard, BeliefAtom):
            return "*%s" % fmt_term(d.guard.term)
        return "*(%s)" % fmt_guard(d.guard)
    if isinstance(d, Lock):
        return "+.lock"
    if isinstance(d, Unlock):
        return "-.lock"
    if isinstance(d, Send):
        return ".send(%s, :%s, %s)" % (fmt_term(d.recipient), d.performative, fmt_term(d.content))
    if isinstance(d, AssertShared):
        return "assert_shared(%s)" % fmt_term(d.term)
    if isinstance(d, RemoveShared):
        return "remove_shared(%s)" % fmt_term(d.term)
    if isinstance(d, Compute):
        return "%s = %s" % (fmt_term(d.var), fmt_term(d.expr))
    if isinstance(d, Calculate):
        return ".calculate(%s, %s)" % (fmt_term(d.expr), fmt_term(d.result))
    raise TypeError(d)


def fmt_trigger(tr: TriggerEvent) -> str:
    if tr.kind == "add_belief":
        return "+%s" % fmt_term(tr.term)
    if tr.kind == "remove_belief":
        return "-%s" % fmt_term(tr.term)
    return "+!%s [%s]" % (fmt_term(tr.term), tr.goal_kind)


def fmt_plan(p: Plan) -> str:
    head = "%s : { %s }" % (fmt_trigger(p.trigger), fmt_guard(p.guard))
    if not p.body:
        return head + ";"
    return "%s <-\n    %s;" % (head, ",\n    ".join(fmt_deed(d) for d in p.body))


def pretty(prog: AgentProgram) -> str:
    out = [":name: %s" % prog.name]
    if prog.beliefs:
        out.append("\n:Initial Beliefs:")
        out.extend("%s;" % fmt_term(b) for b in prog.beliefs)
    if prog.goals:
        out.append("\n:Initial Goals:")
        out.extend("%s [%s];" % (fmt_term(g), k) for g, k in prog.goals)
    if prog.rules:
        out.append("\n:Belief Rules:")
        out.extend("B %s :- %s;" % (fmt_term(r.head), fmt_guard(r.body)) for r in prog.rules)
    if prog.plans:
        out.append("\n:Plans:")
        out.extend(fmt_plan(p) for p in prog.plans)
    return "\n".join(out) + "\n"
