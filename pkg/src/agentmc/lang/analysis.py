"""Static checks and vocabulary extraction for agent programs."""

from __future__ import annotations

from dataclasses import dataclass

from ..terms import (
    BeliefAtom,
    Comparison,
    Conjunction,
    GoalAtom,
    Guard,
    Negation,
    TrueGuard,
    functor_arity,
    guard_vars,
    positive_guard_vars,
    term_vars,
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
    SharedVocabulary,
    Unlock,
    WaitFor,
)


@dataclass(frozen=True)
class Diagnostic:
    code: str  # "UnboundVariable" | "UnreachableGuard" | "UnmatchedLock"
    message: str
    line: int

    def __str__(self) -> str:
        return "line %d: %s: %s" % (self.line, self.code, self.message)


def _deed_used_and_bound(deed) -> tuple:
    """Variables a deed requires bound, and variables it newly binds."""
    if isinstance(deed, Compute):
        return term_vars(deed.expr), term_vars(deed.var)
    if isinstance(deed, Calculate):
        return term_vars(deed.expr), term_vars(deed.result)
    if isinstance(deed, Query):
        # the unbound part of a query is filled in by the answer
        return set(), term_vars(deed.term)
    if isinstance(deed, WaitFor):
        return set(), guard_vars(deed.guard)
    if isinstance(deed, (AddBelief, RemoveBelief, Action, Perf, AssertShared, RemoveShared)):
        return term_vars(deed.term), set()
    if isinstance(deed, AddGoal):
        # free goal arguments are outputs: achieving the goal binds them
        return set(), term_vars(deed.term)
    if isinstance(deed, DropGoal):
        return term_vars(deed.term), set()
    if isinstance(deed, Send):
        return term_vars(deed.recipient) | term_vars(deed.content), set()
    return set(), set()


def lint_plan(plan: Plan) -> list:
    diags = []
    bound = term_vars(plan.trigger.term) | positive_guard_vars(plan.guard)
    for deed in plan.body:
        used, binds = _deed_used_and_bound(deed)
        free = used - bound
        for v in sorted(free):
            diags.append(
                Diagnostic(
                    "UnboundVariable",
                    "variable %s used in body but never bound" % v,
                    plan.line,
                )
            )
        bound |= binds
        # goal arguments flow back into the plan on completion
        if isinstance(deed, AddGoal):
            bound |= term_vars(deed.term)
    if _statically_false(plan.guard):
        diags.append(Diagnostic("UnreachableGuard", "guard can never hold", plan.line))
    depth = 0
    for deed in plan.body:
        if isinstance(deed, Lock):
            depth += 1
        elif isinstance(deed, Unlock):
            depth -= 1
            if depth < 0:
                break
    if depth != 0:
        diags.append(Diagnostic("UnmatchedLock", "lock/unlock pairs do not balance", plan.line))
    return diags


def _statically_false(g: Guard) -> bool:
    if isinstance(g, Negation) and isinstance(g.body, TrueGuard):
        return True
    if isinstance(g, Conjunction):
        atoms = [p for p in g.parts if isinstance(p, (BeliefAtom, GoalAtom))]
        negs = [p.body for p in g.parts if isinstance(p, Negation)]
        for a in atoms:
            if a in negs:
                return True
        if any(isinstance(p, Negation) and isinstance(p.body, TrueGuard) for p in g.parts):
            return True
    if isinstance(g, Comparison):
        from ..terms import eval_arith

        lv = eval_arith(g.left, {})
        rv = eval_arith(g.right, {})
        if lv is not None and rv is not None:
            if g.op == "<" and not lv < rv:
                return True
            if g.op == ">" and not lv > rv:
                return True
            if g.op == "=" and lv != rv:
                return True
    return False


def lint(program: AgentProgram) -> list:
    """Return diagnostics for one program (empty list = clean)."""
    diags = []
    for plan in program.plans:
        diags.extend(lint_plan(plan))
    return diags


def extract_shared_vocabulary(program: AgentProgram) -> SharedVocabulary:
    """Templates an engine shares with its peers.

    Percept templates come from assert_shared/remove_shared deeds,
    message templates from send deeds; both are normalised to
    functor/arity so different argument spellings collapse.
    """
    percepts = set()
    messages = set()
    for plan in program.plans:
        for deed in plan.body:
            if isinstance(deed, (AssertShared, RemoveShared)):
                percepts.add(functor_arity(deed.term))
            elif isinstance(deed, Send):
                try:
                    rec = functor_arity(deed.recipient)[0]
                except ValueError:
                    rec = repr(deed.recipient)
                messages.add((rec, deed.performative, *functor_arity(deed.content)))
    return SharedVocabulary(frozenset(percepts), frozenset(messages))
