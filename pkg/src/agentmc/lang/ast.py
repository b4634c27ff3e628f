"""Syntax tree for agent programs: plans, triggers and deeds."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..terms import BeliefRule, Guard, Term, TrueGuard

ACHIEVE = "achieve"
PERFORM = "perform"


@dataclass(frozen=True)
class TriggerEvent:
    """+b / -b belief events and +!g goal events."""

    kind: str  # "add_belief" | "remove_belief" | "add_goal"
    term: Term
    goal_kind: Optional[str] = None  # for add_goal

    def __repr__(self) -> str:
        if self.kind == "add_belief":
            return "+%r" % (self.term,)
        if self.kind == "remove_belief":
            return "-%r" % (self.term,)
        return "+!%r [%s]" % (self.term, self.goal_kind)


# --- deeds -----------------------------------------------------------------


@dataclass(frozen=True)
class AddBelief:
    term: Term


@dataclass(frozen=True)
class RemoveBelief:
    term: Term


@dataclass(frozen=True)
class AddGoal:
    term: Term
    goal_kind: str = ACHIEVE


@dataclass(frozen=True)
class DropGoal:
    term: Term
    goal_kind: str = ACHIEVE


@dataclass(frozen=True)
class Action:
    """Plain delegated action, e.g. move_to(X, Y) or wait."""

    term: Term


@dataclass(frozen=True)
class Perf:
    """perf(t): request the abstraction layer to perform t."""

    term: Term


@dataclass(frozen=True)
class Query:
    """query(t): ask the abstraction layer, then wait for the answer."""

    term: Term


@dataclass(frozen=True)
class WaitFor:
    """*g: suspend the intention until g can be solved."""

    guard: Guard


@dataclass(frozen=True)
class Lock:
    pass


@dataclass(frozen=True)
class Unlock:
    pass


@dataclass(frozen=True)
class Send:
    recipient: Term
    performative: str  # "tell" | "perform"
    content: Term


@dataclass(frozen=True)
class AssertShared:
    term: Term


@dataclass(frozen=True)
class RemoveShared:
    term: Term


@dataclass(frozen=True)
class Compute:
    """X = E: bind X to the value of an arithmetic expression."""

    var: Term
    expr: Term


@dataclass(frozen=True)
class Calculate:
    """.calculate(e, V): external computation binding V (analysis only)."""

    expr: Term
    result: Term


Deed = Union[
    AddBelief,
    RemoveBelief,
    AddGoal,
    DropGoal,
    Action,
    Perf,
    Query,
    WaitFor,
    Lock,
    Unlock,
    Send,
    AssertShared,
    RemoveShared,
    Compute,
    Calculate,
]


@dataclass(frozen=True)
class Plan:
    trigger: TriggerEvent
    guard: Guard
    body: tuple  # tuple[Deed, ...]
    line: int = 0

    def __repr__(self) -> str:
        return "%r : {%r} <- %d deeds" % (self.trigger, self.guard, len(self.body))


@dataclass
class AgentProgram:
    name: str
    beliefs: list  # list[Term], textual order
    goals: list  # list[tuple[Term, str]]
    rules: list  # list[BeliefRule], textual order
    plans: list  # list[Plan], textual order
    source: str = ""


@dataclass(frozen=True)
class SharedVocabulary:
    """Argument-normalised shared-belief and message templates."""

    percepts: frozenset  # frozenset[tuple[str, int]]  (functor, arity)
    messages: frozenset  # frozenset[tuple[str, str, str, int]] (recipient, performative, functor, arity)
