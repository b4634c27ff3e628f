"""First-order terms, unification and rule-based query solving.

Terms are immutable so they can live inside hashable machine states.  A
query is solved against an ordered belief base plus Prolog-style rules;
negation is closed-world (negation as failure) and yields no bindings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union


class DepthExceeded(Exception):
    """Raised when rule resolution exceeds the configured depth bound."""


DEFAULT_DEPTH = 10_000


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: Union[str, int]

    def __repr__(self) -> str:
        if isinstance(self.value, str) and not self.value.isidentifier():
            return repr(self.value)
        return str(self.value)


@dataclass(frozen=True)
class Struct:
    functor: str
    args: tuple

    def __repr__(self) -> str:
        return "%s(%s)" % (self.functor, ", ".join(repr(a) for a in self.args))


Term = Union[Var, Const, Struct]


def mk(functor: str, *args: Term) -> Term:
    """Build a compound term, collapsing zero arity to a constant."""
    if not args:
        return Const(functor)
    return Struct(functor, tuple(args))


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Struct):
        out: set[str] = set()
        for a in t.args:
            out |= term_vars(a)
        return out
    return set()


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Struct):
        return all(is_ground(a) for a in t.args)
    return True


def functor_arity(t: Term) -> tuple[str, int]:
    if isinstance(t, Struct):
        return t.functor, len(t.args)
    if isinstance(t, Const) and isinstance(t.value, str):
        return t.value, 0
    raise ValueError("term has no functor: %r" % (t,))


# ---------------------------------------------------------------------------
# substitutions

Subst = dict  # Var name -> Term


def walk(t: Term, s: Subst) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def apply_subst(t: Term, s: Subst) -> Term:
    t = walk(t, s)
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(apply_subst(a, s) for a in t.args))
    return t


def occurs(name: str, t: Term, s: Subst) -> bool:
    t = walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, Struct):
        return any(occurs(name, a, s) for a in t.args)
    return False


def unify(a: Term, b: Term, s: Optional[Subst] = None) -> Optional[Subst]:
    """Most general unifier extending ``s``, or None.  Occurs-check on."""
    if s is None:
        s = {}
    stack = [(a, b)]
    s = dict(s)
    while stack:
        x, y = stack.pop()
        x = walk(x, s)
        y = walk(y, s)
        if x == y:
            continue
        if isinstance(x, Var):
            if occurs(x.name, y, s):
                return None
            s[x.name] = y
        elif isinstance(y, Var):
            if occurs(y.name, x, s):
                return None
            s[y.name] = x
        elif isinstance(x, Const) and isinstance(y, Const):
            if x.value != y.value:
                return None
        elif isinstance(x, Struct) and isinstance(y, Struct):
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))
        else:
            return None
    return s


_rename_counter = [0]


def rename_apart(t: Term, mapping: dict) -> Term:
    if isinstance(t, Var):
        if t.name not in mapping:
            _rename_counter[0] += 1
            mapping[t.name] = Var("%s__%d" % (t.name, _rename_counter[0]))
        return mapping[t.name]
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(rename_apart(a, mapping) for a in t.args))
    return t


# ---------------------------------------------------------------------------
# guard / rule-body expressions


@dataclass(frozen=True)
class TrueGuard:
    def __repr__(self) -> str:
        return "True"


@dataclass(frozen=True)
class BeliefAtom:
    term: Term

    def __repr__(self) -> str:
        return "B %r" % (self.term,)


@dataclass(frozen=True)
class GoalAtom:
    term: Term
    kind: Optional[str] = None  # "achieve" | "perform" | None (either)

    def __repr__(self) -> str:
        k = " [%s]" % self.kind if self.kind else ""
        return "G %r%s" % (self.term, k)


@dataclass(frozen=True)
class Negation:
    body: "Guard"

    def __repr__(self) -> str:
        return "lnot(%r)" % (self.body,)


@dataclass(frozen=True)
class Conjunction:
    parts: tuple

    def __repr__(self) -> str:
        return ", ".join(repr(p) for p in self.parts)


@dataclass(frozen=True)
class Comparison:
    left: Term
    op: str  # "<" | "=" | ">"
    right: Term

    def __repr__(self) -> str:
        return "%r %s %r" % (self.left, self.op, self.right)


Guard = Union[TrueGuard, BeliefAtom, GoalAtom, Negation, Conjunction, Comparison]


@dataclass(frozen=True)
class BeliefRule:
    head: Term
    body: Guard

    def __repr__(self) -> str:
        return "B %r :- %r" % (self.head, self.body)


def guard_vars(g: Guard) -> set[str]:
    if isinstance(g, (BeliefAtom,)):
        return term_vars(g.term)
    if isinstance(g, GoalAtom):
        return term_vars(g.term)
    if isinstance(g, Negation):
        return guard_vars(g.body)
    if isinstance(g, Conjunction):
        out: set[str] = set()
        for p in g.parts:
            out |= guard_vars(p)
        return out
    if isinstance(g, Comparison):
        return term_vars(g.left) | term_vars(g.right)
    return set()


def positive_guard_vars(g: Guard) -> set[str]:
    """Variables a guard binds when it succeeds (negation binds nothing)."""
    if isinstance(g, BeliefAtom):
        return term_vars(g.term)
    if isinstance(g, GoalAtom):
        return term_vars(g.term)
    if isinstance(g, Conjunction):
        out: set[str] = set()
        for p in g.parts:
            out |= positive_guard_vars(p)
        return out
    if isinstance(g, Comparison) and g.op == "=":
        return term_vars(g.left) | term_vars(g.right)
    return set()


# ---------------------------------------------------------------------------
# arithmetic used by comparisons and computed bindings


def eval_arith(t: Term, s: Subst) -> Optional[int]:
    t = walk(t, s)
    if isinstance(t, Const) and isinstance(t.value, int):
        return t.value
    if isinstance(t, Struct) and t.functor in ("+", "-") and len(t.args) == 2:
        lv = eval_arith(t.args[0], s)
        rv = eval_arith(t.args[1], s)
        if lv is None or rv is None:
            return None
        return lv + rv if t.functor == "+" else lv - rv
    return None


# ---------------------------------------------------------------------------
# solving


class Solver:
    """Query evaluation over an ordered belief base plus belief rules.

    Beliefs and rules are consulted in their given order, so the sequence
    of answer substitutions is deterministic.
    """

    def __init__(
        self,
        beliefs: Sequence[Term],
        rules: Sequence[BeliefRule] = (),
        goals: Sequence[tuple] = (),
        depth: int = DEFAULT_DEPTH,
    ):
        self.beliefs = list(beliefs)
        self.rules = list(rules)
        self.goals = list(goals)  # (Term, kind)
        self.depth = depth

    def solve(self, g: Guard, s: Optional[Subst] = None) -> Iterator[Subst]:
        if s is None:
            s = {}
        yield from self._solve(g, s, 0)

    def holds(self, g: Guard, s: Optional[Subst] = None) -> bool:
        for _ in self.solve(g, s):
            return True
        return False

    def first(self, g: Guard, s: Optional[Subst] = None) -> Optional[Subst]:
        for out in self.solve(g, s):
            return out
        return None

    def _solve(self, g: Guard, s: Subst, depth: int) -> Iterator[Subst]:
        if depth > self.depth:
            raise DepthExceeded("resolution depth bound %d exceeded" % self.depth)
        if isinstance(g, TrueGuard):
            yield s
        elif isinstance(g, Conjunction):
            yield from self._solve_conj(g.parts, 0, s, depth)
        elif isinstance(g, Negation):
            for _ in self._solve(g.body, s, depth + 1):
                return
            yield s
        elif isinstance(g, Comparison):
            yield from self._solve_cmp(g, s)
        elif isinstance(g, GoalAtom):
            t = apply_subst(g.term, s)
            for gt, kind in self.goals:
                if g.kind is not None and kind != g.kind:
                    continue
                s2 = unify(t, gt, s)
                if s2 is not None:
                    yield s2
        elif isinstance(g, BeliefAtom):
            t = apply_subst(g.term, s)
            for b in self.beliefs:
                s2 = unify(t, b, s)
                if s2 is not None:
                    yield s2
            for rule in self.rules:
                mapping: dict = {}
                head = rename_apart(rule.head, mapping)
                s2 = unify(t, head, s)
                if s2 is None:
                    continue
                body = rename_guard(rule.body, mapping)
                yield from self._solve(body, s2, depth + 1)
        else:
            raise TypeError("cannot solve %r" % (g,))

    def _solve_conj(self, parts: tuple, i: int, s: Subst, depth: int) -> Iterator[Subst]:
        if i == len(parts):
            yield s
            return
        for s2 in self._solve(parts[i], s, depth):
            yield from self._solve_conj(parts, i + 1, s2, depth)

    def _solve_cmp(self, g: Comparison, s: Subst) -> Iterator[Subst]:
        if g.op == "=":
            lv = eval_arith(g.left, s)
            rv = eval_arith(g.right, s)
            if lv is not None and rv is not None:
                if lv == rv:
                    yield s
                return
            # fall back to unification (also used for computed bindings)
            rt = apply_subst(g.right, s)
            if rv is not None:
                rt = Const(rv)
            s2 = unify(apply_subst(g.left, s), rt, s)
            if s2 is not None:
                yield s2
            return
        lv = eval_arith(g.left, s)
        rv = eval_arith(g.right, s)
        if lv is None or rv is None:
            return
        if (g.op == "<" and lv < rv) or (g.op == ">" and lv > rv):
            yield s


def rename_guard(g: Guard, mapping: dict) -> Guard:
    if isinstance(g, BeliefAtom):
        return BeliefAtom(rename_apart(g.term, mapping))
    if isinstance(g, GoalAtom):
        return GoalAtom(rename_apart(g.term, mapping), g.kind)
    if isinstance(g, Negation):
        return Negation(rename_guard(g.body, mapping))
    if isinstance(g, Conjunction):
        return Conjunction(tuple(rename_guard(p, mapping) for p in g.parts))
    if isinstance(g, Comparison):
        return Comparison(rename_apart(g.left, mapping), g.op, rename_apart(g.right, mapping))
    return g


def apply_guard_subst(g: Guard, s: Subst) -> Guard:
    if isinstance(g, BeliefAtom):
        return BeliefAtom(apply_subst(g.term, s))
    if isinstance(g, GoalAtom):
        return GoalAtom(apply_subst(g.term, s), g.kind)
    if isinstance(g, Negation):
        return Negation(apply_guard_subst(g.body, s))
    if isinstance(g, Conjunction):
        return Conjunction(tuple(apply_guard_subst(p, s) for p in g.parts))
    if isinstance(g, Comparison):
        return Comparison(apply_subst(g.left, s), g.op, apply_subst(g.right, s))
    return g
