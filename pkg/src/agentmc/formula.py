"""Temporal formulas over opaque atoms.

The model-checking core treats atoms as hashable leaves; the property
layer instantiates them with agent-modality atoms, the test oracles with
plain named propositions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class TrueF:
    def __repr__(self):
        return "true"


@dataclass(frozen=True)
class FalseF:
    def __repr__(self):
        return "false"


@dataclass(frozen=True)
class Not:
    sub: Any

    def __repr__(self):
        return "~%r" % (self.sub,)


@dataclass(frozen=True)
class And:
    left: Any
    right: Any

    def __repr__(self):
        return "(%r & %r)" % (self.left, self.right)


@dataclass(frozen=True)
class Or:
    left: Any
    right: Any

    def __repr__(self):
        return "(%r | %r)" % (self.left, self.right)


@dataclass(frozen=True)
class Implies:
    left: Any
    right: Any

    def __repr__(self):
        return "(%r -> %r)" % (self.left, self.right)


@dataclass(frozen=True)
class Next:
    sub: Any

    def __repr__(self):
        return "X %r" % (self.sub,)


@dataclass(frozen=True)
class Until:
    left: Any
    right: Any

    def __repr__(self):
        return "(%r U %r)" % (self.left, self.right)


@dataclass(frozen=True)
class Release:
    left: Any
    right: Any

    def __repr__(self):
        return "(%r R %r)" % (self.left, self.right)


@dataclass(frozen=True)
class Eventually:
    sub: Any

    def __repr__(self):
        return "<> %r" % (self.sub,)


@dataclass(frozen=True)
class Globally:
    sub: Any

    def __repr__(self):
        return "[] %r" % (self.sub,)


def conj(parts):
    parts = list(parts)
    if not parts:
        return TrueF()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts):
    parts = list(parts)
    if not parts:
        return FalseF()
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def atoms_of(f) -> set:
    """All opaque atoms of a formula (leaves that are not connectives)."""
    if isinstance(f, (TrueF, FalseF)):
        return set()
    if isinstance(f, (Not, Next, Eventually, Globally)):
        return atoms_of(f.sub)
    if isinstance(f, (And, Or, Implies, Until, Release)):
        return atoms_of(f.left) | atoms_of(f.right)
    return {f}


def eval_on_lasso(f, word, loop: int) -> bool:
    """Brute-force LTL semantics on an ultimately periodic word.

    ``word`` is a sequence of atom-sets; positions >= len(word) repeat
    from index ``loop``.  Used as the independent oracle for the
    automaton construction.
    """
    n = len(word)
    assert 0 <= loop < n

    def succ(i: int) -> int:
        return i + 1 if i + 1 < n else loop

    cache: dict = {}

    def ev(g, i: int) -> bool:
        key = (g, i)
        if key in cache:
            return cache[key]
        if isinstance(g, TrueF):
            r = True
        elif isinstance(g, FalseF):
            r = False
        elif isinstance(g, Not):
            r = not ev(g.sub, i)
        elif isinstance(g, And):
            r = ev(g.left, i) and ev(g.right, i)
        elif isinstance(g, Or):
            r = ev(g.left, i) or ev(g.right, i)
        elif isinstance(g, Implies):
            r = (not ev(g.left, i)) or ev(g.right, i)
        elif isinstance(g, Next):
            r = ev(g.sub, succ(i))
        elif isinstance(g, Eventually):
            r = ev(Until(TrueF(), g.sub), i)
        elif isinstance(g, Globally):
            r = ev(Release(FalseF(), g.sub), i)
        elif isinstance(g, Until):
            r = _fix_until(g, i)
        elif isinstance(g, Release):
            r = not _fix_until(Until(Not(g.left), Not(g.right)), i)
        else:
            r = g in word[i]
        cache[key] = r
        return r

    def _fix_until(g, i0: int) -> bool:
        # positions reachable from i0: i0..n-1 (then cycle loop..n-1)
        vals = {}
        order = list(range(n - 1, loop - 1, -1))
        # two backward sweeps over the cycle give the least fixpoint
        for j in range(loop, n):
            vals[j] = False
        for _ in range(2):
            for j in order:
                vals[j] = ev(g.right, j) or (ev(g.left, j) and vals.get(succ(j), False))
        for j in range(loop - 1, -1, -1):
            vals[j] = ev(g.right, j) or (ev(g.left, j) and vals[j + 1])
        return vals[i0]

    return ev(f, 0) if n else False
