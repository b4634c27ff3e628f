"""LTL to Buchi translation (on-the-fly tableau) and emptiness checking.

States carry the literal constraints a letter must satisfy when the
automaton sits in them; acceptance is generalized (one set per Until)
with a counter-based degeneralization for the nested-DFS search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .formula import (
    And,
    Eventually,
    FalseF,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Release,
    TrueF,
    Until,
)

_CONNECTIVES = (TrueF, FalseF, Not, And, Or, Implies, Next, Until, Release, Eventually, Globally)


def is_atom(f) -> bool:
    return not isinstance(f, _CONNECTIVES)


def to_nnf(f):
    """Negation normal form over the U/R core."""
    if isinstance(f, TrueF) or isinstance(f, FalseF):
        return f
    if is_atom(f):
        return f
    if isinstance(f, Implies):
        return to_nnf(Or(Not(f.left), f.right))
    if isinstance(f, Eventually):
        return Until(TrueF(), to_nnf(f.sub))
    if isinstance(f, Globally):
        return Release(FalseF(), to_nnf(f.sub))
    if isinstance(f, And):
        return And(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Or):
        return Or(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Next):
        return Next(to_nnf(f.sub))
    if isinstance(f, Until):
        return Until(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Release):
        return Release(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Not):
        g = f.sub
        if isinstance(g, TrueF):
            return FalseF()
        if isinstance(g, FalseF):
            return TrueF()
        if is_atom(g):
            return f
        if isinstance(g, Not):
            return to_nnf(g.sub)
        if isinstance(g, And):
            return Or(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Or):
            return And(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Implies):
            return And(to_nnf(g.left), to_nnf(Not(g.right)))
        if isinstance(g, Next):
            return Next(to_nnf(Not(g.sub)))
        if isinstance(g, Until):
            return Release(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Release):
            return Until(to_nnf(Not(g.left)), to_nnf(Not(g.right)))
        if isinstance(g, Eventually):
            return Release(FalseF(), to_nnf(Not(g.sub)))
        if isinstance(g, Globally):
            return Until(TrueF(), to_nnf(Not(g.sub)))
    raise TypeError("not an LTL formula: %r" % (f,))


@dataclass
class Buchi:
    """State-labelled generalized Buchi automaton.

    A run on word w is a state sequence s0 s1 ... with s0 initial,
    s(i+1) a successor of s(i), and w(i) consistent with labels[s(i)]:
    it must contain every positive literal and no negated one.
    """

    labels: list  # per state: (frozenset pos_atoms, frozenset neg_atoms)
    initial: list
    succ: list  # per state: tuple of successor ids
    accept_sets: list  # list of frozenset[int]; empty means all-accepting

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def letter_ok(self, state: int, letter) -> bool:
        pos, neg = self.labels[state]
        return pos <= letter and not (neg & letter)


class FormulaTooLarge(Exception):
    pass


def translate(f, node_cap: int = 0) -> Buchi:
    """GPVW-style on-the-fly tableau construction.  ``f`` must be in NNF
    (to_nnf is applied defensively)."""
    f = to_nnf(f)
    INIT = -1

    nodes: list = []  # dicts: old(frozenset), nxt(frozenset), incoming(set)
    index: dict = {}

    def new_node(incoming, new, old, nxt):
        stack = [(set(incoming), set(new), set(old), set(nxt))]
        while stack:
            incoming, new, old, nxt = stack.pop()
            while new:
                eta = new.pop()
                if isinstance(eta, FalseF):
                    incoming = None
                    break
                if isinstance(eta, TrueF):
                    continue
                if is_atom(eta) or (isinstance(eta, Not) and is_atom(eta.sub)):
                    neg = eta.sub if isinstance(eta, Not) else Not(eta)
                    if neg in old:
                        incoming = None
                        break
                    old.add(eta)
                elif isinstance(eta, And):
                    if eta not in old:
                        old.add(eta)
                        for part in (eta.left, eta.right):
                            if part not in old:
                                new.add(part)
                elif isinstance(eta, Next):
                    old.add(eta)
                    nxt.add(eta.sub)
                elif isinstance(eta, Or):
                    old.add(eta)
                    n1 = (set(incoming), new | ({eta.left} - old), set(old), set(nxt))
                    n2 = (set(incoming), new | ({eta.right} - old), set(old), set(nxt))
                    stack.append(n2)
                    incoming, new, old, nxt = n1
                elif isinstance(eta, Until):
                    old.add(eta)
                    n1 = (set(incoming), new | ({eta.left} - old), set(old), nxt | {eta})
                    n2 = (set(incoming), new | ({eta.right} - old), set(old), set(nxt))
                    stack.append(n2)
                    incoming, new, old, nxt = n1
                elif isinstance(eta, Release):
                    old.add(eta)
                    n1 = (set(incoming), new | ({eta.right} - old), set(old), nxt | {eta})
                    n2 = (set(incoming), new | ({eta.left, eta.right} - old), set(old), set(nxt))
                    stack.append(n2)
                    incoming, new, old, nxt = n1
                else:
                    raise TypeError("not in NNF core: %r" % (eta,))
            if incoming is None:
                continue  # contradictory node dropped
            key = (frozenset(old), frozenset(nxt))
            if key in index:
                nodes[index[key]]["incoming"] |= incoming
                continue
            if node_cap and len(nodes) >= node_cap:
                raise FormulaTooLarge("tableau exceeded %d nodes" % node_cap)
            nid = len(nodes)
            index[key] = nid
            nodes.append({"old": key[0], "nxt": key[1], "incoming": set(incoming)})
            stack.append(({nid}, set(key[1]), set(), set()))

    new_node({INIT}, {f}, (), ())

    labels = []
    for nd in nodes:
        pos = frozenset(x for x in nd["old"] if is_atom(x))
        neg = frozenset(x.sub for x in nd["old"] if isinstance(x, Not) and is_atom(x.sub))
        labels.append((pos, neg))
    initial = [i for i, nd in enumerate(nodes) if INIT in nd["incoming"]]
    succ: list = [[] for _ in nodes]
    for i, nd in enumerate(nodes):
        for src in nd["incoming"]:
            if src != INIT:
                succ[src].append(i)
    succ = [tuple(sorted(s)) for s in succ]

    untils = sorted(
        {x for nd in nodes for x in nd["old"] if isinstance(x, Until)},
        key=repr,
    )
    accept_sets = []
    for u in untils:
        accept_sets.append(
            frozenset(i for i, nd in enumerate(nodes) if u not in nd["old"] or u.right in nd["old"])
        )
    return Buchi(labels, initial, succ, accept_sets)


def degeneralize(b: Buchi) -> Buchi:
    """Counter construction: one accepting set, states (q, i)."""
    k = len(b.accept_sets)
    if k == 0:
        return Buchi(list(b.labels), list(b.initial), list(b.succ), [frozenset(range(b.n_states))])
    if k == 1:
        return b

    idx: dict = {}
    labels: list = []
    succ: list = []
    order: list = []

    def get(q: int, i: int) -> int:
        if (q, i) not in idx:
            idx[(q, i)] = len(labels)
            labels.append(b.labels[q])
            succ.append(None)
            order.append((q, i))
        return idx[(q, i)]

    initial = [get(q, 0) for q in b.initial]
    w = 0
    while w < len(order):
        q, i = order[w]
        # advance one set at a time so runs reside in every copy they
        # pass through; skipping ahead would starve the accepting copy
        j = i + 1 if q in b.accept_sets[i] else i
        nxt_i = 0 if j == k else j
        succ[w] = tuple(get(q2, nxt_i) for q2 in b.succ[q])
        w += 1
    # accepting in the last copy: reaching it witnesses sets 0..k-2, and
    # hitting F_{k-1} there completes one full pass before the wrap
    accept = frozenset(s for s, (q, i) in enumerate(order) if i == k - 1 and q in b.accept_sets[k - 1])
    return Buchi(labels, initial, succ, [accept])


@dataclass
class Lasso:
    prefix: list
    cycle: list

    def states(self) -> list:
        return self.prefix + self.cycle


def _bfs_path(succ, sources: Iterable, target) -> Optional[list]:
    """Shortest path from any source to target; [] when a source is the
    target itself."""
    from collections import deque

    prev: dict = {}
    dq = deque()
    for s in sources:
        if s == target:
            return []
        if s not in prev:
            prev[s] = None
            dq.append(s)
    while dq:
        v = dq.popleft()
        for w in succ[v]:
            if w == target:
                out = [w]
                while v is not None:
                    out.append(v)
                    v = prev[v]
                out.reverse()
                return out
            if w not in prev:
                prev[w] = v
                dq.append(w)
    return None


def is_empty(b: Buchi) -> Optional[Lasso]:
    """Emptiness of the automaton language.  Returns None when empty,
    otherwise a witness Lasso of (degeneralized) state ids plus the
    degeneralized automaton the ids refer to."""
    d = degeneralize(b)
    accept = d.accept_sets[0]

    # reachable subgraph
    reach: set = set(d.initial)
    work = list(d.initial)
    while work:
        v = work.pop()
        for w in d.succ[v]:
            if w not in reach:
                reach.add(w)
                work.append(w)

    for q in sorted(accept & reach):
        # cycle q ->+ q inside the reachable subgraph
        cyc = _bfs_path(d.succ, [w for w in d.succ[q] if w in reach], q)
        if cyc is None:
            continue
        prefix = _bfs_path(d.succ, d.initial, q)
        assert prefix is not None
        prefix = prefix[:-1]  # the cycle starts with q itself
        lasso = Lasso(prefix, [q] + cyc[:-1] if cyc else [q])
        lasso.automaton = d  # type: ignore[attr-defined]
        return lasso
    return None


def accepts_lasso(b: Buchi, word: list, loop: int) -> bool:
    """Does the automaton accept the ultimately periodic word
    word[0..n-1] with positions >= n continuing from ``loop``?"""
    n = len(word)
    letters = [frozenset(w) for w in word]

    def succ_pos(i: int) -> int:
        return i + 1 if i + 1 < n else loop

    start = [(0, q) for q in b.initial if b.letter_ok(q, letters[0])]
    # explore the product graph; accept iff a reachable SCC hits all sets
    nodes: set = set(start)
    edges: dict = {}
    work = list(start)
    while work:
        i, q = work.pop()
        outs = []
        j = succ_pos(i)
        for q2 in b.succ[q]:
            if b.letter_ok(q2, letters[j]):
                outs.append((j, q2))
                if (j, q2) not in nodes:
                    nodes.add((j, q2))
                    work.append((j, q2))
        edges[(i, q)] = outs

    # Tarjan SCC
    idx: dict = {}
    low: dict = {}
    on: set = set()
    order: list = []
    counter = [0]
    sccs: list = []

    for root in start:
        if root in idx:
            continue
        call = [(root, 0)]
        while call:
            v, pi = call.pop()
            if pi == 0:
                idx[v] = low[v] = counter[0]
                counter[0] += 1
                order.append(v)
                on.add(v)
            recurse = False
            outs = edges.get(v, [])
            for k in range(pi, len(outs)):
                w = outs[k]
                if w not in idx:
                    call.append((v, k + 1))
                    call.append((w, 0))
                    recurse = True
                    break
                if w in on:
                    low[v] = min(low[v], idx[w])
            if recurse:
                continue
            if low[v] == idx[v]:
                scc = []
                while True:
                    w = order.pop()
                    on.discard(w)
                    scc.append(w)
                    if w == v:
                        break
                sccs.append(scc)
            if call:
                parent = call[-1][0]
                low[parent] = min(low[parent], low[v])

    accepting_sets = b.accept_sets or [frozenset(range(b.n_states))]
    for scc in sccs:
        members = set(scc)
        has_edge = any(w in members for v in scc for w in edges.get(v, []))
        if len(scc) == 1 and not has_edge:
            continue
        if all(any(q in f for (_, q) in scc) for f in accepting_sets):
            return True
    return False
