"""Explicit-state verification core.

check():   product of the reachable system state graph with the Buchi
           automaton of the negated property, nested-DFS emptiness,
           concrete lasso counterexamples.
prove():   validity of a propositional-temporal formula via emptiness
           of the automaton of its negation over consistent labelings.
compose(): deduce a system-level property from verified per-agent
           properties plus explicitly assumed hypotheses.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Optional

from .buchi import FormulaTooLarge, Lasso, degeneralize, is_empty, to_nnf, translate
from .formula import Implies, Not, conj, eval_on_lasso
from .lang.pretty import fmt_term
from .psl import AAtom, BAtom, GAtom, IAtom, PAtom, formula_atoms, state_letter

DEFAULT_STATE_CAP = 5_000_000


class StateLimitExceeded(Exception):
    def __init__(self, cap: int):
        super().__init__("product state cap of %d exceeded" % cap)
        self.cap = cap


@dataclass
class Verdict:
    holds: bool
    counterexample: Optional[Lasso]  # over MASState, when holds is False
    states: int
    transitions: int
    time_ms: float
    formula: object = None
    atoms: tuple = ()


@dataclass
class ProofResult:
    provable: bool
    countermodel: Optional[Lasso] = None  # over frozensets of true atoms
    premises: tuple = ()  # ((name, status), ...) filled in by compose


def _with_hypotheses(prop, hyps):
    if not hyps:
        return prop
    return Implies(conj(list(hyps)), prop)


def check(mas, prop, hyps=(), state_cap: int = DEFAULT_STATE_CAP, tableau_cap: int = 0) -> Verdict:
    """holds=True iff no run of the system falsifies hyps -> prop."""
    t0 = time.perf_counter()
    f = _with_hypotheses(prop, hyps)
    aut = degeneralize(translate(to_nnf(Not(f)), node_cap=tableau_cap))
    accept = aut.accept_sets[0] if aut.accept_sets else frozenset(range(aut.n_states))
    atoms = tuple(sorted(formula_atoms(f), key=fmt_atom))

    letters: dict = {}

    def letter(s):
        l = letters.get(s)
        if l is None:
            l = state_letter(mas, s, atoms)
            letters[s] = l
        return l

    stats = {"transitions": 0}

    def psucc(node):
        s, q = node
        for s2 in mas.successors(s):
            l2 = letter(s2)
            for q2 in aut.succ[q]:
                if aut.letter_ok(q2, l2):
                    stats["transitions"] += 1
                    yield (s2, q2)

    initials = []
    for s0 in mas.initial_states():
        l0 = letter(s0)
        for q in aut.initial:
            if aut.letter_ok(q, l0):
                initials.append((s0, q))

    found = _ndfs(initials, psucc, lambda n: n[1] in accept, state_cap, stats)
    elapsed = (time.perf_counter() - t0) * 1000.0
    if found is None:
        return Verdict(True, None, stats["states"], stats["transitions"], elapsed, f, atoms)
    prefix, cycle = found
    cx = Lasso([s for s, _ in prefix], [s for s, _ in cycle])
    return Verdict(False, cx, stats["states"], stats["transitions"], elapsed, f, atoms)


def _ndfs(initials, succ, accepting, cap: int, stats: dict):
    """Nested DFS (CVWY with the stack-hit improvement).  Returns
    (prefix, cycle) over product nodes, or None when the language is
    empty."""
    blue: set = set()
    red: set = set()

    for init in initials:
        if init in blue:
            continue
        blue.add(init)
        if len(blue) > cap:
            raise StateLimitExceeded(cap)
        path = [init]
        onpath = {init}
        iters = [succ(init)]
        while iters:
            nxt = next(iters[-1], None)
            if nxt is not None:
                if nxt not in blue:
                    blue.add(nxt)
                    if len(blue) > cap:
                        raise StateLimitExceeded(cap)
                    path.append(nxt)
                    onpath.add(nxt)
                    iters.append(succ(nxt))
                continue
            # postorder on path[-1]
            node = path[-1]
            if accepting(node):
                red_path = _red_search(node, succ, onpath, red)
                if red_path is not None:
                    target = red_path[-1]
                    i_t = path.index(target)
                    k = len(path) - 1
                    stats["states"] = len(blue)
                    return path[:k], red_path[:-1] + path[i_t:k]
            iters.pop()
            path.pop()
            onpath.discard(node)
    stats["states"] = len(blue)
    return None


def _red_search(seed, succ, onpath: set, red: set):
    """DFS from an accepting seed hunting for any state on the blue
    stack; returns the path seed..hit or None.  Visited states stay red
    across seeds."""
    parent = {seed: None}
    stack = [seed]
    while stack:
        v = stack.pop()
        for w in succ(v):
            if w in onpath:
                out = [w]
                u = v
                while u is not None:
                    out.append(u)
                    u = parent[u]
                out.reverse()
                return out
            if w not in red and w not in parent:
                parent[w] = v
                stack.append(w)
    red.update(parent)
    return None


# ---------------------------------------------------------------------------
# proving and composition


def _conjuncts(f) -> list:
    from .formula import And

    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def _is_global(f) -> bool:
    """Globally(g) in NNF, i.e. FalseF R g."""
    from .formula import FalseF, Release

    return isinstance(f, Release) and isinstance(f.left, FalseF)


def _propositional(f) -> bool:
    from .buchi import is_atom
    from .formula import And, FalseF, Implies, Or, TrueF

    if isinstance(f, (TrueF, FalseF)):
        return True
    if isinstance(f, Not):
        return _propositional(f.sub)
    if isinstance(f, (And, Or, Implies)):
        return _propositional(f.left) and _propositional(f.right)
    return is_atom(f)


def _eval_prop(f, letter: frozenset) -> bool:
    from .formula import And, FalseF, Implies, Or, TrueF

    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Not):
        return not _eval_prop(f.sub, letter)
    if isinstance(f, And):
        return _eval_prop(f.left, letter) and _eval_prop(f.right, letter)
    if isinstance(f, Or):
        return _eval_prop(f.left, letter) or _eval_prop(f.right, letter)
    if isinstance(f, Implies):
        return not _eval_prop(f.left, letter) or _eval_prop(f.right, letter)
    return f in letter


MAX_LETTER_ATOMS = 18


def _letter_product(parts, constraints, atoms, tableau_cap: int):
    """Automaton for conj(parts) intersected with the letter predicate
    conj(constraints), built over complete letters.  Globally-scoped
    propositional conjuncts constrain every letter directly; turning
    them into tableaux makes the product of partial labelings explode."""
    from .buchi import Buchi

    atoms = sorted(atoms, key=repr)
    letters = []
    for bits in itertools.product((False, True), repeat=len(atoms)):
        letter = frozenset(a for a, b in zip(atoms, bits) if b)
        if all(_eval_prop(c, letter) for c in constraints):
            letters.append(letter)
    universe = frozenset(atoms)
    if not parts:
        # only letter constraints: any valid letter repeated is a model
        if not letters:
            return Buchi([], [], [], [])
        return Buchi([(letters[0], universe - letters[0])], [0], [(0,)], [])
    auts = [degeneralize(translate(p, node_cap=tableau_cap)) for p in parts]

    # per component state: bitmask of compatible letters
    masks = []
    for a in auts:
        ms = []
        for pos, neg in a.labels:
            m = 0
            for i, letter in enumerate(letters):
                if pos <= letter and not (neg & letter):
                    m |= 1 << i
            ms.append(m)
        masks.append(ms)

    labels: list = []
    succ_lists: dict = {}
    index: dict = {}
    initial: list = []
    work: list = []

    def visit(qs, m):
        while m:
            low = m & -m
            i = low.bit_length() - 1
            m ^= low
            key = (qs, i)
            if key not in index:
                index[key] = len(labels)
                labels.append((letters[i], universe - letters[i]))
                work.append(key)
                yield key, True
            else:
                yield key, False

    for qs in itertools.product(*(a.initial for a in auts)):
        m = -1
        for a_ms, q in zip(masks, qs):
            m &= a_ms[q]
        for key, _ in visit(qs, m & ((1 << len(letters)) - 1)):
            if index[key] not in initial:
                initial.append(index[key])
    while work:
        qs, i = work.pop()
        outs = set()
        for nxt in itertools.product(*(a.succ[q] for a, q in zip(auts, qs))):
            m = (1 << len(letters)) - 1
            for a_ms, q in zip(masks, nxt):
                m &= a_ms[q]
            for key, _ in visit(nxt, m):
                outs.add(index[key])
        succ_lists[(qs, i)] = tuple(sorted(outs))
    succ = [()] * len(labels)
    for key, outs in succ_lists.items():
        succ[index[key]] = outs
    accept_sets = []
    for ci, a in enumerate(auts):
        if not a.accept_sets:
            continue
        fi = a.accept_sets[0]
        accept_sets.append(
            frozenset(j for (qs, _i), j in index.items() if qs[ci] in fi)
        )
    return Buchi(labels, initial, succ, accept_sets)


def _conjunction_automaton(parts, tableau_cap: int):
    """Generalized Buchi automaton for a conjunction, built as a
    label-consistent product of per-conjunct automata.  Translating
    conjuncts separately keeps each tableau small; premise-heavy
    validity obligations blow up as a single formula."""
    from .buchi import Buchi

    auts = [degeneralize(translate(p, node_cap=tableau_cap)) for p in parts]
    if len(auts) == 1:
        return auts[0]
    labels: list = []
    succ: list = []
    index: dict = {}
    initial: list = []
    work: list = []

    def consistent(qs):
        pos: set = set()
        neg: set = set()
        for a, q in zip(auts, qs):
            p, n = a.labels[q]
            pos |= p
            neg |= n
        return None if pos & neg else (frozenset(pos), frozenset(neg))

    for qs in itertools.product(*(a.initial for a in auts)):
        lab = consistent(qs)
        if lab is None:
            continue
        index[qs] = len(labels)
        labels.append(lab)
        initial.append(index[qs])
        work.append(qs)
    succ_lists: dict = {}
    while work:
        qs = work.pop()
        outs = []
        for nxt in itertools.product(*(a.succ[q] for a, q in zip(auts, qs))):
            lab = consistent(nxt)
            if lab is None:
                continue
            if nxt not in index:
                index[nxt] = len(labels)
                labels.append(lab)
                work.append(nxt)
            outs.append(index[nxt])
        succ_lists[qs] = tuple(outs)
    succ = [()] * len(labels)
    for qs, outs in succ_lists.items():
        succ[index[qs]] = outs
    accept_sets = []
    for i, a in enumerate(auts):
        if not a.accept_sets:
            continue
        fi = a.accept_sets[0]
        accept_sets.append(frozenset(j for qs, j in index.items() if qs[i] in fi))
    return Buchi(labels, initial, succ, accept_sets)


def prove(f, tableau_cap: int = 0) -> ProofResult:
    """Validity of f: the negation's automaton accepts no consistent
    word.  A countermodel is an ultimately periodic word given as sets
    of true atoms (everything unlisted is false)."""
    from .formula import atoms_of

    parts = _conjuncts(to_nnf(Not(f)))
    is_constraint = [_is_global(p) and _propositional(p.right) for p in parts]
    atoms = atoms_of(conj(parts))
    if any(is_constraint) and len(atoms) <= MAX_LETTER_ATOMS:
        constraints = [p.right for p, c in zip(parts, is_constraint) if c]
        rest = [p for p, c in zip(parts, is_constraint) if not c]
        aut = _letter_product(rest, constraints, atoms, tableau_cap)
    else:
        aut = _conjunction_automaton(parts, tableau_cap)
    lasso = is_empty(aut)
    if lasso is None:
        return ProofResult(True)
    d = lasso.automaton  # the degeneralized automaton the ids refer to

    def val(q):
        return frozenset(d.labels[q][0])

    return ProofResult(
        False,
        Lasso([val(q) for q in lasso.prefix], [val(q) for q in lasso.cycle]),
    )


def compose(premises, goal, tableau_cap: int = 0) -> ProofResult:
    """premises: iterable of (name, formula, status) where status is
    "verified" (machine-checked) or "assumed" (environmental
    hypothesis).  Proves conj(premises) -> goal."""
    premises = list(premises)
    f = goal if not premises else Implies(conj([p[1] for p in premises]), goal)
    out = prove(f, tableau_cap)
    out.premises = tuple((name, status) for name, _, status in premises)
    return out


# ---------------------------------------------------------------------------
# counterexample validation and rendering


def replay(mas, verdict: Verdict) -> bool:
    """Re-run a counterexample: every step must be a real transition,
    the prefix must start in an initial state, and the lasso must
    falsify the checked formula under direct semantic evaluation."""
    cx = verdict.counterexample
    if cx is None:
        return False
    seq = cx.prefix + cx.cycle
    if not seq:
        return False
    if seq[0] not in mas.initial_states():
        return False
    for a, b in zip(seq, seq[1:]):
        if b not in mas.successors(a):
            return False
    if cx.cycle[0] not in mas.successors(seq[-1]):
        return False
    word = [state_letter(mas, s, verdict.atoms) for s in seq]
    return not eval_on_lasso(verdict.formula, word, len(cx.prefix))


def fmt_atom(a) -> str:
    if isinstance(a, BAtom):
        return "B(%s, %s)" % (a.agent, fmt_term(a.term))
    if isinstance(a, GAtom):
        return "G(%s, %s)" % (a.agent, fmt_term(a.term))
    if isinstance(a, AAtom):
        return "A(%s, %s)" % (a.agent, fmt_term(a.term))
    if isinstance(a, IAtom):
        return "I(%s, %s)" % (a.agent, fmt_term(a.term))
    if isinstance(a, PAtom):
        return "P(%s)" % fmt_term(a.term)
    return repr(a)


def state_digest(mas, state, atoms=()) -> dict:
    d: dict = {"turn": state.turn}
    if state.last_action is not None:
        d["last_action"] = "%s: %s" % (state.last_action[0], fmt_term(state.last_action[1]))
    d["percepts"] = sorted(fmt_term(t) for t in state.percepts)
    d["shared"] = [fmt_term(t) for t in state.sigma]
    d["agents"] = {}
    for prog, ag in zip(mas.programs, state.agents):
        d["agents"][prog.name] = {
            "beliefs": [fmt_term(t) for t in ag.all_beliefs()],
            "goals": ["%s [%s]" % (fmt_term(g), k) for g, k in ag.goals],
        }
    if atoms:
        from .psl import eval_atom

        d["atoms"] = {fmt_atom(a): eval_atom(a, mas, state) for a in atoms}
    return d
