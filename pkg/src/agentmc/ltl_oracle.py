"""Independent oracles for the temporal-logic engine.

Two facilities:

1. exhaustive_lasso_agreement: for one formula, compare automaton
   acceptance against brute-force semantics over EVERY ultimately
   periodic word (prefix + cycle up to a length bound) built from the
   formula's own atoms.  Acceptance of all cycles of a given length is
   computed at once with batched boolean matrix products (0/1 float32
   matmuls, re-binarized after every product), so the full sweep over
   ~1.8M lassos per 3-atom formula stays in numpy.

2. enumerate_lassos / graph_violation: a lasso-enumeration oracle over
   an explicit state graph, used to cross-check the model checker on
   small environments.  It enumerates every walk up to a length bound
   (so every lasso whose prefix+cycle fits the bound); longer lassos
   are out of its reach, which is the documented limit of the oracle.
"""

from __future__ import annotations

import random

import numpy as np

from .buchi import to_nnf, translate
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
    atoms_of,
    eval_on_lasso,
)


def random_formula(rng: random.Random, max_ops: int = 6, atoms=("p", "q", "r")):
    """A random LTL formula with at most max_ops connectives."""
    n_ops = rng.randint(1, max_ops)

    def build(budget: int):
        if budget <= 0:
            return rng.choice(atoms), 0
        op = rng.choice(
            [Not, Next, Eventually, Globally, And, Or, Implies, Until, Release]
        )
        if op in (Not, Next, Eventually, Globally):
            sub, used = build(budget - 1)
            return op(sub), used + 1
        lb = rng.randint(0, budget - 1)
        left, ul = build(lb)
        right, ur = build(budget - 1 - ul)
        return op(left, right), ul + ur + 1

    f, _ = build(n_ops)
    return f


# ---------------------------------------------------------------------------
# batched agreement check


def _binarize(x):
    return (x > 0).astype(np.float32)


def _good_tables(aut, C, A, acc_masks, L: int, max_c: int, chunk: int = 65536) -> dict:
    """tables[c][cycle_id] = boolean mask of automaton states from which
    an accepting run over that cycle (read from phase 0) exists.

    Cycle ids encode letters base-L, least significant digit first.
    """
    S = A.shape[0]
    eye = np.eye(S, dtype=np.float32)
    tables = {}
    for c in range(1, max_c + 1):
        ncyc = L**c
        table = np.zeros((ncyc, S), dtype=bool)
        powers = L ** np.arange(c, dtype=np.int64)
        for lo in range(0, ncyc, chunk):
            ids = np.arange(lo, min(lo + chunk, ncyc), dtype=np.int64)
            letters = (ids[:, None] // powers[None, :]) % L  # (m, c)
            allowed = C[letters]  # (m, c, S) bool
            af = allowed.astype(np.float32)

            # P: c-step phase-0-to-phase-0 paths; V[t]: same but visiting
            # accept set t somewhere along the way
            P = None
            V = [None] * len(acc_masks)
            for i in range(c):
                Mi = af[:, i, :, None] * A[None] * af[:, (i + 1) % c, None, :]
                for t, acc in enumerate(acc_masks):
                    hit = Mi * (allowed[:, i, :] & acc)[:, :, None].astype(np.float32)
                    if P is None:
                        V[t] = hit
                    else:
                        V[t] = _binarize(np.matmul(V[t], Mi) + np.matmul(P, hit))
                P = Mi if P is None else _binarize(np.matmul(P, Mi))

            # transitive closure of P by repeated squaring (paths of
            # 1..S cycle iterations)
            T = P
            steps = max(1, int(np.ceil(np.log2(max(S, 2)))) + 1)
            for _ in range(steps):
                T = _binarize(T + np.matmul(T, T))
            IT = _binarize(T + eye[None])

            if acc_masks:
                wall = None
                for t in range(len(acc_masks)):
                    vb = _binarize(np.matmul(np.matmul(IT, V[t]), IT))
                    wall = vb if wall is None else _binarize(np.matmul(wall, vb))
            else:
                wall = T  # every cycle is accepting
            on_good_cycle = np.diagonal(wall, axis1=1, axis2=2)  # (m, S)
            good = np.matmul(IT, on_good_cycle[:, :, None])[:, :, 0] > 0
            table[lo : lo + len(ids)] = good
        tables[c] = table
    return tables


def _semantics_table(f, atoms, L: int, n: int, loop: int):
    """Truth of f at position 0 for every length-n word with the given
    loop position, via the same two-sweep fixpoint as eval_on_lasso but
    vectorized across all words."""
    nwords = L**n
    powers = L ** np.arange(n, dtype=np.int64)
    letters = (np.arange(nwords, dtype=np.int64)[:, None] // powers[None, :]) % L

    atom_idx = {a: i for i, a in enumerate(atoms)}
    cache: dict = {}

    def succ(j):
        return j + 1 if j + 1 < n else loop

    def ev(g):
        if g in cache:
            return cache[g]
        if isinstance(g, TrueF):
            r = np.ones((nwords, n), dtype=bool)
        elif isinstance(g, FalseF):
            r = np.zeros((nwords, n), dtype=bool)
        elif isinstance(g, Not):
            r = ~ev(g.sub)
        elif isinstance(g, And):
            r = ev(g.left) & ev(g.right)
        elif isinstance(g, Or):
            r = ev(g.left) | ev(g.right)
        elif isinstance(g, Implies):
            r = ~ev(g.left) | ev(g.right)
        elif isinstance(g, Next):
            sub = ev(g.sub)
            r = np.empty_like(sub)
            for j in range(n):
                r[:, j] = sub[:, succ(j)]
        elif isinstance(g, Eventually):
            r = _until(np.ones((nwords, n), dtype=bool), ev(g.sub))
        elif isinstance(g, Globally):
            r = ~_until(np.ones((nwords, n), dtype=bool), ~ev(g.sub))
        elif isinstance(g, Until):
            r = _until(ev(g.left), ev(g.right))
        elif isinstance(g, Release):
            r = ~_until(~ev(g.left), ~ev(g.right))
        else:
            bit = atom_idx[g]
            r = ((letters >> bit) & 1).astype(bool)
        cache[g] = r
        return r

    def _until(lv, rv):
        v = np.zeros((nwords, n), dtype=bool)
        for _ in range(2):
            for j in range(n - 1, loop - 1, -1):
                v[:, j] = rv[:, j] | (lv[:, j] & v[:, succ(j)])
        for j in range(loop - 1, -1, -1):
            v[:, j] = rv[:, j] | (lv[:, j] & v[:, j + 1])
        return v

    return ev(f)[:, 0]


def exhaustive_lasso_agreement(f, max_total: int = 6):
    """Compare automaton acceptance with direct semantics over every
    lasso (prefix + cycle <= max_total) built from f's atoms.  Returns
    (n_lassos, mismatches) where mismatches is a list of (word, loop)."""
    atoms = sorted(atoms_of(f), key=repr)
    nat = len(atoms)
    L = 2**nat
    aut = translate(to_nnf(f))
    S = aut.n_states

    def letterset(l):
        return frozenset(a for i, a in enumerate(atoms) if (l >> i) & 1)

    mismatches = []
    total = 0

    if S == 0:
        # language empty: semantics must be uniformly false
        for n in range(1, max_total + 1):
            for loop in range(n):
                sem = _semantics_table(f, atoms, L, n, loop)
                total += len(sem)
                for w in np.nonzero(sem)[0]:
                    mismatches.append((int(w), n, loop))
        return total, mismatches

    C = np.zeros((L, S), dtype=bool)
    for l in range(L):
        ls = letterset(l)
        for s in range(S):
            C[l, s] = aut.letter_ok(s, ls)
    A = np.zeros((S, S), dtype=np.float32)
    for s in range(S):
        for t in aut.succ[s]:
            A[s, t] = 1.0
    init = np.zeros(S, dtype=bool)
    init[list(aut.initial)] = True
    acc_masks = []
    for acc in aut.accept_sets:
        m = np.zeros(S, dtype=bool)
        m[list(acc)] = True
        acc_masks.append(m)

    tables = _good_tables(aut, C, A, acc_masks, L, max_total)

    for n in range(1, max_total + 1):
        nwords = L**n
        powers = L ** np.arange(n, dtype=np.int64)
        ids = np.arange(nwords, dtype=np.int64)
        letters = (ids[:, None] // powers[None, :]) % L  # (m, n)

        # reach[l]: automaton states occupiable at position l after
        # reading the prefix, already filtered by position l's letter
        reach = C[letters[:, 0]] & init[None, :]
        for loop in range(n):
            c = n - loop
            cyc_ids = ids // (L**loop)
            good = tables[c][cyc_ids]
            accepted = np.any(reach & good, axis=1)
            sem = _semantics_table(f, atoms, L, n, loop)
            total += nwords
            bad = np.nonzero(accepted != sem)[0]
            for w in bad[:10]:
                mismatches.append((int(w), n, loop))
            if loop + 1 < n:
                nxt = _binarize(np.matmul(reach.astype(np.float32), A)) > 0
                reach = nxt & C[letters[:, loop + 1]]
    return total, mismatches


def decode_word(word_id: int, n: int, atoms) -> list:
    """The lasso word behind a mismatch report, as atom-sets."""
    L = 2 ** len(atoms)
    out = []
    for i in range(n):
        l = (word_id // L**i) % L
        out.append(frozenset(a for b, a in enumerate(atoms) if (l >> b) & 1))
    return out


# ---------------------------------------------------------------------------
# state-graph lasso enumeration (checker cross-check)


def enumerate_lassos(succ: dict, initials, max_walk: int = 12):
    """Every lasso of the graph whose prefix+cycle fits in max_walk
    nodes, via exhaustive walk enumeration.  Yields (prefix, cycle)."""
    seen = set()
    for init in initials:
        stack = [[init]]
        while stack:
            path = stack.pop()
            tail = path[-1]
            for j in range(len(path) - 1):
                if path[j] == tail:
                    key = (tuple(path[:j]), tuple(path[j:-1]))
                    if key not in seen:
                        seen.add(key)
                        yield path[:j], path[j:-1]
                    break
            if len(path) < max_walk:
                for nxt in succ[tail]:
                    stack.append(path + [nxt])


def graph_violation(mas, formula, atoms, max_walk: int = 12):
    """First lasso (within the walk bound) that falsifies the formula,
    or None.  The graph is the MAS's own reachable state space."""
    from .psl import state_letter

    initials = mas.initial_states()
    succ: dict = {}
    work = list(initials)
    seen = set(initials)
    while work:
        s = work.pop()
        succ[s] = mas.successors(s)
        for t in succ[s]:
            if t not in seen:
                seen.add(t)
                work.append(t)
    if len(seen) > 200:
        raise ValueError("oracle is only trusted on small graphs (%d states)" % len(seen))
    letters: dict = {}

    def letter(s):
        if s not in letters:
            letters[s] = state_letter(mas, s, atoms)
        return letters[s]

    for prefix, cycle in enumerate_lassos(succ, initials, max_walk):
        word = [letter(s) for s in prefix + cycle]
        if not eval_on_lasso(formula, word, len(prefix)):
            return prefix, cycle
    return None
