"""Property language: temporal formulas over agent-state observations.

Atomic observations on a system state:
  B(ag, f)  agent ag can derive belief f (base plus belief rules)
  G(ag, f)  ag has goal f
  A(ag, f)  ag's most recent step emitted action f (pulse: holds only in
            the state that action produced; perf/query wrappers unwrap)
  I(ag, f)  ag intends f: has the goal and a selected plan for it
  P(f)      f is an environment percept or shared belief

``rec(S, M)`` inside a belief argument abbreviates ``received(S, M)``.
Bounded quantifiers range over declared finite domains of ground terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

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
    conj,
    disj,
)
from .lang.parser import ParseError, Parser
from .terms import BeliefAtom, Solver, Struct, Term, apply_subst, term_vars, unify


@dataclass(frozen=True)
class BAtom:
    agent: str
    term: Term


@dataclass(frozen=True)
class GAtom:
    agent: str
    term: Term


@dataclass(frozen=True)
class AAtom:
    agent: str
    term: Term


@dataclass(frozen=True)
class IAtom:
    agent: str
    term: Term


@dataclass(frozen=True)
class PAtom:
    term: Term


@dataclass(frozen=True)
class ForAll:
    pattern: Term
    domain: str
    body: object


@dataclass(frozen=True)
class Exists:
    pattern: Term
    domain: str
    body: object


MODAL_ATOMS = (BAtom, GAtom, AAtom, IAtom, PAtom)


# ---------------------------------------------------------------------------
# quantifier expansion and substitution


def subst_formula(f, s: dict):
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, PAtom):
        return PAtom(apply_subst(f.term, s))
    if isinstance(f, (BAtom, GAtom, AAtom, IAtom)):
        return type(f)(f.agent, apply_subst(f.term, s))
    if isinstance(f, Not):
        return Not(subst_formula(f.sub, s))
    if isinstance(f, (Next, Eventually, Globally)):
        return type(f)(subst_formula(f.sub, s))
    if isinstance(f, (And, Or, Implies, Until, Release)):
        return type(f)(subst_formula(f.left, s), subst_formula(f.right, s))
    if isinstance(f, (ForAll, Exists)):
        shadowed = term_vars(f.pattern)
        inner = {k: v for k, v in s.items() if k not in shadowed}
        return type(f)(f.pattern, f.domain, subst_formula(f.body, inner))
    raise TypeError("cannot substitute in %r" % (f,))


def expand_quantifiers(f, domains: dict):
    """Rewrite bounded quantifiers into finite conjunctions/disjunctions."""
    if isinstance(f, (ForAll, Exists)):
        if f.domain not in domains:
            raise KeyError("unknown domain %r" % f.domain)
        parts = []
        for entry in domains[f.domain]:
            s = unify(f.pattern, entry)
            if s is None:
                continue
            parts.append(expand_quantifiers(subst_formula(f.body, s), domains))
        return conj(parts) if isinstance(f, ForAll) else disj(parts)
    if isinstance(f, Not):
        return Not(expand_quantifiers(f.sub, domains))
    if isinstance(f, (Next, Eventually, Globally)):
        return type(f)(expand_quantifiers(f.sub, domains))
    if isinstance(f, (And, Or, Implies, Until, Release)):
        return type(f)(
            expand_quantifiers(f.left, domains), expand_quantifiers(f.right, domains)
        )
    return f


def _rewrite_rec(t: Term) -> Term:
    if isinstance(t, Struct):
        args = tuple(_rewrite_rec(a) for a in t.args)
        functor = "received" if t.functor == "rec" and len(t.args) == 2 else t.functor
        return Struct(functor, args)
    return t


# ---------------------------------------------------------------------------
# atom evaluation on a system state


def eval_atom(atom, mas, state) -> bool:
    if isinstance(atom, PAtom):
        pool = list(state.percepts) + list(state.sigma)
        return any(unify(atom.term, t) is not None for t in pool)
    if isinstance(atom, AAtom):
        if state.last_action is None or state.last_action[0] != atom.agent:
            return False
        act = state.last_action[1]
        if unify(atom.term, act) is not None:
            return True
        if isinstance(act, Struct) and act.functor in ("perf", "query") and len(act.args) == 1:
            return unify(atom.term, act.args[0]) is not None
        return False
    idx = mas.index.get(atom.agent)
    if idx is None:
        return False
    agent = state.agents[idx]
    program = mas.programs[idx]
    if isinstance(atom, BAtom):
        solver = Solver(agent.all_beliefs(), program.rules, agent.goals)
        return solver.holds(BeliefAtom(_rewrite_rec(atom.term)))
    if isinstance(atom, GAtom):
        return any(unify(atom.term, g) is not None for g, _ in agent.goals)
    if isinstance(atom, IAtom):
        if not any(unify(atom.term, g) is not None for g, _ in agent.goals):
            return False
        for it in agent.intentions:
            for f in it.frames:
                if (
                    f.goal is not None
                    and f.selected
                    and unify(atom.term, f.goal) is not None
                ):
                    return True
        return False
    raise TypeError("not a modal atom: %r" % (atom,))


def state_letter(mas, state, atoms) -> frozenset:
    """The set of tracked atoms holding in a system state."""
    return frozenset(a for a in atoms if eval_atom(a, mas, state))


# ---------------------------------------------------------------------------
# surface syntax
#
#   domain cells = { at(1,1), at(1,2) };
#   hypothesis Live = [] (B(car, safe) -> <> A(car, accelerate));
#   property p1 assumes Live = [] ~ (B(car, crashed));
#
# Connective precedence, tightest first:
#   ~  []  <>  X   (prefix)  >  U, R (right assoc)  >  &  >  |  >  ->
# Quantifiers (forall/exists PATTERN in DOMAIN . BODY) extend to the
# right as far as possible.  @name splices a previously defined formula.


@dataclass
class Property:
    name: str
    formula: object
    assumes: tuple = ()


@dataclass
class PropsFile:
    domains: dict
    defs: dict  # every named formula (hypotheses and properties)
    hypotheses: dict
    properties: dict  # name -> Property, insertion ordered


class _PslParser(Parser):
    def __init__(self, src: str):
        super().__init__(src)
        self.domains: dict = {}
        self.defs: dict = {}
        self.hypotheses: dict = {}
        self.properties: dict = {}

    def parse_file(self) -> PropsFile:
        while self.peek().kind != "eof":
            kw = self.next()
            if kw.value == "domain":
                self._domain()
            elif kw.value == "hypothesis":
                self._named(self.hypotheses)
            elif kw.value == "property":
                self._named(self.properties, as_property=True)
            elif kw.value == "formula":
                self._named({})
            else:
                raise ParseError(
                    "expected domain/hypothesis/property/formula, found %r" % kw.value,
                    kw.line,
                    kw.col,
                )
        return PropsFile(self.domains, self.defs, self.hypotheses, self.properties)

    def _ident(self) -> str:
        t = self.next()
        if t.kind != "ident":
            raise ParseError("name expected, found %r" % (t.value or "eof"), t.line, t.col)
        return t.value

    def _domain(self):
        name = self._ident()
        self.expect("=")
        self.expect("{")
        entries = []
        if not self.at("}"):
            entries.append(self.parse_term())
            while self.at(","):
                self.next()
                entries.append(self.parse_term())
        self.expect("}")
        self.expect(";")
        self.domains[name] = tuple(entries)

    def _named(self, table: dict, as_property: bool = False):
        name = self._ident()
        assumes = []
        if self.at("assumes"):
            self.next()
            assumes.append(self._ident())
            while self.at(","):
                self.next()
                assumes.append(self._ident())
        self.expect("=")
        f = self.parse_formula()
        self.expect(";")
        if name in self.defs:
            raise self.error("duplicate formula name %r" % name)
        self.defs[name] = f
        if as_property:
            for a in assumes:
                if a not in self.defs:
                    raise self.error("property %r assumes undefined %r" % (name, a))
            table[name] = Property(name, f, tuple(assumes))
        else:
            if assumes:
                raise self.error("only properties may carry assumptions")
            table[name] = f

    # --- formulas ----------------------------------------------------------

    def parse_formula(self):
        return self._implies()

    def _implies(self):
        left = self._or()
        if self.at("-") and self.at(">", 1):
            self.next()
            self.next()
            return Implies(left, self._implies())
        return left

    def _or(self):
        left = self._and()
        while self.at("|"):
            self.next()
            left = Or(left, self._and())
        return left

    def _and(self):
        left = self._until()
        while self.at("&"):
            self.next()
            left = And(left, self._until())
        return left

    def _until(self):
        left = self._unary()
        if self.at("U") or self.at("R"):
            op = self.next().value
            right = self._until()
            return Until(left, right) if op == "U" else Release(left, right)
        return left

    def _unary(self):
        t = self.peek()
        if t.value == "~":
            self.next()
            return Not(self._unary())
        if t.value == "[" and self.at("]", 1):
            self.next()
            self.next()
            return Globally(self._unary())
        if t.value == "<" and self.at(">", 1):
            self.next()
            self.next()
            return Eventually(self._unary())
        if t.value == "X":
            self.next()
            return Next(self._unary())
        if t.value in ("forall", "exists"):
            self.next()
            pattern = self.parse_term()
            self.expect("in")
            dom = self._ident()
            self.expect(".")
            body = self.parse_formula()
            cls = ForAll if t.value == "forall" else Exists
            return cls(pattern, dom, body)
        if t.value == "(":
            self.next()
            inner = self.parse_formula()
            self.expect(")")
            return inner
        if t.value == "@":
            self.next()
            name = self._ident()
            if name not in self.defs:
                raise self.error("reference to undefined formula %r" % name)
            return self.defs[name]
        if t.value == "true":
            self.next()
            return TrueF()
        if t.value == "false":
            self.next()
            return FalseF()
        return self._modal_atom()

    def _modal_atom(self):
        t = self.next()
        if t.kind != "ident" or t.value not in ("B", "G", "A", "I", "P"):
            raise ParseError(
                "formula atom expected, found %r" % (t.value or "eof"), t.line, t.col
            )
        self.expect("(")
        if t.value == "P":
            term = self.parse_term()
            self.expect(")")
            return PAtom(term)
        ag = self._ident()
        self.expect(",")
        term = self.parse_term()
        self.expect(")")
        return {"B": BAtom, "G": GAtom, "A": AAtom, "I": IAtom}[t.value](ag, term)


def parse_props(src: str) -> PropsFile:
    return _PslParser(src).parse_file()


def load_props(path) -> PropsFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_props(fh.read())


def ground_property(pf: PropsFile, name: str):
    """The property formula with quantifiers expanded, plus its expanded
    hypothesis formulas in declaration order."""
    prop = pf.properties[name]
    hyps = [expand_quantifiers(pf.defs[a], pf.domains) for a in prop.assumes]
    return expand_quantifiers(prop.formula, pf.domains), hyps


def formula_atoms(f) -> frozenset:
    return frozenset(a for a in atoms_of(f) if isinstance(a, MODAL_ATOMS))
