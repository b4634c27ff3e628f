"""Parser for .agent files.

Accepted surface syntax (both header spellings occur in the wild):

    :name: searcher
    :Initial Beliefs:   square(0,0); ...
    :Initial Goals:     leave [achieve];
    :Belief Rules:      (or "Rules")
    B area_empty :- lnot(B square(X,Y) & lnotB empty(X,Y));
    :Plans:             (or "Plans")
    +!leave [achieve] : { B at(X,Y) } <- move_to(X,Y), +at(X,Y);

Statements end with ';'.  '//' starts a comment.  Identifiers starting
with an upper-case letter are variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..terms import (
    BeliefAtom,
    BeliefRule,
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
    ACHIEVE,
    PERFORM,
    Action,
    AddBelief,
    AddGoal,
    AgentProgram,
    AssertShared,
    Calculate,
    Compute,
    Deed,
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


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__("%s (line %d, col %d)" % (msg, line, col))
        self.line = line
        self.col = col


@dataclass
class Tok:
    kind: str
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<string>"[^"\n]*")
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><-|:-|\+!|-!|\+\.|-\.|[(){}\[\],;:.+\-*<>=&~|@])
    """,
    re.VERBOSE,
)


def tokenize(src: str) -> list:
    toks = []
    line, col = 1, 1
    i = 0
    while i < len(src):
        m = _TOKEN_RE.match(src, i)
        if not m:
            raise ParseError("unexpected character %r" % src[i], line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            if kind == "ident" and text in ("lnotB", "lnotG"):
                # common glued spellings of "lnot B" / "lnot G"
                toks.append(Tok("ident", "lnot", line, col))
                toks.append(Tok("ident", text[-1], line, col + 4))
            else:
                toks.append(Tok(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        i = m.end()
    toks.append(Tok("eof", "", line, col))
    return toks


_HEADERS = {
    "name": "name",
    "initial beliefs": "beliefs",
    "initial goals": "goals",
    "belief rules": "rules",
    "rules": "rules",
    "plans": "plans",
    "shared beliefs": "beliefs",
}


class Parser:
    def __init__(self, src: str, name: str = ""):
        self.toks = tokenize(src)
        self.pos = 0
        self.src = src
        self.name = name

    # --- token helpers -----------------------------------------------------

    def peek(self, ahead: int = 0) -> Tok:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, value: str) -> Tok:
        t = self.next()
        if t.value != value:
            raise ParseError("expected %r, found %r" % (value, t.value or "eof"), t.line, t.col)
        return t

    def at(self, value: str, ahead: int = 0) -> bool:
        return self.peek(ahead).value == value

    def error(self, msg: str) -> ParseError:
        t = self.peek()
        return ParseError(msg, t.line, t.col)

    # --- top level ----------------------------------------------------------

    def parse_program(self) -> AgentProgram:
        prog = AgentProgram(name=self.name, beliefs=[], goals=[], rules=[], plans=[], source=self.src)
        section = None
        while self.peek().kind != "eof":
            hdr = self._try_header()
            if hdr is not None:
                if hdr == "name":
                    t = self.next()
                    if t.kind != "ident":
                        raise ParseError("agent name expected", t.line, t.col)
                    prog.name = t.value
                    if self.at(":"):
                        self.next()
                    section = None
                else:
                    section = hdr
                continue
            if section is None:
                raise self.error("statement outside of any section")
            if section == "beliefs":
                prog.beliefs.append(self.parse_term())
                self.expect(";")
            elif section == "goals":
                term = self.parse_term()
                kind = self._opt_goal_kind() or ACHIEVE
                prog.goals.append((term, kind))
                self.expect(";")
            elif section == "rules":
                prog.rules.append(self.parse_rule())
            elif section == "plans":
                prog.plans.append(self.parse_plan())
        return prog

    def _try_header(self) -> Optional[str]:
        # headers look like ":Initial Beliefs:" or "Plans" on their own line
        start = self.pos
        if self.at(":"):
            self.next()
        words = []
        while self.peek().kind == "ident" and len(words) < 3:
            cand = " ".join(w.lower() for w in words + [self.peek().value])
            if cand in _HEADERS or any(h.startswith(cand + " ") for h in _HEADERS):
                words.append(self.next().value)
            else:
                break
        key = " ".join(w.lower() for w in words)
        if key in _HEADERS:
            if self.at(":"):
                self.next()
            if key == "name":
                return "name"
            return _HEADERS[key]
        self.pos = start
        return None

    # --- terms ---------------------------------------------------------------

    def parse_term(self) -> Term:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return Const(int(t.value))
        if t.kind == "string":
            self.next()
            return Const(t.value[1:-1])
        if t.kind == "ident":
            self.next()
            if self.at("("):
                self.next()
                args = [self.parse_term()]
                while self.at(","):
                    self.next()
                    args.append(self.parse_term())
                self.expect(")")
                return Struct(t.value, tuple(args))
            if t.value[0].isupper():
                return Var(t.value)
            return Const(t.value)
        raise ParseError("term expected, found %r" % (t.value or "eof"), t.line, t.col)

    def parse_arith(self) -> Term:
        left = self.parse_term()
        while self.peek().value in ("+", "-"):
            op = self.next().value
            right = self.parse_term()
            left = Struct(op, (left, right))
        return left

    # --- guards ---------------------------------------------------------------

    def parse_guard(self) -> Guard:
        parts = [self.parse_guard_element()]
        while self.peek().value in (",", "&"):
            self.next()
            parts.append(self.parse_guard_element())
        if len(parts) == 1:
            return parts[0]
        return Conjunction(tuple(parts))

    def parse_guard_element(self) -> Guard:
        t = self.peek()
        if t.value in ("lnot", "~"):
            self.next()
            if self.at("("):
                self.next()
                inner = self.parse_guard()
                self.expect(")")
                return Negation(inner)
            return Negation(self.parse_guard_element())
        if t.value == "(":
            self.next()
            inner = self.parse_guard()
            self.expect(")")
            return inner
        if t.value == "True":
            self.next()
            return TrueGuard()
        if t.value == "B" and self._starts_term(1):
            self.next()
            return BeliefAtom(self.parse_term())
        if t.value == "G" and self._starts_term(1):
            self.next()
            term = self.parse_term()
            kind = self._opt_goal_kind()
            return GoalAtom(term, kind)
        # bare comparison between arithmetic expressions
        left = self.parse_arith()
        op = self.peek().value
        if op not in ("<", ">", "="):
            raise self.error("comparison operator expected in guard")
        self.next()
        right = self.parse_arith()
        return Comparison(left, op, right)

    def _starts_term(self, ahead: int) -> bool:
        t = self.peek(ahead)
        return t.kind in ("ident", "int", "string")

    def _opt_goal_kind(self) -> Optional[str]:
        if self.at("["):
            self.next()
            t = self.next()
            if t.value not in (ACHIEVE, PERFORM):
                raise ParseError("goal kind 'achieve' or 'perform' expected", t.line, t.col)
            self.expect("]")
            return t.value
        return None

    # --- rules ------------------------------------------------------------------

    def parse_rule(self) -> BeliefRule:
        self.expect("B")
        head = self.parse_term()
        self.expect(":-")
        body = self.parse_guard()
        self.expect(";")
        return BeliefRule(head, body)

    # --- plans ------------------------------------------------------------------

    def parse_plan(self) -> Plan:
        t0 = self.peek()
        trigger = self.parse_trigger()
        self.expect(":")
        self.expect("{")
        guard = self.parse_guard()
        self.expect("}")
        body: list = []
        if self.at("<-"):
            self.next()
            body.append(self.parse_deed())
            while self.at(","):
                self.next()
                body.append(self.parse_deed())
        self.expect(";")
        return Plan(trigger, guard, tuple(body), line=t0.line)

    def parse_trigger(self) -> TriggerEvent:
        t = self.next()
        if t.value == "+!":
            term = self.parse_term()
            kind = self._opt_goal_kind() or ACHIEVE
            return TriggerEvent("add_goal", term, kind)
        if t.value == "+":
            return TriggerEvent("add_belief", self.parse_term())
        if t.value == "-":
            return TriggerEvent("remove_belief", self.parse_term())
        raise ParseError("plan trigger expected (+b, -b or +!g)", t.line, t.col)

    def parse_deed(self) -> Deed:
        t = self.peek()
        if t.value == "+!":
            self.next()
            term = self.parse_term()
            kind = self._opt_goal_kind() or ACHIEVE
            return AddGoal(term, kind)
        if t.value == "-!":
            self.next()
            term = self.parse_term()
            kind = self._opt_goal_kind() or ACHIEVE
            return DropGoal(term, kind)
        if t.value == "+.":
            self.next()
            self.expect("lock")
            return Lock()
        if t.value == "-.":
            self.next()
            self.expect("lock")
            return Unlock()
        if t.value == "+":
            self.next()
            return AddBelief(self.parse_term())
        if t.value == "-":
            self.next()
            return RemoveBelief(self.parse_term())
        if t.value == "*":
            self.next()
            return WaitFor(BeliefAtom(self.parse_term()))
        if t.value == ".":
            self.next()
            name = self.next()
            if name.value == "send":
                return self._parse_dot_send()
            if name.value == "query":
                self.expect("(")
                term = self.parse_term()
                self.expect(")")
                return Query(term)
            if name.value == "calculate":
                self.expect("(")
                expr = self.parse_term()
                self.expect(",")
                res = self.parse_term()
                self.expect(")")
                return Calculate(expr, res)
            raise ParseError("unknown directive .%s" % name.value, name.line, name.col)
        if t.kind == "ident":
            if t.value == "perf" and self.at("(", 1):
                self.next()
                self.next()
                term = self.parse_term()
                self.expect(")")
                return Perf(term)
            if t.value == "query" and self.at("(", 1):
                self.next()
                self.next()
                term = self.parse_term()
                self.expect(")")
                return Query(term)
            if t.value == "assert_shared" and self.at("(", 1):
                self.next()
                self.next()
                term = self.parse_term()
                self.expect(")")
                return AssertShared(term)
            if t.value == "remove_shared" and self.at("(", 1):
                self.next()
                self.next()
                term = self.parse_term()
                self.expect(")")
                return RemoveShared(term)
            if t.value == "send" and self.at("(", 1):
                self.next()
                self.next()
                recipient = self.parse_term()
                self.expect(",")
                if self.at("B") and self._starts_term(1):
                    self.next()
                content = self.parse_term()
                self.expect(")")
                return Send(recipient, "tell", content)
            if t.value[0].isupper() and self.at("=", 1):
                # computed binding:  J = I + 1
                var = self.parse_term()
                self.expect("=")
                expr = self.parse_arith()
                return Compute(var, expr)
            return Action(self.parse_term())
        raise ParseError("deed expected, found %r" % (t.value or "eof"), t.line, t.col)

    def _parse_dot_send(self) -> Send:
        self.expect("(")
        recipient = self.parse_term()
        self.expect(",")
        self.expect(":")
        perf = self.next()
        if perf.value not in ("tell", "perform", "achieve"):
            raise ParseError("performative :tell or :perform expected", perf.line, perf.col)
        performative = "perform" if perf.value in ("perform", "achieve") else "tell"
        self.expect(",")
        content = self.parse_term()
        self.expect(")")
        return Send(recipient, performative, content)


def parse_term(src: str) -> Term:
    """Parse a single term, e.g. ``at(3, 4)``."""
    p = Parser(src)
    t = p.parse_term()
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError("trailing input after term: %r" % tok.value, tok.line, tok.col)
    return t


def parse_agent(src: str, name: str = "") -> AgentProgram:
    """Parse an agent program; raises ParseError with line/column info."""
    return Parser(src, name).parse_program()


def parse_agent_file(path, name: str = "") -> AgentProgram:
    with open(path, "r", encoding="utf-8") as fh:
        src = fh.read()
    prog = parse_agent(src, name)
    if not prog.name:
        import os

        prog.name = os.path.splitext(os.path.basename(str(path)))[0]
    return prog
