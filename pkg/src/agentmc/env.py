"""Multi-agent system composition over an unconstrained environment.

A system step gives one reasoning slot to the agent whose turn it is.
Agents are deterministic, so all branching comes from the environment:
percept assignments, environment-originated messages, and delivery or
loss of agent-to-agent messages.  Those choices are made only at action
points (when the executing slot emits an action, performative action,
query, or send) and once at the root, and the chosen percepts persist
until the next action point.

``last_action`` is a pulse: it names the action emitted by the step
that produced this state and is cleared by the following step.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, replace
from typing import Optional

import yaml

from .interpreter import AgentState, initial_state, perceive, reasoning_step
from .lang.ast import AgentProgram
from .lang.parser import parse_agent_file, parse_term
from .terms import Term


class EnvError(Exception):
    pass


class UnknownRecipient(EnvError):
    pass


@dataclass(frozen=True)
class PerceptGroup:
    mode: str  # "optional" | "one_of" | "maybe_one_of" | "always"
    terms: tuple  # candidate ground terms
    agents: Optional[frozenset] = None  # visibility; None = everyone

    def choices(self) -> list:
        """Alternative term tuples this group can contribute."""
        if self.mode == "always":
            return [self.terms]
        if self.mode == "optional":
            return [(), self.terms]
        if self.mode == "one_of":
            return [(t,) for t in self.terms]
        if self.mode == "maybe_one_of":
            return [()] + [(t,) for t in self.terms]
        raise EnvError("unknown percept mode %r" % self.mode)


@dataclass(frozen=True)
class MessageGroup:
    """A message the environment may deliver whenever a choice point occurs.

    mode "repeat" allows redelivery at any later choice point; mode "once"
    spends the group on first delivery.
    """

    recipient: str
    performative: str  # "tell" | "perform"
    content: Term
    sender: str = "env"
    mode: str = "repeat"  # "repeat" | "once"


@dataclass(frozen=True)
class MASState:
    agents: tuple  # AgentState per agent, fixed order
    sigma: tuple = ()  # shared beliefs, insertion order
    percepts: tuple = ()  # current environment percept assignment
    inboxes: tuple = ()  # per agent: ((sender, performative, content), ...)
    pending: tuple = ()  # undelivered agent messages: (sender, recipient, perf, content)
    delivered: frozenset = frozenset()  # indices of spent env message groups
    last_action: Optional[tuple] = None  # (agent_name, action term) pulse
    turn: int = 0


class MAS:
    def __init__(
        self,
        programs,
        percept_groups=(),
        message_groups=(),
        shared=(),
        name: str = "mas",
    ):
        self.name = name
        self.programs = list(programs)
        self.agent_names = [p.name for p in self.programs]
        if len(set(self.agent_names)) != len(self.agent_names):
            raise EnvError("duplicate agent names: %r" % self.agent_names)
        self.index = {n: i for i, n in enumerate(self.agent_names)}
        self.percept_groups = list(percept_groups)
        self.message_groups = list(message_groups)
        self.shared = tuple(shared)
        self._succ_cache: dict = {}

    # --- environment choice enumeration ------------------------------------

    def _percept_assignments(self) -> list:
        alts = [g.choices() for g in self.percept_groups]
        out = []
        for combo in itertools.product(*alts):
            terms = tuple(t for part in combo for t in part)
            out.append(terms)
        return out or [()]

    def _visible(self, percepts: tuple, agent: str) -> list:
        vis = []
        for g in self.percept_groups:
            if g.agents is not None and agent not in g.agents:
                continue
            for t in g.terms:
                if t in percepts and t not in vis:
                    vis.append(t)
        return vis

    def _message_choices(self, delivered: frozenset) -> list:
        """Each undelivered env message is independently delivered now or
        postponed; returns a list of index tuples to deliver."""
        open_idx = [
            i
            for i, g in enumerate(self.message_groups)
            if g.recipient in self.index and (g.mode == "repeat" or i not in delivered)
        ]
        out = []
        for mask in itertools.product([False, True], repeat=len(open_idx)):
            out.append(tuple(i for i, on in zip(open_idx, mask) if on))
        return out

    def _spent(self, delivered: frozenset, deliver) -> frozenset:
        once = {i for i in deliver if self.message_groups[i].mode == "once"}
        return delivered | once if once else delivered

    # --- state construction -------------------------------------------------

    def initial_states(self) -> list:
        base = tuple(initial_state(p) for p in self.programs)
        states = []
        for percepts in self._percept_assignments():
            for deliver in self._message_choices(frozenset()):
                inboxes = [[] for _ in self.programs]
                for i in deliver:
                    g = self.message_groups[i]
                    inboxes[self.index[g.recipient]].append((g.sender, g.performative, g.content))
                states.append(
                    MASState(
                        agents=base,
                        sigma=self.shared,
                        percepts=percepts,
                        inboxes=tuple(tuple(x) for x in inboxes),
                        delivered=self._spent(frozenset(), deliver),
                    )
                )
        return states

    def successors(self, state: MASState) -> tuple:
        cached = self._succ_cache.get(state)
        if cached is None:
            cached = tuple(self._successors(state))
            self._succ_cache[state] = cached
        return cached

    def mas_step(self, state: MASState, choice: int) -> MASState:
        return self.successors(state)[choice]

    def branch_count(self, state: MASState) -> int:
        return len(self.successors(state))

    def _successors(self, state: MASState):
        i = state.turn
        program = self.programs[i]
        agent = state.agents[i]

        view = self._visible(state.percepts, program.name)
        view += [t for t in state.sigma if t not in view]
        st1 = perceive(program, agent, view, state.inboxes[i])
        out = reasoning_step(program, st1)

        sigma = list(state.sigma)
        for op, t in out.shared_ops:
            if op == "+":
                if t not in sigma:
                    sigma.append(t)
            else:
                sigma = [b for b in sigma if b != t]
        sigma = tuple(sigma)

        pending = list(state.pending)
        for rec, perf, content in out.messages:
            if rec in self.index:
                pending.append((program.name, rec, perf, content))
            # unknown recipients: the message vanishes

        agents = list(state.agents)
        agents[i] = out.state
        inboxes = [list(x) for x in state.inboxes]
        inboxes[i] = []
        turn = (i + 1) % len(self.programs)

        if out.action is None:
            yield MASState(
                agents=tuple(agents),
                sigma=sigma,
                percepts=state.percepts,
                inboxes=tuple(tuple(x) for x in inboxes),
                pending=tuple(pending),
                delivered=state.delivered,
                last_action=None,
                turn=turn,
            )
            return

        # action point: branch over fresh percepts, env messages, and the
        # fate of every pending agent message
        last_action = (program.name, out.action)
        for percepts in self._percept_assignments():
            for deliver in self._message_choices(state.delivered):
                n_pend = len(pending)
                for keep_mask in itertools.product([False, True], repeat=n_pend):
                    boxes = [list(x) for x in inboxes]
                    for j in deliver:
                        g = self.message_groups[j]
                        boxes[self.index[g.recipient]].append(
                            (g.sender, g.performative, g.content)
                        )
                    for (sender, rec, perf, content), kept in zip(pending, keep_mask):
                        if kept:
                            boxes[self.index[rec]].append((sender, perf, content))
                    yield MASState(
                        agents=tuple(agents),
                        sigma=sigma,
                        percepts=percepts,
                        inboxes=tuple(tuple(x) for x in boxes),
                        pending=(),
                        delivered=self._spent(state.delivered, deliver),
                        last_action=last_action,
                        turn=turn,
                    )


# ---------------------------------------------------------------------------
# declaration files


def _parse_goal(src: str):
    term, _, kind = src.partition("[")
    kind = kind.strip().rstrip("]").strip() or "achieve"
    if kind not in ("achieve", "perform"):
        raise EnvError("unknown goal kind %r" % kind)
    return (parse_term(term), kind)


def load_env(path) -> MAS:
    """Build a MAS from a YAML environment declaration.

    Schema:
      name: cruise
      agents:
        - car.agent                       # paths relative to the file
        - {file: sat.agent, name: ag1,
           beliefs: [my_name(ag1)],       # appended to the program's own
           goals: ["some_formation [achieve]"]}
      shared: [in_formation]              # initial shared beliefs
      percepts:
        - {mode: optional, term: safe, agents: [car]}
        - {mode: one_of, terms: ["at(1,1)", "at(2,1)"]}
      messages:
        - {to: lifter, performative: tell, content: "human(1,1)", mode: once}
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh) or {}
    base = os.path.dirname(os.path.abspath(str(path)))
    programs = []
    for entry in doc.get("agents", []):
        if isinstance(entry, str):
            entry = {"file": entry}
        program = parse_agent_file(os.path.join(base, entry["file"]), entry.get("name", ""))
        if entry.get("name"):
            # the instantiation name wins over the file's own header, so one
            # program file can be instantiated several times
            program.name = str(entry["name"])
        for b in entry.get("beliefs", ()):
            program.beliefs.append(parse_term(str(b)))
        for g in entry.get("goals", ()):
            program.goals.append(_parse_goal(str(g)))
        programs.append(program)
    groups = []
    for g in doc.get("percepts", []):
        mode = g.get("mode", "optional")
        if "terms" in g:
            terms = tuple(parse_term(str(t)) for t in g["terms"])
        else:
            terms = (parse_term(str(g["term"])),)
        agents = frozenset(g["agents"]) if "agents" in g else None
        groups.append(PerceptGroup(mode, terms, agents))
    messages = []
    for m in doc.get("messages", []):
        messages.append(
            MessageGroup(
                recipient=str(m["to"]),
                performative=str(m.get("performative", "tell")),
                content=parse_term(str(m["content"])),
                sender=str(m.get("from", "env")),
                mode=str(m.get("mode", "repeat")),
            )
        )
    shared = tuple(parse_term(str(t)) for t in doc.get("shared", []))
    return MAS(
        programs,
        percept_groups=groups,
        message_groups=messages,
        shared=shared,
        name=str(doc.get("name", os.path.splitext(os.path.basename(str(path)))[0])),
    )
