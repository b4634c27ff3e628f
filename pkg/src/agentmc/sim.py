"""Concrete simulation harnesses (non-verification runs).

The verification environment over-approximates; these drivers supply
actual dynamics instead: closed-form kinematics for the two-car
following scenario and a grid world for search-and-rescue.  Percepts
are computed from the concrete state each cycle, so seeded runs act as
runtime shadows of the verified properties.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .interpreter import initial_state, perceive, reasoning_step
from .terms import Const, Struct


class DomainError(ValueError):
    pass


class PreconditionViolation(ValueError):
    pass


class OutOfBounds(ValueError):
    pass


# ---------------------------------------------------------------------------
# two-car kinematics


@dataclass(frozen=True)
class CruiseParams:
    x_f: float  # follower position (m)
    v_f: float  # follower velocity (m/s)
    x_l: float  # leader position (m)
    v_l: float  # leader velocity (m/s)
    A: float = 1.0  # max acceleration
    B: float = 5.0  # max braking
    b: float = 2.0  # min braking
    eps: float = 1.0  # reaction-time bound (s)

    def validate(self):
        if self.b <= 0 or self.B <= 0:
            raise DomainError("braking rates must be positive (b=%r, B=%r)" % (self.b, self.B))
        if self.b > self.B:
            raise DomainError("min braking b must not exceed max braking B")
        if self.A < 0 or self.eps < 0:
            raise DomainError("A and eps must be non-negative")
        if self.v_f < 0 or self.v_l < 0:
            raise DomainError("velocities must be non-negative")


def safe_epsilon(p: CruiseParams) -> bool:
    """Worst-case stopping-distance bound: the follower, accelerating at
    A for up to eps before braking at only b, must still stop short of
    where the leader stops under full braking B."""
    p.validate()
    lhs = p.x_f + p.v_f**2 / (2 * p.b) + (p.A / p.b + 1) * (p.A / 2 * p.eps**2)
    rhs = p.x_l + p.v_l**2 / (2 * p.B)
    return lhs < rhs


def _advance(x: float, v: float, a: float, dt: float) -> tuple:
    # velocity clamps at zero: cars do not reverse
    if a < 0 and v + a * dt < 0:
        t_stop = v / -a
        return x + v * t_stop + a * t_stop**2 / 2, 0.0
    return x + v * dt + a * dt**2 / 2, v + a * dt


def cruise_sim_step(p: CruiseParams, a_f: float, a_l: float, dt: float):
    """One exact kinematic step; returns (new params, percepts)."""
    p.validate()
    if dt > p.eps:
        raise PreconditionViolation("dt=%r exceeds reaction bound eps=%r" % (dt, p.eps))
    for a in (a_f, a_l):
        if not (-p.B <= a <= p.A):
            raise PreconditionViolation("acceleration %r outside [-B, A]" % a)
    x_f, v_f = _advance(p.x_f, p.v_f, a_f, dt)
    x_l, v_l = _advance(p.x_l, p.v_l, a_l, dt)
    p2 = replace(p, x_f=x_f, v_f=v_f, x_l=x_l, v_l=v_l)
    percepts = ("safe",) if safe_epsilon(p2) else ()
    return p2, percepts


# ---------------------------------------------------------------------------
# grid world


def grid_sim_step(grid: tuple, robot_pos: tuple, human_pos: tuple, action):
    """Apply a move_to(X, Y) action; returns (new robot_pos, percepts).
    The human never moves."""
    w, h = grid
    if isinstance(action, Struct) and action.functor == "move_to" and len(action.args) == 2:
        xs = [a.value for a in action.args]
        x, y = xs
        if not (0 <= x < w and 0 <= y < h):
            raise OutOfBounds("move_to(%r, %r) on %dx%d grid" % (x, y, w, h))
        robot_pos = (x, y)
    percepts = ("human",) if robot_pos == human_pos else ()
    return robot_pos, percepts


# ---------------------------------------------------------------------------
# seeded drivers


def _unwrap(action):
    if isinstance(action, Struct) and action.functor in ("perf", "query") and len(action.args) == 1:
        return action.args[0]
    return action


def _agent_cycle(program, state, percepts, budget: int = 50):
    """Perceive once, then reason until an action is emitted or the
    agent goes quiescent; returns (state, action or None, stuck)."""
    state = perceive(program, state, percepts)
    for _ in range(budget):
        out = reasoning_step(program, state)
        state = out.state
        if out.action is not None:
            return state, out.action, False
        if out.stuck or (
            not state.events
            and not any(it.runnable() for it in state.intentions)
            and not state.goals
        ):
            return state, None, out.stuck
    return state, None, False


def simulate_rescue(program, human_pos: tuple, grid: tuple = (3, 3), max_cycles: int = 200):
    """Run the searcher against a concrete grid; returns a trace of
    per-cycle dicts and the final agent state."""
    robot = (0, 0)
    state = initial_state(program)
    trace = []
    for cycle in range(max_cycles):
        percepts = [Const("human")] if robot == human_pos else []
        state, action, _ = _agent_cycle(program, state, percepts)
        entry = {
            "cycle": cycle,
            "robot": robot,
            "percepts": [str(p.value) for p in percepts],
            "action": None,
        }
        if action is not None:
            act = _unwrap(action)
            entry["action"] = repr(act)
            if isinstance(act, Struct) and act.functor == "move_to":
                robot, _ = grid_sim_step(grid, robot, human_pos, act)
        trace.append(entry)
        if action is None:
            break
    return trace, state


def simulate_cruise(program, seed: int, steps: int = 100, params: CruiseParams = None):
    """Seeded two-car run: the leader brakes/coasts/accelerates at
    random, driver inputs are random booleans, the agent controls the
    follower.  Returns a per-step trace."""
    rng = random.Random(seed)
    p = params or CruiseParams(x_f=0.0, v_f=0.0, x_l=50.0, v_l=0.0)
    state = initial_state(program)
    percepts = _cruise_percepts(p, rng)
    trace = []
    for step in range(steps):
        state, action, _ = _agent_cycle(program, state, percepts)
        act = _unwrap(action) if action is not None else None
        name = act.value if isinstance(act, Const) else (act.functor if isinstance(act, Struct) else None)
        a_f = {"accelerate": p.A, "brake": -p.B, "maintain_speed": 0.0}.get(name, 0.0)
        a_l = rng.choice([-p.B, 0.0, p.A])
        had_safe = Const("safe") in percepts
        p, raw = cruise_sim_step(p, a_f, a_l, min(1.0, p.eps))
        trace.append(
            {
                "step": step,
                "action": name,
                "safe_before": had_safe,
                "x_f": p.x_f,
                "v_f": p.v_f,
                "x_l": p.x_l,
                "v_l": p.v_l,
                "safe_after": "safe" in raw,
            }
        )
        percepts = _cruise_percepts(p, rng)
    return trace


def _cruise_percepts(p: CruiseParams, rng, speed_limit: float = 5.0) -> list:
    out = []
    if safe_epsilon(p):
        out.append(Const("safe"))
    if p.v_f >= speed_limit:
        out.append(Const("at_speed_limit"))
    if rng.random() < 0.3:
        out.append(Const("driver_accelerates"))
    if rng.random() < 0.3:
        out.append(Const("driver_brakes"))
    return out
