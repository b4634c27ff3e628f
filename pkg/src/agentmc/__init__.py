"""Model checking and deductive composition for BDI agent programs.

The package parses a Gwendolen-flavoured agent language, executes it
under an unconstrained environment that branches only at action points,
model-checks LTL properties over belief/goal/action/intention
observations, and composes per-agent verdicts with environmental
hypotheses into system-level theorems.
"""

from .checker import ProofResult, Verdict, check, compose, prove, replay
from .env import MAS, load_env
from .lang.parser import parse_agent, parse_agent_file, parse_term
from .psl import ground_property, load_props, parse_props

__version__ = "0.1.0"

__all__ = [
    "MAS",
    "ProofResult",
    "Verdict",
    "check",
    "compose",
    "ground_property",
    "load_env",
    "load_props",
    "parse_agent",
    "parse_agent_file",
    "parse_props",
    "parse_term",
    "prove",
    "replay",
    "__version__",
]
