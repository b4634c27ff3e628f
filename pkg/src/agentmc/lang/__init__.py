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
    SharedVocabulary,
    TriggerEvent,
    Unlock,
    WaitFor,
)
from .analysis import Diagnostic, extract_shared_vocabulary, lint
from .parser import ParseError, parse_agent, parse_agent_file, parse_term
from .pretty import pretty

__all__ = [
    "ACHIEVE",
    "PERFORM",
    "Action",
    "AddBelief",
    "AddGoal",
    "AgentProgram",
    "AssertShared",
    "Calculate",
    "Compute",
    "Deed",
    "Diagnostic",
    "DropGoal",
    "Lock",
    "ParseError",
    "Perf",
    "Plan",
    "Query",
    "RemoveBelief",
    "RemoveShared",
    "Send",
    "SharedVocabulary",
    "TriggerEvent",
    "Unlock",
    "WaitFor",
    "extract_shared_vocabulary",
    "lint",
    "parse_agent",
    "parse_agent_file",
    "parse_term",
    "pretty",
]
