from .interpreter import CircuitRuntimeError, ExecutionReport, ExpectResult, execute
from .parser import CircuitProgram, ErrorCode, Expect, Gate, ParseError, Prepare, parse, unparse

__all__ = [
    "CircuitProgram",
    "CircuitRuntimeError",
    "ErrorCode",
    "ExecutionReport",
    "Expect",
    "ExpectResult",
    "Gate",
    "ParseError",
    "Prepare",
    "execute",
    "parse",
    "unparse",
]
