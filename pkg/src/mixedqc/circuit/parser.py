"""Recursive-descent parser for the line-oriented circuit format.

    program  := header line*
    header   := "qubits" INT
    prepare  := "prepare" QREF "real" "alpha=" FLOAT ["epsilon=" FLOAT]
    gate     := "gate" ( "NOT" QREF | "U" "xi=" FLOAT QREF | "CNOT" QREF QREF
                       | "UCNOT" QREF QREF | "UCU" "xi=" FLOAT QREF QREF
                       | "UTOFFOLI" "controls=" QREF ("," QREF)* "target=" QREF )
    expect   := "expect" ( "fidelity" QREF "alpha=" FLOAT ["tol=" FLOAT]
                         | "concurrence" QREF QREF ["tol=" FLOAT]
                         | "purity" QREF ["tol=" FLOAT] )
    QREF     := "q" INT

``#`` starts a comment. Tokens are separated by whitespace.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Union

from ..qmath import MAX_QUBITS
from ..ugates import MAX_TOFFOLI_CONTROLS

GATE_NAMES = ("NOT", "U", "CNOT", "UCNOT", "UCU", "UTOFFOLI")
METRICS = ("fidelity", "concurrence", "purity")

_TOKEN = re.compile(r"\S+")
_QREF = re.compile(r"q(\d+)")
_INT = re.compile(r"[0-9]+")


class ErrorCode(str, enum.Enum):
    MISSING_HEADER = "E_MISSING_HEADER"
    DUPLICATE_HEADER = "E_DUPLICATE_HEADER"
    UNKNOWN_KEYWORD = "E_UNKNOWN_KEYWORD"
    MALFORMED_NUMBER = "E_MALFORMED_NUMBER"
    QUBIT_OUT_OF_RANGE = "E_QUBIT_OUT_OF_RANGE"
    DUPLICATE_PREPARE = "E_DUPLICATE_PREPARE"
    PREPARE_AFTER_GATE = "E_PREPARE_AFTER_GATE"
    DUPLICATE_QUBIT = "E_DUPLICATE_QUBIT"
    INVALID_VALUE = "E_INVALID_VALUE"
    SYNTAX = "E_SYNTAX"


class ParseError(Exception):
    def __init__(self, code: ErrorCode, line: int, column: int, expected: str, detail: str = ""):
        self.code = code
        self.line = line
        self.column = column
        self.expected = expected
        self.detail = detail
        msg = f"line {line}, column {column}: {code.value}: expected {expected}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


@dataclass(frozen=True)
class Prepare:
    qubit: int
    alpha: float
    epsilon: float = 1.0
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Gate:
    """A gate application. For UTOFFOLI, ``qubits`` is the controls followed by the target."""

    name: str
    qubits: tuple[int, ...]
    xi: float | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Expect:
    metric: str
    qubits: tuple[int, ...]
    alpha: float | None = None
    tol: float | None = None
    line: int = field(default=0, compare=False)


Statement = Union[Prepare, Gate, Expect]


@dataclass(frozen=True)
class CircuitProgram:
    qubit_count: int
    statements: tuple[Statement, ...]


@dataclass
class _Token:
    text: str
    column: int


class _LineParser:
    def __init__(self, tokens: list[_Token], lineno: int, line_len: int, qubit_count: int):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno
        self.end_column = line_len + 1
        self.qubit_count = qubit_count

    def error(self, code: ErrorCode, expected: str, tok: _Token | None = None, detail: str = ""):
        column = tok.column if tok is not None else self.end_column
        return ParseError(code, self.lineno, column, expected, detail)

    def next(self, expected: str) -> _Token:
        if self.pos >= len(self.tokens):
            raise self.error(ErrorCode.SYNTAX, expected, detail="unexpected end of line")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def end(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise self.error(ErrorCode.SYNTAX, "end of line", tok, f"unexpected {tok.text!r}")

    def literal(self, word: str) -> None:
        tok = self.next(repr(word))
        if tok.text != word:
            raise self.error(ErrorCode.SYNTAX, repr(word), tok, f"got {tok.text!r}")

    def number(self, text: str, column: int) -> float:
        try:
            value = float(text)
        except ValueError:
            value = math.nan
        if not math.isfinite(value):
            raise ParseError(ErrorCode.MALFORMED_NUMBER, self.lineno, column, "FLOAT", repr(text))
        return value

    def keyed(self, key: str) -> float:
        tok = self.next(f"{key}=FLOAT")
        prefix = key + "="
        if not tok.text.startswith(prefix):
            raise self.error(ErrorCode.SYNTAX, f"{key}=FLOAT", tok, f"got {tok.text!r}")
        return self.number(tok.text[len(prefix):], tok.column + len(prefix))

    def optional_keyed(self, key: str) -> float | None:
        tok = self.peek()
        if tok is not None and tok.text.startswith(key + "="):
            return self.keyed(key)
        return None

    def qref_text(self, text: str, column: int) -> int:
        m = _QREF.fullmatch(text)
        if not m:
            raise ParseError(ErrorCode.SYNTAX, self.lineno, column, "QREF", f"got {text!r}")
        index = int(m.group(1))
        if index >= self.qubit_count:
            raise ParseError(
                ErrorCode.QUBIT_OUT_OF_RANGE,
                self.lineno,
                column,
                f"qubit index < {self.qubit_count}",
                f"got q{index}",
            )
        return index

    def qref(self) -> int:
        tok = self.next("QREF")
        return self.qref_text(tok.text, tok.column)

    def distinct(self, qubits: tuple[int, ...], tok: _Token) -> tuple[int, ...]:
        if len(set(qubits)) != len(qubits):
            raise self.error(ErrorCode.DUPLICATE_QUBIT, "distinct qubits", tok)
        return qubits

    def tolerance(self) -> float | None:
        tok = self.peek()
        tol = self.optional_keyed("tol")
        if tol is not None and tol <= 0:
            raise self.error(ErrorCode.INVALID_VALUE, "positive tolerance", tok)
        return tol

    # statements

    def prepare(self) -> Prepare:
        q = self.qref()
        self.literal("real")
        alpha = self.keyed("alpha")
        tok = self.peek()
        eps = self.optional_keyed("epsilon")
        if eps is not None and not 0.0 <= eps <= 1.0:
            raise self.error(ErrorCode.INVALID_VALUE, "epsilon in [0, 1]", tok)
        self.end()
        return Prepare(q, alpha, 1.0 if eps is None else eps, line=self.lineno)

    def gate(self) -> Gate:
        tok = self.next("gate name")
        name = tok.text
        if name not in GATE_NAMES:
            raise self.error(ErrorCode.UNKNOWN_KEYWORD, "gate name", tok, f"unknown gate {name!r}")
        xi = None
        if name == "NOT":
            qubits = (self.qref(),)
        elif name == "U":
            xi = self.keyed("xi")
            qubits = (self.qref(),)
        elif name in ("CNOT", "UCNOT"):
            qubits = (self.qref(), self.qref())
        elif name == "UCU":
            xi = self.keyed("xi")
            qubits = (self.qref(), self.qref())
        else:
            qubits = self.toffoli_operands()
        self.distinct(qubits, tok)
        self.end()
        return Gate(name, qubits, xi, line=self.lineno)

    def toffoli_operands(self) -> tuple[int, ...]:
        tok = self.next("controls=QREF")
        if not tok.text.startswith("controls="):
            raise self.error(ErrorCode.SYNTAX, "controls=QREF", tok, f"got {tok.text!r}")
        column = tok.column + len("controls=")
        controls = []
        for part in tok.text[len("controls="):].split(","):
            controls.append(self.qref_text(part, column))
            column += len(part) + 1
        if len(controls) > MAX_TOFFOLI_CONTROLS:
            raise self.error(
                ErrorCode.INVALID_VALUE, f"at most {MAX_TOFFOLI_CONTROLS} controls", tok
            )
        tok = self.next("target=QREF")
        if not tok.text.startswith("target="):
            raise self.error(ErrorCode.SYNTAX, "target=QREF", tok, f"got {tok.text!r}")
        target = self.qref_text(tok.text[len("target="):], tok.column + len("target="))
        return tuple(controls) + (target,)

    def expect(self) -> Expect:
        tok = self.next("metric name")
        metric = tok.text
        if metric not in METRICS:
            raise self.error(ErrorCode.UNKNOWN_KEYWORD, "metric name", tok, f"unknown metric {metric!r}")
        alpha = None
        if metric == "fidelity":
            qubits = (self.qref(),)
            alpha = self.keyed("alpha")
        elif metric == "concurrence":
            qubits = self.distinct((self.qref(), self.qref()), tok)
        else:
            qubits = (self.qref(),)
        tol = self.tolerance()
        self.end()
        return Expect(metric, qubits, alpha, tol, line=self.lineno)


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse(text: str) -> CircuitProgram:
    """Parse circuit source into a validated program; raises ``ParseError``."""
    qubit_count: int | None = None
    statements: list[Statement] = []
    prepared: set[int] = set()
    touched: set[int] = set()
    lines = text.replace("\r\n", "\n").split("\n")
    for lineno, raw in enumerate(lines, start=1):
        body = _strip_comment(raw)
        tokens = [_Token(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]
        if not tokens:
            continue
        head = tokens[0]
        if qubit_count is None:
            if head.text != "qubits":
                raise ParseError(
                    ErrorCode.MISSING_HEADER, lineno, head.column, "'qubits' declaration",
                    "missing qubits declaration",
                )
            qubit_count = _parse_header(tokens, lineno, len(body))
            continue
        if head.text == "qubits":
            raise ParseError(ErrorCode.DUPLICATE_HEADER, lineno, head.column, "statement keyword")
        lp = _LineParser(tokens[1:], lineno, len(body), qubit_count)
        if head.text == "prepare":
            stmt = lp.prepare()
            q_col = tokens[1].column
            if stmt.qubit in prepared:
                raise ParseError(ErrorCode.DUPLICATE_PREPARE, lineno, q_col, "unprepared qubit",
                                 f"q{stmt.qubit} already prepared")
            if stmt.qubit in touched:
                raise ParseError(ErrorCode.PREPARE_AFTER_GATE, lineno, q_col, "untouched qubit",
                                 f"q{stmt.qubit} already used by a gate")
            prepared.add(stmt.qubit)
        elif head.text == "gate":
            stmt = lp.gate()
            touched.update(stmt.qubits)
        elif head.text == "expect":
            stmt = lp.expect()
        else:
            raise ParseError(ErrorCode.UNKNOWN_KEYWORD, lineno, head.column,
                             "'prepare', 'gate' or 'expect'", f"unknown keyword {head.text!r}")
        statements.append(stmt)
    if qubit_count is None:
        raise ParseError(ErrorCode.MISSING_HEADER, max(1, len(text.splitlines())), 1, "'qubits' declaration",
                         "missing qubits declaration")
    return CircuitProgram(qubit_count, tuple(statements))


def _parse_header(tokens: list[_Token], lineno: int, line_len: int) -> int:
    if len(tokens) < 2:
        raise ParseError(ErrorCode.SYNTAX, lineno, line_len + 1, "INT", "unexpected end of line")
    tok = tokens[1]
    if not _INT.fullmatch(tok.text):
        raise ParseError(ErrorCode.MALFORMED_NUMBER, lineno, tok.column, "INT", repr(tok.text))
    count = int(tok.text)
    if not 1 <= count <= MAX_QUBITS:
        raise ParseError(ErrorCode.INVALID_VALUE, lineno, tok.column, f"1 <= INT <= {MAX_QUBITS}")
    if len(tokens) > 2:
        raise ParseError(ErrorCode.SYNTAX, lineno, tokens[2].column, "end of line")
    return count


def _num(x: float) -> str:
    return repr(float(x))


def unparse(program: CircuitProgram) -> str:
    """Canonical source text; ``parse(unparse(p)) == p``."""
    out = [f"qubits {program.qubit_count}"]
    for s in program.statements:
        if isinstance(s, Prepare):
            line = f"prepare q{s.qubit} real alpha={_num(s.alpha)}"
            if s.epsilon != 1.0:
                line += f" epsilon={_num(s.epsilon)}"
        elif isinstance(s, Gate):
            if s.name == "UTOFFOLI":
                controls = ",".join(f"q{q}" for q in s.qubits[:-1])
                line = f"gate UTOFFOLI controls={controls} target=q{s.qubits[-1]}"
            else:
                xi = f" xi={_num(s.xi)}" if s.xi is not None else ""
                line = f"gate {s.name}{xi} " + " ".join(f"q{q}" for q in s.qubits)
        else:
            line = f"expect {s.metric} " + " ".join(f"q{q}" for q in s.qubits)
            if s.alpha is not None:
                line += f" alpha={_num(s.alpha)}"
            if s.tol is not None:
                line += f" tol={_num(s.tol)}"
        out.append(line)
    return "\n".join(out) + "\n"
