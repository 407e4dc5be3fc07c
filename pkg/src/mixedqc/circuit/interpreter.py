"""Execute parsed circuit programs on a density-matrix register."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..analysis import concurrence
from ..cloning import single_copy_kraus, universal_fidelity_formula
from ..gates import apply_unitary, rotation_gate, standard_cnot, universal_not
from ..qmath import dagger, partial_trace, permute_qubits, state_fidelity
from ..states import real_ket, real_pseudo_pure
from ..ugates import (
    UCNOT_FIDELITY,
    algorithm_fidelity_estimate,
    pseudo_pure_toffoli_output,
    universal_cnot_isometry,
)
from .parser import CircuitProgram, Expect, Gate, Prepare

DEFAULT_TOL = 1e-6
TRACE_TOL = 1e-9


class CircuitRuntimeError(RuntimeError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass
class ExpectResult:
    line: int
    metric: str
    qubits: tuple[int, ...]
    measured: float
    target: float | None
    tolerance: float
    passed: bool


@dataclass
class ExecutionReport:
    final_state: np.ndarray
    expectations: list[ExpectResult]
    touches: list[int]
    zeta: float
    gate_fidelity: float | None
    fidelity_estimate: float
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.expectations)


@dataclass
class _Qubit:
    prepared: bool = False
    # (alpha, epsilon) while the qubit is known to be an uncorrelated pseudo-pure real state.
    nominal: tuple[float, float] | None = None
    # Predicted fidelity to the ideal pure output, when the model asserts one.
    predicted: float | None = None


def _replace(rho: np.ndarray, qubits: list[int], block: np.ndarray, n: int) -> np.ndarray:
    """Substitute the reduced state on ``qubits`` by ``block`` (rest keeps its reduced state)."""
    others = [q for q in range(n) if q not in qubits]
    if others:
        full = np.kron(partial_trace(rho, [2] * n, others), block)
    else:
        full = block
    return permute_qubits(full, list(np.argsort(others + qubits)))


class _Machine:
    def __init__(self, program: CircuitProgram):
        self.n = program.qubit_count
        dim = 2**self.n
        self.rho = np.zeros((dim, dim), dtype=np.complex128)
        self.rho[0, 0] = 1.0
        self.qubits = [_Qubit() for _ in range(self.n)]
        self.touches = [0] * self.n
        self.log_fidelity = 0.0
        self.notes: set[str] = set()
        self.results: list[ExpectResult] = []

    def require_prepared(self, qubits, line: int) -> None:
        for q in qubits:
            if not self.qubits[q].prepared:
                raise CircuitRuntimeError(line, f"qubit q{q} used before preparation")

    def count(self, qubits, fidelity: float) -> None:
        for q in qubits:
            self.touches[q] += 1
        self.log_fidelity += len(qubits) * math.log(fidelity)

    def forget(self, qubits, predicted: float | None) -> None:
        for q in qubits:
            self.qubits[q].nominal = None
            self.qubits[q].predicted = predicted

    # statements

    def prepare(self, s: Prepare) -> None:
        self.rho = _replace(self.rho, [s.qubit], real_pseudo_pure(s.alpha, s.epsilon), self.n)
        self.qubits[s.qubit] = _Qubit(True, (s.alpha, s.epsilon), (1.0 + s.epsilon) / 2)

    def gate(self, s: Gate) -> None:
        self.require_prepared(s.qubits, s.line)
        handler = getattr(self, "gate_" + s.name)
        handler(s)
        tr = float(np.real(np.trace(self.rho)))
        if abs(tr - 1.0) > TRACE_TOL:
            raise CircuitRuntimeError(s.line, f"register trace drifted to {tr:.12f}")

    def _shift(self, q: int, angle: float) -> None:
        st = self.qubits[q]
        if st.nominal is not None:
            st.nominal = (st.nominal[0] + angle, st.nominal[1])

    def gate_NOT(self, s: Gate) -> None:
        self.rho = apply_unitary(self.rho, universal_not(), s.qubits, self.n)
        self._shift(s.qubits[0], math.pi)

    def gate_U(self, s: Gate) -> None:
        self.rho = apply_unitary(self.rho, rotation_gate(s.xi), s.qubits, self.n)
        self._shift(s.qubits[0], s.xi)

    def gate_CNOT(self, s: Gate) -> None:
        self.rho = apply_unitary(self.rho, standard_cnot(), s.qubits, self.n)
        self.forget(s.qubits, None)
        self.notes.add("basis-dependent CNOT: no fidelity target asserted afterwards")

    def _pure_inputs(self, qubits) -> bool:
        return all(self.qubits[q].predicted == 1.0 for q in qubits)

    def gate_UCNOT(self, s: Gate) -> None:
        c, t = s.qubits
        rest = [q for q in range(self.n) if q not in (c, t)]
        moved = permute_qubits(self.rho, [c, t] + rest)
        v = np.kron(universal_cnot_isometry().matrix, np.eye(2 ** len(rest)))
        out = v @ moved @ dagger(v)
        out = partial_trace(out, [2, 2, 2, 2 ** len(rest)], [0, 1, 3])
        tr = float(np.real(np.trace(out)))
        if abs(tr - 1.0) > TRACE_TOL:
            raise CircuitRuntimeError(
                s.line,
                f"UCNOT input is outside the real-product domain (output trace {tr:.12f})",
            )
        self.rho = permute_qubits(out, list(np.argsort([c, t] + rest)))
        pure = self._pure_inputs(s.qubits)
        self.forget(s.qubits, UCNOT_FIDELITY if pure else None)
        if not pure:
            self.notes.add("chained universal gates: measured fidelities reported without a target")
        self.count(s.qubits, UCNOT_FIDELITY)

    def gate_UCU(self, s: Gate) -> None:
        c, t = s.qubits
        keep = [q for q in range(self.n) if q != t]
        reduced = partial_trace(self.rho, [2] * self.n, keep)
        rest = [q for q in keep if q != c]
        m = len(keep)
        moved = permute_qubits(reduced, [keep.index(c)] + [keep.index(q) for q in rest])
        rotate = np.kron(np.eye(2), rotation_gate(s.xi))
        out = np.zeros((2 ** (m + 1), 2 ** (m + 1)), dtype=np.complex128)
        for k in single_copy_kraus(2):
            kk = np.kron(rotate @ k, np.eye(2 ** len(rest)))
            out += kk @ moved @ dagger(kk)
        self.rho = permute_qubits(out, list(np.argsort([c, t] + rest)))
        pure = self._pure_inputs([c])
        f = universal_fidelity_formula(1)
        self.forget(s.qubits, f if pure else None)
        if not pure:
            self.notes.add("chained universal gates: measured fidelities reported without a target")
        self.count(s.qubits, f)

    def gate_UTOFFOLI(self, s: Gate) -> None:
        controls, target = list(s.qubits[:-1]), s.qubits[-1]
        states = [self.qubits[q].nominal for q in controls]
        if any(st is None for st in states):
            raise CircuitRuntimeError(s.line, "UTOFFOLI controls must be uncorrelated prepared states")
        a0, e0 = states[0]
        for a, e in states[1:]:
            # alpha and alpha + 2*pi are the same density matrix.
            if abs(e - e0) > 1e-12 or abs(math.remainder(a - a0, 2 * math.pi)) > 1e-12:
                raise CircuitRuntimeError(s.line, "UTOFFOLI controls are not identically prepared")
        target_state = self.qubits[target].nominal
        if target_state is None:
            raise CircuitRuntimeError(s.line, "UTOFFOLI target angle is unknown after multi-qubit gates")
        n_controls = len(controls)
        block = pseudo_pure_toffoli_output(a0, e0, n_controls, target_state[0])
        self.rho = _replace(self.rho, controls + [target], block, self.n)
        f = universal_fidelity_formula(n_controls)
        pure = e0 == 1.0
        self.forget(s.qubits, f if pure else None)
        if not pure:
            self.notes.add("UTOFFOLI on pseudo-pure controls: mixed part as uniform real-state ensemble")
        self.count(s.qubits, f)

    def expect(self, s: Expect) -> None:
        self.require_prepared(s.qubits, s.line)
        tol = DEFAULT_TOL if s.tol is None else s.tol
        if s.metric == "fidelity":
            (q,) = s.qubits
            rho_q = partial_trace(self.rho, [2] * self.n, [q])
            measured = state_fidelity(real_ket(s.alpha), rho_q)
            target = self.qubits[q].predicted
        elif s.metric == "concurrence":
            a, b = s.qubits
            pair = partial_trace(self.rho, [2] * self.n, [a, b])
            if a > b:
                pair = permute_qubits(pair, [1, 0])
            measured = concurrence(pair)
            product = all(self.qubits[q].nominal is not None for q in s.qubits)
            target = 0.0 if product else None
        else:
            (q,) = s.qubits
            rho_q = partial_trace(self.rho, [2] * self.n, [q])
            measured = float(np.real(np.trace(rho_q @ rho_q)))
            nominal = self.qubits[q].nominal
            target = (1.0 + nominal[1] ** 2) / 2 if nominal is not None else None
        passed = target is None or abs(measured - target) <= tol
        self.results.append(ExpectResult(s.line, s.metric, s.qubits, measured, target, tol, passed))

    def report(self) -> ExecutionReport:
        total = sum(self.touches)
        zeta = total / self.n
        gate_f = math.exp(self.log_fidelity / total) if total else None
        estimate = algorithm_fidelity_estimate(gate_f, zeta) if total else 1.0
        meta: dict[str, Any] = {"notes": sorted(self.notes)}
        if total:
            meta["zeta_reading"] = "universal-gate touches per qubit, averaged over all qubits"
        return ExecutionReport(
            final_state=self.rho,
            expectations=self.results,
            touches=list(self.touches),
            zeta=zeta,
            gate_fidelity=gate_f,
            fidelity_estimate=estimate,
            metadata=meta,
        )


def execute(program: CircuitProgram) -> ExecutionReport:
    """Run ``program``; raises ``CircuitRuntimeError`` on semantic failures."""
    m = _Machine(program)
    for s in program.statements:
        try:
            if isinstance(s, Prepare):
                m.prepare(s)
            elif isinstance(s, Gate):
                m.gate(s)
            else:
                m.expect(s)
        except ValueError as exc:
            raise CircuitRuntimeError(s.line, str(exc)) from exc
    return m.report()
