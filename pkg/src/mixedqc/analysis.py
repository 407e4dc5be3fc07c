"""Entanglement and fidelity experiments: concurrence decay, purity, cloning sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cloning import single_copy_kraus
from .gates import apply_unitary, rotation_gate, standard_cnot
from .qmath import (
    check_density,
    dagger,
    eigvalsh_desc,
    hermitian_eigensystem,
    partial_trace,
    state_fidelity,
    tensor,
)
from .states import PAULI_Y, real_ket, real_pseudo_pure
from .table import SweepTable
from .ugates import pseudo_pure_toffoli_output

DEFAULT_GRID_POINTS = 101
CONCURRENCE_THRESHOLD = math.sqrt(2) - 1
SWEEP_MODES = ("n1-channel", "ensemble-n2")

_YY = np.kron(PAULI_Y, PAULI_Y)
_EIG_FLOOR = 1e-14


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state.

    The spin-flip values are the square roots of the spectrum of the Hermitian
    matrix ``sqrt(rho) rho~ sqrt(rho) = T T^dagger`` with
    ``T = sqrt(rho) (Y(x)Y) sqrt(rho)^*``. They are read off as the positive
    eigenvalues of the Hermitian dilation ``[[0, T], [T^dagger, 0]]``, which
    avoids taking square roots of round-off sized eigenvalues. Eigenvalues of
    ``rho`` below 1e-14 are treated as zero.
    """
    rho = check_density(rho)
    if rho.shape != (4, 4):
        raise ValueError("concurrence is defined for two-qubit states")
    w, v = hermitian_eigensystem(rho)
    w = np.where(w > _EIG_FLOOR, w, 0.0)
    root = (v * np.sqrt(w)) @ dagger(v)
    t = root @ _YY @ root.conj()
    dilation = np.block([[np.zeros((4, 4)), t], [dagger(t), np.zeros((4, 4))]])
    lam = np.clip(eigvalsh_desc(dilation)[:4], 0.0, None)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_formula(x: float) -> float:
    return max(0.0, 0.5 * (x * x + 2 * x - 1))


def cnot_output(x: float) -> np.ndarray:
    """Standard C-NOT applied to control ``x|+><+| + (1-x)I/2`` and target ``x|0><0| + (1-x)I/2``."""
    rho = tensor(real_pseudo_pure(math.pi / 2, x), real_pseudo_pure(0.0, x))
    return apply_unitary(rho, standard_cnot(), [0, 1], 2)


def default_grid(points: int = DEFAULT_GRID_POINTS) -> list[float]:
    if points < 2:
        raise ValueError("grid needs at least two points")
    return [i / (points - 1) for i in range(points)]


def cnot_concurrence_sweep(x_grid: Sequence[float] | None = None) -> SweepTable:
    grid = default_grid() if x_grid is None else list(x_grid)
    rows = []
    for x in grid:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"purity {x} outside [0, 1]")
        measured = concurrence(cnot_output(x))
        rows.append((x, measured, concurrence_formula(x)))
    return SweepTable(
        parameter="x",
        columns=["x", "concurrence_measured", "concurrence_formula"],
        rows=rows,
        metadata={"grid_points": len(grid), "identity_normalization": "I/2"},
    )


@dataclass(frozen=True)
class PurityReport:
    epsilon: float
    alpha: float
    xi: float
    recovered_epsilon: float
    delta_epsilon: float
    output: np.ndarray


def recover_epsilon(rho, psi) -> float:
    """Purity parameter of a single-qubit ``eps|psi><psi| + (1-eps)I/2``.

    Uses ``<psi|rho|psi> = eps + (1 - eps)/2``.
    """
    return 2.0 * float(np.real(np.vdot(psi, rho @ psi))) - 1.0


def purity_preservation_report(eps: float, alpha: float, xi: float) -> PurityReport:
    u = rotation_gate(xi)
    out = apply_unitary(real_pseudo_pure(alpha, eps), u, [0], 1)
    recovered = recover_epsilon(out, u @ real_ket(alpha))
    return PurityReport(eps, alpha, xi, recovered, abs(recovered - eps), out)


def _normalized_overlap(a: np.ndarray, b: np.ndarray) -> float:
    num = np.real(np.trace(a @ b))
    return float(num / math.sqrt(np.real(np.trace(a @ a)) * np.real(np.trace(b @ b))))


def pseudo_pure_cloning_sweep(
    eps_grid: Sequence[float] | None = None, mode: str = "n1-channel", alpha: float = math.pi / 3
) -> SweepTable:
    """Clone a pseudo-pure real qubit and compare the first clone to the ideal output.

    Columns: ``fidelity_pure`` is ``<psi|clone|psi>``; ``overlap_normalized`` is
    ``Tr(clone ideal) / sqrt(Tr(clone^2) Tr(ideal^2))`` against the ideal
    pseudo-pure output ``eps|psi><psi| + (1-eps)I/2``. No target curve is
    asserted away from ``eps = 1``.
    """
    if mode not in SWEEP_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {SWEEP_MODES}")
    grid = default_grid() if eps_grid is None else list(eps_grid)
    psi = real_ket(alpha)
    kraus = single_copy_kraus(2)
    rows = []
    for eps in grid:
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"epsilon {eps} outside [0, 1]")
        ideal = real_pseudo_pure(alpha, eps)
        if mode == "n1-channel":
            joint = sum(k @ ideal @ dagger(k) for k in kraus)
            clone = partial_trace(joint, [2, 2], [0])
        else:
            joint = pseudo_pure_toffoli_output(alpha, eps, 2, 0.0)
            clone = partial_trace(joint, [2, 2, 2], [0])
        rows.append((eps, state_fidelity(psi, clone), _normalized_overlap(clone, ideal)))
    return SweepTable(
        parameter="epsilon",
        columns=["epsilon", "fidelity_pure", "overlap_normalized"],
        rows=rows,
        metadata={
            "mode": mode,
            "alpha": alpha,
            "overlap_convention": "Tr(rho sigma)/sqrt(Tr rho^2 Tr sigma^2)",
        },
    )

