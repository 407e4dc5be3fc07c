"""Universal symmetric N -> M qubit cloning and the associated fidelity formulas.

The cloner is the projector sandwich

    rho_out = (d_N / d_M) * S_M (sigma^{(x)N} (x) I^{(x)(M-N)}) S_M,   d_k = k + 1,

with ``S_M`` the projector onto the symmetric subspace of ``M`` qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .qmath import (
    check_density,
    partial_trace,
    state_fidelity,
    symmetric_projector,
    tensor,
)
from .table import SweepTable

MAX_CLONES = 8
PC_VARIANTS = ("anchored", "as-printed")


@dataclass(frozen=True)
class CloneOutput:
    joint: np.ndarray
    n_in: int
    n_out: int

    def reduced(self, clone_index: int) -> np.ndarray:
        if not 0 <= clone_index < self.n_out:
            raise IndexError(f"clone index {clone_index} out of range for {self.n_out} clones")
        return partial_trace(self.joint, [2] * self.n_out, [clone_index])


def _check_counts(n_in: int, n_out: int) -> None:
    if not (isinstance(n_in, int) and isinstance(n_out, int)):
        raise TypeError("copy counts must be integers")
    if n_in < 1 or n_out <= n_in or n_out > MAX_CLONES:
        raise ValueError(f"need 1 <= N < M <= {MAX_CLONES}, got N={n_in}, M={n_out}")


def universal_clone(sigma, n_in: int, n_out: int) -> CloneOutput:
    """Optimal universal N -> M cloner applied to ``n_in`` copies of ``sigma``.

    For ``n_in >= 2`` the sandwich is only trace preserving on pure inputs,
    so ``sigma`` must be pure there. Mixed inputs are accepted for ``n_in == 1``.
    """
    _check_counts(n_in, n_out)
    sigma = check_density(sigma, name="sigma")
    if sigma.shape != (2, 2):
        raise ValueError("sigma must be a single-qubit density matrix")
    if n_in >= 2 and abs(np.real(np.trace(sigma @ sigma)) - 1.0) > 1e-10:
        raise ValueError("N >= 2 cloning requires a pure input state")
    s = symmetric_projector(n_out)
    blank = np.eye(2 ** (n_out - n_in))
    joint = (n_in + 1) / (n_out + 1) * (s @ tensor(*([sigma] * n_in), blank) @ s)
    return CloneOutput(joint=joint, n_in=n_in, n_out=n_out)


def single_copy_kraus(n_out: int) -> list[np.ndarray]:
    """Kraus operators of the 1 -> ``n_out`` cloner as a linear map on one qubit."""
    _check_counts(1, n_out)
    s = symmetric_projector(n_out)
    scale = math.sqrt(2 / (n_out + 1))
    rest = 2 ** (n_out - 1)
    ops = []
    for k in range(rest):
        e = np.zeros((rest, 1))
        e[k, 0] = 1.0
        ops.append(scale * s @ np.kron(np.eye(2), e))
    return ops


def universal_fidelity_fraction(n_in: int) -> Fraction:
    if n_in < 1:
        raise ValueError(f"N must be >= 1, got {n_in}")
    return 1 - Fraction(1, (n_in + 1) * (n_in + 2))


def universal_fidelity_formula(n_in: int) -> float:
    """``1 - 1/((N+1)(N+2))``, the optimal N -> N+1 single-clone fidelity."""
    return float(universal_fidelity_fraction(n_in))


def _pc_ratio(n: int) -> float:
    num = sum(math.sqrt(math.comb(n, i) * math.comb(n, i + 1)) for i in range(n))
    den = sum(math.sqrt(math.comb(n + 1, j) * math.comb(n + 1, j + 1)) for j in range(n + 1))
    return num / den


def pc_upper_bound(n_in: int, variant: str = "anchored") -> float:
    """Upper bound on the phase-covariant N -> N+1 fidelity for real inputs.

    ``"as-printed"`` is twice the binomial ratio and falls below the universal
    fidelity for small N (0.7071 at N=1). ``"anchored"`` is one half plus the
    ratio; it equals ``1/2 + sqrt(1/8)`` at N=1 and stays above the universal
    fidelity. The default is ``"anchored"``.
    """
    if n_in < 1:
        raise ValueError(f"N must be >= 1, got {n_in}")
    r = _pc_ratio(n_in)
    if variant == "anchored":
        return 0.5 + r
    if variant == "as-printed":
        return 2.0 * r
    raise ValueError(f"unknown variant {variant!r}; expected one of {PC_VARIANTS}")


def measured_clone_fidelity(out: CloneOutput, psi, clone_index: int) -> float:
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    if psi.size != 2:
        raise ValueError("psi must be a single-qubit ket")
    return state_fidelity(psi, out.reduced(clone_index))


def figure2_table(n_max: int = 20, variant: str = "anchored") -> SweepTable:
    if not 1 <= n_max <= 50:
        raise ValueError(f"n_max must lie in [1, 50], got {n_max}")
    rows = [
        (n, universal_fidelity_formula(n), pc_upper_bound(n, variant)) for n in range(1, n_max + 1)
    ]
    violations = [n for n, fu, fpc in rows if fpc <= fu]
    return SweepTable(
        parameter="N",
        columns=["N", "F_universal", "F_pc_bound"],
        rows=rows,
        metadata={"variant": variant, "ordering_violated_at": violations},
    )
