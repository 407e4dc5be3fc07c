"""Cloning-based basis-independent gates on real qubit states.

* ``universal_cnot_isometry`` / ``apply_universal_cnot``: the explicit C-NOT
  transformation with one device qubit. It rotates the target by the control
  angle with fidelity ``1/2 + sqrt(1/8)`` on both outputs.
* ``universal_controlled_u`` and ``universal_toffoli``: clone the control, then
  rotate the extra clone.
* ``toffoli_budget`` and ``algorithm_fidelity_estimate``: loss budgeting.

The linear extension of the C-NOT transformation is norm preserving on
products of real states only. Its Gram matrix ``V^dagger V`` has eigenvalues
1/2 and 3/2 on the full two-qubit space, so ``apply_universal_cnot`` rejects
inputs whose output trace would leave 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .cloning import universal_clone
from .gates import apply_unitary, check_unitary, rotation_gate, universal_not
from .qmath import (
    basis_ket,
    check_density,
    dagger,
    partial_trace,
    projector,
    state_fidelity,
    tensor,
)
from .states import RealQubitState, bloch_angle, real_ket

UCNOT_FIDELITY = 0.5 + math.sqrt(1 / 8)
MAX_TOFFOLI_CONTROLS = 5
ENSEMBLE_GRID = 64
TRACE_TOL = 1e-9


class DomainError(ValueError):
    """Input lies outside the states on which a transformation is defined."""


@dataclass(frozen=True)
class Isometry:
    matrix: np.ndarray
    device_dims: tuple[int, ...]

    @property
    def dim_in(self) -> int:
        return self.matrix.shape[1]

    def gram_deviation(self) -> float:
        """``max |V^dagger V - I|``; zero for a true isometry."""
        g = dagger(self.matrix) @ self.matrix
        return float(np.max(np.abs(g - np.eye(self.dim_in))))


@dataclass
class ChannelResult:
    output: np.ndarray
    fidelity_control: float
    fidelity_target: float
    ideal_control: np.ndarray
    ideal_target: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)


def universal_cnot_isometry() -> Isometry:
    """Linear extension (4 -> 8, device last) of the explicit universal C-NOT.

    For control ``|0>`` and target ``chi`` with ``chi_perp = NOT chi``:

        (a+b)|0,chi,0> + b(|0,chi_perp> + |1,chi>)|1> + (a-b)|1,chi_perp,0>

    and for control ``|1>``:

        (a+b)|1,chi_perp,1> + b(|0,chi_perp> + |1,chi>)|0> + (a-b)|0,chi,1>

    with ``a = 1/2`` and ``b = sqrt(1/8)``. The columns are the images of
    ``chi = |0>`` and ``chi = |1>``.
    """
    a, b = 0.5, math.sqrt(1 / 8)
    k0, k1 = basis_ket(0), basis_ket(1)
    not_gate = universal_not()
    v = np.zeros((8, 4), dtype=np.complex128)
    for t, chi in enumerate((k0, k1)):
        perp = not_gate @ chi
        v[:, t] = (
            (a + b) * tensor(k0, chi, k0)
            + b * (tensor(k0, perp, k1) + tensor(k1, chi, k1))
            + (a - b) * tensor(k1, perp, k0)
        )
        v[:, 2 + t] = (
            (a + b) * tensor(k1, perp, k1)
            + b * (tensor(k0, perp, k0) + tensor(k1, chi, k0))
            + (a - b) * tensor(k0, chi, k1)
        )
    return Isometry(matrix=v, device_dims=(2,))


def universal_cnot_channel(rho_ct) -> np.ndarray:
    """Two-qubit output of the universal C-NOT, device traced out.

    Raises ``DomainError`` when the trace would leave 1 by more than 1e-9,
    i.e. for inputs outside the real-product domain.
    """
    v = universal_cnot_isometry().matrix
    out = partial_trace(v @ rho_ct @ dagger(v), [2, 2, 2], [0, 1])
    tr = np.real(np.trace(out))
    if abs(tr - 1.0) > TRACE_TOL:
        raise DomainError(
            f"universal C-NOT is not trace preserving on this input (trace {tr:.12f}); "
            "it is defined for products of real qubit states"
        )
    return out


def apply_universal_cnot(
    rho_ct, control_alpha: float | None = None, target_alpha: float | None = None
) -> ChannelResult:
    """Apply the universal C-NOT to a two-qubit state (control is qubit 0).

    The ideal outputs are ``real_ket(theta)`` for the control and
    ``real_ket(phi + theta)`` for the target. Control and target angles are read
    off the reduced Bloch vectors unless given.
    """
    rho_ct = check_density(rho_ct, name="rho_ct")
    if rho_ct.shape != (4, 4):
        raise ValueError("universal C-NOT acts on a two-qubit state")
    angles = []
    for qubit, given in ((0, control_alpha), (1, target_alpha)):
        if given is None:
            given = bloch_angle(partial_trace(rho_ct, [2, 2], [qubit]))
            if given is None:
                raise DomainError(f"qubit {qubit} is not on the x-z circle; pass its angle explicitly")
        angles.append(RealQubitState(given).alpha)
    theta, phi = angles
    out = universal_cnot_channel(rho_ct)
    ideal_c = real_ket(theta)
    ideal_t = real_ket(phi + theta)
    return ChannelResult(
        output=out,
        fidelity_control=state_fidelity(ideal_c, partial_trace(out, [2, 2], [0])),
        fidelity_target=state_fidelity(ideal_t, partial_trace(out, [2, 2], [1])),
        ideal_control=ideal_c,
        ideal_target=ideal_t,
        metadata={"control_alpha": theta, "target_alpha": phi},
    )


def universal_controlled_u(psi_c, u_fixed) -> ChannelResult:
    """Clone the control 1 -> 2, then apply ``u_fixed`` to the second clone."""
    u_fixed = check_unitary(u_fixed)
    if u_fixed.shape != (2, 2):
        raise ValueError("u_fixed must be a single-qubit gate")
    psi = np.asarray(psi_c, dtype=np.complex128).ravel()
    if psi.size != 2 or abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise ValueError("psi_c must be a normalized single-qubit ket")
    joint = universal_clone(projector(psi), 1, 2).joint
    out = apply_unitary(joint, u_fixed, [1], 2)
    ideal_t = u_fixed @ psi
    return ChannelResult(
        output=out,
        fidelity_control=state_fidelity(psi, partial_trace(out, [2, 2], [0])),
        fidelity_target=state_fidelity(ideal_t, partial_trace(out, [2, 2], [1])),
        ideal_control=psi,
        ideal_target=ideal_t,
    )


def _check_controls(n_controls: int) -> None:
    if not isinstance(n_controls, int) or not 1 <= n_controls <= MAX_TOFFOLI_CONTROLS:
        raise ValueError(f"control count must be in [1, {MAX_TOFFOLI_CONTROLS}], got {n_controls!r}")


def toffoli_output(control_alpha: float, n_controls: int, target_alpha: float) -> np.ndarray:
    """Joint state of N controls and the target after clone-then-rotate (pure controls)."""
    _check_controls(n_controls)
    joint = universal_clone(projector(real_ket(control_alpha)), n_controls, n_controls + 1).joint
    return apply_unitary(joint, rotation_gate(target_alpha), [n_controls], n_controls + 1)


def pseudo_pure_toffoli_output(
    control_alpha: float, epsilon: float, n_controls: int, target_alpha: float
) -> np.ndarray:
    """Clone-then-rotate on pseudo-pure controls, extended by ensemble convexity.

    The maximally mixed part is represented as the uniform ensemble of
    ``ENSEMBLE_GRID`` real states. For one control the cloner is linear and
    this equals the channel applied to the mixed input.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    out = epsilon * toffoli_output(control_alpha, n_controls, target_alpha) if epsilon > 0 else 0.0
    if epsilon < 1.0:
        grid = 2 * math.pi * np.arange(ENSEMBLE_GRID) / ENSEMBLE_GRID
        mixed = sum(toffoli_output(a, n_controls, target_alpha) for a in grid) / ENSEMBLE_GRID
        out = out + (1.0 - epsilon) * mixed
    return out


def universal_toffoli(
    psi_c: RealQubitState, n_controls: int, chi_t: RealQubitState, epsilon: float = 1.0
) -> ChannelResult:
    """Basis-independent Toffoli over ``n_controls`` copies of ``psi_c`` and target ``chi_t``.

    Output qubits are the N controls followed by the target. The ideal target is
    ``real_ket(alpha_psi + alpha_chi)``. Fidelities are reported against the pure
    ideals, also for ``epsilon < 1``.
    """
    psi_c = psi_c if isinstance(psi_c, RealQubitState) else RealQubitState(psi_c)
    chi_t = chi_t if isinstance(chi_t, RealQubitState) else RealQubitState(chi_t)
    _check_controls(n_controls)
    m = n_controls + 1
    out = pseudo_pure_toffoli_output(psi_c.alpha, epsilon, n_controls, chi_t.alpha)
    ideal_c = real_ket(psi_c)
    ideal_t = real_ket(psi_c.alpha + chi_t.alpha)
    meta: dict[str, Any] = {"n_controls": n_controls, "epsilon": epsilon}
    if epsilon < 1.0:
        meta["mixed_part_ensemble"] = f"uniform real states, {ENSEMBLE_GRID}-point grid"
    return ChannelResult(
        output=out,
        fidelity_control=state_fidelity(ideal_c, partial_trace(out, [2] * m, [0])),
        fidelity_target=state_fidelity(ideal_t, partial_trace(out, [2] * m, [n_controls])),
        ideal_control=ideal_c,
        ideal_target=ideal_t,
        metadata=meta,
    )


def toffoli_budget(delta: float) -> int:
    """Smallest control count N with per-gate loss ``1/((N+1)(N+2)) <= delta``."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    def loss(n):
        return 1.0 / ((n + 1) * (n + 2))

    # Start near the real root of (n+1)(n+2) = 1/delta, then step to the exact boundary.
    n = max(1, math.ceil((-3 + math.sqrt(1 + 4 / delta)) / 2))
    while loss(n) > delta:
        n += 1
    while n > 1 and loss(n - 1) <= delta:
        n -= 1
    return n


def algorithm_fidelity_estimate(fidelity: float, zeta: float) -> float:
    """``F ** zeta``: overall fidelity after ``zeta`` gates per qubit on average."""
    if not 0.0 < fidelity <= 1.0:
        raise ValueError(f"fidelity must lie in (0, 1], got {fidelity}")
    if zeta < 0:
        raise ValueError(f"zeta must be non-negative, got {zeta}")
    return fidelity**zeta

