"""Real qubit states on the x-z great circle and pseudo-pure mixtures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qmath import as_matrix, num_qubits, projector

TWO_PI = 2.0 * math.pi

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class RealQubitState:
    """Pure state ``cos(alpha/2)|0> + sin(alpha/2)|1>``.

    ``alpha`` is folded into ``[0, 2*pi)``. Angles in ``(pi, 2*pi)`` cover the
    minus-sign branch ``cos(theta/2)|0> - sin(theta/2)|1>`` with
    ``alpha = 2*pi - theta`` (up to a global sign).
    """

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a):
            raise ValueError("alpha must be finite")
        a = math.fmod(a, TWO_PI)
        if a < 0:
            a += TWO_PI
        if a >= TWO_PI:
            a = 0.0
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True)
class PseudoPureState:
    """``epsilon * |psi><psi| + (1 - epsilon) * I / 2**n``."""

    epsilon: float
    pure_part: np.ndarray = field(compare=False)

    def __post_init__(self):
        eps = float(self.epsilon)
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {eps}")
        psi = np.asarray(self.pure_part, dtype=np.complex128).ravel()
        if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
            raise ValueError("pure_part must be normalized")
        num_qubits(psi.size)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "pure_part", psi)

    @property
    def n(self) -> int:
        return num_qubits(self.pure_part.size)


def _alpha(s) -> float:
    return s.alpha if isinstance(s, RealQubitState) else RealQubitState(s).alpha


def real_ket(s: RealQubitState | float) -> np.ndarray:
    """Ket ``(cos(alpha/2), sin(alpha/2))``; a bare angle is accepted too."""
    a = _alpha(s)
    return np.array([math.cos(a / 2), math.sin(a / 2)], dtype=np.complex128)


def pseudo_pure_density(p: PseudoPureState) -> np.ndarray:
    d = p.pure_part.size
    return p.epsilon * projector(p.pure_part) + (1.0 - p.epsilon) * np.eye(d) / d


def real_pseudo_pure(alpha: float, epsilon: float = 1.0) -> np.ndarray:
    """Single-qubit pseudo-pure density matrix around ``real_ket(alpha)``."""
    return pseudo_pure_density(PseudoPureState(epsilon, real_ket(alpha)))


def bloch_vector(rho) -> tuple[float, float, float]:
    rho = as_matrix(rho, "rho")
    if rho.shape != (2, 2):
        raise ValueError(f"Bloch vector needs a 2x2 matrix, got {rho.shape}")
    return tuple(float(np.real(np.trace(rho @ s))) for s in (PAULI_X, PAULI_Y, PAULI_Z))


def bloch_angle(rho, tol: float = 1e-9) -> float | None:
    """Angle ``alpha`` of a state on the x-z circle, or None if not determinable.

    Returns None for states with a y-component or a vanishing Bloch vector.
    """
    x, y, z = bloch_vector(rho)
    if abs(y) > tol or math.hypot(x, z) <= tol:
        return None
    return RealQubitState(math.atan2(x, z)).alpha


def orthogonal_real(s: RealQubitState) -> RealQubitState:
    return RealQubitState(_alpha(s) + math.pi)
