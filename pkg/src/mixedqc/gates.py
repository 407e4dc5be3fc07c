"""Computational-basis reference gates and exact gates on the x-z circle."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .qmath import as_matrix, dagger, permute_qubits, projector, basis_ket
from .states import PAULI_X

UNITARY_TOL = 1e-12


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    u = as_matrix(u, "gate")
    d = u.shape[0]
    if u.shape != (d, d):
        raise ValueError(f"gate must be square, got {u.shape}")
    if np.max(np.abs(dagger(u) @ u - np.eye(d))) > tol:
        raise ValueError("gate is not unitary")
    return u


def standard_cnot() -> np.ndarray:
    """C-NOT with qubit 0 as control and qubit 1 as target."""
    return np.kron(projector(basis_ket(0)), np.eye(2)) + np.kron(projector(basis_ket(1)), PAULI_X)


def universal_not() -> np.ndarray:
    """``-i sigma_y``; maps every real state to its orthogonal partner."""
    return np.array([[0, -1], [1, 0]], dtype=np.complex128)


def rotation_gate(xi: float) -> np.ndarray:
    """Rotation by ``xi`` along the x-z circle: ``real_ket(a) -> real_ket(a + xi)``."""
    return math.cos(xi / 2) * np.eye(2, dtype=np.complex128) + math.sin(xi / 2) * universal_not()


def embed_order(targets: Sequence[int], n: int) -> list[int]:
    """Qubit order that moves ``targets`` to the front, rest after in order."""
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"target qubit {t} out of range for {n} qubits")
    return targets + [q for q in range(n) if q not in targets]


def apply_unitary(rho, gate, target_qubits: Sequence[int], n: int) -> np.ndarray:
    """``U rho U^dagger`` with ``gate`` acting on ``target_qubits`` (in that order)."""
    rho = as_matrix(rho, "rho")
    gate = check_unitary(gate)
    if rho.shape != (2**n, 2**n):
        raise ValueError(f"rho shape {rho.shape} does not match {n} qubits")
    k = len(target_qubits)
    if gate.shape != (2**k, 2**k):
        raise ValueError(f"gate of shape {gate.shape} cannot act on {k} qubit(s)")
    order = embed_order(target_qubits, n)
    inverse = list(np.argsort(order))
    full = np.kron(gate, np.eye(2 ** (n - k)))
    moved = permute_qubits(rho, order)
    return permute_qubits(full @ moved @ dagger(full), inverse)
