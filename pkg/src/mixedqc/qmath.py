"""Dense complex linear algebra for small qubit registers.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Qubit 0 is the
leftmost (most significant) tensor factor everywhere in the package.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

# Negative eigenvalues above this are treated as round-off and clamped.
PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
MAX_QUBITS = 12

# Symmetric projectors up to this size are built from the permutation sum.
_PERMUTATION_SUM_MAX = 7


class ConvergenceError(RuntimeError):
    pass


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array, raising ``ValueError`` otherwise."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return a


def ket(amplitudes) -> np.ndarray:
    """Return the normalized state vector with the given amplitudes."""
    v = np.asarray(amplitudes, dtype=np.complex128).ravel()
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ValueError("ket amplitudes must be a non-empty finite vector")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / norm


def basis_ket(index: int, dim: int = 2) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def tensor(*factors) -> np.ndarray:
    """Kronecker product, first factor most significant.

    Accepts matrices or kets; mixing the two is not meaningful and not checked.
    """
    if not factors:
        raise ValueError("tensor needs at least one factor")
    out = np.asarray(factors[0], dtype=np.complex128)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=np.complex128))
    return out


def num_qubits(dim: int) -> int:
    n = int(round(math.log2(dim))) if dim > 0 else -1
    if n < 0 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def partial_trace(rho, factor_dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every factor not listed in ``keep``.

    Kept factors stay in their original relative order.
    """
    rho = as_matrix(rho, "rho")
    dims = [int(d) for d in factor_dims]
    total = math.prod(dims)
    if rho.shape != (total, total):
        raise ValueError(f"factor dims {dims} do not match matrix shape {rho.shape}")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep-set must not be empty")
    n = len(dims)
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep indices {keep} out of range for {n} factors")
    traced = [i for i in range(n) if i not in keep]
    dk = math.prod(dims[i] for i in keep)
    dt = math.prod(dims[i] for i in traced)
    t = rho.reshape(dims + dims)
    perm = keep + traced + [n + i for i in keep] + [n + i for i in traced]
    t = t.transpose(perm).reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def permute_qubits(rho, order: Sequence[int]) -> np.ndarray:
    """Reorder qubits so that new qubit ``i`` is old qubit ``order[i]``."""
    rho = np.asarray(rho, dtype=np.complex128)
    n = num_qubits(rho.shape[0])
    order = list(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of {n} qubits")
    if rho.ndim == 1:
        return rho.reshape([2] * n).transpose(order).reshape(-1)
    t = rho.reshape([2] * (2 * n)).transpose(order + [n + o for o in order])
    return t.reshape(2**n, 2**n)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= tol * scale)


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def hermitian_eigensystem(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns) of a Hermitian matrix.

    Cyclic Jacobi iteration. Each round rotates a set of disjoint index pairs
    at once, so a sweep is ``n - 1`` vectorized rounds. Iteration stops when the
    off-diagonal Frobenius norm drops below ``1e-12`` times ``max(1, ||m||_F)``.
    """
    a = as_matrix(m).copy()
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"matrix must be square, got {a.shape}")
    if not is_hermitian(a):
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=np.complex128)
    threshold = JACOBI_TOL * max(1.0, float(np.linalg.norm(a)))
    rounds = _round_robin(n) if n > 1 else []
    # Pairs that are already (numerically) decoupled are left alone.
    tiny = np.finfo(float).tiny

    def off_norm(x):
        return float(np.linalg.norm(x - np.diag(np.diag(x))))

    for _ in range(JACOBI_MAX_SWEEPS):
        if off_norm(a) <= threshold:
            break
        for pairs in rounds:
            p = np.array([pq[0] for pq in pairs])
            q = np.array([pq[1] for pq in pairs])
            h = a[p, q]
            r = np.abs(h)
            active = r > tiny
            if not np.any(active):
                continue
            p, q, h, r = p[active], q[active], h[active], r[active]
            app = a[p, p].real
            aqq = a[q, q].real
            tau = (aqq - app) / (2.0 * r)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            e = h / r
            # Block G = diag(1, conj(e)) @ [[c, s], [-s, c]]; the phase makes the pivot real.
            g_pp = c.astype(np.complex128)
            g_pq = s.astype(np.complex128)
            g_qp = -s * np.conj(e)
            g_qq = c * np.conj(e)
            ap = a[:, p].copy()
            aq = a[:, q].copy()
            a[:, p] = ap * g_pp + aq * g_qp
            a[:, q] = ap * g_pq + aq * g_qq
            ap = a[p, :].copy()
            aq = a[q, :].copy()
            a[p, :] = np.conj(g_pp)[:, None] * ap + np.conj(g_qp)[:, None] * aq
            a[q, :] = np.conj(g_pq)[:, None] * ap + np.conj(g_qq)[:, None] * aq
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp = v[:, p].copy()
            vq = v[:, q].copy()
            v[:, p] = vp * g_pp + vq * g_qp
            v[:, q] = vp * g_pq + vq * g_qq
    else:
        if off_norm(a) > threshold:
            raise ConvergenceError(f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigvalsh_desc(m) -> np.ndarray:
    return hermitian_eigensystem(m)[0]


def matrix_sqrt_psd(m) -> np.ndarray:
    """Positive semidefinite square root; eigenvalues in ``[-1e-10, 0)`` are clamped to 0."""
    w, v = hermitian_eigensystem(m)
    if w.size and w[-1] < -PSD_TOL:
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {w[-1]:.3e})")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (v * root) @ dagger(v)


def min_eigenvalue(m) -> float:
    return float(eigvalsh_desc(m)[-1])


def check_density(rho, tol: float = 1e-9, name: str = "rho") -> np.ndarray:
    """Validate a density matrix: square, power-of-two, Hermitian, unit trace, PSD."""
    rho = as_matrix(rho, name)
    d = rho.shape[0]
    if rho.shape != (d, d):
        raise ValueError(f"{name} must be square, got {rho.shape}")
    num_qubits(d)
    if not is_hermitian(rho, tol):
        raise ValueError(f"{name} is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"{name} has trace {tr.real:.12g}, expected 1")
    if min_eigenvalue(rho) < -tol:
        raise ValueError(f"{name} is not positive semidefinite")
    return rho


def _bit_table(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return (idx[:, None] >> (n - 1 - np.arange(n))) & 1


@lru_cache(maxsize=None)
def _symmetric_projector_cached(n: int) -> np.ndarray:
    dim = 2**n
    bits = _bit_table(n)
    weights = 1 << (n - 1 - np.arange(n))
    if n <= _PERMUTATION_SUM_MAX:
        p = np.zeros((dim, dim))
        cols = np.arange(dim)
        for perm in itertools.permutations(range(n)):
            rows = bits[:, list(perm)] @ weights
            np.add.at(p, (rows, cols), 1.0)
        p /= math.factorial(n)
    else:
        # Same operator as the permutation average, without n! terms.
        p = dicke_projector_sum(n)
    out = p.astype(np.complex128)
    out.flags.writeable = False
    return out


def symmetric_projector(n: int) -> np.ndarray:
    """Projector onto the symmetric subspace of ``n`` qubits (rank ``n + 1``).

    Read-only; copy before modifying.
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be an integer in [1, {MAX_QUBITS}], got {n!r}")
    return _symmetric_projector_cached(int(n))


def dicke_projector_sum(n: int) -> np.ndarray:
    """Sum of Dicke-state projectors; independent route to the symmetric projector."""
    dim = 2**n
    hamming = _bit_table(n).sum(axis=1)
    p = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(n + 1):
        d = (hamming == k).astype(float)
        d /= np.sqrt(d.sum())
        p += np.outer(d, d)
    return p


def state_fidelity(psi, rho) -> float:
    """Overlap ``<psi|rho|psi>`` of a pure state with a density matrix, clamped to [0, 1]."""
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    rho = as_matrix(rho, "rho")
    if rho.shape != (psi.size, psi.size):
        raise ValueError(f"ket of dimension {psi.size} does not match matrix {rho.shape}")
    f = np.vdot(psi, rho @ psi)
    return float(min(1.0, max(0.0, f.real)))


def purity(rho) -> float:
    rho = check_density(rho)
    return float(np.real(np.trace(rho @ rho)))
