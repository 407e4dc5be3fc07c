import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedqc.qmath import (
    ConvergenceError,
    as_matrix,
    check_density,
    dicke_projector_sum,
    hermitian_eigensystem,
    ket,
    matrix_sqrt_psd,
    partial_trace,
    permute_qubits,
    projector,
    purity,
    state_fidelity,
    symmetric_projector,
    tensor,
)
from mixedqc.states import PAULI_X

from conftest import random_density, random_hermitian, random_ket

I2 = np.eye(2)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def loop_partial_trace(rho, dims, keep):
    """Entry-by-entry partial trace, independent of the reshape route."""
    n = len(dims)
    keep = sorted(keep)
    traced = [i for i in range(n) if i not in keep]
    kd = [dims[i] for i in keep]
    out = np.zeros((math.prod(kd), math.prod(kd)), dtype=complex)

    def flat(idx):
        f = 0
        for i, d in zip(idx, dims):
            f = f * d + i
        return f

    for a in itertools.product(*[range(d) for d in kd]):
        for b in itertools.product(*[range(d) for d in kd]):
            s = 0
            for t in itertools.product(*[range(dims[i]) for i in traced]):
                ia, ib = [0] * n, [0] * n
                for pos, k in enumerate(keep):
                    ia[k], ib[k] = a[pos], b[pos]
                for pos, k in enumerate(traced):
                    ia[k] = ib[k] = t[pos]
                s += rho[flat(ia), flat(ib)]
            out[flat_k(a, kd), flat_k(b, kd)] = s
    return out


def flat_k(idx, dims):
    f = 0
    for i, d in zip(idx, dims):
        f = f * d + i
    return f


def permutation_operator(perm, n):
    """Explicit matrix sending |b_0 ... b_{n-1}> to the state with bits rearranged by perm."""
    d = 2**n
    p = np.zeros((d, d))
    for bits in itertools.product((0, 1), repeat=n):
        src = flat_k(bits, [2] * n)
        dst = flat_k([bits[perm[i]] for i in range(n)], [2] * n)
        p[dst, src] = 1
    return p


class TestTensor:
    def test_identity(self):
        np.testing.assert_array_equal(tensor(I2, I2), np.eye(4))

    def test_block_structure(self):
        m = tensor(projector([1, 0]), PAULI_X)
        expected = np.zeros((4, 4))
        expected[:2, :2] = PAULI_X.real
        np.testing.assert_array_equal(m, expected)

    def test_bit_flip_both(self):
        out = tensor(PAULI_X, PAULI_X) @ tensor([1, 0], [1, 0])
        np.testing.assert_array_equal(out, [0, 0, 0, 1])

    def test_entry_ordering(self, rng):
        a = rng.integers(-3, 4, size=(2, 3))
        b = rng.integers(-3, 4, size=(3, 2))
        t = tensor(a, b)
        for i1, i2, j1, j2 in itertools.product(range(2), range(3), range(3), range(2)):
            assert t[i1 * 3 + i2, j1 * 2 + j2] == a[i1, j1] * b[i2, j2]

    def test_associative_exact(self, rng):
        a, b, c = (rng.integers(-4, 5, size=(2, 2)) for _ in range(3))
        np.testing.assert_array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            as_matrix([[np.nan, 0], [0, 1]])


class TestPartialTrace:
    def test_product_state(self, rng):
        a, b = random_density(rng, 1), random_density(rng, 1)
        np.testing.assert_allclose(partial_trace(tensor(a, b), [2, 2], {0}), a, atol=1e-12)
        np.testing.assert_allclose(partial_trace(tensor(a, b), [2, 2], {1}), b, atol=1e-12)

    def test_bell_reduced_is_maximally_mixed(self):
        bell = projector(ket([1, 0, 0, 1]))
        np.testing.assert_allclose(partial_trace(bell, [2, 2], {0}), I2 / 2, atol=1e-15)

    def test_trace_preserved(self, rng):
        for _ in range(10):
            rho = random_density(rng, 3)
            for keep in ({0}, {1, 2}, {0, 2}):
                assert abs(np.trace(partial_trace(rho, [2, 2, 2], keep)) - 1) < 1e-12

    def test_against_loop_oracle(self, rng):
        rho = random_density(rng, 3)
        rho3 = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        for keep in ({0}, {1}, {2}, {0, 2}, {1, 2}):
            np.testing.assert_allclose(
                partial_trace(rho, [2, 2, 2], keep), loop_partial_trace(rho, [2, 2, 2], keep), atol=1e-13
            )
        np.testing.assert_allclose(
            partial_trace(rho3, [3, 2], {1}), loop_partial_trace(rho3, [3, 2], {1}), atol=1e-13
        )

    def test_all_but_one_factor_of_product(self, rng):
        parts = [random_density(rng, 1) for _ in range(3)]
        joint = tensor(*parts)
        for k in range(3):
            np.testing.assert_allclose(partial_trace(joint, [2, 2, 2], {k}), parts[k], atol=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            partial_trace(np.eye(4) / 4, [2, 3], {0})
        with pytest.raises(ValueError):
            partial_trace(np.eye(4) / 4, [2, 2], set())


class TestEigensystem:
    def test_diagonal(self):
        w, _ = hermitian_eigensystem(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(w, [3, 2, 1])

    def test_pauli_x(self):
        w, _ = hermitian_eigensystem(PAULI_X)
        np.testing.assert_allclose(w, [1, -1], atol=1e-14)

    @pytest.mark.parametrize("d", [2, 3, 5, 8, 16, 32])
    def test_reconstruction_and_oracle(self, rng, d):
        h = random_hermitian(rng, d)
        w, v = hermitian_eigensystem(h)
        assert np.max(np.abs((v * w) @ v.conj().T - h)) < 1e-9
        assert np.max(np.abs(v.conj().T @ v - np.eye(d))) < 1e-10
        np.testing.assert_allclose(w, np.linalg.eigvalsh(h)[::-1], atol=1e-10)
        assert abs(w.sum() - np.trace(h).real) < 1e-10

    def test_degenerate_spectrum(self):
        w, v = hermitian_eigensystem(symmetric_projector(3))
        np.testing.assert_allclose(w, [1, 1, 1, 1, 0, 0, 0, 0], atol=1e-12)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            hermitian_eigensystem([[0, 1], [0, 0]])

    def test_iteration_cap(self, monkeypatch, rng):
        import mixedqc.qmath as qm

        monkeypatch.setattr(qm, "JACOBI_MAX_SWEEPS", 1)
        with pytest.raises(ConvergenceError):
            qm.hermitian_eigensystem(random_hermitian(rng, 16))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**32 - 1))
    def test_trace_property(self, d, seed):
        h = random_hermitian(np.random.default_rng(seed), d)
        w, _ = hermitian_eigensystem(h)
        assert abs(w.sum() - np.trace(h).real) < 1e-10
        assert np.all(np.diff(w) <= 1e-12)


class TestSqrt:
    def test_identity(self):
        np.testing.assert_allclose(matrix_sqrt_psd(np.eye(3)), np.eye(3), atol=1e-14)

    def test_diagonal(self):
        np.testing.assert_allclose(matrix_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)

    def test_random_psd(self, rng):
        for rank in (1, 2, 4):
            m = random_density(rng, 2, rank) * 3
            r = matrix_sqrt_psd(m)
            assert np.max(np.abs(r @ r - m)) < 1e-9
            assert np.linalg.eigvalsh(r).min() > -1e-10

    def test_sqrt_of_square(self, rng):
        r0 = random_density(rng, 2)
        np.testing.assert_allclose(matrix_sqrt_psd(r0 @ r0), r0, atol=1e-9)

    def test_clamps_roundoff(self):
        r = matrix_sqrt_psd(np.diag([1.0, -5e-11]))
        np.testing.assert_allclose(r, np.diag([1.0, 0.0]))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            matrix_sqrt_psd(np.diag([1.0, -1e-6]))


class TestSymmetricProjector:
    def test_single_qubit(self):
        np.testing.assert_array_equal(symmetric_projector(1), np.eye(2))

    def test_two_qubits(self):
        np.testing.assert_allclose(symmetric_projector(2), (np.eye(4) + SWAP) / 2, atol=1e-15)

    def test_trace_four(self):
        assert abs(np.trace(symmetric_projector(4)) - 5) < 1e-12

    @pytest.mark.parametrize("n", range(1, 10))
    def test_projector_properties(self, n):
        p = symmetric_projector(n)
        assert np.max(np.abs(p @ p - p)) < 1e-12
        assert np.max(np.abs(p - p.conj().T)) < 1e-12
        tr = np.trace(p).real
        assert abs(tr - (n + 1)) < 1e-9

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_explicit_permutation_average(self, n):
        ops = [permutation_operator(perm, n) for perm in itertools.permutations(range(n))]
        np.testing.assert_allclose(symmetric_projector(n), sum(ops) / len(ops), atol=1e-14)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_dicke_route_agrees(self, n):
        np.testing.assert_allclose(symmetric_projector(n), dicke_projector_sum(n), atol=1e-13)

    def test_largest(self):
        assert abs(np.trace(symmetric_projector(12)).real - 13) < 1e-9

    @pytest.mark.parametrize("n", [0, 13, -1])
    def test_range(self, n):
        with pytest.raises(ValueError):
            symmetric_projector(n)


class TestFunctionals:
    def test_fidelity_pure(self):
        assert state_fidelity([1, 0], projector([1, 0])) == 1.0

    def test_fidelity_mixed(self):
        assert state_fidelity([1, 0], I2 / 2) == pytest.approx(0.5, abs=1e-15)

    def test_fidelity_dimension_mismatch(self):
        with pytest.raises(ValueError):
            state_fidelity([1, 0], np.eye(4) / 4)

    def test_purity_values(self, rng):
        assert purity(projector(random_ket(rng))) == pytest.approx(1.0, abs=1e-12)
        assert purity(I2 / 2) == pytest.approx(0.5)
        assert purity(np.eye(4) / 4) == pytest.approx(0.25)

    def test_purity_rejects_non_density(self):
        with pytest.raises(ValueError):
            purity(np.eye(2))
        with pytest.raises(ValueError):
            purity(np.diag([1.5, -0.5]))

    def test_check_density_accepts(self, rng):
        check_density(random_density(rng, 2))

    def test_permute_qubits_roundtrip(self, rng):
        rho = random_density(rng, 3)
        a, b, c = (random_density(rng, 1) for _ in range(3))
        np.testing.assert_allclose(permute_qubits(tensor(a, b, c), [2, 0, 1]), tensor(c, a, b), atol=1e-14)
        back = permute_qubits(permute_qubits(rho, [1, 2, 0]), [2, 0, 1])
        np.testing.assert_allclose(back, rho, atol=1e-15)
