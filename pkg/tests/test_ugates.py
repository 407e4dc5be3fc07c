import math

import numpy as np
import pytest

from mixedqc.cloning import universal_fidelity_formula
from mixedqc.gates import rotation_gate, universal_not
from mixedqc.qmath import basis_ket, eigvalsh_desc, partial_trace, projector, tensor
from mixedqc.states import PAULI_Y, RealQubitState, real_ket, real_pseudo_pure
from mixedqc.ugates import (
    UCNOT_FIDELITY,
    DomainError,
    algorithm_fidelity_estimate,
    apply_universal_cnot,
    pseudo_pure_toffoli_output,
    toffoli_budget,
    toffoli_output,
    universal_cnot_channel,
    universal_cnot_isometry,
    universal_controlled_u,
    universal_toffoli,
)

from conftest import random_ket

A, B = 0.5, math.sqrt(1 / 8)


def real_product(theta, phi):
    return projector(tensor(real_ket(theta), real_ket(phi)))


class TestIsometry:
    def test_shape(self):
        v = universal_cnot_isometry()
        assert v.matrix.shape == (8, 4)
        assert v.device_dims == (2,)

    def test_gram_spectrum(self):
        # The linear extension is not norm preserving on the full space.
        v = universal_cnot_isometry().matrix
        g = v.conj().T @ v
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(g)), [0.5, 0.5, 1.5, 1.5], atol=1e-12)
        assert universal_cnot_isometry().gram_deviation() == pytest.approx(0.5, abs=1e-12)

    def test_reproduces_transformation_for_real_states(self):
        v = universal_cnot_isometry().matrix
        k0, k1 = basis_ket(0), basis_ket(1)
        for alpha in np.linspace(0, 2 * math.pi, 9):
            chi = real_ket(alpha)
            perp = universal_not() @ chi
            want0 = (
                (A + B) * tensor(k0, chi, k0)
                + B * (tensor(k0, perp, k1) + tensor(k1, chi, k1))
                + (A - B) * tensor(k1, perp, k0)
            )
            want1 = (
                (A + B) * tensor(k1, perp, k1)
                + B * (tensor(k0, perp, k0) + tensor(k1, chi, k0))
                + (A - B) * tensor(k0, chi, k1)
            )
            np.testing.assert_allclose(v @ tensor(k0, chi), want0, atol=1e-12)
            np.testing.assert_allclose(v @ tensor(k1, chi), want1, atol=1e-12)

    def test_images_orthogonal_for_fixed_target(self):
        v = universal_cnot_isometry().matrix
        for alpha in np.linspace(0, 2 * math.pi, 7):
            chi = real_ket(alpha)
            a0 = v @ tensor(basis_ket(0), chi)
            a1 = v @ tensor(basis_ket(1), chi)
            assert abs(np.vdot(a0, a1)) < 1e-12
            assert np.linalg.norm(a0) == pytest.approx(1)

    def test_norm_preserved_on_real_products(self):
        v = universal_cnot_isometry().matrix
        for theta in np.linspace(0, 2 * math.pi, 16, endpoint=False):
            for phi in np.linspace(0, 2 * math.pi, 16, endpoint=False):
                x = tensor(real_ket(theta), real_ket(phi))
                assert np.linalg.norm(v @ x) == pytest.approx(1, abs=1e-12)


class TestUniversalCnot:
    def test_constant_fidelity_grid(self):
        grid = np.linspace(0, 2 * math.pi, 16, endpoint=False)
        for theta in grid:
            for phi in grid:
                r = apply_universal_cnot(real_product(theta, phi), theta, phi)
                assert abs(r.fidelity_control - UCNOT_FIDELITY) < 1e-6
                assert abs(r.fidelity_target - UCNOT_FIDELITY) < 1e-6
                assert abs(np.trace(r.output) - 1) < 1e-9
                assert eigvalsh_desc(r.output)[-1] >= -1e-9

    def test_value(self):
        assert UCNOT_FIDELITY == pytest.approx(0.853553, abs=1e-6)

    def test_angles_inferred(self):
        r = apply_universal_cnot(real_product(0.9, 2.1))
        assert r.metadata["control_alpha"] == pytest.approx(0.9)
        assert r.metadata["target_alpha"] == pytest.approx(2.1)
        assert r.fidelity_target == pytest.approx(UCNOT_FIDELITY, abs=1e-9)

    def test_control_one_target_zero(self):
        r = apply_universal_cnot(real_product(math.pi, 0.0))
        np.testing.assert_allclose(abs(np.vdot(r.ideal_target, [0, 1])), 1, atol=1e-12)
        assert r.fidelity_target == pytest.approx(UCNOT_FIDELITY)

    def test_complex_input_rejected(self):
        y_plus = np.array([1, 1j]) / math.sqrt(2)
        rho = projector(tensor(y_plus, y_plus))
        with pytest.raises(DomainError):
            universal_cnot_channel(rho)

    def test_y_axis_needs_angle(self):
        y_plus = np.array([1, 1j]) / math.sqrt(2)
        with pytest.raises(DomainError):
            apply_universal_cnot(projector(tensor(y_plus, basis_ket(0))))


class TestControlledU:
    @pytest.mark.parametrize("u", [np.eye(2), universal_not(), rotation_gate(math.pi / 2)])
    def test_five_sixths(self, u, rng):
        for _ in range(5):
            r = universal_controlled_u(random_ket(rng), u)
            assert r.fidelity_control == pytest.approx(5 / 6, abs=1e-10)
            assert r.fidelity_target == pytest.approx(5 / 6, abs=1e-10)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            universal_controlled_u([1, 1], np.eye(2))
        with pytest.raises(ValueError):
            universal_controlled_u([1, 0], np.eye(4))


class TestToffoli:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_fidelity_formula(self, n):
        r = universal_toffoli(RealQubitState(0.7), n, RealQubitState(1.9))
        assert r.fidelity_target == pytest.approx(universal_fidelity_formula(n), abs=1e-10)
        assert r.fidelity_control == pytest.approx(universal_fidelity_formula(n), abs=1e-10)
        assert abs(np.trace(r.output) - 1) < 1e-9
        assert eigvalsh_desc(r.output)[-1] >= -1e-9

    def test_ideal_target_rotation(self):
        r = universal_toffoli(RealQubitState(0.7), 2, RealQubitState(1.9))
        assert abs(abs(np.vdot(r.ideal_target, real_ket(2.6))) - 1) < 1e-12

    def test_ensemble_equals_linear_for_one_control(self):
        eps, a, t = 0.4, 1.3, 0.5
        got = pseudo_pure_toffoli_output(a, eps, 1, t)
        # Linear channel: clone the mixed control, then rotate the clone.
        from mixedqc.cloning import universal_clone
        from mixedqc.gates import apply_unitary

        joint = universal_clone(real_pseudo_pure(a, eps), 1, 2).joint
        want = apply_unitary(joint, rotation_gate(t), [1], 2)
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_pseudo_pure_is_state(self):
        out = pseudo_pure_toffoli_output(0.3, 0.5, 3, 1.0)
        assert abs(np.trace(out) - 1) < 1e-9
        assert eigvalsh_desc(out)[-1] >= -1e-9
        r = universal_toffoli(RealQubitState(0.3), 3, RealQubitState(1.0), epsilon=0.5)
        assert "mixed_part_ensemble" in r.metadata

    def test_pure_output_function(self):
        out = toffoli_output(0.0, 1, 0.0)
        assert out.shape == (4, 4)

    @pytest.mark.parametrize("n", [0, 6, 2.0])
    def test_control_range(self, n):
        with pytest.raises(ValueError):
            toffoli_output(0.0, n, 0.0)


class TestBudget:
    @pytest.mark.parametrize("delta, n", [(0.01, 9), (1 / 6, 1), (0.2, 1), (0.001, 31), (1e-4, 99)])
    def test_examples(self, delta, n):
        assert toffoli_budget(delta) == n

    def test_consistency(self):
        rng = np.random.default_rng(7)
        for delta in 10 ** rng.uniform(-5, math.log10(1 / 6), 50):
            n = toffoli_budget(delta)
            assert 1 / ((n + 1) * (n + 2)) <= delta < 1 / (n * (n + 1))

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.1])
    def test_domain(self, delta):
        with pytest.raises(ValueError):
            toffoli_budget(delta)

    def test_fidelity_power(self):
        assert algorithm_fidelity_estimate(11 / 12, 10) == pytest.approx(0.41890388788459276, rel=1e-12)
        assert algorithm_fidelity_estimate(0.9, 0) == 1.0
        with pytest.raises(ValueError):
            algorithm_fidelity_estimate(1.2, 1)
