"""Density-matrix simulation of cloning-based gates for initially mixed qubits."""

from .analysis import cnot_concurrence_sweep, concurrence, purity_preservation_report
from .cloning import (
    CloneOutput,
    figure2_table,
    measured_clone_fidelity,
    pc_upper_bound,
    universal_clone,
    universal_fidelity_formula,
)
from .gates import apply_unitary, rotation_gate, standard_cnot, universal_not
from .qmath import (
    hermitian_eigensystem,
    matrix_sqrt_psd,
    partial_trace,
    purity,
    state_fidelity,
    symmetric_projector,
    tensor,
)
from .states import (
    PseudoPureState,
    RealQubitState,
    bloch_vector,
    orthogonal_real,
    pseudo_pure_density,
    real_ket,
)
from .table import SweepTable
from .ugates import (
    apply_universal_cnot,
    algorithm_fidelity_estimate,
    toffoli_budget,
    universal_cnot_isometry,
    universal_controlled_u,
    universal_toffoli,
)

__version__ = "0.1.0"
