"""Ground-state estimation by quantum subspace expansion, with thresholded
and partitioned variants, on an exact statevector backend."""

from .gevp import (
    GevpSolution,
    ScanFailedError,
    SubspaceCollapseError,
    ThresholdPolicy,
    default_a_grid,
    scaled_threshold,
    solve_gevp,
    tqse_scan,
)
from .harness import (
    ExperimentConfig,
    ExperimentRecord,
    PauliFile,
    SpinRing,
    aggregate,
    emit_histograms,
    relative_error,
    resolve_system,
    run_experiment,
)
from .noise import NoiseSpec, perturb_moments, perturb_rte_tensors
from .pauli import (
    DisorderSpec,
    PauliFormatError,
    PauliString,
    PauliSum,
    build_spin_ring,
    field_only_ground_bits,
    load_pauli_file,
    parse_pauli_sum,
    serialize_pauli_sum,
)
from .pqse import (
    DegenerateCandidateError,
    PqseError,
    PqseResult,
    b_update,
    candidate_statistics,
    convolve_coeffs,
    outer_coeffs,
    partition_order,
    pqse_run,
    reconstruct_state,
    sub_matrices_power,
    sub_matrices_rte,
)
from .simulator import (
    Spectrum,
    StateVector,
    apply_pauli_sum,
    basis_state,
    evolve_state,
    exact_ground,
    expectation,
    state_overlap,
)
from .subspace import (
    MomentOverflowError,
    MomentSequence,
    RteTensors,
    SubspaceProblem,
    compute_moments,
    default_timestep,
    hankel_matrices,
    rte_tensors,
)

__version__ = "0.1.0"
