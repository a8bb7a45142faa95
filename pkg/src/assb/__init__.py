"""Adaptive SWAP-measurement circuits on a qubit chain.

Trajectory simulation of measurement-feedback dynamics, exact superoperator
spectra in charge sectors, closed-form entanglement results, and finite-size
scaling collapse.
"""

__version__ = "0.1.0"

from .hilbert import (
    PureState,
    SectorBasis,
    basis_state,
    dicke_state,
    neel_state,
    sector_basis,
    total_sz,
)
from .ops import (
    MeasurementOutcome,
    ancilla_cswap_measure,
    apply_pauli_projector,
    apply_sigma_z,
    apply_swap_projector,
    pauli_measure,
    swap_measure_with_feedback,
)
from .trajectory import (
    ModelParams,
    ObservableSpec,
    TrajectoryRecord,
    elementary_step,
    ensemble_average,
    half_chain_entropy,
    run_ensemble,
    run_trajectory,
    spin_spin,
    susceptibility,
    xy_correlation,
)
from .channel import (
    DoubledVector,
    GapResult,
    Superoperator,
    build_superoperator,
    channel_expectation,
    evolve,
    gap_exponent_fit,
    purity,
    spectral_gap,
    steady_state,
    unvectorize,
    vectorize,
)
from .analytic import (
    EntanglementSpectrum,
    asymptotic_entropy,
    entanglement_spectrum,
    exact_entropy,
    projected_channel_matrix,
    steady_chi,
    steady_zz,
    stirling_sandwich,
)
from .scaling import CollapsePoint, CollapseResult, collapse_cost, collapse_fit
