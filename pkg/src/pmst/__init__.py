"""Self-testing linear witnesses for qubit prepare-and-measure scenarios.

Construct witnesses targeting extremal 3- and 4-outcome POVMs or arbitrary
state ensembles, compute classical / real-qubit / complex-qubit bounds,
verify optimality and uniqueness numerically, and simulate and certify
finite-shot experiments.
"""

from ._backend import backend_name, use_backend
from .bounds import (
    BoundResult,
    RealFamilyConfig,
    SelfTestReport,
    classical_bound,
    quantum_bound,
    real_family,
    real_family_value,
    real_scan_bound,
    umbrella_classical_value,
    verify_selftest,
)
from .builder import (
    FourByThreeParams,
    GeneralParams,
    PairwiseParams,
    WitnessBundle,
    augment_state,
    build_4x3,
    build_4x6,
    build_4x6_from_states,
    build_general,
    bundle_from_dict,
    bundle_to_dict,
    construct_bundle,
    double_rows,
    equilibrium_residual,
    optimal_gram_4x3,
    state_moment_matrix,
    stationarity_residual,
    umbrella,
    umbrella_params,
)
from .certify import (
    Certificate,
    Thresholds,
    bundle_thresholds,
    make_certificate,
    umbrella_thresholds,
)
from .core import (
    BinaryMeasurement,
    Povm,
    born_binary,
    born_povm,
    bloch_state,
    factor_gram,
    gram_matrix,
    is_legitimate_gram,
    joint_gram,
    null_combinations,
    povm_from_bloch,
    random_extremal_povm,
    rank_of_span,
    sic_povm,
    unit_bloch,
)
from .simulate import (
    CircuitEntry,
    StatTable,
    WitnessEstimate,
    build_circuits,
    circuit_probabilities,
    estimate_witness,
    meas_angles,
    prep_amplitudes,
    prep_unitary,
    proj_unitary,
    sample_counts,
    sample_counts_from_circuits,
    sigma_analytic,
)
from .witness import (
    ColumnCheck,
    PMScenario,
    UVectors,
    WitnessMatrix,
    best_measurements,
    best_states,
    degenerate_check,
    eval_full_witness,
    eval_witness,
    u_norms_from_gram,
)

__version__ = "0.1.0"
