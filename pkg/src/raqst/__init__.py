"""Two-qubit quantum state tomography via weighted linear regression with
recursive updates and adaptive measurement selection, plus a seeded Monte
Carlo harness comparing static and adaptive protocols.
"""

from .backend import USE_NUMBA
from .core import (
    HermitianBasis,
    bloch_to_matrix,
    build_pauli_basis,
    bures_distance_sq,
    density_matrix_from_json,
    density_matrix_to_json,
    fidelity,
    infidelity,
    project_to_physical,
    purity,
    state_to_bloch,
    validate_density_matrix,
)
from .measurements import (
    MeasurementCatalog,
    Povm,
    complete_product_povm,
    cube_settings,
    eigenbasis_povm,
    make_povm,
    mub_settings,
    ordered_eigensystem,
    parameterize_effect,
    product_kets,
    rotate_mub_to_basis,
)
from .estimator import (
    DEFAULT_RIDGE,
    EstimatorState,
    RegressionRecord,
    absorb_all,
    batch_lre,
    compute_weight,
    current_estimate,
    fresh_state,
    records_from_counts,
    recursive_update,
)
from .adaptive import (
    AdaptiveMode,
    MinProbResult,
    ResourceSchedule,
    SelectionDecision,
    build_candidate_set,
    gain,
    min_prob_product_projector,
    predicted_prob,
    resource_schedule,
    select_next_setting,
)
from .simulator import (
    ProtocolKind,
    TrialConfig,
    TrialRecord,
    TrialResult,
    haar_unitary,
    monte_carlo,
    random_mes,
    random_pure_state,
    run_protocol,
    sample_counts,
    singlet_state,
    werner_p_for_purity,
    werner_state,
)
from .reporting import (
    SweepRow,
    UpsilonRow,
    aggregate,
    gill_massar_bound,
    improvement_index,
    upsilon_row,
    write_results,
    write_trial_records,
    write_upsilon,
)

__all__ = [
    "USE_NUMBA",
    "HermitianBasis",
    "bloch_to_matrix",
    "build_pauli_basis",
    "bures_distance_sq",
    "density_matrix_from_json",
    "density_matrix_to_json",
    "fidelity",
    "infidelity",
    "project_to_physical",
    "purity",
    "state_to_bloch",
    "validate_density_matrix",
    "MeasurementCatalog",
    "Povm",
    "complete_product_povm",
    "cube_settings",
    "eigenbasis_povm",
    "make_povm",
    "mub_settings",
    "ordered_eigensystem",
    "parameterize_effect",
    "product_kets",
    "rotate_mub_to_basis",
    "DEFAULT_RIDGE",
    "EstimatorState",
    "RegressionRecord",
    "absorb_all",
    "batch_lre",
    "compute_weight",
    "current_estimate",
    "fresh_state",
    "records_from_counts",
    "recursive_update",
    "AdaptiveMode",
    "MinProbResult",
    "ResourceSchedule",
    "SelectionDecision",
    "build_candidate_set",
    "gain",
    "min_prob_product_projector",
    "predicted_prob",
    "resource_schedule",
    "select_next_setting",
    "ProtocolKind",
    "TrialConfig",
    "TrialRecord",
    "TrialResult",
    "haar_unitary",
    "monte_carlo",
    "random_mes",
    "random_pure_state",
    "run_protocol",
    "sample_counts",
    "singlet_state",
    "werner_p_for_purity",
    "werner_state",
    "SweepRow",
    "UpsilonRow",
    "aggregate",
    "gill_massar_bound",
    "improvement_index",
    "upsilon_row",
    "write_results",
    "write_trial_records",
    "write_upsilon",
]
