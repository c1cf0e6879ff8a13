"""Exact entanglement entropy, measurement simulation, and graph dataset
generation for Rydberg two-leg ladders."""

from .errors import (
    ConvergenceError,
    DegenerateInputError,
    ExcessFailureError,
    InvalidArgumentError,
    ParseError,
    ResourceLimitError,
    SchemaVersionError,
)
from .lattice import (
    Bipartition,
    Lattice,
    boundary_sites,
    build_ladder,
    random_bipartition,
    symmetric_bipartition,
)
from .spectrum import (
    GroundState,
    HamiltonianOperator,
    SolverConfig,
    SystemParams,
    build_hamiltonian,
    ground_state,
    ground_state_dense,
    ground_state_lanczos,
)
from .quantum_info import (
    BasisDistribution,
    EntropyRecord,
    basis_probabilities,
    classical_mutual_information,
    fourth_cross_moment,
    rydberg_probabilities,
    shannon_entropy,
    two_point_correlations,
    von_neumann_entropy,
)
from .sampler import (
    ShotSet,
    apply_bitflip_noise,
    empirical_distribution,
    perturb_bipartition_boundary,
    read_shots,
    sample_bitstrings,
    write_shots,
)
from .features import (
    FeaturizeOptions,
    GraphSample,
    edge_list,
    featurize,
    read_samples,
    write_samples,
)
from .pipeline import (
    GenerationConfig,
    NoiseOptions,
    SweepConfig,
    generate_dataset,
    generate_sample,
    mi_bound_report,
    read_sweep,
    sample_parameters,
    sweep_grid,
    write_sweep,
)
from .metrics import (
    CalibrationResult,
    PredictionSet,
    apply_temperature,
    bias_test,
    calibrate_temperature,
    coverage,
    log_cosh_loss,
    mae,
    mape_thresholded,
    paired_comparison,
    read_predictions,
    summarize,
    write_predictions,
)

__version__ = "0.1.0"
