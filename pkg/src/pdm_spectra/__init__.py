"""Spectra of complexified position-dependent-mass Hamiltonians.

The package models non-Hermitian Schroedinger operators whose mass varies
with position and whose potential picks up an imaginary part from a
first-order intertwining construction.  A change of variables maps each
such operator onto a constant-mass reference problem; the two pictures are
discretized independently and cross-checked against each other, against
closed-form bound-state ladders, and against a LAPACK-free eigenvalue
oracle.
"""

from .errors import (
    BadIntervalError,
    BetaMinusOneError,
    ConfigError,
    InsufficientBoundStatesError,
    MissingVectorsError,
    NoConvergenceError,
    OutOfDomainError,
    OutOfRangeError,
    PdmSpectraError,
    SingularEdgeError,
    TooFewNodesError,
    TooLargeError,
    UnsupportedGeneratorError,
    UnsupportedKindError,
)
from .model import (
    AmbiguityOrdering,
    ConstantMass,
    CustomGenerator,
    MassProfile,
    ModelSpec,
    Morse,
    ORDERING_PRESETS,
    SamsonovRoy,
    ScarfII,
    constant_generator,
    delta_of,
    generator_eval,
    ordering_preset,
    profile_eval,
)
from .mapping import (
    LiouvilleMap,
    PotentialDecomposition,
    alt_branch_potential,
    closed_form_reference,
    closed_form_target,
    potential_decomposition,
    reference_potential,
    target_potential,
    wavefunction_pullback,
)
from .operators import (
    Grid,
    OperatorMatrix,
    build_eta_matrix,
    build_ordered_kinetic,
    build_reference_matrix,
    build_target_matrix,
    export_matrix,
    matched_domains,
    q_induced_grid,
    uniform_grid,
)
from .eigen import (
    Spectrum,
    brute_oracle_small,
    classify_spectrum,
    eig,
    match_eigenvalue_sets,
)
from .verify import (
    SAMSONOV_ROY_MISSING_LEVEL,
    VerificationReport,
    analytic_levels,
    check_analytic,
    check_identities,
    check_intertwining,
    check_isospectral,
    convergence_sweep,
    eigensolver_validation,
    fit_decay_rate,
    free_box_levels,
    isospectral_sweep,
    samsonov_roy_levels,
    scarf2_levels,
)
from .config import (
    DEFAULTS,
    RunConfig,
    build_spec,
    config_from_dict,
    load_config,
)

__version__ = "0.1.0"
