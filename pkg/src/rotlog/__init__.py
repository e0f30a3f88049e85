"""rotlog: verification toolkit for rotation semigroups.

Exact symbolic algebra for the angular-momentum commutation relations, a
numerical functional calculus on periodic grids, and checks of the
logarithmic representation A = (I + kappa U(s,t)) d/dt Log(U(t,s) + kappa I)
together with its perturbation and power-series reconstruction identities.
"""

__version__ = "0.1.0"

from .funcalc import (
    BranchCutError,
    BranchCutReport,
    ContourError,
    ResolventError,
    Spectrum,
    branch_cut_check,
    expm,
    logm_contour,
    logm_principal,
    resolvent,
    spectrum,
)
from .gridops import (
    GaussianField,
    Grid,
    OperatorMatrix,
    PowerIterationError,
    StateVector,
    angular_momentum_apply,
    angular_momentum_matrix,
    coordinate_operator,
    make_grid,
    operator_norm,
    spectral_derivative,
    upwind_derivative,
)
from .logrep import (
    CommutationError,
    EvolutionFamily,
    IdentityResidual,
    LogRep,
    SemigroupCheck,
    SumDecomposition,
    dt_log_representation,
    evolution,
    log_representation,
    product_perturbation,
    reconstruct_generator,
    semigroup_violation_of_exp_a,
    series_reconstruction,
    sum_decomposition,
)
from .symop import (
    ExactScalar,
    Monomial,
    SymOp,
    angular_momentum,
    apply_to_polynomial,
    commutator,
    coordinate,
    derivative,
    momentum,
    mul,
    normal_order,
    rotation_generator,
)
from .symparse import ExpressionError, UnknownSymbolError, parse_operator
from .verify import (
    FieldDecayError,
    ResolventReport,
    SuiteConfig,
    discrete_commutation_residual,
    norm_growth_study,
    resolvent_sweep,
    rotation_compare,
    run_suite,
    standard_generator,
    suite_config_from_dict,
    unitarity_check,
)
