"""Finite-dimensional toolkit for spectral shift functions, double operator
integrals, Loewner matrices, and Schur multiplier norms on Hermitian matrices."""

from .linalg import (
    ConvergenceError,
    DomainError,
    EigenDecomposition,
    apply_function,
    as_hermitian,
    eigh,
    load_matrix,
    random_general,
    random_hermitian,
    save_matrix,
    schatten_norm,
    singular_values,
    trace,
)
from .funcat import (
    KernelMatrix,
    ScalarFunction,
    catalog,
    divided_difference,
    get_function,
    lipschitz_seminorm_estimate,
    lipschitz_seminorm_refined,
    loewner_matrix,
    polynomial,
    restrict,
)
from .doi_engine import (
    bochner_integral,
    delta_f,
    derivative_Q,
    doi,
    doi_representation_check,
    hs_derivative_check,
    trace_of_doi,
)
from .multiplier import (
    FactorizationCertificate,
    MultiplierNormResult,
    abs_growth_report,
    certificate_bound,
    diagonal_trace,
    multiplier_norm,
    ol_seminorm_empirical,
    ol_seminorm_via_grids,
)
from .shift import (
    AtomicSignedMeasure,
    DensityEstimate,
    StepFunction,
    hellmann_feynman_check,
    nu_integrated,
    nu_t,
    nu_vs_xi_check,
    trace_formula_check,
    trace_formula_rhs,
    translation_scan,
    xi_from_eigs,
)

__version__ = "0.1.0"
