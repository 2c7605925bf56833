"""Entanglement dynamics of two independent V-type three-level atoms."""
from .evolution import (
    IntegratorSettings,
    PhysicsError,
    Trajectory,
    analytic_II_general,
    analytic_II_isotropic,
    asymptotic_isotropic,
    asymptotic_negativity_pure,
    asymptotic_state_max_interference,
    detect_steady_state,
    evolve_rk4,
    negativity_psimax_closed_form,
)
from .lindblad import (
    CompletePositivityError,
    LindbladGenerator,
    SystemIIParams,
    SystemIParams,
    generator_system_I,
    generator_system_II,
    null_space_dimension,
    superoperator_matrix,
)
from .linalg import hermitian_eigenvalues, kron, partial_transpose_A, trace_norm_hermitian
from .states import (
    IsotropicParams,
    PureStateParams,
    isotropic_state,
    negativity,
    negativity_isotropic_closed_form,
    negativity_pure_closed_form,
    projector,
    psi_max,
    pure_state,
    validate_state,
)

__version__ = "0.1.0"
