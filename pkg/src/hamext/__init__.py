"""
Discrete linear Hamiltonian systems with non-Hermitian coefficients.

Solvers for a system and its adjoint, the weighted quotient space, a
finite-dimensional linear-relation calculus, maximal and minimal relations
with their boundary extensions, the doubled formally self-adjoint system,
and half-line truncation diagnostics.
"""

from .errors import (
    ContainmentError,
    DefinitenessError,
    DimensionError,
    HamiltonianError,
    MembershipError,
    ResidualError,
    SingularityError,
    WeightError,
)
from .system import (
    DEFAULT_TOL,
    CoefficientField,
    IntegerInterval,
    Side,
    Tolerances,
    ValidationReport,
    adjoint_side_coefficients,
    gram_window,
    random_field,
    symplectic_unit,
    validate_system,
)
from .dynamics import (
    FundamentalMatrix,
    Trajectory,
    embed,
    fundamental_matrix,
    lagrange_report,
    patch_bvp,
    propagate,
    shift,
    shift_matrix,
    solve_forced_ivp,
    solve_voc,
    step,
    symplectic_defect,
    system_residual,
)
from .quotient import QuotientSpace, build_space, class_inner, lift, project_class
from .relations import (
    LinearRelation,
    PairReport,
    adjoint,
    arens_decompose,
    bracket,
    classify_pair,
    deficiency_index,
    quotient_dim,
    span_relation,
)
from .extensions import (
    BoundarySubspace,
    HamiltonianRelationSet,
    boundary_extension,
    boundary_form,
    build_doubled,
    build_maximal,
    build_minimal,
    build_relation_set,
    correspondence_check,
    limit_point_emulation,
    q_star,
    representative,
    verify_qstar_adjoint,
)
from .halfline import (
    decaying_weight_generator,
    free_generator,
    halfline_deficiency_scan,
    limit_point_criterion_check,
)

__version__ = "0.1.0"
