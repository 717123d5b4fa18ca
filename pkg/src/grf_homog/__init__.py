"""Invariant Bismut geometry and generalized Ricci flow on reductive homogeneous spaces."""

from .lie import (
    LieAlgebra,
    ReductiveSpace,
    abelian,
    bracket,
    build_lie_algebra,
    change_basis,
    direct_sum,
    isotropy_invariance_check,
    killing_form,
    lie_algebra_from_json,
    lie_group_space,
    reductive_split,
)
from .forms import (
    AltForm,
    Bilinear,
    Metric,
    codifferential,
    form_norm_sq,
    fundamental_four_form,
    h_squared,
    hodge_star,
    inner,
    invariant_forms,
    invariant_symmetric,
    is_harmonic,
    koszul_d,
    wedge,
)
from .curvature import (
    bismut_nomizu,
    bismut_ricci,
    curvature_tensor,
    is_flat,
    levi_civita_nomizu,
    orthonormal_frame,
    ricci,
    scalar,
)
from .brf import (
    Chart,
    SolveReport,
    brf_residual,
    differential_at,
    gauge_normalize,
    multistart,
    residual_polynomials_p_eq_q,
    solve,
    torsion_test,
    trace_identity_defect,
)
from .catalog import (
    KobayashiData,
    MpqSpace,
    bi_invariant_group,
    flat_torus,
    kobayashi_check,
    mpq,
    su2,
    su2_su2,
    synthetic_kobayashi_data,
)
from .flow import (
    FlowState,
    FlowTrajectory,
    GRFSystem,
    MpqODE,
    fixed_point_mpq,
    grf_system,
    integrate,
    jacobian_eigen,
    mpq_flow_system,
    mpq_jacobian_closed_form,
    mpq_ode_rhs,
)

__version__ = "0.1.0"
