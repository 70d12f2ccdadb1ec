"""Exact genus-zero Gromov-Witten invariants of projective complete intersections via mirror symmetry."""

__version__ = "0.1.0"

from .asym import (  # noqa: E402
    Asym,
    AsymptoticData,
    IdentityViolation,
    ObstructionNonzero,
    OperatorL,
    appendix_b_oracles,
    build_L_operators,
    compute_chi,
    compute_H_mj,
    compute_Phi_families,
    compute_Phi_m_c,
    solve_asymptotic_expansion,
    solve_L,
)
from .bps import BPSSeries, bps_from_gw, integrality_check  # noqa: E402
from .brackets import BracketData, bracket_decompose, hat_decompose  # noqa: E402
from .hyper import (  # noqa: E402
    CIGeometry,
    HolomorphyViolation,
    Hyper,
    NotFano,
    WeightedDegreeWarning,
    build_F,
    build_F0_Fp,
    build_Fhat,
    compute_coeff_tables,
    compute_I_and_J,
)
from .invariants import (  # noqa: E402
    DimensionMismatch,
    InvariantQuery,
    InvariantSeries,
    bound_certificate,
    cy_four_point_series,
    cy_three_point_series,
    gw_degree_zero,
    gw_invariant,
    proj_theorem4,
    vanishing_predicate,
)
from .series import (  # noqa: E402
    Poly,
    QSeries,
    RationalFn,
    WLaurent,
    qs_analytic_ops,
    qs_revert_mirror,
    qs_ring_ops,
    ratfn_eval_at_series,
    wl_apply_D,
    wl_apply_M,
)
from .structconst import (  # noqa: E402
    HypothesisViolated,
    InfeasibleKey,
    SCKey,
    sc_closed_forms,
    sc_recursive,
    sc_tree,
    two_point_seed,
)
from .trees import MarkedTree, enumerate_trivalent_trees, tree_weight_total  # noqa: E402
