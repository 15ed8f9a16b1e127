"""Birkhoff-James orthogonality on finite-dimensional C*-algebras.

Elements are direct sums of square complex matrix blocks with the spectral
norm. The package decides orthogonality two independent ways, builds the
maps that preserve it, and runs seeded property checks.
"""

from __future__ import annotations

from .bj import (
    BJVerdict,
    NormingSubspace,
    State,
    bj_orthogonal_criterion,
    bj_orthogonal_minimize,
    minimize_along,
    norm_attain_set,
    rank_one_perp,
)
from .cstar import (
    AlgebraElement,
    AlgebraShape,
    CentralElement,
    alg_norm_and_norming_blocks,
    bj_orthogonal_alg,
    central_gauge_check,
    has_abelian_summand,
    is_smooth,
    joint_norming_subspace,
)
from .errors import *  # noqa: F401,F403
from .geometry import (
    OutgoingSpaceSpec,
    construct_Bpm,
    ellipse_hausdorff,
    lastrow_svd_check,
    left_symmetric_falsify,
    locally_dependent_equiv,
    rank_one_ellipse,
    right_symmetric_check,
    line_angle,
)
from .linalg import herm_eig, numrange_boundary, spectral_norm, support_function, svd, zero_in_numrange
from .maps import (
    BJMap,
    BlockIsometry,
    Flavor,
    GaugeSpec,
    IsometrySpec,
    MapKind,
    apply_isometry,
    best_scalar_fit,
    build_theorem_map,
    counterexample_abelian_map,
    counterexample_gauge_map,
    recover_rank_one_structure,
    strong_preservation_test,
)
from .suites import SuiteReport, run_suite

__version__ = "0.1.0"
