"""Exact computations on loop groups, the affine Grassmannian, and Verlinde numbers."""

from .arith import Cyclotomic, Interval, format_rational, parse_rational, sin2_exact, snap_integer
from .cohomology import CohomologyResult, cohomology_p1, euler_characteristic, splitting_type, theta_tau_check
from .errors import *  # noqa: F401,F403
from .extension import (
    CentralElement,
    FiniteOperator,
    WindowSpec,
    adjoint_action,
    block_a,
    chi0,
    finite_rank_det,
    hat_bracket,
    residue_pairing,
    tate_cocycle,
    tau,
    tau_shifted,
)
from .grassmann import (
    BirkhoffFactorization,
    DVector,
    Lattice,
    birkhoff_big_cell,
    birkhoff_full,
    degeneration_identity_check,
    dense_orbit_dvector,
    dominance_leq,
    infinity_invariant_factors,
    is_special,
    lattice_dvector,
    qN_level,
)
from .laurent import (
    Laurent,
    LaurentMatrix,
    PrecisionContext,
    TruncatedLaurent,
    mat_det,
    mat_inverse,
    order,
    pole_bound,
    series_inverse,
    series_mul,
)
from .verlinde import (
    VerlindeQuery,
    smatrix_oracle,
    verlinde_number,
    verlinde_terms,
    weight_for_degree,
    weight_to_subset,
)

__version__ = "0.1.0"
