"""Orbifold elliptic genus of invertible polynomial potentials.

Exact fractional-exponent q-expansions with cyclotomic phase arithmetic, a
numeric theta-function evaluation path, finite abelian symmetry-group
duality, and mechanical verification of holomorphy, the transformation laws,
and the duality of mirror models.
"""

from .exactmath import (
    CycNum,
    NotRationalError,
    SingularMatrixError,
    SnfResult,
    cyc_to_rational,
    cyclotomic_polynomial,
    invert_rational_matrix,
    root_of_unity,
    smith_normal_form,
)
from .genus import (
    EllValue,
    GenusSeries,
    NearPoleError,
    RationalityError,
    SectorKey,
    cone_supertrace_series,
    ell_genus_numeric,
    ell_genus_series,
    sector_supertrace_series,
    sector_value_numeric,
)
from .oracle import ModeSpec, StateCapError, free_state_series, zero_level_group_average
from .potential import (
    Atom,
    AtomDecomposition,
    Charges,
    DegenerateChargesError,
    InvalidPotentialError,
    NotInvertibleError,
    Potential,
    PotentialSyntaxError,
    compute_charges,
    decompose_atoms,
    make_potential,
    parse_potential,
    transpose_potential,
)
from .qseries import BiSeries, Windows, coefficient_at, geom_expand, series_mul
from .symmetry import (
    AdmissibilityError,
    PhaseVector,
    SymmetryGroup,
    admissible_subgroups,
    aut_group,
    box_representatives,
    dual_group,
    grading_element,
    grading_subgroup,
    sl_subgroup,
    theta_coords,
)
from .theta import ThetaParams, check_theta_identities, theta_value
from .verify import (
    CertificateTrace,
    HolomorphyReport,
    LineFamily,
    Verdict,
    check_holomorphy,
    check_jacobi_transformations,
    check_mirror,
    check_spectral_flow,
    check_star_substitution,
    check_weight_zero_limit,
    holomorphy_certificate,
)

__version__ = "0.1.0"
