"""clusterkit: an exact workbench for rooted cluster algebras of geometric type.

Seeds, mutations and admissible sequences; depth-bounded verification of
mutation-compatible ring homomorphisms; amalgamated sums and cuttings;
specialisations and restrictions; and the polygon/Grassmannian layer of
type A.  All arithmetic is exact integer arithmetic on sparse Laurent
polynomials.
"""

from .laurent import (
    LaurentPoly,
    RationalExpr,
    Ring,
    RingMismatch,
    UndefinedAtPoint,
    UnassignedVariable,
    ZeroPolynomialDivision,
    evaluate,
    evaluate_rational,
    exact_divide,
    is_laurent,
    laurent_divide,
    substitute,
    substitute_rational,
)
from .seed import (
    DimensionMismatch,
    DuplicateLabel,
    ExchangeMatrix,
    LaurentContractViolation,
    MutationClassResult,
    NoSuchVariable,
    NotAdmissible,
    NotExchangeable,
    NotSkewSymmetrisable,
    Seed,
    SeedIso,
    check_skew_symmetrisable,
    cluster_variables,
    express_in_cluster,
    is_acyclic,
    is_finite_type,
    mutation_class,
    new_seed,
    opposite_seed,
    rewrite_in_cluster,
    seed_from_json,
    seed_isomorphic,
    seed_to_dot,
    seed_to_json,
    simplify_seed,
    subseed,
)
from .morphism import (
    CM1Violation,
    CM2Violation,
    Const,
    MorphismSpec,
    SeedMismatch,
    SpecialisationPreReport,
    TargetVar,
    VerificationReport,
    Witness,
    ZeroDenominatorImage,
    apply_morphism,
    biadmissible_sequences,
    build_morphism,
    check_sequence,
    check_spebounds,
    check_upper_bound_membership,
    classify_isomorphism,
    compose,
    identity_morphism,
    image_seed,
    is_ideal,
    morphism_from_json,
    morphism_to_json,
    restriction,
    specialisation,
    verify_cm3,
    verify_locally,
)
from .glue import (
    CoconeDisagreesOnDelta,
    GlueSpec,
    NotGlueable,
    NotSeparating,
    SeparatingPartition,
    amalgamated_sum,
    canonical_injection,
    coproduct,
    cut,
    glueable,
    gluespec_from_json,
    projection,
    pushout_check,
    separating_partition,
)
from .surface import (
    BoundaryArc,
    InvalidTriangulation,
    Triangulation,
    arc_label,
    count_internal_arcs,
    enumerate_triangulations,
    fan_triangulation,
    flip,
    grassmannian_projection,
    plucker_check,
    polygon_inclusion,
    polygon_seed,
    triangulation_from_json,
    triangulation_to_json,
)

__version__ = "0.1.0"
