"""Finite-dimensional order-unit algebras with a box product.

Catalog algebras H_n(F), events and conditional probabilities, skew order
derivations with their Lie algebra, and dynamical correspondences together
with the complex *-algebra they generate.
"""

from .algebra import (
    AlgebraSpec,
    Element,
    build_custom,
    build_hermitian_algebra,
    load_algebra,
    multiply,
    parse_catalog_tag,
    spec_from_json,
    spec_to_json,
)
from .composition import CompositionScalar, comp_conj, comp_mul, comp_norm
from .derivations import (
    LieAlgebraStructure,
    check_commutator_element,
    check_lemma4_automorphism,
    check_lemma5,
    classify_lie_algebra,
    is_order_derivation,
    skew_derivation_basis,
)
from .dyncorr import (
    ComplexStarAlgebra,
    DynamicalCorrespondence,
    canonical_correspondence,
    corollary1_checks,
    search_correspondence,
    theorem1_construct,
    verify_correspondence,
)
from .errors import (
    BoxAlgebraError,
    ConsistencyError,
    FormalRealityError,
    SamplingError,
    UndefinedConditioning,
    UnsupportedConstruction,
    ValidationError,
)
from .logic import (
    Event,
    State,
    check_condition_A,
    check_condition_B,
    check_condition_D,
    check_lemma1,
    check_lemma2_uniqueness,
    conditional_probability,
    conditioned_state,
    quadratic_map,
    random_state,
)
from .report import Report
from .spectral import (
    SpectralDecomposition,
    is_positive,
    minimal_polynomial,
    order_unit_norm,
    random_idempotent,
    spectral_decompose,
)

__version__ = "0.1.0"
