"""
Mixed multiplicities of filtrations of monomial ideals.
"""
import logging

from mixedmult.exceptions import (
    ConfigError,
    DimensionMismatchError,
    InsufficientTermsError,
    MixedMultError,
    NotPrimaryError,
    PeriodSearchError,
    SingularSampleError,
    UnverifiedPeriodError,
    ZeroIdealError,
)
from mixedmult.monomial import (
    MonomialIdeal,
    colength,
    contains,
    covolume,
    ideal_sum,
    is_primary,
    is_subideal,
    minimalize,
    mixed_covolume,
    newton_polyhedron,
    power,
    product,
)
from mixedmult.filtration import (
    Filtration,
    FiltrationSpec,
    SurdScalar,
    check_submultiplicative,
    ideal_at,
    noetherian_period,
    product_filtration,
    rescale,
    spec_from_json,
    truncate,
)
from mixedmult.polytope import (
    RationalPolytope,
    clip,
    contains_body,
    contains_point,
    hull,
    minkowski_sum,
    mixed_volume,
    volume,
)
from mixedmult.multiplicity import (
    G_exact_truncated,
    LimitEstimate,
    MixedMultiplicityReport,
    length_sequence,
    limit_estimate,
    minkowski_spot_checks,
    mixed_multiplicities,
    multiplicity as filtration_multiplicity,
    positivity_report,
    truncation_ladder,
)
from mixedmult.okounkov import (
    MonomialValuation,
    beta_for,
    body,
    gamma,
    lemma1_search,
    minkowski_checks,
    prop1_check,
    theorem1_check,
    theorem1_ladder,
)
from mixedmult.components import (
    ComponentModel,
    component_G,
    component_mixed,
    example1_model,
    model_from_json,
)

logging.getLogger(__name__).addHandler(logging.NullHandler())
