"""Orthogonality, its preservers and multi-A-linear forms on Hilbert modules A^k
over finite-dimensional C*-algebras."""

from .algebra import (
    AlgebraElement,
    AlgebraShape,
    NotInvertible,
    NotPositiveError,
    ShapeMismatchError,
    State,
    alg_mul,
    alg_norm,
    apply_state,
    characters,
    is_invertible,
    is_positive,
    sqrt_positive,
    try_inverse,
)
from .forms import (
    FactorizationResult,
    MultiForm,
    NotStrong,
    PreservationViolated,
    StrongWitness,
    UnsupportedShape,
    eval_form,
    factorize_pair,
    find_strong_witness,
    gram_form,
    gram_pair_from_maps,
    invertibility_preservation,
    is_bounded_estimate,
    kernel_sample,
    preservation_check,
    scaled_isometry_check,
)
from .module import (
    DEFAULT_TOLERANCES,
    AModuleMap,
    CLinearMap,
    ModuleVector,
    ToleranceConfig,
    inner_product,
    modulus,
    modulus_squared,
    polarization_gram,
    vector_norm,
)
from .orthogonality import (
    OrthogonalityVerdict,
    Relation,
    bj_orthogonal_minimize,
    bj_orthogonal_witness,
    bj_symmetry_probe,
    ip_orthogonal,
    modulus_condition,
    reversed_action_condition,
    squared_modulus_condition,
    strong_bj_orthogonal,
)
from .report import VerificationReport
from .suites import SUITES, run_suite

__version__ = "0.1.0"
