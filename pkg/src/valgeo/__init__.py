"""valgeo: a numerical laboratory for integral geometry on Grassmannians.

Subspace angles, polytope geometry with Monte-Carlo intrinsic volumes,
Radon/cosine transforms, the valuation algebra (Klain functions, products,
the degree-lowering Lambda operator), and spectral injectivity probes, all
behind a reproducible seeded-sampling discipline and a CLI of verification
suites.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .base import Estimate, unit_ball_volume
from .bodies import (
    Ball,
    IntrinsicVolumeVector,
    Polytope,
    SteinerPolynomial,
    ball_intrinsic_volumes,
    box_intrinsic_volumes,
    dist_to_polytope,
    hull_volume,
    kubota_estimate,
    make_crosspolytope,
    make_cube,
    make_random_polytope,
    make_simplex,
    minkowski_segment,
    polytope_from_json,
    polytope_to_json,
    project,
    steiner_fit,
)
from .errors import (
    ConditioningWarning,
    DimensionError,
    PolynomialFitError,
    PrecisionError,
    RankError,
    ScopeError,
)
from .grassmann import (
    SeededSampler,
    Subspace,
    cos_angle,
    ellipsoid_image_volume,
    haar_subspace,
    orthocomplement,
    orthonormal_basis,
    sample_containing,
    sample_within,
    sin_angle,
    span_sum,
)
from .transforms import (
    GFunction,
    OperatorMatrix,
    SpectrumReport,
    cosine_apply,
    even_harmonic_basis,
    funk_hecke_cosine_eigen,
    funk_radon_eigen,
    lefschetz_probe,
    operator_matrix_even,
    radon_apply,
)
from .valuations import (
    CroftonVal,
    CustomVal,
    IntrinsicVolume,
    Lambda,
    ProductProj,
    ProjectionVal,
    ValuationExpr,
    claim23_check,
    evaluate,
    expr_from_json,
    expr_to_json,
    klain_function,
    lambda_apply,
    lemma22_formula,
    multiply_by_intrinsic,
    product_projection,
    proportionality_check,
    v1_power,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "ConditioningWarning",
    "CroftonVal",
    "CustomVal",
    "DimensionError",
    "Estimate",
    "GFunction",
    "IntrinsicVolume",
    "IntrinsicVolumeVector",
    "KERNEL_BACKEND",
    "Lambda",
    "OperatorMatrix",
    "PolynomialFitError",
    "PrecisionError",
    "ProductProj",
    "ProjectionVal",
    "Polytope",
    "RankError",
    "ScopeError",
    "SeededSampler",
    "SpectrumReport",
    "SteinerPolynomial",
    "Subspace",
    "ValuationExpr",
    "ball_intrinsic_volumes",
    "box_intrinsic_volumes",
    "claim23_check",
    "cos_angle",
    "cosine_apply",
    "dist_to_polytope",
    "ellipsoid_image_volume",
    "evaluate",
    "even_harmonic_basis",
    "expr_from_json",
    "expr_to_json",
    "funk_hecke_cosine_eigen",
    "funk_radon_eigen",
    "haar_subspace",
    "hull_volume",
    "klain_function",
    "kubota_estimate",
    "lambda_apply",
    "lefschetz_probe",
    "lemma22_formula",
    "make_crosspolytope",
    "make_cube",
    "make_random_polytope",
    "make_simplex",
    "minkowski_segment",
    "multiply_by_intrinsic",
    "operator_matrix_even",
    "orthocomplement",
    "orthonormal_basis",
    "polytope_from_json",
    "polytope_to_json",
    "product_projection",
    "project",
    "proportionality_check",
    "radon_apply",
    "sample_containing",
    "sample_within",
    "sin_angle",
    "span_sum",
    "steiner_fit",
    "unit_ball_volume",
    "v1_power",
]
