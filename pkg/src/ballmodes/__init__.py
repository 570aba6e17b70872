"""Exact negative eigenvalues of the damped Maxwell problem outside a ball.

The pipeline runs on exact rational arithmetic end to end: characteristic
polynomials with certified unique positive roots, eigenvalue intervals of
arbitrary width, multiplicity-weighted counting against the quadratic
growth law, and eigenfield reconstruction with residual diagnostics.
"""

__version__ = "0.1.0"

from .besselpoly import (
    GammaParam,
    OverflowAtLargeN,
    characteristic_poly_closed_form,
    characteristic_poly_direct,
    gamma_param,
    hankel_oracle,
    hankel_poly_coeffs,
    log_derivative_gap,
    logderiv_approx_error,
    secular_oracle,
)
from .exactpoly import (
    RatPoly,
    RootInterval,
    ZeroOrManyRoots,
    cauchy_positive_bound,
    derivative,
    descartes_sign_changes,
    eval_sign,
    isolate_unique_positive_root,
    refine,
    sturm_root_count,
)
from .fields import (
    ModeField,
    SphereSample,
    boundary_residual,
    divergence_residual,
    eigenfield,
    field_scale,
    maxwell_residual,
    mode_field,
    sph_harm,
    sphere_quadrature,
    sphere_sample,
    vector_harmonics,
)
from .spectrum import (
    CountingReport,
    EigMode,
    IncompleteTable,
    SpectrumTable,
    counting,
    eigenvalue,
    exceptional_count,
    localization_check,
    localization_gaps,
    localization_windows,
    reciprocal_symmetry_check,
    spectrum_table,
    weyl_residual,
)

__all__ = [
    "__version__",
    "CountingReport",
    "EigMode",
    "GammaParam",
    "IncompleteTable",
    "ModeField",
    "OverflowAtLargeN",
    "RatPoly",
    "RootInterval",
    "SphereSample",
    "SpectrumTable",
    "ZeroOrManyRoots",
    "boundary_residual",
    "cauchy_positive_bound",
    "characteristic_poly_closed_form",
    "characteristic_poly_direct",
    "counting",
    "derivative",
    "descartes_sign_changes",
    "divergence_residual",
    "eigenfield",
    "eigenvalue",
    "eval_sign",
    "exceptional_count",
    "field_scale",
    "gamma_param",
    "hankel_oracle",
    "hankel_poly_coeffs",
    "isolate_unique_positive_root",
    "localization_check",
    "localization_gaps",
    "localization_windows",
    "log_derivative_gap",
    "logderiv_approx_error",
    "maxwell_residual",
    "mode_field",
    "reciprocal_symmetry_check",
    "refine",
    "secular_oracle",
    "sph_harm",
    "sphere_quadrature",
    "sphere_sample",
    "spectrum_table",
    "sturm_root_count",
    "vector_harmonics",
    "weyl_residual",
]
