"""Correlators of characteristic polynomials of GOE/GUE random matrices.

Three mutually verifying routes: Monte Carlo sampling over the ensembles,
exact finite-N dual integral representations evaluated by closed-form
Gaussian moments, and small-N Wick oracles; plus the symplectic group-integral
correction factors, universal moment constants, and scaling-limit kernels.
"""

__version__ = "0.1.0"

from .asymptotics import (
    SaddleData,
    UniversalConstant,
    bessel_half_identity_check,
    gamma_k,
    gamma_k_binomial_form,
    kernel_goe,
    kernel_sine,
    moment_asymptotic,
    rho,
    saddle_points,
    scaling_lambda_pair,
    scaling_limit_prediction,
)
from .dual import (
    DualIntegralRequest,
    GaussianLinearForm,
    MONOMIAL,
    QUADRATURE,
    evaluate_request,
    gaussian_moment_1d,
    goe_correlator_k2,
    goe_correlator_k3,
    goe_correlator_k4,
    goe_moment_dual,
    goe_moment_general,
    goe_source_moment_dual,
    gue_correlator_dual,
    gue_correlator_lambda_poly,
    gue_moment_dual,
    gue_source_dual,
    integrate_poly_gaussian,
    multicritical_coefficient,
    quadrature_cross_check,
)
from .ensembles import (
    BudgetError,
    CorrelatorValue,
    EnsembleSpec,
    GOE,
    GUE,
    LambdaPoints,
    McEstimate,
    mc_correlator,
    sample_matrix,
    wick_oracle,
)
from .hiz import (
    PdeCheckSpec,
    TauTable,
    chi4_f,
    chi_eval,
    group_integral_mc,
    hiz_unitary,
    pde_residual,
    symmetrized_hiz_sympl,
)
from .linalg import (
    HaarSample,
    SelfDualQuaternionMatrix,
    haar_sample,
    hermite,
    lu_det,
    pfaffian,
    qdet,
    vandermonde,
)
from .poly import SparsePolynomial, poly_add, poly_mul, poly_scale
