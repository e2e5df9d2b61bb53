"""Matrix compressions of weighted composition-differentiation operators on
weighted Bergman spaces and the derivative Hardy space S^2_1, with numerical
checks of complex symmetry, Hermitian-ness and normality."""

from .checkers import (
    CheckReport,
    check_complex_symmetric,
    check_hermitian,
    check_kernel_adjoint_identity,
    check_normal,
    check_s21_obstruction,
    falsify_perturbation,
    hermitian_kernel_residual,
    kernel_symmetry_residual,
)
from .families import (
    AutomorphismForm,
    BergmanFamilyParams,
    S21FamilyParams,
    automorphism_cs_family,
    automorphism_form,
    bergman_cs_family,
    bergman_disc_consistency,
    hermitian_family,
    s21_F_series,
    s21_family,
)
from .operators import (
    ConjugationSpec,
    OperatorMatrix,
    SymbolPair,
    adjoint_matrix,
    apply_operator,
    build_matrix,
    conjugated_adjoint,
    conjugation_apply,
)
from .series import TruncatedSeries, compose, derivative, evaluate, multiply, rational_expand
from .spaces import (
    SpaceSpec,
    WeightProfile,
    derivative_kernel_coeffs,
    inner_product,
    kernel_coeffs,
    weight_profile,
)

__version__ = "0.1.0"
