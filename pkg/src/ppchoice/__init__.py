"""Optimal two-level partial-profile choice designs: construction and verification."""
from ._kernels import BACKEND
from .catalog import WeighingMatrix, h_of, hadamard, smallest_weighing_orders, weighing
from .construct import (
    ConstructionPlan,
    Generator,
    GeneratorError,
    GeneratorSet,
    NotAvailable,
    apply_generator,
    auto_generators,
    construct,
    construct_broader,
    construct_method_h,
    construct_method_w,
    construct_saturated,
    cyclic_incidence,
    extend_to_m,
    plan_minimum_N,
)
from .design import (
    ChoiceSet,
    DesignError,
    DesignParams,
    PartialDesign,
    complement,
    difference_from_paired_design,
    kronecker_inflate,
    paired_design_from_difference,
    stack,
    validate_structure,
)
from .verify import (
    BalanceCounts,
    InformationMatrix,
    OptimalityCertificate,
    broader_c_matrix,
    brute_force_c_matrix,
    brute_force_lambda,
    c_matrix,
    c_matrix_from_counts,
    certify,
    contrast_product,
    tally_counts,
)

__version__ = "0.1.0"
