"""Permutation combinatorics, the kernels Phi_{K,w} and the shuffle algebra."""
from .evaluators import (
    Evaluator,
    FunctionEvaluator,
    GaussianGenerator,
    ShuffleNode,
    Unit,
    ch_symmetrization,
    iterated_shuffle,
    lookup_generator,
    make_generator,
    parse_expression,
    shuffle_product,
)
from .kernels import negate, phi_w, phi_w_factors, point_difference
from .permutations import (
    InversionSet,
    Permutation,
    all_permutations,
    decompose,
    enumerate_shuffles,
    inversion_set,
    is_shuffle,
    parse_permutation,
)

__all__ = [
    "Evaluator", "FunctionEvaluator", "GaussianGenerator", "ShuffleNode", "Unit",
    "ch_symmetrization", "iterated_shuffle", "lookup_generator", "make_generator",
    "parse_expression", "shuffle_product", "negate", "phi_w", "phi_w_factors",
    "point_difference", "InversionSet", "Permutation", "all_permutations", "decompose",
    "enumerate_shuffles", "inversion_set", "is_shuffle", "parse_permutation",
]
