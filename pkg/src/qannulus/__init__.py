"""Numerical laboratory for spectral constants of quantum annuli, quantum hyperbolae and the quantum cross."""

__version__ = "0.1.0"

from .calculus import compression_top_left, eval_on_operator, eval_on_pair
from .dilation import DilationResult, build_cross_dilation, build_dilation, dilate, verify_dilation
from .domains import (
    AnnulusOperator,
    HyperbolaPair,
    annulus_from_hyperbola,
    hyperbola_from_annulus,
    membership,
    sample_quantum_cross,
    sample_quantum_hyperbola,
)
from .estimate import BoundReport, asymptotic_check, bound_constant, identity_residual, known_bounds, verify_estimate
from .laurent import (
    HyperbolaFunction,
    LaurentPoly,
    NormEstimate,
    annulus_sup_norm,
    cauchy_constants,
    disk_sup_norm,
    hyperbola_sup_norm,
    to_annulus,
    to_hyperbola,
)
from .search import Witness, cross_witness, optimize_lower_bound, ratio, sweep
