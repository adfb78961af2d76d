"""
bentcodebook

Codebooks built from the generalised bent family x2 * pi(x1) + ..., with exact
maximum-correlation checks against the Welch bound.
"""

from .analysis import (
    CorrelationReport,
    CorrelationValue,
    SweepMethod,
    SweepMode,
    imax_bruteforce,
    imax_symmetry,
    inner_product,
    is_mwbe,
    ratio_report,
    report_from_vectors,
    welch_bound,
)
from .construction import (
    Codebook,
    ConstructionKind,
    build_codebook,
    build_construction_one,
    build_construction_two,
)
from .errors import CodebookError, ErrorType
from .gbf import FunctionZQ, PermutationZQ, is_generalized_bent, make_kumar_gbf
from .ntheory import Modulus, Residue, smallest_prime_factor, solve_linear_congruence
from .tables import table_rows

__version__ = "0.1.0"
