"""Mutually unbiased bases, measurement statistics and entropic uncertainty bounds for qudits."""

from .bounds import (
    BoundInputs,
    appendix_argmax,
    build_report,
    classic_bounds,
    compare_bounds,
    f_of_k,
    prop2_bound,
    prop2_rewritten,
    qubit_special_bound,
    renyi_tsallis_bounds,
    sanchez_ruiz_bound,
    separable_bound,
    simple_bounds,
    theorem2_bound,
)
from .entropy import ht_lower_bound, renyi, shannon, tsallis
from .gf import FieldElement, GaloisField, field_trace
from .linalg import DensityMatrix, PureState, hermitian_eigensystem, kron, purity
from .measure import (
    coincidence_summary,
    joint_probability_table,
    larsen_ivanovic_residual,
    probability_table,
    proof_construction_check,
)
from .mub import Basis, MubSet, construct_full, fourier_pair, tensor_compose, verify_mub_set

__version__ = "0.1.0"
