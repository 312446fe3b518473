"""Matrix elements of multiplicative extensions of finite-rank-shifted operators.

For a single-particle operator 1 + A with A = u v of rank k, the many-body
operator P(1 + A) acts as 1 + A on every particle.  This package evaluates
<bra| P(1 + A) |ket> for product states of N blocks by Gaussian averaging of
per-block factor polynomials: commuting variables for bosons, Grassmann
variables for fermions.
"""
from .core import (
    MAX_RANK, DimensionMismatchError, FactorState, Instance, InstanceError, LowRankOperator,
    NegativeOccupationError, NonFiniteError, PauliViolationError, ProductState, RankCapError, Statistics,
    block_slice, dumps_instance, load_instance, loads_instance, make_instance, product_state, state_norm_sq,
    validate_instance,
)
from .engine import (
    ComputationReport, compute, determinant_fast, determinant_rank_shifted, expectation, permanent_rank_shifted,
)
from .factors import FactorPolynomial, build_factor, build_factor_single_boson, build_factor_single_fermion
from .grassmann import GrassmannElement, berezin_gaussian_average, grassmann_multiply
from .oracles import (
    FockBasis, OracleSizeError, apply_multiplicative_extension, brute_force_expectation, dense_determinant,
    normal_ordered_expansion_check, ryser_permanent,
)
from .poly import BidegreePoly, CapOverflowError, OpCounter, ResourceGuardError, gaussian_average, poly_multiply

__version__ = "0.1.0"
