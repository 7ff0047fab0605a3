"""Privacy-amplification hashing with dual-universal hash families.

Seeded linear hash families over GF(2) for compressing partially leaked
secrets, with O(n log n) evaluation, exact security-bound calculators,
and brute-force verification oracles for desk-scale instances.
"""

from .bitlinalg import (
    BitMatrix,
    BitVector,
    ConvolutionExactnessError,
    ToeplitzSpec,
    concat,
    cyclic_convolve_f2,
    cyclic_convolve_f2_schoolbook,
    dense_mul,
    modified_toeplitz_hash,
    toeplitz_mul,
)
from .facm import (
    FieldElementShort,
    NaIndex,
    RingElement,
    extend,
    find_na_at_least,
    is_in_na,
    ring_add,
    ring_identity,
    ring_mul,
    ring_pow,
    schoolbook_ring_mul,
    shorten,
)
from .families import (
    FamilySpec,
    InfeasibleFamilyError,
    check_matrix,
    dual,
    evaluate,
    generator_matrix,
    make_f1,
    make_f2,
    make_f3,
    make_f4,
    make_g,
    make_mt,
    nearest_feasible,
    parse_spec,
    proven_delta_claims,
    serialize_spec,
)
from .security import (
    ExtractorBound,
    RegimeParams,
    bound_concat_classical,
    bound_concat_quantum,
    bound_dual_classical,
    bound_dual_dual_concat,
    bound_universal_classical,
    bound_universal_quantum,
    comparison_table,
    dual_delta_conversion,
    extractor_seed_lower_bound,
    f4_bound,
    g_bounds,
    penalty_nonuniform,
    seed_lower_bound_dual,
)
from .verify import (
    JointDistribution,
    SeedDistribution,
    d1_prime,
    d2,
    empirical_leftover,
    flat_source,
    h_min,
    h_min_cond,
    measure_delta_dual,
    measure_delta_universal,
    theoretical_epsilon,
)

__version__ = "0.1.0"
