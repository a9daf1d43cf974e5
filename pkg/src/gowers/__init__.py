"""Uniformity norms on cyclic groups, hypergraph box norms, and the
verification engines for the inequalities relating them.

The package is organized bottom-up: functions on Z_N and measures
(:mod:`.cyclic`), uniformity and box norms (:mod:`.gowersnorm`), the
weighted-hypergraph representation of a measure (:mod:`.hypersystem`),
centered product expectations and Cauchy-Schwarz chains (:mod:`.linform`),
progression counting (:mod:`.apcount`), seeded measure generators
(:mod:`.genmeasure`), and the command-line front-end (:mod:`.cli`).
"""

from .budget import DEFAULT_BUDGET, check_budget, resolve_budget
from .cyclic import (
    CyclicFn,
    Measure,
    Spectrum,
    dft,
    difference_fn,
    from_set,
    idft,
    parseval_gap,
    set_from_json_obj,
    set_to_json_obj,
)
from .errors import (
    AllZeroPattern,
    BudgetExceeded,
    CapViolation,
    CompositeModulus,
    EmptySet,
    EmptySetGenerated,
    GowersError,
    InvalidSubset,
    ModulusTooSmall,
    NotRepresentation,
    NumericalInconsistency,
    OutOfRange,
    ShapeMismatch,
    SupBelowOneWarning,
)
from .gowersnorm import (
    EdgeFn,
    box_norm_brute,
    clamp_cube_average,
    cube_vertices,
    gcs_verify,
    mixed_cube_expectation,
    u_norm_brute,
    u_norm_fast,
)
from .hypersystem import (
    HypergraphSystem,
    WeightedHypergraph,
    ap_values,
    constant_hypergraph,
    hypergraph_from_edge_measures,
    is_prime,
    progression_count_check,
    relabel,
    represent,
    sup_norm,
)
from .linform import (
    Cap,
    CubePattern,
    Lf2Exponents,
    SingleSlfInstance,
    SlfInstance,
    YbarStats,
    binomial_expansion_identity,
    chain_verify,
    cube_centered_expectation,
    cube_expectation,
    expect_product,
    lf2_chain_verify,
    lf2_expectation,
    lf2_telescoping,
    lf2_term,
    nu_prime,
    nu_prime_l2_dev,
    q_single_value,
    q_value,
    random_single_instance,
    random_slf_instance,
    single_chain_verify,
    slf_lhs,
    slf_single_lhs,
    ybar_single_sq_expectation,
    ybar_sq_expectation,
)
from .apcount import (
    CSV_HEADER,
    ApReport,
    HypothesisRatio,
    RelszConfig,
    ap_density,
    hypothesis_ratio,
    relsz_experiment,
    telescoping_check,
)
from .genmeasure import KINDS, GeneratorSpec, generate, generate_set
from .report import Check, VerificationReport, eq_check, ineq_check

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BUDGET",
    "check_budget",
    "resolve_budget",
    "CyclicFn",
    "Measure",
    "Spectrum",
    "dft",
    "idft",
    "parseval_gap",
    "difference_fn",
    "from_set",
    "set_to_json_obj",
    "set_from_json_obj",
    "GowersError",
    "EmptySet",
    "EmptySetGenerated",
    "OutOfRange",
    "ShapeMismatch",
    "CompositeModulus",
    "ModulusTooSmall",
    "NotRepresentation",
    "AllZeroPattern",
    "InvalidSubset",
    "CapViolation",
    "BudgetExceeded",
    "NumericalInconsistency",
    "SupBelowOneWarning",
    "EdgeFn",
    "u_norm_brute",
    "u_norm_fast",
    "box_norm_brute",
    "mixed_cube_expectation",
    "gcs_verify",
    "cube_vertices",
    "clamp_cube_average",
    "HypergraphSystem",
    "WeightedHypergraph",
    "represent",
    "ap_values",
    "relabel",
    "constant_hypergraph",
    "hypergraph_from_edge_measures",
    "progression_count_check",
    "sup_norm",
    "is_prime",
    "CubePattern",
    "cube_expectation",
    "cube_centered_expectation",
    "binomial_expansion_identity",
    "Cap",
    "SlfInstance",
    "slf_lhs",
    "q_value",
    "YbarStats",
    "ybar_sq_expectation",
    "chain_verify",
    "random_slf_instance",
    "SingleSlfInstance",
    "slf_single_lhs",
    "q_single_value",
    "ybar_single_sq_expectation",
    "single_chain_verify",
    "random_single_instance",
    "nu_prime",
    "nu_prime_l2_dev",
    "Lf2Exponents",
    "lf2_expectation",
    "lf2_term",
    "lf2_telescoping",
    "lf2_chain_verify",
    "expect_product",
    "ApReport",
    "CSV_HEADER",
    "ap_density",
    "HypothesisRatio",
    "hypothesis_ratio",
    "telescoping_check",
    "RelszConfig",
    "relsz_experiment",
    "KINDS",
    "GeneratorSpec",
    "generate",
    "generate_set",
    "Check",
    "VerificationReport",
    "eq_check",
    "ineq_check",
    "__version__",
]
