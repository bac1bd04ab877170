"""Exact-arithmetic pipeline from one-in-three satisfiability through
moment subset-sum and symmetric subset-sum to Reed-Solomon decoding,
with power-sum witness constructions and brute-force oracles."""

from .errors import (
    BudgetExceededError,
    ConstructionError,
    InputError,
    InternalError,
    MomentSumError,
    ParseError,
    SoundnessViolationError,
    UsageError,
)
from .fields import (
    ExtField,
    PrimeField,
    QQ,
    Rationals,
    find_prime_above,
    is_probable_prime,
    make_ext_field,
    nth_prime_above,
)
from .satss import (
    SatInstance,
    SubsetSumInstance,
    brute_force_exactly_one,
    encode_assignment_subset,
    eval_exactly_one,
    parse_one_in_three,
    render_one_in_three,
    sat_to_subset_sum,
)
from .pte import (
    PteReport,
    PteWitness,
    SampleResult,
    atomic_solve,
    coupling_matrices,
    gen_aux_vars,
    prouhet_pte,
    sample_pte_over_fq,
    solve_inhomogeneous_pte,
    verify_pte,
)
from .reduction import (
    ExtTransportRecord,
    MssInstance,
    Origin,
    PrimeTransportRecord,
    PropertiesReport,
    ReductionArtifacts,
    encode_assignment,
    ext_schedule,
    extract_assignment,
    sat_to_mss,
    scale_instance,
    subset_meets_targets,
    subset_moment_sums,
    transport_to_ext_field,
    transport_to_prime_field,
    verify_properties,
)
from .rscodes import (
    BddInstance,
    Poly,
    SymSSInstance,
    build_codeword,
    count_agreements,
    elementary_symmetric_sums,
    elementary_to_power_sums,
    elementary_via_determinant,
    exhaustive_reconstruct,
    interpolate,
    make_poly,
    mss_to_symss,
    poly_eval,
    power_sums_to_elementary,
    symss_to_bdd,
)
from .oracles import (
    DEFAULT_BUDGET,
    SearchBudget,
    bimodality_probe,
    brute_force_mss,
    brute_force_symss,
)

__version__ = "0.1.0"

__all__ = [
    "BddInstance",
    "BudgetExceededError",
    "ConstructionError",
    "DEFAULT_BUDGET",
    "ExtField",
    "ExtTransportRecord",
    "InputError",
    "InternalError",
    "MomentSumError",
    "MssInstance",
    "Origin",
    "ParseError",
    "Poly",
    "PrimeField",
    "PrimeTransportRecord",
    "PropertiesReport",
    "PteReport",
    "PteWitness",
    "QQ",
    "Rationals",
    "ReductionArtifacts",
    "SampleResult",
    "SatInstance",
    "SearchBudget",
    "SoundnessViolationError",
    "SubsetSumInstance",
    "SymSSInstance",
    "UsageError",
    "atomic_solve",
    "bimodality_probe",
    "brute_force_exactly_one",
    "brute_force_mss",
    "brute_force_symss",
    "build_codeword",
    "count_agreements",
    "coupling_matrices",
    "elementary_symmetric_sums",
    "elementary_to_power_sums",
    "elementary_via_determinant",
    "encode_assignment",
    "encode_assignment_subset",
    "eval_exactly_one",
    "exhaustive_reconstruct",
    "ext_schedule",
    "extract_assignment",
    "find_prime_above",
    "gen_aux_vars",
    "interpolate",
    "is_probable_prime",
    "make_ext_field",
    "make_poly",
    "mss_to_symss",
    "nth_prime_above",
    "parse_one_in_three",
    "poly_eval",
    "power_sums_to_elementary",
    "prouhet_pte",
    "render_one_in_three",
    "sample_pte_over_fq",
    "sat_to_mss",
    "sat_to_subset_sum",
    "scale_instance",
    "solve_inhomogeneous_pte",
    "subset_meets_targets",
    "subset_moment_sums",
    "symss_to_bdd",
    "transport_to_ext_field",
    "transport_to_prime_field",
    "verify_pte",
    "verify_properties",
]
