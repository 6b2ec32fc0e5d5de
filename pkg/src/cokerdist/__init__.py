"""Cohen-Lenstra cokernel distributions of random p-adic matrices.

Exact predictions (limiting measure, surjection moments, p-group
combinatorics) plus a reproducible Monte Carlo harness that verifies them
on (n+u) x n matrices sampled Haar-uniformly mod p^e.
"""

from ._version import __version__
from .bruteforce import (
    BudgetExceededError,
    ExplicitGroup,
    enumerate_automorphisms,
    enumerate_homs,
    enumerate_subgroups,
    enumerate_surjections,
)
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    run_convergence_sweep,
    run_distribution_experiment,
    run_moment_experiment,
    run_multiprime_experiment,
    run_saturation_sweep,
)
from .measure import (
    CLMeasure,
    cl_normalizer,
    enumerate_partitions,
    exact_moment_coker,
    limiting_moment_torsion,
    limiting_probability,
    moment_partial_sum,
    total_mass_partial_sum,
)
from .partitions import (
    conjugate,
    format_partition,
    parse_partition,
    partitions_of,
    partitions_up_to,
    validate_partition,
)
from .pgroups import (
    aut_order,
    count_subgroups_of_type,
    group_order,
    hom_count,
    sur_count,
    sur_count_from_free,
    sur_count_with_free,
    verify_order_index_duality,
)
from .primes import is_prime, require_prime
from .sampling import SampleSpec, sample_matrix, sample_multiprime
from .snf import (
    CokernelObservation,
    MatrixModPE,
    integer_snf_oracle,
    observe_cokernel,
    smith_normal_form,
    valuation,
)

__all__ = [
    "__version__",
    "BudgetExceededError",
    "CLMeasure",
    "CokernelObservation",
    "ExperimentConfig",
    "ExperimentReport",
    "ExplicitGroup",
    "MatrixModPE",
    "SampleSpec",
    "aut_order",
    "cl_normalizer",
    "conjugate",
    "count_subgroups_of_type",
    "enumerate_automorphisms",
    "enumerate_homs",
    "enumerate_partitions",
    "enumerate_subgroups",
    "enumerate_surjections",
    "exact_moment_coker",
    "format_partition",
    "group_order",
    "hom_count",
    "integer_snf_oracle",
    "is_prime",
    "limiting_moment_torsion",
    "limiting_probability",
    "moment_partial_sum",
    "observe_cokernel",
    "parse_partition",
    "partitions_of",
    "partitions_up_to",
    "require_prime",
    "run_convergence_sweep",
    "run_distribution_experiment",
    "run_moment_experiment",
    "run_multiprime_experiment",
    "run_saturation_sweep",
    "sample_matrix",
    "sample_multiprime",
    "smith_normal_form",
    "sur_count",
    "sur_count_from_free",
    "sur_count_with_free",
    "total_mass_partial_sum",
    "validate_partition",
    "valuation",
    "verify_order_index_duality",
]
