"""siegelzero: exact evaluation and explicit bounding of even real Dirichlet
L-functions near s = 1, and the zero-location constants that follow."""

from .bounds import (
    ADMISSIBLE_C_TABLE,
    BoundReport,
    Branch,
    CharSumBound,
    InadmissibleError,
    KernelFunction,
    NoAdmissibleCError,
    VerifyReport,
    admissibility_margin,
    beta0_upper,
    bound_report,
    l_one_lower,
    l_prime_upper,
    partial_sum_constant,
    remainder_term,
    solve_c,
    verify_charsum_bound,
    verify_lprime_bound,
    weighted_charsum_bound,
)
from .characters import (
    Interval,
    QuadChar,
    char_partial_sum,
    chi_table,
    double_sum,
    fundamental_discriminants,
    is_fundamental_discriminant,
    kronecker,
    l_one_exact,
    l_prime_truncated,
)
from .quadratic import (
    ContinuedFraction,
    FormClassData,
    PellSolution,
    h_log_eta,
    narrow_class_number,
    pell4_min_solution,
    regulator_log,
    sqrt_continued_fraction,
)
from .search import (
    CheckpointError,
    SearchRecord,
    SearchSummary,
    SearchTask,
    minimal_u0_below_cap,
    run_search,
)

__version__ = "0.1.0"
