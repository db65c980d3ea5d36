"""Exact-arithmetic verification of story-derived SOS lower-bound
certificates for knapsack, the MOD 2 principle, and the triangle
problem, plus the flag-based symmetry reduction of E[g^2] and the
Goodman triangle-counting toolkit."""

from .rationals import Q, rat, rat_str
from .polynomials import (
    Polynomial,
    apply_permutation,
    canonicalize_monomial,
    index_degree,
    index_degree_outside,
    multiply,
    symmetrize_over,
)
from .stories import (
    BlockHistory,
    Params,
    ProblemKind,
    PseudoExpectation,
    honest_expectation,
    knapsack_pe_eval,
    mod2_pe_eval,
    pe_eval,
    problem_equations,
    pseudo_expectation,
    triangle_pe_eval,
    triangle_step_prob,
)
from .moments import (
    build_moment_matrix,
    check_linear_constraints,
    find_refutation_degree,
    moment_basis,
    psd_check_exact,
    verify_lower_bound,
)
from .flags import (
    Flag,
    coeff_c,
    decompose_square,
    decompose_to_phi,
    expand_p,
    expand_phi,
    make_flag,
    matrix_M,
    verify_orthogonality,
    verify_phi_zero_sum,
)
from .goodman import (
    Graph,
    brute_min_triangles,
    count_induced,
    gap_report,
    goodman_bound,
    razborov_density,
    tight_form,
    verify_counting_identities,
)

__version__ = "0.1.0"
