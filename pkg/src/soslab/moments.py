"""Moment matrices and exact certificate verification.

A pseudo-expectation certifies that degree-d SOS cannot refute a problem
iff (a) it annihilates every product f*s_i with indexdeg(f) +
indexdeg(s_i) <= d and (b) its moment matrix over the monomial basis of
index degree <= floor(d/2) is positive semidefinite.  Both checks here
are exact: constraints by full expansion and rational evaluation, PSD by
a symmetric-pivoted rational LDL^T factorization that either consumes
the matrix with positive pivots or produces an explicit witness vector
g with E-tilde[g^2] < 0.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .caps import check_cap
from .errors import InvalidInputError
from .rationals import Q, ZERO, rat_str
from .polynomials import (
    Monomial,
    Polynomial,
    index_degree,
    merge_monomials,
    monomial_text,
    term_sort_key,
    to_text,
)
from .stories import (
    ConstraintFamily,
    Params,
    ProblemKind,
    PseudoExpectation,
    knapsack_pe_eval,
    mod2_pe_eval,
    problem_equations,
    pseudo_expectation,
    triangle_pe_eval,
)


def moment_basis(problem: ProblemKind, n: int, b: int, cap=None) -> list:
    """All canonical monomials of the problem's arity with index degree
    <= b, constant first, in canonical order."""
    if not 0 <= b <= n:
        raise InvalidInputError(f"need 0 <= b <= n, got b={b}, n={n}")
    out = [()]
    if problem.arity == 1:
        check_cap(sum(math.comb(n, s) for s in range(b + 1)), cap, "moment basis")
        for s in range(1, b + 1):
            for sub in itertools.combinations(range(1, n + 1), s):
                out.append(tuple((i,) for i in sub))
    else:
        predicted = sum(
            math.comb(n, s) * 2 ** math.comb(s, 2) for s in range(2, b + 1)
        )
        check_cap(predicted, cap, "moment basis")
        for s in range(2, b + 1):
            for sub in itertools.combinations(range(1, n + 1), s):
                pairs = list(itertools.combinations(sub, 2))
                for rr in range(1, len(pairs) + 1):
                    for chosen in itertools.combinations(pairs, rr):
                        if {v for e in chosen for v in e} == set(sub):
                            out.append(tuple(sorted(chosen)))
    out.sort(key=term_sort_key)
    return out


@dataclass
class MomentMatrix:
    basis: list
    entries: list  # symmetric, entries[i][j] = E-tilde[basis[i] * basis[j]]

    def quadratic_form(self, g: Polynomial):
        """v^T M v for g expressed in the basis; exact E-tilde[g^2]."""
        pos = {m: i for i, m in enumerate(self.basis)}
        idx = []
        for m, c in g.terms.items():
            if m not in pos:
                raise InvalidInputError(f"monomial {monomial_text(m)} outside basis")
            idx.append((pos[m], c))
        total = ZERO
        for i, ci in idx:
            row = self.entries[i]
            for j, cj in idx:
                total += ci * cj * row[j]
        return total


def _direct_value(pe: PseudoExpectation, m: Monomial):
    """Evaluate without the relabeling cache (cross-check path)."""
    if pe.problem is ProblemKind.KNAPSACK:
        return knapsack_pe_eval(pe.params, m)
    if pe.problem is ProblemKind.MOD2:
        return mod2_pe_eval(pe.params.n, m)
    return triangle_pe_eval(pe.params, m)


def build_moment_matrix(pe: PseudoExpectation, basis, crosscheck=0.05) -> MomentMatrix:
    """Entries are computed once per relabeling class of the merged
    monomial p*q (the pseudo-expectation is S_n-symmetric) and shared.
    A deterministic random 5% of the entries is recomputed without the
    cache to guard the relabeling key."""
    size = len(basis)
    entries = [[ZERO] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            v = pe.product_value(basis[i], basis[j])
            entries[i][j] = v
            entries[j][i] = v
    if crosscheck:
        rng = random.Random(1729)
        total = size * (size + 1) // 2
        sample = max(1, int(total * crosscheck))
        for _ in range(sample):
            i = rng.randrange(size)
            j = rng.randrange(size)
            direct = _direct_value(pe, merge_monomials(basis[i], basis[j]))
            if direct != entries[i][j]:
                raise AssertionError(
                    f"orbit cache mismatch at ({i},{j}): {direct} vs {entries[i][j]}"
                )
    return MomentMatrix(basis=list(basis), entries=entries)


@dataclass
class PsdReport:
    verdict: str  # "PSD" | "NotPSD"
    witness_vector: list | None = None
    witness: Polynomial | None = None
    witness_value: object = None

    @property
    def is_psd(self) -> bool:
        return self.verdict == "PSD"

    def to_json(self) -> dict:
        out = {"psd": self.verdict}
        if not self.is_psd:
            out["witness_value"] = rat_str(self.witness_value)
            if self.witness is not None:
                out["witness"] = to_text(self.witness)
            else:
                out["witness_vector"] = [rat_str(c) for c in self.witness_vector]
        return out


def psd_check_exact(matrix) -> PsdReport:
    """Exact PSD decision by LDL^T with symmetric diagonal pivoting.

    Pivots are taken from positive diagonal entries only.  When none
    remain: a negative diagonal entry is a witness outright; a zero
    diagonal with a nonzero row gives a two-coordinate witness (a PSD
    matrix with a zero diagonal entry has a zero row); an all-zero
    remainder is the degenerate PSD case.  Witnesses are mapped back
    through the recorded elimination steps, so w^T M w equals the
    reported negative value on the ORIGINAL matrix.
    """
    basis = None
    if isinstance(matrix, MomentMatrix):
        basis = matrix.basis
        entries = matrix.entries
    else:
        entries = matrix
    size = len(entries)
    A = [[Q(entries[i][j]) for j in range(size)] for i in range(size)]
    for i in range(size):
        for j in range(i):
            if A[i][j] != A[j][i]:
                raise InvalidInputError("matrix is not symmetric")

    active = list(range(size))
    steps = []  # (pivot_index, {row: multiplier})

    def finish_witness(w: dict) -> PsdReport:
        v = [ZERO] * size
        for i, c in w.items():
            v[i] = c
        for p, mult in reversed(steps):
            v[p] = -sum((l * v[i] for i, l in mult.items()), ZERO)
        value = ZERO
        for i in range(size):
            if v[i] == 0:
                continue
            for j in range(size):
                if v[j] != 0:
                    value += v[i] * Q(entries[i][j]) * v[j]
        report = PsdReport("NotPSD", witness_vector=v, witness_value=value)
        if basis is not None:
            report.witness = Polynomial({basis[i]: v[i] for i in range(size)})
        if value >= 0:
            raise AssertionError("internal error: witness is not negative")
        return report

    while active:
        pivot = None
        best = ZERO
        for i in active:
            if A[i][i] > best:
                best = A[i][i]
                pivot = i
        if pivot is None:
            for i in active:
                if A[i][i] < 0:
                    return finish_witness({i: Q(1)})
            for i in active:
                for j in active:
                    if j != i and A[i][j] != 0:
                        return finish_witness({i: Q(-1) / (2 * A[i][j]), j: Q(1)})
            return PsdReport("PSD")
        d = A[pivot][pivot]
        active.remove(pivot)
        mult = {}
        for i in active:
            if A[i][pivot] != 0:
                mult[i] = A[i][pivot] / d
        for i in mult:
            li = mult[i]
            Ai = A[i]
            Ap = A[pivot]
            for j in active:
                if Ap[j] != 0:
                    Ai[j] -= li * Ap[j]
        steps.append((pivot, mult))
    return PsdReport("PSD")


@dataclass
class ConstraintCheck:
    name: str
    multipliers_checked: int
    all_zero: bool
    first_failure: tuple | None = None  # (multiplier monomial, value)

    def to_json(self) -> dict:
        out = {
            "constraint": self.name,
            "multipliers_checked": self.multipliers_checked,
            "all_zero": self.all_zero,
        }
        if self.first_failure is not None:
            f, v = self.first_failure
            out["first_failure"] = {"multiplier": monomial_text(f), "value": rat_str(v)}
        return out


@dataclass
class ConstraintReport:
    checks: list

    @property
    def all_zero(self) -> bool:
        return all(c.all_zero for c in self.checks)

    def to_json(self) -> dict:
        return {
            "constraints": "ok" if self.all_zero else "failed",
            "detail": [c.to_json() for c in self.checks],
        }


def check_linear_constraints(
    pe: PseudoExpectation, family: ConstraintFamily, d: int, cap=None
) -> ConstraintReport:
    """E-tilde[f * s_i] = 0 for every monomial f with indexdeg(f) +
    indexdeg(s_i) <= d.  The product is expanded fully over every term
    of s_i before evaluation; truncating the symmetric sums first would
    silently change the value."""
    n = pe.params.n
    if d > n:
        raise InvalidInputError(f"d = {d} exceeds n = {n}")
    checks = []
    for constraint in family.constraints:
        budget = d - constraint.index_degree
        if budget < 0:
            checks.append(ConstraintCheck(constraint.name, 0, True))
            continue
        failure = None
        count = 0
        terms = list(constraint.polynomial.terms.items())
        for f in moment_basis(family.problem, n, budget, cap):
            count += 1
            value = ZERO
            for q, c in terms:
                value += c * pe.monomial_value(merge_monomials(f, q))
            if value != 0:
                failure = (f, value)
                break
        checks.append(ConstraintCheck(constraint.name, count, failure is None, failure))
    return ConstraintReport(checks)


@dataclass
class VerificationReport:
    problem: ProblemKind
    params: Params
    d: int
    constraint_report: ConstraintReport
    psd_report: PsdReport

    @property
    def passed(self) -> bool:
        return self.constraint_report.all_zero and self.psd_report.is_psd

    def to_json(self) -> dict:
        out = {
            "problem": self.problem.value,
            "n": self.params.n,
            "index_degree": self.d,
            "constraints": "ok" if self.constraint_report.all_zero else "failed",
            "psd": self.psd_report.verdict,
            "passed": self.passed,
        }
        if self.params.k is not None:
            out["k"] = rat_str(self.params.k)
        if not self.constraint_report.all_zero:
            out["constraint_detail"] = self.constraint_report.to_json()["detail"]
        if not self.psd_report.is_psd:
            out.update(self.psd_report.to_json())
        return out


def verify_lower_bound(
    problem: ProblemKind, params: Params, d: int, cap=None
) -> VerificationReport:
    """The full certificate check at index degree d: constraints
    annihilated up to degree d, moment matrix at b = floor(d/2) PSD."""
    n = params.n
    if d > n:
        raise InvalidInputError(f"d = {d} exceeds n = {n}")
    pe = pseudo_expectation(problem, params)
    family = problem_equations(problem, params)
    constraint_report = check_linear_constraints(pe, family, d, cap)
    basis = moment_basis(problem, n, d // 2, cap)
    matrix = build_moment_matrix(pe, basis)
    psd_report = psd_check_exact(matrix)
    return VerificationReport(problem, params, d, constraint_report, psd_report)


@dataclass
class RefutationScan:
    problem: ProblemKind
    params: Params
    d_max: int
    refutation_degree: int | None
    psd_report: PsdReport | None
    witness_recheck: object = None  # pe_eval(witness^2), when a witness exists

    def to_json(self) -> dict:
        out = {
            "problem": self.problem.value,
            "n": self.params.n,
            "d_max": self.d_max,
            "refutation_degree": self.refutation_degree,
        }
        if self.params.k is not None:
            out["k"] = rat_str(self.params.k)
        if self.psd_report is not None:
            out.update(self.psd_report.to_json())
            out["witness_recheck"] = rat_str(self.witness_recheck)
        return out


def find_refutation_degree(
    problem: ProblemKind, params: Params, d_max: int, cap=None
) -> RefutationScan:
    """Scan even d <= d_max for the first moment matrix that fails PSD.

    The witness is re-evaluated through the pseudo-expectation itself
    (E-tilde[g^2] via plain polynomial squaring), so a reported
    refutation is self-certifying."""
    n = params.n
    if d_max > n:
        raise InvalidInputError(f"d_max = {d_max} exceeds n = {n}")
    pe = pseudo_expectation(problem, params)
    for d in range(2, d_max + 1, 2):
        basis = moment_basis(problem, n, d // 2, cap)
        matrix = build_moment_matrix(pe, basis)
        report = psd_check_exact(matrix)
        if not report.is_psd:
            g = report.witness
            recheck = pe(g * g)
            if recheck != report.witness_value:
                raise AssertionError("witness value does not reproduce through pe_eval")
            return RefutationScan(problem, params, d_max, d, report, recheck)
    return RefutationScan(problem, params, d_max, None, None)
