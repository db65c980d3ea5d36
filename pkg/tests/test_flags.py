"""Flag machinery: placement polynomials, the orthogonalized phi basis,
the decomposition of polynomials into phi's, and the symmetry-reduced
square decomposition."""

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from soslab.errors import InvalidInputError
from soslab.flags import (
    Flag,
    coeff_c,
    decompose_square,
    decompose_to_phi,
    enumerate_flags,
    expand_p,
    expand_phi,
    make_flag,
    matrix_M,
    square_term_checks,
    verify_orthogonality,
    verify_phi_zero_sum,
)
from soslab.moments import psd_check_exact
from soslab.polynomials import Polynomial, monomial
from soslab.rationals import Q
from soslab.stories import Params, ProblemKind, pseudo_expectation


def unary_flag(r, free=0):
    return make_flag(r, free, [(i,) for i in range(r + free)])


class TestMakeFlag:
    def test_canonical_free_relabeling(self):
        a = make_flag(1, 2, [(0, 1), (1, 2)])
        b = make_flag(1, 2, [(0, 2), (2, 1)])
        assert a == b

    def test_labeled_vertices_not_relabeled(self):
        a = make_flag(2, 0, [(0, 1)])
        assert a.edges == ((0, 1),)

    def test_rejects_isolated_vertex(self):
        with pytest.raises(InvalidInputError):
            make_flag(1, 1, [(0,)])

    def test_rejects_self_loop(self):
        with pytest.raises(InvalidInputError):
            make_flag(0, 2, [(0, 0), (0, 1)])

    def test_describe_is_readable(self):
        f = make_flag(1, 1, [(0, 1)])
        assert "r=1" in f.describe()


class TestEnumerateFlags:
    def test_unary_counts(self):
        # empty; 1 vertex (r 0/1); 2 vertices (r 0/1/2)
        assert len(enumerate_flags(1, 2)) == 6

    def test_binary_counts_up_to_two_vertices(self):
        # empty; a single edge with r in {0,1,2}
        assert len(enumerate_flags(2, 2)) == 4

    def test_no_isolated_vertices(self):
        for f in enumerate_flags(2, 4):
            touched = {x for e in f.edges for x in e}
            assert touched == set(range(f.vertices))

    def test_deduplication(self):
        flags = enumerate_flags(2, 3)
        assert len(flags) == len(set(flags))


class TestExpandP:
    def test_free_triangle_coefficient_counts_placements(self):
        F = make_flag(0, 3, [(0, 1), (0, 2), (1, 2)])
        p = expand_p(F, (), 5)
        m = monomial((1, 2), (1, 3), (2, 3))
        # 3! orderings of the free vertices land on each triangle
        assert p.coefficient(m) == 6

    def test_labeled_edge_is_sum_over_other_endpoint(self):
        F = make_flag(1, 1, [(0, 1)])
        p = expand_p(F, (2,), 4)
        expected = (
            Polynomial.variable(1, 2)
            + Polynomial.variable(2, 3)
            + Polynomial.variable(2, 4)
        )
        assert p == expected

    def test_fully_labeled_is_single_monomial(self):
        F = make_flag(2, 0, [(0, 1)])
        assert expand_p(F, (3, 5), 6) == Polynomial.variable(3, 5)

    def test_label_validation(self):
        F = make_flag(2, 0, [(0, 1)])
        with pytest.raises(InvalidInputError):
            expand_p(F, (1, 1), 6)
        with pytest.raises(InvalidInputError):
            expand_p(F, (1,), 6)
        with pytest.raises(InvalidInputError):
            expand_p(F, (1, 9), 6)


class TestCoeffC:
    def test_identity(self):
        assert coeff_c((1, 2), (1, 2), 7) == 1

    def test_single_change(self):
        assert coeff_c((1, 2), (1, 3), 5) == Q(-1, 3)

    def test_collision_with_other_position(self):
        assert coeff_c((1, 2), (2, 3), 7) == 0

    def test_two_changes(self):
        assert coeff_c((1, 2), (3, 4), 7) == Q(1, 5 * 4)

    def test_sum_over_one_position_vanishes(self):
        # moving one coordinate of L' over all valid values sums to zero
        for n in range(4, 9):
            for r in range(1, 4):
                if 2 * r > n:
                    continue  # the identity needs index degree <= n/2
                L = tuple(range(1, r + 1))
                for i in range(r):
                    others = [j for j in range(r) if j != i]
                    for ctx in itertools.permutations(range(1, n + 1), r - 1):
                        total = Q(0)
                        for a in range(1, n + 1):
                            if a in ctx:
                                continue
                            Lp = [None] * r
                            for j, val in zip(others, ctx):
                                Lp[j] = val
                            Lp[i] = a
                            total += coeff_c(L, tuple(Lp), n)
                        assert total == 0

    def test_sum_identity_for_arbitrary_L(self):
        rng = random.Random(5)
        n = 8
        for _ in range(20):
            r = rng.randint(1, 3)
            L = tuple(rng.sample(range(1, n + 1), r))
            i = rng.randrange(r)
            ctx = rng.sample(range(1, n + 1), r - 1)
            total = Q(0)
            for a in range(1, n + 1):
                if a in ctx:
                    continue
                Lp = [None] * r
                pos = [j for j in range(r) if j != i]
                for j, val in zip(pos, ctx):
                    Lp[j] = val
                Lp[i] = a
                total += coeff_c(L, tuple(Lp), n)
            assert total == 0

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            coeff_c((1, 2), (1,), 6)


class TestExpandPhi:
    def test_unary_phi_is_centered_variable(self):
        F = unary_flag(1)
        phi = expand_phi(F, (1,), 4)
        expected = Polynomial.variable(1) - Q(1, 3) * (
            Polynomial.variable(2) + Polynomial.variable(3) + Polynomial.variable(4)
        )
        assert phi == expected

    def test_unary_phis_sum_to_zero(self):
        F = unary_flag(1)
        total = Polynomial.zero()
        for i in range(1, 5):
            total = total + expand_phi(F, (i,), 4)
        assert not total

    def test_r0_phi_equals_p(self):
        F = make_flag(0, 2, [(0, 1)])
        assert expand_phi(F, (), 5) == expand_p(F, (), 5)


class TestMatrixM:
    def test_frozen_r2_n10(self):
        M = matrix_M(10, 2)
        assert M == [[Q(71, 56), Q(1, 56)], [Q(1, 56), Q(71, 56)]]

    def test_r1_value(self):
        (row,) = matrix_M(9, 1)
        assert row == [1 + Q(1, 8)]

    def test_m_minus_id_is_psd(self):
        for r in (1, 2, 3):
            for n in (7, 9):
                M = matrix_M(n, r)
                for i in range(len(M)):
                    M[i][i] -= 1
                assert psd_check_exact(M).is_psd

    def test_requires_room_for_labels(self):
        with pytest.raises(InvalidInputError):
            matrix_M(5, 3)


def unary_polys():
    coeff = st.fractions(max_denominator=4, min_value=-3, max_value=3).map(
        lambda f: Q(f.numerator, f.denominator)
    )
    edge_sets = st.lists(
        st.lists(st.integers(1, 6), min_size=1, max_size=2, unique=True),
        min_size=0,
        max_size=3,
    )
    return st.tuples(edge_sets, st.lists(coeff, min_size=3, max_size=3)).map(
        lambda t: sum(
            (
                c * Polynomial.from_monomial(monomial(*((i,) for i in vs)))
                for vs, c in zip(t[0], t[1])
            ),
            Polynomial.zero(),
        )
    )


def binary_polys():
    coeff = st.fractions(max_denominator=4, min_value=-3, max_value=3).map(
        lambda f: Q(f.numerator, f.denominator)
    )
    edge = st.tuples(st.integers(1, 6), st.integers(1, 6)).filter(
        lambda t: t[0] != t[1]
    )
    return st.tuples(
        st.lists(edge, min_size=0, max_size=2), st.lists(coeff, min_size=2, max_size=2)
    ).map(
        lambda t: sum(
            (
                c * Polynomial.from_monomial(monomial(e))
                for e, c in zip(t[0], t[1])
            ),
            Polynomial.zero(),
        )
    )


class TestDecomposeToPhi:
    def test_single_variable_example(self):
        combo = decompose_to_phi(Polynomial.variable(1), 4)
        assert combo.expand() == Polynomial.variable(1)
        assert combo.zero_sums_hold()
        # the r=1 coefficients are the centered point mass at index 1
        F = unary_flag(1)
        assert combo.coefficients[(F, (1,))] == Q(9, 16)
        for i in (2, 3, 4):
            assert combo.coefficients[(F, (i,))] == Q(-3, 16)

    @given(unary_polys())
    @settings(max_examples=15, deadline=None)
    def test_round_trip_unary(self, g):
        combo = decompose_to_phi(g, 12, arity=1)
        assert combo.expand() == g
        assert combo.zero_sums_hold()

    @given(binary_polys())
    @settings(max_examples=10, deadline=None)
    def test_round_trip_binary(self, g):
        combo = decompose_to_phi(g, 12, arity=2)
        assert combo.expand() == g
        assert combo.zero_sums_hold()

    def test_index_degree_too_large(self):
        g = Polynomial.variable(1) * Polynomial.variable(2) * Polynomial.variable(3)
        with pytest.raises(InvalidInputError):
            decompose_to_phi(g, 5)


class TestDecomposeSquare:
    def test_knapsack_variable(self):
        pe = pseudo_expectation(ProblemKind.KNAPSACK, Params(4, 2))
        d = decompose_square(pe, Polynomial.variable(1), 4)
        assert d.total == d.direct == Q(1, 2)
        for t in d.terms:
            assert t.weight > 0
            assert pe(t.inner * t.inner) == t.value >= 0

    def test_difference_of_variables(self):
        pe = pseudo_expectation(ProblemKind.KNAPSACK, Params(6, Q(5, 2)))
        g = Polynomial.variable(1) - Polynomial.variable(2)
        d = decompose_square(pe, g, 6)
        assert d.total == d.direct == Q(7, 12)

    def test_symmetric_polynomial_has_only_global_part(self):
        pe = pseudo_expectation(ProblemKind.KNAPSACK, Params(6, 3))
        g = sum((Polynomial.variable(i) for i in range(2, 7)), Polynomial.variable(1))
        d = decompose_square(pe, g, 6)
        assert all(t.I == frozenset() for t in d.terms)
        assert d.total == d.direct == pe(g) ** 2  # honest point, symmetric g

    def test_mod2_edge(self):
        pe = pseudo_expectation(ProblemKind.MOD2, Params(6))
        g = Polynomial.variable(1, 2)
        d = decompose_square(pe, g, 6)
        assert d.total == d.direct == Q(1, 5)

    def test_triangle_with_three_index_part(self):
        pe = pseudo_expectation(ProblemKind.TRIANGLE, Params(7, Q(7, 2)))
        g = Polynomial.variable(1, 2) * Polynomial.variable(1, 3) - Q(
            1, 2
        ) * Polynomial.variable(2, 3)
        d = decompose_square(pe, g, 7)
        assert d.total == d.direct

    def test_inner_polynomials_pass_bullet_checks(self):
        pe = pseudo_expectation(ProblemKind.MOD2, Params(6))
        g = Polynomial.variable(1, 2) - 2 * Polynomial.variable(3, 4)
        d = decompose_square(pe, g, 6)
        for t in d.terms:
            checks = square_term_checks(t, g.index_degree(), 6)
            assert all(checks.values()), (t.labels, t.A, checks)

    def test_json_shape(self):
        pe = pseudo_expectation(ProblemKind.KNAPSACK, Params(4, 2))
        payload = decompose_square(pe, Polynomial.variable(1), 4).to_json()
        assert payload["match"] is True
        assert payload["total"] == payload["direct"] == "1/2"
        assert all("/" in t["weight"] or t["weight"].lstrip("-").isdigit()
                   for t in payload["terms"])


class TestPhiProperties:
    def test_unary_orbit_sum_over_everything(self):
        F = unary_flag(1)
        assert verify_phi_zero_sum(F, (1,), set(), 4)

    def test_labeled_edge_orbit_sum_fixing_one_label(self):
        F = make_flag(2, 0, [(0, 1)])
        assert verify_phi_zero_sum(F, (1, 2), {1}, 5)

    def test_improper_I_rejected(self):
        F = make_flag(2, 0, [(0, 1)])
        with pytest.raises(InvalidInputError):
            verify_phi_zero_sum(F, (1, 2), {1, 2}, 5)

    def test_orthogonality_across_levels(self):
        pe = pseudo_expectation(ProblemKind.KNAPSACK, Params(6, Q(5, 2)))
        F0 = unary_flag(0, free=1)
        F1 = unary_flag(1)
        assert verify_orthogonality(pe, F0, (), F1, (2,), 6) is True

    def test_orthogonality_mod2(self):
        pe = pseudo_expectation(ProblemKind.MOD2, Params(7))
        F0 = make_flag(0, 2, [(0, 1)])
        F2 = make_flag(2, 0, [(0, 1)])
        assert verify_orthogonality(pe, F0, (), F2, (1, 2), 7) is True

    def test_same_level_not_applicable(self):
        pe = pseudo_expectation(ProblemKind.MOD2, Params(7))
        F2 = make_flag(2, 0, [(0, 1)])
        assert verify_orthogonality(pe, F2, (1, 2), F2, (1, 3), 7) is None
