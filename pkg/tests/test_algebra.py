from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import series
from scatterdiag.algebra import (ContractError, GradedSeries, bracket, from_text,
                                 merge_monomial_components, primitive, split_monomial_components,
                                 to_text, truncate, zero)
from scatterdiag.sources import li2_series


def mono(m, o, c=1, n=3):
    return GradedSeries.monomial(m, o, c, n)


# --- lattice ---------------------------------------------------------------

@given(st.tuples(st.integers(-50, 50), st.integers(-50, 50)).filter(lambda m: m != (0, 0)))
def test_primitive_part_times_content_recovers_vector(m):
    p = primitive(m)
    g = gcd(abs(m[0]), abs(m[1]))
    assert (p[0] * g, p[1] * g) == m
    assert gcd(abs(p[0]), abs(p[1])) == 1


def test_primitive_of_zero_is_rejected():
    with pytest.raises(ContractError):
        primitive((0, 0))


# --- bracket examples ------------------------------------------------------

def test_bracket_of_coordinate_monomials():
    assert bracket(mono((1, 0), 1, n=2), mono((0, 1), 1, n=2)) == mono((1, 1), 2, n=2)


def test_bracket_of_parallel_exponents_vanishes():
    assert not bracket(mono((2, 1), 1), mono((4, 2), 1))


def test_bracket_with_negative_determinant():
    assert bracket(mono((1, 2), 1), mono((3, 1), 1)) == mono((4, 3), 2, -5)


def test_bracket_drops_terms_above_truncation():
    assert not bracket(mono((1, 0), 2), mono((0, 1), 2))


def test_bracket_rejects_mismatched_truncations():
    with pytest.raises(ContractError):
        bracket(mono((1, 0), 1, n=2), mono((0, 1), 1, n=3))


def test_bracket_scales_with_form():
    assert bracket(mono((1, 0), 1), mono((0, 1), 1), form=3) == mono((1, 1), 2, 3)


def test_square_zero_orders_multiply_only_when_disjoint():
    a = GradedSeries.monomial((1, 0), frozenset({1}), 1, 2)
    b = GradedSeries.monomial((0, 1), frozenset({2}), 1, 2)
    c = GradedSeries.monomial((0, 1), frozenset({1}), 1, 2)
    assert bracket(a, b).terms == {((1, 1), frozenset({1, 2})): 1}
    assert not bracket(a, c)


# --- canonical form --------------------------------------------------------

def test_zero_coefficients_are_not_stored():
    f = GradedSeries({((1, 0), 1): 0, ((0, 1), 1): 2}, 2)
    assert len(f) == 1
    assert not (f - f)


def test_order_zero_is_rejected():
    with pytest.raises(ContractError):
        GradedSeries({((1, 0), 0): 1}, 2)


def test_truncate_examples():
    f = GradedSeries({((1, 0), 1): 1, ((2, 0), 2): 1}, 2)
    assert truncate(f, 1) == mono((1, 0), 1, n=1)
    assert truncate(f, 2) == f
    h5 = li2_series((1, 0), 5)
    assert truncate(h5, 3) == li2_series((1, 0), 3)
    assert truncate(h5, 3).coeff((2, 0), 2) == Fraction(-1, 4)


# --- bracket properties ----------------------------------------------------

@settings(max_examples=60)
@given(series(), series())
def test_bracket_is_antisymmetric(f, g):
    assert bracket(f, g) == -bracket(g, f)


@settings(max_examples=40)
@given(series(), series(), series())
def test_jacobi_identity(f, g, h):
    total = bracket(f, bracket(g, h)) + bracket(g, bracket(h, f)) + bracket(h, bracket(f, g))
    assert not total


@settings(max_examples=40)
@given(st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(lambda m: m != (0, 0)),
       st.lists(st.fractions(-2, 2, max_denominator=3), min_size=3, max_size=3))
def test_bracket_vanishes_on_a_single_direction(m, cs):
    m = primitive(m)
    f = GradedSeries({((k * m[0], k * m[1]), k): c for k, c in enumerate(cs, 1)}, 3)
    assert not bracket(f, f)


@settings(max_examples=60)
@given(series(), series())
def test_bracket_terms_are_graded(f, g):
    sums = {((m1[0] + m2[0], m1[1] + m2[1]), o1 + o2)
            for (m1, o1) in f.terms for (m2, o2) in g.terms}
    assert set(bracket(f, g).terms) <= sums


# --- square-zero splitting -------------------------------------------------

def test_split_linear_term():
    parts = split_monomial_components(mono((1, 2), 1, n=2), 2)
    assert [p.terms for p in parts] == [{((1, 2), frozenset({1})): 1},
                                        {((1, 2), frozenset({2})): 1}]


def test_split_quadratic_term_picks_up_factorial():
    parts = split_monomial_components(mono((2, 4), 2, n=2), 2)
    assert [p.terms for p in parts] == [{((2, 4), frozenset({1, 2})): 2}]


def test_split_needs_enough_variables():
    with pytest.raises(ContractError):
        split_monomial_components(mono((1, 0), 3, n=3), 2)


@settings(max_examples=60)
@given(series(truncation=4), st.integers(4, 6))
def test_split_then_merge_is_identity(f, n):
    parts = split_monomial_components(f, n)
    assert merge_monomial_components(parts, n, f.truncation) == f


# --- text form -------------------------------------------------------------

def test_text_form_of_a_series():
    f = GradedSeries({((1, 0), 1): 1, ((2, 0), 2): Fraction(-1, 4)}, 2)
    assert to_text(f) == "1/1 * z^(1,0) * t^1 + -1/4 * z^(2,0) * t^2"
    assert to_text(zero(3)) == "0"


@given(series(truncation=4))
def test_text_round_trip(f):
    assert from_text(to_text(f), f.truncation) == f
