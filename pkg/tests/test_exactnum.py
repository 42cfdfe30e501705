from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from infinity_dynamics.errors import DegenerateMatrixError, MixedFieldError, ParseError
from infinity_dynamics.exactnum import (INF, IntMat2, MobiusMap, QuadNumber, characteristic_report, eigenvalues,
                                        mobius_apply, mobius_classify, quadratic_roots, satisfies_char_poly,
                                        spectral_radius, square_free_decomposition)

from conftest import small_rationals


GOLDEN = (1 + QuadNumber.sqrt(5)) / 2

entries = st.integers(min_value=0, max_value=30)
signed_entries = st.integers(min_value=-6, max_value=6)


@st.composite
def nonnegative_matrices(draw):
    A = IntMat2(draw(entries), draw(entries), draw(entries), draw(entries))
    assume(A.det != 0)
    return A


@st.composite
def invertible_matrices(draw):
    A = IntMat2(draw(signed_entries), draw(signed_entries), draw(signed_entries), draw(signed_entries))
    assume(A.det != 0)
    return A


quad_values = st.builds(
    lambda p, q, d: QuadNumber(p, q, d),
    small_rationals, small_rationals, st.sampled_from([2, 3, 5, 6, 7]))


@st.composite
def same_field_pairs(draw):
    d = draw(st.sampled_from([2, 3, 5, 6, 7]))
    return (QuadNumber(draw(small_rationals), draw(small_rationals), d),
            QuadNumber(draw(small_rationals), draw(small_rationals), d))


@pytest.mark.parametrize("matrix, expected", [
    (IntMat2(2, 0, 0, 3), QuadNumber(3)),
    (IntMat2(1, 1, 1, 0), GOLDEN),
    (IntMat2(0, 1, 2, 0), QuadNumber.sqrt(2)),
    (IntMat2(2, 1, 0, 3), QuadNumber(3)),
    (IntMat2(1, 1, 1, 2), (3 + QuadNumber.sqrt(5)) / 2),
])
def test_spectral_radius_examples(matrix, expected):
    assert spectral_radius(matrix) == expected


def test_spectral_radius_rejects_singular_matrix():
    with pytest.raises(DegenerateMatrixError):
        spectral_radius(IntMat2(1, 2, 2, 4))


def test_spectral_radius_rejects_negative_entries():
    with pytest.raises(ParseError):
        spectral_radius(IntMat2(-3, 0, 0, 1))
    with pytest.raises(ParseError):
        spectral_radius(IntMat2(2, -1, 1, 3))


@given(st.integers(min_value=-30, max_value=30), st.integers(min_value=-30, max_value=30),
       st.integers(min_value=-30, max_value=30), st.integers(min_value=-30, max_value=30))
@settings(deadline=None, max_examples=300)
def test_spectral_radius_is_a_root_of_the_characteristic_polynomial(a, b, c, d):
    A = IntMat2(a, b, c, d)
    assume(A.det != 0)
    if not A.is_nonnegative():
        with pytest.raises(ParseError):
            spectral_radius(A)
        return
    lam = spectral_radius(A)
    assert satisfies_char_poly(A, lam)
    low, high = eigenvalues(A)
    assert lam == high and lam >= abs(low)


@given(nonnegative_matrices())
@settings(deadline=None, max_examples=300)
def test_nonnegative_spectral_radius_dominates_both_roots(A):
    lam = spectral_radius(A)
    assert satisfies_char_poly(A, lam)
    assert all(lam >= abs(root) for root in eigenvalues(A))


def test_characteristic_report():
    report = characteristic_report(IntMat2(2, 1, 0, 3))
    assert report["lambda1_text"] == "3"
    assert report["charpoly"] == "T**2 - 5*T + 6"
    assert "(T - 3)" in report["factorization"] and "(T - 2)" in report["factorization"]


@given(nonnegative_matrices(), st.integers(min_value=1, max_value=5))
@settings(deadline=None)
def test_spectral_radius_of_powers(A, n):
    assert spectral_radius(A ** n) == spectral_radius(A) ** n


def test_square_free_decomposition():
    assert square_free_decomposition(12) == (2, 3)
    assert square_free_decomposition(49) == (7, 1)
    assert QuadNumber.sqrt(8) == QuadNumber(0, 2, 2)
    assert QuadNumber.sqrt(Fraction(9, 4)) == Fraction(3, 2)


def test_quad_number_text_and_field_rules():
    assert str(GOLDEN) == "1/2+1/2√5"
    assert str(QuadNumber(0, -1, 2)) == "-√2"
    assert QuadNumber(3) == 3 and QuadNumber(3) == Fraction(3)
    assert (QuadNumber.sqrt(2) * QuadNumber.sqrt(2)).is_rational
    with pytest.raises(MixedFieldError):
        QuadNumber.sqrt(2) + QuadNumber.sqrt(3)


def test_quad_number_json_round_trip():
    x = (3 - QuadNumber.sqrt(5)) / 2
    assert QuadNumber.from_json(x.to_json()) == x
    assert QuadNumber.from_json("-5/2") == Fraction(-5, 2)


@given(same_field_pairs())
@settings(deadline=None)
def test_quad_number_order_agrees_with_high_precision(pair):
    x, y = pair
    assume(x != y)
    with mpmath.workdps(100):
        assert (x < y) == (x.to_mpf(100) < y.to_mpf(100))


@given(quad_values)
@settings(deadline=None)
def test_quad_number_inverse(x):
    assume(x != 0)
    assert x * (1 / x) == 1


def test_quadratic_roots_order():
    low, high = quadratic_roots(1, -1, -1)
    assert high == GOLDEN and low == 1 - GOLDEN


@pytest.mark.parametrize("rows, t, expected", [
    (((1, 0), (0, 1)), Fraction(5, 3), Fraction(5, 3)),
    (((-1, -2), (0, 1)), Fraction(0), Fraction(-2)),
    (((3, 2), (-2, -1)), Fraction(1), Fraction(-5, 3)),
    (((1, 0), (-2, -1)), Fraction(-1, 2), INF),
    (((-5, -2), (2, 1)), INF, Fraction(-5, 2)),
])
def test_mobius_apply_examples(rows, t, expected):
    result = mobius_apply(MobiusMap(rows), t)
    assert result is INF if expected is INF else result == expected


@given(invertible_matrices(), invertible_matrices(), small_rationals)
@settings(deadline=None)
def test_mobius_composition(A, B, t):
    left = mobius_apply(MobiusMap(A @ B), t)
    right = mobius_apply(MobiusMap(A), mobius_apply(MobiusMap(B), t))
    assert left is right if INF in (left, right) else left == right


def test_mobius_maps_compare_projectively():
    assert MobiusMap(IntMat2(2, 0, 0, 2)).is_identity()
    assert MobiusMap(IntMat2(-1, -2, 0, 1)) == MobiusMap(IntMat2(1, 2, 0, -1))
    m = MobiusMap(IntMat2(2, 1, 1, 1))
    assert (m @ m.inverse()).is_identity()


def test_mobius_rejects_degenerate_matrix():
    with pytest.raises(DegenerateMatrixError):
        MobiusMap(IntMat2(1, 2, 2, 4))


def test_classification_examples():
    assert mobius_classify(MobiusMap(IntMat2(1, 1, 0, 1))).kind == "parabolic"
    assert mobius_classify(MobiusMap(IntMat2(0, -1, 1, 0))).kind == "elliptic"

    contracting = mobius_classify(MobiusMap(IntMat2(2, 0, 1, 3)))
    assert contracting.kind == "loxodromic"
    assert contracting.attracting == 0
    assert contracting.repelling == -1
    assert contracting.multiplier == Fraction(2, 3)

    word = mobius_classify(MobiusMap(IntMat2(-5, -2, 2, 1)))
    assert word.kind == "loxodromic"
    assert word.attracting == (-3 - QuadNumber.sqrt(5)) / 2
    assert word.repelling == (-3 + QuadNumber.sqrt(5)) / 2


@given(invertible_matrices(), st.sampled_from([IntMat2(1, 1, 0, 1), IntMat2(0, 1, 1, 0),
                                               IntMat2(2, 1, 1, 1), IntMat2(1, -2, 0, 1)]))
@settings(deadline=None)
def test_classification_is_a_conjugacy_invariant(A, P):
    conjugated = P @ A @ P.adjugate()
    assert mobius_classify(MobiusMap(conjugated)).kind == mobius_classify(MobiusMap(A)).kind


@given(invertible_matrices())
@settings(deadline=None)
def test_loxodromic_fixed_points_are_fixed(A):
    analysis = mobius_classify(MobiusMap(A))
    assume(analysis.kind == "loxodromic")
    M = MobiusMap(A)
    for x in analysis.fixed_points:
        image = M(x)
        assert image is x if x is INF else image == x
    assert analysis.multiplier < 1
