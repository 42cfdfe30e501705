from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from infinity_dynamics.config import Config
from infinity_dynamics.dynamics import (ChartMonomial, EigenData, MonomialEndo, classify_normal_form,
                                        divisorial_mobius, eigenvaluation, iterate_pushforward, pushforward,
                                        skewness_mobius, slope_convergence)
from infinity_dynamics.errors import (DegenerateMatrixError, GapViolatedError, InconsistentEigenDataError,
                                      InfinityDynamicsError, NormalizationError, ParseError)
from infinity_dynamics.exactnum import INF, IntMat2, QuadNumber


GOLDEN = (1 + QuadNumber.sqrt(5)) / 2
FIBONACCI = MonomialEndo(IntMat2(1, 1, 1, 0))


def test_chart_monomial_normalizations():
    v = ChartMonomial(2, 6)
    assert v.normalized() == ChartMonomial(Fraction(1, 3), 1)
    assert v.normalized("min") == ChartMonomial(1, 3)
    assert v.normalized("weighted", (1, 2)) == ChartMonomial(Fraction(1, 7), Fraction(3, 7))
    assert ChartMonomial(3, 0).normalized() == ChartMonomial(1, 0)
    with pytest.raises(NormalizationError):
        v.normalized("sideways")


def test_chart_monomial_rejects_bad_weights():
    with pytest.raises(NormalizationError):
        ChartMonomial(0, 0)
    with pytest.raises(NormalizationError):
        ChartMonomial(-1, 2)


def test_skewness_coordinate():
    assert ChartMonomial(2, 3).skewness_coordinate() == Fraction(3, 2)
    assert ChartMonomial(0, 1).skewness_coordinate() is INF
    assert ChartMonomial(1, QuadNumber.sqrt(2)).is_irrational()


def test_pushforward_applies_exponent_matrix():
    endo = MonomialEndo(IntMat2(2, 1, 0, 3))
    assert pushforward(endo, ChartMonomial(1, 1)) == ChartMonomial(3, 3)
    orbit = iterate_pushforward(FIBONACCI, ChartMonomial(1, 1), 3)
    assert [(w.s, w.t) for w in orbit] == [(1, 1), (2, 1), (3, 2), (5, 3)]


def test_pushforward_checks_the_chart():
    endo = MonomialEndo(IntMat2(1, 1, 1, 0), source=("E", "F"), target=("G", "H"))
    with pytest.raises(InfinityDynamicsError):
        pushforward(endo, ChartMonomial(1, 1, ("G", "H")))
    with pytest.raises(InfinityDynamicsError):
        iterate_pushforward(endo, ChartMonomial(1, 1), 2)


def test_monomial_germ_validation():
    with pytest.raises(DegenerateMatrixError):
        MonomialEndo(IntMat2(1, 2, 2, 4))
    with pytest.raises(InfinityDynamicsError):
        MonomialEndo(IntMat2(1, -1, 1, 1))
    assert MonomialEndo(IntMat2(1, 2, 3, 1)).lambda2 == 5
    assert FIBONACCI.power(3).matrix == IntMat2(3, 2, 2, 1)


def test_monomial_germ_json():
    assert MonomialEndo.from_json(FIBONACCI.to_json()) == FIBONACCI
    with pytest.raises(ParseError):
        MonomialEndo.from_json({"kind": "polynomial"})
    with pytest.raises(ParseError):
        MonomialEndo.from_json({"matrix": [[1, 2]]})


def test_fibonacci_eigenvaluation():
    eigen = eigenvaluation(FIBONACCI)
    assert eigen.lambda1 == GOLDEN
    assert eigen.lambda2 == 1
    assert eigen.gap
    assert eigen.valuation_type == "irrational"
    assert eigen.eigenvaluation == ChartMonomial(GOLDEN, 1)
    assert pushforward(FIBONACCI, eigen.eigenvaluation) == eigen.eigenvaluation.scaled(GOLDEN)


def test_eigenvaluation_normalization_follows_config():
    eigen = eigenvaluation(FIBONACCI, Config(eigen_normalization="weighted"))
    v = eigen.eigenvaluation
    assert v.s + v.t == 1


def test_rational_eigenvaluation_is_divisorial():
    eigen = eigenvaluation(MonomialEndo(IntMat2(2, 1, 1, 2)))
    assert eigen.lambda1 == 3
    assert eigen.eigenvaluation == ChartMonomial(1, 1)
    assert eigen.valuation_type == "divisorial"


def test_eigen_data_json():
    payload = eigenvaluation(FIBONACCI).to_json()
    assert payload["lambda1_text"] == "1/2+1/2√5"
    assert payload["type"] == "irrational"
    assert "eigenvaluation" in payload


def test_fibonacci_skewness_map():
    result = skewness_mobius(FIBONACCI)
    assert result.attracting == GOLDEN - 1
    assert result.multiplier == (3 - QuadNumber.sqrt(5)) / 2
    assert result.bound_squared == 1 / (GOLDEN * GOLDEN)


def test_homothety_has_no_gap():
    with pytest.raises(GapViolatedError):
        skewness_mobius(MonomialEndo(IntMat2(2, 0, 0, 2)))


@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.integers(1, 5))
@settings(deadline=None, max_examples=60)
def test_attracting_point_is_the_eigenvaluation(a, b, c, d):
    assume(a * d != b * c)
    endo = MonomialEndo(IntMat2(a, b, c, d))
    eigen = eigenvaluation(endo)
    result = skewness_mobius(endo)
    assert result.attracting == eigen.eigenvaluation.skewness_coordinate()
    assert result.multiplier * result.multiplier <= result.bound_squared


def test_divisorial_skewness_map():
    analysis = divisorial_mobius(3, 6, 2, 1, 0)
    assert analysis.attracting == 0
    assert analysis.multiplier == Fraction(2, 3)
    with pytest.raises(InconsistentEigenDataError):
        divisorial_mobius(3, 5, 2, 1, 0)
    with pytest.raises(GapViolatedError):
        divisorial_mobius(3, 9, 2, 1, 0)


def _eigen(lambda1, lambda2, kind):
    return EigenData(lambda1=QuadNumber.coerce(lambda1), lambda2=lambda2, eigenvaluation=None,
                     gap=True, valuation_type=kind)


def test_normal_form_classification():
    assert classify_normal_form(_eigen(GOLDEN, 1, "irrational")) == "monomial"
    assert classify_normal_form(_eigen(GOLDEN, 1, "irrational"), tame=False) == "pseudomonomial"
    assert classify_normal_form(_eigen(3, 4, "divisorial")) == "divisorial-type"
    assert classify_normal_form(_eigen(2, 1, "infinitely-singular")) == "infinitely-singular-type"
    assert classify_normal_form(_eigen(3, 3, "divisorial"), boundary_kind="elliptic") == "elliptic"


def test_normal_form_rejects_inconsistent_data():
    with pytest.raises(InconsistentEigenDataError):
        classify_normal_form(_eigen(3, 2, "divisorial"))
    with pytest.raises(InconsistentEigenDataError):
        classify_normal_form(_eigen(GOLDEN, 1, "infinitely-singular"))
    with pytest.raises(InfinityDynamicsError):
        classify_normal_form(_eigen(2, 1, "curve"))


def test_slopes_converge_at_the_multiplier_rate():
    frame = slope_convergence(FIBONACCI, ChartMonomial(1, 1), 20)
    assert list(frame.columns) == ["step", "error", "ratio"]
    assert len(frame) == 21
    assert float(frame["error"].iloc[-1]) < 1e-7
    assert abs(float(frame["ratio"].iloc[-1]) - 0.381966) < 1e-6
