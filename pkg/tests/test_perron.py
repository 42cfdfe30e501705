import mpmath
import pytest

from infinity_dynamics.config import Config
from infinity_dynamics.errors import NotPerronError, ParseError
from infinity_dynamics.exactnum import IntMat2, QuadNumber, spectral_radius
from infinity_dynamics.perron import QuadraticInteger, is_weak_perron, realize_as_matrix, spectrum_membership


@pytest.mark.parametrize("q, expected", [
    (QuadraticInteger.integer(7), True),
    (QuadraticInteger.sqrt(5), True),
    (QuadraticInteger.root(3, 1), True),
    (QuadraticInteger.root(1, -3), True),
    (QuadraticInteger.root(2, 1), True),
    (QuadraticInteger.root(-1, -3), False),
    (QuadraticInteger.root(1, 0), True),
])
def test_weak_perron_examples(q, expected):
    assert is_weak_perron(q) is expected
    assert spectrum_membership(q) is expected


@pytest.mark.parametrize("q, matrix", [
    (QuadraticInteger.integer(5), IntMat2(5, 0, 0, 1)),
    (QuadraticInteger.root(3, 1), IntMat2(1, 1, 1, 2)),
    (QuadraticInteger.root(2, -3), IntMat2(2, 1, 3, 0)),
    (QuadraticInteger.sqrt(2), IntMat2(0, 1, 2, 0)),
])
def test_realization_examples(q, matrix):
    assert realize_as_matrix(q) == matrix


def test_realization_of_non_perron_number_reports_conjugate():
    q = QuadraticInteger.root(-1, -3)
    with pytest.raises(NotPerronError) as info:
        realize_as_matrix(q)
    assert info.value.conjugate == (-1 - QuadNumber.sqrt(13)) / 2


def test_reducible_polynomial_with_negative_trace():
    q = QuadraticInteger.root(-1, -6)
    assert q.value() == 2
    assert is_weak_perron(q)
    assert realize_as_matrix(q) == IntMat2(2, 0, 0, 1)


def test_strict_notion_excludes_conjugate_of_equal_modulus():
    q = QuadraticInteger.root(0, -2)
    assert q.value() == QuadNumber.sqrt(2)
    assert is_weak_perron(q)
    assert not is_weak_perron(q, Config(strict_perron=True))


def test_invalid_quadratic_integers():
    with pytest.raises(ParseError):
        QuadraticInteger.root(1, 1)
    with pytest.raises(NotPerronError):
        QuadraticInteger.integer(0)


def test_from_quad_recovers_minimal_polynomial():
    golden = (1 + QuadNumber.sqrt(5)) / 2
    assert QuadraticInteger.from_quad(golden) == QuadraticInteger.root(1, -1)
    assert QuadraticInteger.from_quad(QuadNumber(4)) == QuadraticInteger.integer(4)
    with pytest.raises(NotPerronError):
        QuadraticInteger.from_quad(golden.conjugate())


def _decimal_is_weak_perron(a, b):
    with mpmath.workdps(50):
        root = mpmath.sqrt(a * a - 4 * b)
        value, conj = (a + root) / 2, (a - root) / 2
        if mpmath.isint(root):
            # rational roots: an integer has no conjugate to compare with
            return value >= 1
        return value >= 1 and abs(conj) <= value


def test_realization_sweep_against_decimal_oracle():
    for a in range(-3, 21):
        for b in range(-20, 21):
            if a * a - 4 * b < 0:
                continue
            q = QuadraticInteger.root(a, b)
            expected = _decimal_is_weak_perron(a, b)
            assert is_weak_perron(q) is expected, (a, b)
            if not expected:
                with pytest.raises(NotPerronError):
                    realize_as_matrix(q)
                continue
            matrix = realize_as_matrix(q)
            assert matrix.is_nonnegative()
            assert spectral_radius(matrix) == q.value()
