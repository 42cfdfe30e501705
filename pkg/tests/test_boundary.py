from fractions import Fraction

import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from infinity_dynamics.boundary import (Completion, DivisorAtInfinity, FreePoint, PrimeDivisor, SatellitePoint,
                                        is_well_ordered, join, load_completion, meet, pullback, pushforward,
                                        transport)
from infinity_dynamics.errors import (ContractionError, DegenerateFormError, InvalidCenterError, ParseError,
                                      UnknownDivisorError)
from infinity_dynamics.fixtures import markov_completion
from infinity_dynamics.utils import dump_json


def D(text):
    return DivisorAtInfinity.parse(text)


def random_blowups(completion, choices):
    """Blow up free or satellite points picked by a list of integers."""
    for value in choices:
        pairs = completion.crossing_pairs()
        if value % 2 and pairs:
            completion, _ = completion.blow_up(SatellitePoint(*pairs[(value // 2) % len(pairs)]))
        else:
            names = completion.names
            completion, _ = completion.blow_up(FreePoint(names[(value // 2) % len(names)]))
    return completion


coefficients = st.integers(min_value=-4, max_value=4)
choices = st.lists(st.integers(min_value=0, max_value=100), max_size=6)


def test_divisor_parsing_and_text():
    d = D("2*E + F - 1/2*G")
    assert d.coefficients == {"E": 2, "F": 1, "G": Fraction(-1, 2)}
    assert str(d) == "2*E + F - 1/2*G"
    assert D("E=2,F=1") == D("2*E + F")
    assert D("0") == DivisorAtInfinity()
    with pytest.raises(ParseError):
        D("x*E")


def test_divisor_arithmetic():
    assert D("E + F") - D("F") == D("E")
    assert Fraction(1, 2) * D("2*E") == D("E")
    assert D("E - F").is_effective() is False
    assert D("1/3*E").common_denominator() == 3


def test_free_blowup_on_projective_plane(p2):
    X, name = p2.blow_up(FreePoint("Linf"))
    assert name == "Ex1"
    assert [(d.name, d.self_int) for d in X.divisors] == [("Linf", 0), ("Ex1", -1)]
    assert X.crosses("Linf", "Ex1")
    assert X.history[-1].hosts == ("Linf",)


def test_satellite_blowup_on_markov_triangle(markov):
    X, name = markov.blow_up(SatellitePoint("Ex", "Ey"))
    assert [X.self_int(n) for n in ("Ex", "Ey", "Ez", name)] == [-2, -2, -1, -1]
    assert not X.crosses("Ex", "Ey")
    assert X.neighbors(name) == ["Ex", "Ey"]


def test_blowup_rejects_invalid_centers(markov, s2):
    with pytest.raises(InvalidCenterError):
        s2.blow_up(SatellitePoint("Finf", "F0"))
    with pytest.raises(UnknownDivisorError):
        s2.blow_up(FreePoint("nowhere"))
    with pytest.raises(InvalidCenterError):
        markov.blow_up(FreePoint("Ex"), name="Ey")


def test_contraction_undoes_blowup(s2):
    X, name = s2.blow_up(FreePoint("L"))
    assert X.contract(name).same_boundary(s2)
    Y, name = s2.blow_up(SatellitePoint("L", "F0"))
    assert Y.contract(name).same_boundary(s2)


def test_contraction_of_chain_middle():
    chain = Completion([PrimeDivisor("A", -2), PrimeDivisor("B", -1), PrimeDivisor("C", -2)],
                       [("A", "B"), ("B", "C")])
    X = chain.contract("B")
    assert [(d.name, d.self_int) for d in X.divisors] == [("A", -1), ("C", -1)]
    assert X.crosses("A", "C")


def test_contraction_refusals(markov, s2):
    star = Completion([PrimeDivisor("C", -1), PrimeDivisor("A", -2), PrimeDivisor("B", -2),
                       PrimeDivisor("D", -2)], [("C", "A"), ("C", "B"), ("C", "D")])
    with pytest.raises(ContractionError):
        star.contract("C")
    with pytest.raises(ContractionError):
        s2.contract("F0")
    with pytest.raises(ContractionError):
        markov.contract("Ex")


def test_s2_intersection_form(s2):
    assert s2.is_nondegenerate()
    assert s2.dual_divisor("L") == D("Finf")
    assert s2.dual_divisor("Finf") == D("-Finf + L + F0 + 1/2*F1 + 1/2*Fm1")


def test_markov_intersection_form(markov):
    assert markov.intersection_matrix().tolist() == [[-1, 1, 1], [1, -1, 1], [1, 1, -1]]
    assert markov.dual_divisor("Ex") == D("1/2*Ey + 1/2*Ez")


@pytest.mark.parametrize("fixture_name", ["s2", "markov", "p2"])
def test_dual_divisors_are_dual(fixture_name, request):
    X = request.getfixturevalue(fixture_name)
    for name in X.names:
        z = X.dual_divisor(name)
        for other in X.names:
            assert X.intersect(z, DivisorAtInfinity.prime(other)) == (1 if other == name else 0)


def test_degenerate_form_reports_kernel():
    fiber = Completion([PrimeDivisor("F", 0)], [])
    assert not fiber.is_nondegenerate()
    with pytest.raises(DegenerateFormError) as info:
        fiber.dual_divisor("F")
    assert info.value.kernel == [1]


def test_pullback_examples(crossing_pair, p2):
    X, name = p2.blow_up(FreePoint("Linf"))
    assert pullback(X.history[-1], D("Linf")) == D("Linf") + DivisorAtInfinity.prime(name)
    Y, name = crossing_pair.blow_up(SatellitePoint("E", "F"))
    assert pullback(Y.history[-1], D("E + F")) == D("E + F") + DivisorAtInfinity.prime(name, 2)


@given(coefficients, coefficients, coefficients, choices)
@settings(deadline=None, max_examples=50)
def test_pushforward_of_pullback_is_identity(a, b, c, steps):
    X = markov_completion()
    Y = random_blowups(X, steps)
    d = DivisorAtInfinity({"Ex": a, "Ey": b, "Ez": c})
    assert transport(transport(d, X, Y), Y, X) == d


@given(coefficients, coefficients, coefficients, coefficients, choices)
@settings(deadline=None, max_examples=500)
def test_projection_formula(a, b, c, e, steps):
    X = markov_completion()
    Y = random_blowups(X, steps)
    alpha = DivisorAtInfinity({"Ex": a, "Ey": b})
    beta_on_y = DivisorAtInfinity({Y.names[-1]: c, "Ez": e})
    up = transport(alpha, X, Y)
    assert Y.intersect(up, beta_on_y) == X.intersect(alpha, transport(beta_on_y, Y, X))
    gamma = DivisorAtInfinity({"Ez": c, "Ex": e})
    assert Y.intersect(up, transport(gamma, X, Y)) == X.intersect(alpha, gamma)


def test_single_step_pushforward(crossing_pair):
    Y, name = crossing_pair.blow_up(SatellitePoint("E", "F"))
    assert pushforward(Y.history[-1], D("E") + DivisorAtInfinity.prime(name, 3)) == D("E")


def test_transport_through_blowup_and_contraction(markov):
    Y, name = markov.blow_up(FreePoint("Ex"))
    Z = Y.contract(name)
    assert Z.same_boundary(markov)
    assert transport(D("Ex + Ey"), markov, Z) == D("Ex + Ey")


def test_meet_of_a_divisor_with_itself(markov):
    final, result = meet(markov, D("Ex"), D("Ex"))
    assert final is markov and result == D("Ex")


def test_meet_of_crossing_curves(markov):
    final, result = meet(markov, D("Ex"), D("Ey"))
    assert len(final.history) == 1
    assert result == D("Ex1")


def test_meet_needs_two_satellite_blowups(crossing_pair):
    first, second = D("2*E + F"), D("E + 3*F")
    final, result = meet(crossing_pair, first, second)
    assert [r.hosts for r in final.history] == [("E", "F"), ("E", "Ex1")]
    assert result == D("E + F + 3*Ex1 + 5*Ex2")
    a, b = transport(first, crossing_pair, final), transport(second, crossing_pair, final)
    for name in final.names:
        assert result.coef(name) == min(a.coef(name), b.coef(name))
    for crossing in final.crossing_pairs():
        assert is_well_ordered(final, a, b, crossing)


def test_meet_of_rational_divisors(markov):
    final, result = meet(markov, D("1/2*Ex"), D("1/2*Ey"))
    assert result == D("1/2*Ex1")


def test_join_of_crossing_curves(markov):
    final, result = join(markov, D("Ex"), D("Ey"))
    assert result == D("Ex + Ey + Ex1")


@st.composite
def boundaries_with_divisors(draw):
    """A crossing pair or the Markov triangle blown up to at most 8 components, with two effective divisors."""
    base = draw(st.sampled_from(["pair", "triangle"]))
    if base == "pair":
        X = Completion([PrimeDivisor("E", -1), PrimeDivisor("F", -1)], [("E", "F")])
    else:
        X = markov_completion()
    steps = draw(st.lists(st.integers(min_value=0, max_value=100), max_size=8 - len(X.names)))
    X = random_blowups(X, steps)
    weights = st.integers(min_value=0, max_value=10)
    first = DivisorAtInfinity({name: draw(weights) for name in X.names})
    second = DivisorAtInfinity({name: draw(weights) for name in X.names})
    return X, first, second


@given(boundaries_with_divisors())
@settings(deadline=None, max_examples=200)
def test_meet_is_the_well_ordered_componentwise_minimum(data):
    X, first, second = data
    final, result = meet(X, first, second)
    up1, up2 = transport(first, X, final), transport(second, X, final)
    for name in final.names:
        assert result.coef(name) == min(up1.coef(name), up2.coef(name))
    for crossing in final.crossing_pairs():
        assert is_well_ordered(final, up1, up2, crossing)


def test_unknown_divisor_in_intersection(markov):
    with pytest.raises(UnknownDivisorError):
        markov.intersect(D("Ex"), D("Nowhere"))


def test_json_and_yaml_files(tmp_path, s2):
    json_path = tmp_path / "s2.json"
    dump_json(s2.to_json(), str(json_path))
    assert load_completion(str(json_path)).same_boundary(s2)
    yaml_path = tmp_path / "s2.yaml"
    yaml_path.write_text(yaml.safe_dump(s2.to_json()))
    assert load_completion(str(yaml_path)).same_boundary(s2)
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ParseError):
        load_completion(str(broken))


def test_dot_and_matrix_frame(markov):
    text = markov.to_dot()
    assert text.startswith('graph "boundary"') and " -- " in text
    frame = markov.matrix_frame()
    assert list(frame.columns) == ["divisor", "Ex", "Ey", "Ez"]
    assert frame.loc[0, "Ex"] == -1
