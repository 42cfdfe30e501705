"""
Worked examples: the S(2) and Markov completions, the projective plane,
fixture endomorphisms with recorded dynamical degrees, the elliptic K3
numbers, and a verifier that replays every worked example.
"""

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

import pandas as pd
from tqdm import tqdm

from .boundary import Completion, DivisorAtInfinity, FreePoint, PrimeDivisor, SatellitePoint, meet
from .config import Config, DEFAULT_CONFIG
from .degoracle import PolyMap, iterate_degrees, lambda1_estimate
from .dynamics import (ChartMonomial, EigenData, MonomialEndo, classify_normal_form,
                       divisorial_mobius, eigenvaluation, pushforward)
from .errors import InfinityDynamicsError, NotAChainError, ParseError
from .exactnum import (INF, IntMat2, MobiusMap, QuadNumber, characteristic_report, mobius_classify,
                       spectral_radius)
from .infnear import RELATIVE, BlowupTree, FreeOn, SatelliteBetween
from .perron import QuadraticInteger, is_weak_perron, realize_as_matrix
from .thompson import compose, free_product_check, markov_circle, parse_point, point_str, word_element
from .utils import parse_int_list, setup_logger
from .valuation import Divisorial, L_v, eval_monomial, local_dual, local_duals_by_recursion, pair_local_duals
from .zigzag import Zigzag, blow_up_move, classify_boundary, is_standard, standardize


logger = setup_logger(__name__)


# -- completions ------------------------------------------------------------

def s2_completion() -> Completion:
    """Boundary F_inf - L - F_0 < (F_1, F_-1) of the completion of {x^2 y = z^2 - 1}."""
    divisors = [PrimeDivisor("Finf", 0), PrimeDivisor("L", 0), PrimeDivisor("F0", -2),
                PrimeDivisor("F1", -2), PrimeDivisor("Fm1", -2)]
    crossings = [("Finf", "L"), ("L", "F0"), ("F0", "F1"), ("F0", "Fm1")]
    return Completion(divisors, crossings)


def markov_completion() -> Completion:
    """Triangle of (-1)-curves at infinity of the Markov surfaces."""
    divisors = [PrimeDivisor(name, -1) for name in ("Ex", "Ey", "Ez")]
    return Completion(divisors, [("Ex", "Ey"), ("Ey", "Ez"), ("Ez", "Ex")])


def p2_completion() -> Completion:
    """The line at infinity of the projective plane."""
    return Completion([PrimeDivisor("Linf", 1)], [])


# -- fixture maps -----------------------------------------------------------

@dataclass(frozen=True)
class FixtureMap:
    """Polynomial endomorphism with recorded dynamical degrees and eigenvaluation type."""
    name: str
    map_text: str
    lambda1: QuadNumber
    lambda2: int
    valuation_type: str
    chart_matrix: Optional[IntMat2] = None
    note: str = ""

    def polymap(self) -> PolyMap:
        return PolyMap.parse(self.map_text)

    def eigen(self) -> EigenData:
        if self.chart_matrix is not None:
            return eigenvaluation(MonomialEndo(self.chart_matrix))
        return EigenData(lambda1=self.lambda1, lambda2=self.lambda2, eigenvaluation=None,
                         gap=self.lambda1 * self.lambda1 > self.lambda2,
                         valuation_type=self.valuation_type)

    def to_json(self) -> dict:
        payload = {"kind": "fixture", "name": self.name, "map": self.map_text,
                   "lambda1": str(self.lambda1), "lambda2": self.lambda2, "type": self.valuation_type}
        if self.chart_matrix is not None:
            payload["matrix"] = self.chart_matrix.rows()
        return payload


FIXTURE_MAPS: Dict[str, FixtureMap] = {m.name: m for m in (
    FixtureMap("x2-y3", "x^2, y^3", QuadNumber(3), 6, "divisorial", IntMat2(2, 1, 0, 3),
               note="chart form at [0:1:0], eigenvaluation v_{1,1}"),
    FixtureMap("xy-y", "x*y, y", QuadNumber(1), 1, "divisorial", IntMat2(1, 0, 1, 1),
               note="v_{1,t} is sent to v_{1,1+t}"),
    FixtureMap("fibonacci", "x*y, x", (1 + QuadNumber.sqrt(5)) / 2, 1, "irrational", IntMat2(1, 1, 1, 0)),
    FixtureMap("S2-f", "u*v, 2*v^2-1", QuadNumber(2), 2, "divisorial",
               note="(xz, 4y, 2z^2-1) on S(2); eigenvaluation ord of the blow-up of F_inf ∩ L"),
    FixtureMap("S2-g", "u*v, u^2*v^2+2*v^2-1", QuadNumber(3), 2, "infinitely-singular",
               note="g = g_1 o f on S(2); eigenvaluation centered at a free point"),
)}

K3_ELLIPTIC = {
    "surface": "P1 x P1 minus a very general fiber E of a (2,2,2) K3 divisor",
    "boundary": "elliptic",
    "f": {"lambda1": 2, "lambda2": 2, "restriction": "sigma_y"},
    "g": {"lambda1": 2, "lambda2": 2, "restriction": "sigma_x"},
    "h = g o f": {"lambda1": 4, "lambda2": 4, "restriction": "translation by a non-torsion point"},
}


def endomorphism_from_json(payload: Mapping) -> Union[MonomialEndo, FixtureMap]:
    """{"kind": "monomial", "matrix": ...} or {"kind": "fixture", "name": "S2-g"}."""
    kind = payload.get("kind", "monomial") if isinstance(payload, Mapping) else None
    if kind == "fixture":
        name = payload.get("name")
        if name not in FIXTURE_MAPS:
            raise ParseError(f"Unknown fixture {name!r}, expected one of {sorted(FIXTURE_MAPS)}")
        return FIXTURE_MAPS[name]
    if kind == "monomial":
        return MonomialEndo.from_json(payload)
    raise ParseError(f"Invalid endomorphism payload: {payload!r}")


# -- replay of the worked examples ------------------------------------------

@dataclass(frozen=True)
class FixtureCheck:
    name: str
    area: str
    run: Callable[[Config], Tuple[object, object]]


def _check_spectral_radius(config):
    golden = (1 + QuadNumber.sqrt(5)) / 2
    observed = [spectral_radius(IntMat2(2, 0, 0, 3)), spectral_radius(IntMat2(1, 1, 1, 0)),
                spectral_radius(IntMat2(0, 1, 2, 0))]
    return [QuadNumber(3), golden, QuadNumber.sqrt(2)], observed


def _check_perron(config):
    observed = [realize_as_matrix(QuadraticInteger.integer(5), config),
                realize_as_matrix(QuadraticInteger.root(3, 1), config),
                realize_as_matrix(QuadraticInteger.root(2, -3), config),
                is_weak_perron(QuadraticInteger.sqrt(5), config),
                is_weak_perron(QuadraticInteger.root(-1, -3), config)]
    expected = [IntMat2(5, 0, 0, 1), IntMat2(1, 1, 1, 2), IntMat2(2, 1, 3, 0), True, False]
    return expected, observed


def _check_s2_duals(config):
    X = s2_completion()
    expected = [DivisorAtInfinity.prime("Finf"),
                DivisorAtInfinity({"Finf": -1, "L": 1, "F0": 1, "F1": Fraction(1, 2), "Fm1": Fraction(1, 2)})]
    return expected, [X.dual_divisor("L"), X.dual_divisor("Finf")]


def _check_markov_form(config):
    X = markov_completion()
    rows = X.intersection_matrix().tolist()
    expected = [[[-1, 1, 1], [1, -1, 1], [1, 1, -1]], True,
                DivisorAtInfinity({"Ey": Fraction(1, 2), "Ez": Fraction(1, 2)})]
    return expected, [rows, X.is_nondegenerate(), X.dual_divisor("Ex")]


def _check_markov_generators(config):
    circle, gens = markov_circle()
    sigma_x = gens["x"]
    involutions = all(word_element(u + u, gens).is_identity() for u in "xyz")
    on_positive = [sigma_x(Fraction(t)) for t in (0, 1, 5, Fraction(7, 3))]
    observed = [circle.marks, involutions, on_positive, sigma_x(circle.mark("x")),
                free_product_check(config.word_length, config)]
    expected = [(INF, Fraction(-1), Fraction(0)), True, [-2, -3, -7, Fraction(-13, 3)], Fraction(-2), True]
    return expected, observed


def _check_markov_word(config):
    g = word_element("xyz")
    analysis = mobius_classify(MobiusMap(IntMat2(-5, -2, 2, 1)))
    roots = sorted(analysis.fixed_points)
    expected = [Fraction(-5, 2), [(-3 - QuadNumber.sqrt(5)) / 2, (-3 + QuadNumber.sqrt(5)) / 2]]
    return expected, [g(INF), roots]


def _check_eigen(config):
    cubic = eigenvaluation(MonomialEndo(IntMat2(2, 1, 0, 3)), config)
    fib = eigenvaluation(MonomialEndo(IntMat2(1, 1, 1, 0)), config)
    golden = (1 + QuadNumber.sqrt(5)) / 2
    observed = [cubic.lambda1, cubic.lambda2, (cubic.eigenvaluation.s, cubic.eigenvaluation.t),
                cubic.valuation_type, cubic.gap, fib.lambda1, fib.valuation_type,
                classify_normal_form(cubic), classify_normal_form(fib)]
    expected = [QuadNumber(3), 6, (QuadNumber(1), QuadNumber(1)), "divisorial", True, golden,
                "irrational", "divisorial-type", "monomial"]
    return expected, observed


def _check_pushforward(config):
    cubic = MonomialEndo(IntMat2(2, 1, 0, 3))
    shear = MonomialEndo(IntMat2(1, 0, 1, 1))
    t = Fraction(2, 5)
    observed = [pushforward(cubic, ChartMonomial(1, 1)), pushforward(shear, ChartMonomial(1, t))]
    return [ChartMonomial(3, 3), ChartMonomial(1, 1 + t)], observed


def _check_s2_normal_forms(config):
    f, g = FIXTURE_MAPS["S2-f"].eigen(), FIXTURE_MAPS["S2-g"].eigen()
    elliptic = EigenData(QuadNumber(K3_ELLIPTIC["h = g o f"]["lambda1"]), K3_ELLIPTIC["h = g o f"]["lambda2"],
                         None, True, "divisorial")
    observed = [classify_normal_form(f), classify_normal_form(g),
                classify_normal_form(elliptic, boundary_kind="elliptic")]
    return ["divisorial-type", "infinitely-singular-type", "elliptic"], observed


def _check_divisorial_mobius(config):
    analysis = divisorial_mobius(lambda1=3, lambda2=6, d=2, b=1, n0=0)
    return [Fraction(0), QuadNumber(Fraction(2, 3))], [analysis.attracting, analysis.multiplier]


def _check_meet(config):
    X = markov_completion()
    final, result = meet(X, DivisorAtInfinity.prime("Ex"), DivisorAtInfinity.prime("Ey"), config)
    created = final.history[-1].divisor
    return [1, DivisorAtInfinity.prime(created)], [len(final.history), result]


def _check_skewness(config):
    tree = BlowupTree()
    f = tree.blow_up(FreeOn(tree.root))
    g = tree.blow_up(SatelliteBetween(tree.root, f))
    relation = tree.change_root_relation(FreeOn(tree.root))
    observed = [tree.node(f).alpha, tree.node(g).b, tree.node(g).alpha,
                relation.ambient_skewness(Fraction(4)), local_dual(tree, tree.root).coef(tree.root),
                pair_local_duals(tree, tree.root, tree.root), pair_local_duals(tree, g, g)]
    expected = [Fraction(2), 2, Fraction(3, 2), Fraction(5), QuadNumber(-1), QuadNumber(-1),
                QuadNumber(Fraction(-3, 2))]
    return expected, observed


def _check_line_at_infinity(config):
    return [QuadNumber(-3)], [eval_monomial(-1, -1, {(2, 1): 1})]


def _check_boundaries(config):
    standard, _ = standardize(Zigzag.parse("0,-2,-2"))
    observed = [classify_boundary(markov_completion()).kind, classify_boundary(s2_completion()).kind,
                classify_boundary(p2_completion()).kind, is_standard(standard)]
    return ["cycle", "other", "zigzag", True], observed


def _check_degrees(config):
    cubic = iterate_degrees(FIXTURE_MAPS["x2-y3"].polymap(), 4, config).degrees
    f = lambda1_estimate(iterate_degrees(FIXTURE_MAPS["S2-f"].polymap(), 5, config).degrees)
    g = lambda1_estimate(iterate_degrees(FIXTURE_MAPS["S2-g"].polymap(), 4, config).degrees)
    observed = [cubic, abs(f.ratio - 2) <= Fraction(1, 5), abs(g.ratio - 3) <= Fraction(3, 10)]
    return [[3, 9, 27, 81], True, True], observed


def _check_relative_farey(config):
    tree = BlowupTree(mode=RELATIVE)
    child = tree.blow_up(FreeOn(tree.root))
    observed = [tree.node(tree.root).farey, tree.node(child).farey, tree.node(child).b, tree.node(child).alpha]
    return [(0, 1), (1, 1), 1, Fraction(1)], observed


def _check_maximal_ideal_value(config):
    X = s2_completion()
    observed = []
    for center in (FreePoint("L"), SatellitePoint("L", "F0")):
        Y, name = X.blow_up(center)
        observed.append(L_v(Divisorial(Y, name), DivisorAtInfinity.prime(name)))
    return [QuadNumber(1), QuadNumber(1)], observed


def _check_satellite_dual(config):
    tree = BlowupTree()
    f = tree.blow_up(FreeOn(tree.root))
    g = tree.blow_up(SatelliteBetween(tree.root, f))
    nodes = (tree.root, f, g)
    inverted = local_dual(tree, g)
    recursive = local_duals_by_recursion(tree)[g]
    expected = [QuadNumber(-1), QuadNumber(Fraction(-3, 2)), QuadNumber(-3)]
    return [expected, expected], [[inverted.coef(n) for n in nodes], [recursive.coef(n) for n in nodes]]


def _rejected_as(call) -> str:
    try:
        call()
    except NotAChainError as e:
        return type(e).__name__
    return "accepted"


def _check_fork_rejected(config):
    fork = blow_up_move(Zigzag.parse("0,-2,-2"), 1)
    observed = [_rejected_as(lambda: standardize(s2_completion())), _rejected_as(lambda: standardize(fork))]
    return ["NotAChainError", "NotAChainError"], observed


def _check_markov_involutions(config):
    _, gens = markov_circle()
    return [True, True, True], [compose(gens[u], gens[u]).is_identity() for u in "xyz"]


def _check_s2_dual_graph(config):
    X = s2_completion()
    observed = [[X.self_int(n) for n in ("Finf", "L", "F0", "F1", "Fm1")], X.neighbors("F0"),
                X.is_nondegenerate()]
    return [[0, 0, -2, -2, -2], ["F1", "Fm1", "L"], True], observed


def _check_lambda1_command(config):
    report = characteristic_report(IntMat2(*parse_int_list("2,1,0,3", expected=4)))
    return ["3", True], [report["lambda1_text"], "(T - 3)" in report["factorization"]]


def _check_markov_act_command(config):
    return "-5/2", point_str(word_element("xyz")(parse_point("inf")))


CHECKS: List[FixtureCheck] = [
    FixtureCheck("spectral radii", "exactnum", _check_spectral_radius),
    FixtureCheck("Perron realization", "perron", _check_perron),
    FixtureCheck("S(2) dual divisors", "boundary", _check_s2_duals),
    FixtureCheck("Markov intersection form", "boundary", _check_markov_form),
    FixtureCheck("meet of crossing curves", "boundary", _check_meet),
    FixtureCheck("skewness and local duals", "infnear", _check_skewness),
    FixtureCheck("line at infinity", "valuation", _check_line_at_infinity),
    FixtureCheck("monomial pushforward", "dynamics", _check_pushforward),
    FixtureCheck("eigenvaluations", "dynamics", _check_eigen),
    FixtureCheck("divisorial skewness map", "dynamics", _check_divisorial_mobius),
    FixtureCheck("S(2) and K3 normal forms", "dynamics", _check_s2_normal_forms),
    FixtureCheck("boundary classes", "zigzag", _check_boundaries),
    FixtureCheck("Markov generators", "thompson", _check_markov_generators),
    FixtureCheck("Markov word xyz", "thompson", _check_markov_word),
    FixtureCheck("degree growth", "degoracle", _check_degrees),
    FixtureCheck("relative tree free child", "infnear", _check_relative_farey),
    FixtureCheck("maximal ideal valuation on its divisor", "valuation", _check_maximal_ideal_value),
    FixtureCheck("satellite local dual", "valuation", _check_satellite_dual),
    FixtureCheck("fork rejected by standardize", "zigzag", _check_fork_rejected),
    FixtureCheck("Markov involutions", "thompson", _check_markov_involutions),
    FixtureCheck("S(2) dual graph", "boundary", _check_s2_dual_graph),
    FixtureCheck("lambda1 command example", "cli", _check_lambda1_command),
    FixtureCheck("markov act command example", "cli", _check_markov_act_command),
]


class FixtureVerifier:
    """Replays the worked examples and collects one report row per check."""

    def __init__(self, config: Optional[Config] = None):
        self.config = config or DEFAULT_CONFIG

    def run_check(self, check: FixtureCheck) -> dict:
        try:
            expected, observed = check.run(self.config)
            passed = expected == observed
            detail = "" if passed else f"expected {expected}, got {observed}"
        except InfinityDynamicsError as e:
            logger.error(f"fixture check {check.name!r} raised: {e}")
            passed, detail = False, f"{type(e).__name__}: {e}"
        if not passed:
            logger.warning(f"fixture check {check.name!r} failed: {detail}")
        return {"check": check.name, "area": check.area, "passed": passed, "detail": detail}

    def run(self, checks: Optional[List[FixtureCheck]] = None) -> pd.DataFrame:
        checks = CHECKS if checks is None else checks
        rows = [self.run_check(check)
                for check in tqdm(checks, desc="fixtures", disable=not sys.stderr.isatty())]
        report = pd.DataFrame(rows, columns=["check", "area", "passed", "detail"])
        logger.info(f"fixtures: {int(report['passed'].sum())}/{len(report)} passed")
        return report


def verify_all(config: Optional[Config] = None) -> pd.DataFrame:
    """Replay every worked example; one row per check with a passed flag."""
    return FixtureVerifier(config).run()
