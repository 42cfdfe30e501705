"""
Valuations centered at infinity as evaluable objects and as linear forms
on divisors at infinity.

Boundary-level valuations (divisorial, monomial, curve ends and
infinitely singular approximations) evaluate divisors of a completion
through L_v. Tree-level points of a BlowupTree carry local dual divisors
whose pairing is minus the skewness of the wedge.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .boundary import Completion, DivisorAtInfinity, SatellitePoint, sympy_to_fraction, transport
from .errors import (InconsistentEigenDataError, InfinityDynamicsError, InvalidCenterError,
                     NormalizationError, ParseError)
from .exactnum import QuadNumber
from .infnear import MAXIMAL_IDEAL, BlowupTree, CurveEnd, SegmentPoint, TreePoint
from .utils import fraction_str, setup_logger


logger = setup_logger(__name__)

PLUS_INFINITY = math.inf
MINUS_INFINITY = -math.inf


# -- monomial evaluation --------------------------------------------------

def _support(poly) -> List[Tuple[int, int]]:
    """Exponent pairs with nonzero coefficient of a polynomial in x, y."""
    if isinstance(poly, Mapping):
        return [tuple(k) for k, c in poly.items() if c != 0]
    if isinstance(poly, (list, tuple)):
        return [(int(i), int(j)) for i, j, c in poly if c != 0]
    x, y = sympy.symbols("x y")
    try:
        expr = sympy.sympify(poly) if isinstance(poly, str) else poly
        return [tuple(m) for m in sympy.Poly(expr, x, y).monoms()]
    except (sympy.SympifyError, sympy.PolynomialError) as e:
        raise ParseError(f"Invalid polynomial: {poly!r}") from e


def eval_monomial(s, t, poly) -> QuadNumber:
    """
    Value min{s*i + t*j : a_ij != 0} of a monomial valuation.

    Negative weights are accepted (s = t = -1 evaluates the order of
    vanishing along the line at infinity of the projective plane).

    Args:
        s, t: Weights on x and y
        poly: Dict {(i, j): coeff}, list of (i, j, coeff), or a sympy
              expression/string in x and y

    Returns:
        Exact value as a QuadNumber
    """
    s, t = QuadNumber.coerce(s), QuadNumber.coerce(t)
    support = _support(poly)
    if not support:
        raise InfinityDynamicsError("Monomial valuation of the zero polynomial is +inf")
    return min(s * i + t * j for i, j in support)


# -- boundary valuations --------------------------------------------------

@dataclass(frozen=True)
class Divisorial:
    """scale * ord_E for a boundary (or exceptional) divisor E of a completion."""
    home: Completion
    divisor: str
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        self.home.divisor(self.divisor)
        if Fraction(self.scale) <= 0:
            raise NormalizationError("Divisorial scale must be positive")
        object.__setattr__(self, "scale", Fraction(self.scale))


@dataclass(frozen=True)
class Monomial:
    """Monomial valuation v_{s,t} at the crossing of E and F."""
    home: Completion
    first: str
    second: str
    s: QuadNumber
    t: QuadNumber

    def __post_init__(self):
        s, t = QuadNumber.coerce(self.s), QuadNumber.coerce(self.t)
        if not self.home.crosses(self.first, self.second):
            raise InvalidCenterError(f"{self.first} and {self.second} do not cross")
        if s < 0 or t < 0 or (s == 0 and t == 0):
            raise NormalizationError("Monomial weights must be nonnegative and not both zero")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)

    @property
    def is_irrational(self) -> bool:
        return self.t != 0 and not (self.s / self.t).is_rational

    def to_divisorial(self) -> Divisorial:
        """Reduce a rational-slope monomial valuation to a scaled divisorial one."""
        if self.is_irrational:
            raise InfinityDynamicsError("Irrational monomial valuations are not divisorial")
        if self.t == 0:
            return Divisorial(self.home, self.first, _rational_scale(self.s))
        if self.s == 0:
            return Divisorial(self.home, self.second, _rational_scale(self.t))
        ratio = (self.s / self.t).p
        current = self.home
        # Stern-Brocot descent on the toric chain between the two curves
        lo, hi = (self.first, (1, 0)), (self.second, (0, 1))
        while True:
            (lo_name, (a1, b1)), (hi_name, (a2, b2)) = lo, hi
            a, b = a1 + a2, b1 + b2
            current, name = current.blow_up(SatellitePoint(lo_name, hi_name))
            if Fraction(a, b) == ratio:
                return Divisorial(current, name, _rational_scale(self.s / a))
            if Fraction(a, b) < ratio:
                hi = (name, (a, b))
            else:
                lo = (name, (a, b))


def _rational_scale(value: QuadNumber) -> Fraction:
    if not value.is_rational:
        raise InfinityDynamicsError(f"Divisorial scale {value} is irrational")
    return value.p



@dataclass(frozen=True)
class BoundaryCurveEnd:
    """Curve valuation at a free point of a boundary divisor, following E's germ."""
    home: Completion
    divisor: str

    def __post_init__(self):
        self.home.divisor(self.divisor)


@dataclass(frozen=True)
class InfSingular:
    """Infinitely singular valuation given by divisorial approximants."""
    approximants: Tuple[Divisorial, ...]
    center: str

    def __post_init__(self):
        if not self.approximants:
            raise InfinityDynamicsError("An infinitely singular valuation needs approximants")


Valuation = Union[Divisorial, Monomial, BoundaryCurveEnd, InfSingular]


def _descends(child: Completion, parent: Completion) -> bool:
    n = len(parent.history)
    return child.history[:n] == parent.history


def _monomial_on_descendant(v: Monomial, divisor: DivisorAtInfinity, target: Completion) -> QuadNumber:
    """Evaluate through the toric cone of the blown-up crossing that contains (s, t)."""
    e = transport(DivisorAtInfinity.prime(v.first), v.home, target)
    f = transport(DivisorAtInfinity.prime(v.second), v.home, target)
    for a, b in target.crossing_pairs():
        a1, b1 = e.coef(a), f.coef(a)
        a2, b2 = e.coef(b), f.coef(b)
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        # (s, t) = lam*(a1, b1) + mu*(a2, b2)
        lam = (v.s * b2 - v.t * a2) / det
        mu = (v.t * a1 - v.s * b1) / det
        if lam >= 0 and mu >= 0:
            return lam * divisor.coef(a) + mu * divisor.coef(b)
    raise InvalidCenterError("No crossing of the completion contains the monomial valuation")



def L_v(v: Valuation, divisor: DivisorAtInfinity, completion: Optional[Completion] = None):
    """
    Value of the linear form L_v on a divisor at infinity.

    Args:
        v: Boundary valuation
        divisor: Divisor at infinity
        completion: Completion carrying the divisor (defaults to v's home)

    Returns:
        QuadNumber, or +/- math.inf for curve ends against divisors
        containing their curve
    """
    if isinstance(v, InfSingular):
        return L_v(v.approximants[-1], divisor, completion)
    completion = completion or v.home

    if isinstance(v, Monomial) and completion is not v.home and _descends(completion, v.home) \
            and len(completion.history) > len(v.home.history):
        return _monomial_on_descendant(v, divisor, completion)

    local = transport(divisor, completion, v.home) if completion is not v.home else divisor
    if isinstance(v, Divisorial):
        return QuadNumber(v.scale * local.coef(v.divisor))
    if isinstance(v, Monomial):
        return v.s * local.coef(v.first) + v.t * local.coef(v.second)
    if isinstance(v, BoundaryCurveEnd):
        a = local.coef(v.divisor)
        if a > 0:
            return PLUS_INFINITY
        if a < 0:
            return MINUS_INFINITY
        return QuadNumber(0)
    raise InfinityDynamicsError(f"Unknown valuation {v!r}")


def center_of(v: Valuation) -> Tuple[str, ...]:
    """
    Center on the home completion: ("divisor", E), ("free", E) or
    ("satellite", E, F).
    """
    if isinstance(v, Divisorial):
        return ("divisor", v.divisor)
    if isinstance(v, Monomial):
        if v.t == 0:
            return ("divisor", v.first)
        if v.s == 0:
            return ("divisor", v.second)
        return ("satellite",) + tuple(sorted((v.first, v.second)))
    if isinstance(v, BoundaryCurveEnd):
        return ("free", v.divisor)
    if isinstance(v, InfSingular):
        return ("free", v.center)
    raise InfinityDynamicsError(f"Unknown valuation {v!r}")


def s2_center_case(v: Valuation, line: str = "L", fiber: str = "Finf") -> str:
    """
    Locate an eigenvaluation on the S(2) completion. It is centered either
    at ord_L itself, at a free point of L, or at the crossing of F_inf and L.
    """
    center = center_of(v)
    if center == ("divisor", line):
        return "ord_L"
    if center == ("free", line):
        return "free point of L"
    if center[0] == "satellite" and set(center[1:]) == {line, fiber}:
        return "F_inf ∩ L"
    raise InconsistentEigenDataError(f"Center {center} is not one of the three admissible cases")


def from_linear_form(completion: Completion, values: Mapping[str, object]) -> Valuation:
    """
    Recover a divisorial or monomial valuation from its values on the
    boundary prime divisors of one completion.
    """
    positive = {}
    for name, value in values.items():
        value = value if isinstance(value, QuadNumber) else QuadNumber(Fraction(value))
        if value > 0:
            positive[name] = value

    if len(positive) == 1:
        (name, value), = positive.items()
        return Divisorial(completion, name, value.to_fraction())
    if len(positive) == 2:
        (e, s), (f, t) = sorted(positive.items())
        return Monomial(completion, e, f, s, t)
    raise InfinityDynamicsError(f"Linear form with positive support {sorted(positive)} is not representable")


def relative_skewness_rescale(alpha_z, vz):
    """alpha(v) = v(z)^2 * alpha_z(v / v(z))."""
    vz = QuadNumber.coerce(vz)
    return vz * vz * QuadNumber.coerce(alpha_z)


def chart_skewness(s, t, along: str = "E") -> QuadNumber:
    """
    Relative skewness of v_{s,t} at a crossing E/F: alpha_E(v/v(x)) = t/s
    and alpha_F(v/v(y)) = s/t.
    """
    s, t = QuadNumber.coerce(s), QuadNumber.coerce(t)
    if along == "E":
        return t / s
    if along == "F":
        return s / t
    raise InfinityDynamicsError(f"Unknown chart side {along!r}")


# -- local dual divisors --------------------------------------------------

@dataclass(frozen=True)
class LocalDualDivisor:
    """Divisor supported on the exceptional curves above p."""
    tree: BlowupTree
    coefficients: Tuple[Tuple[int, QuadNumber], ...]

    def coef(self, node: int) -> QuadNumber:
        return dict(self.coefficients).get(node, QuadNumber(0))

    def is_rational(self) -> bool:
        return all(c.is_rational for _, c in self.coefficients)

    def dot(self, other: "LocalDualDivisor") -> QuadNumber:
        """Intersection number, read off the self-intersections and crossings of the tree."""
        tree = self.tree
        mine, theirs = dict(self.coefficients), dict(other.coefficients)
        zero = QuadNumber(0)
        total = QuadNumber(0)
        for n in tree.exceptional_nodes():
            total += mine.get(n, zero) * theirs.get(n, zero) * tree.node(n).self_int
        for u, v in tree.graph.edges():
            if tree.node(u).self_int is None or tree.node(v).self_int is None:
                continue
            total += mine.get(u, zero) * theirs.get(v, zero) + mine.get(v, zero) * theirs.get(u, zero)
        return total

    def by_name(self) -> Dict[str, str]:
        return {self.tree.node(n).name: str(c) for n, c in self.coefficients if c != 0}


def _require_absolute(tree: BlowupTree) -> None:
    if tree.mode != MAXIMAL_IDEAL:
        raise InvalidCenterError("Local dual divisors live on the tree of the maximal ideal")


def ord_duals(tree: BlowupTree) -> Dict[int, Dict[int, Fraction]]:
    """Z_{ord_E} for every exceptional E, by exact inversion of the local matrix."""
    _require_absolute(tree)
    order, matrix = tree.local_intersection_matrix()
    inverse = DomainMatrix.from_Matrix(matrix).convert_to(QQ).inv().to_Matrix()
    duals = {}
    for j, n in enumerate(order):
        duals[n] = {m: sympy_to_fraction(inverse[i, j]) for i, m in enumerate(order)}
    return duals


def _weights_on_current_segment(tree: BlowupTree, point: SegmentPoint):
    """Normalized weights of a segment point on the edge that now contains it."""
    kind, upper, lower = tree.locate(point)
    if kind == "node":
        return ("node", upper)
    b_lo, b_up = tree.node(lower).b, tree.node(upper).b
    t = (point.alpha - tree.node(lower).alpha) * b_lo
    s = (1 - t * b_up) / b_lo
    return ("segment", lower, upper, s, t)


def local_dual(tree: BlowupTree, point: TreePoint) -> LocalDualDivisor:
    """
    Local dual divisor of an m_p-normalized valuation.

    Nodes give Z_{ord_E}/b(E); a segment point at E/F gives
    s*Z_{ord_E} + t*Z_{ord_F}.
    """
    _require_absolute(tree)
    if isinstance(point, CurveEnd):
        raise InfinityDynamicsError("Curve valuations have infinite skewness")
    duals = ord_duals(tree)
    if isinstance(point, int):
        b = tree.node(point).b
        coefficients = {m: QuadNumber(c / b) for m, c in duals[point].items()}
    else:
        where = _weights_on_current_segment(tree, point)
        if where[0] == "node":
            return local_dual(tree, where[1])
        _, lower, upper, s, t = where
        coefficients = {m: s * duals[lower][m] + t * duals[upper][m] for m in duals[lower]}
    return LocalDualDivisor(tree, tuple(sorted(coefficients.items())))


def local_duals_by_recursion(tree: BlowupTree) -> Dict[int, LocalDualDivisor]:
    """
    Z_{v_E} for every node replaying the blow-up history: the first
    exceptional curve gives -E, a free child of E gives
    tau^* Z_{v_E} - G/b(G), a satellite child of E, F gives the
    b-weighted average of the two pullbacks minus G/b(G).
    """
    _require_absolute(tree)
    duals: Dict[int, Dict[int, Fraction]] = {}
    for n in tree:
        node = tree.node(n)
        for z in duals.values():
            z[n] = sum((z.get(h, Fraction(0)) for h in node.hosts), Fraction(0))
        if node.created_by == "root":
            z = {n: Fraction(-1)}
        elif node.created_by == "free":
            z = dict(duals[node.hosts[0]])
            z[n] = z.get(n, Fraction(0)) - Fraction(1, node.b)
        else:
            e, f = node.hosts
            be, bf = tree.node(e).b, tree.node(f).b
            z = {m: Fraction(be, be + bf) * duals[e].get(m, Fraction(0))
                 + Fraction(bf, be + bf) * duals[f].get(m, Fraction(0))
                 for m in set(duals[e]) | set(duals[f])}
            z[n] = z.get(n, Fraction(0)) - Fraction(1, node.b)
        duals[n] = z
    return {n: LocalDualDivisor(tree, tuple(sorted((m, QuadNumber(c)) for m, c in z.items())))
            for n, z in duals.items()}


def explicit_pairing(tree: BlowupTree, first: TreePoint, second: TreePoint) -> Optional[QuadNumber]:
    """
    Z_v . Z_v' by intersecting incarnations in a completion where the two
    centers no longer share a segment; None when both are the same
    irrational point.
    """
    work = tree.copy()
    points = [first, second]
    for i, p in enumerate(points):
        if isinstance(p, SegmentPoint) and p.alpha.is_rational:
            points[i] = work.refine_until_node(p)
    p1, p2 = points
    if isinstance(p1, SegmentPoint) and isinstance(p2, SegmentPoint):
        if not work.separate(p1, p2):
            return None
    return local_dual(work, p1).dot(local_dual(work, p2))


def pair_local_duals(tree: BlowupTree, first: TreePoint, second: TreePoint) -> QuadNumber:
    """
    Z_v . Z_v' = -alpha(v wedge v'), checked against the explicit
    intersection of local dual divisors.
    """
    if isinstance(first, CurveEnd) or isinstance(second, CurveEnd):
        raise InfinityDynamicsError("Curve valuations have Z_v^2 = -inf")
    value = -QuadNumber.coerce(tree.skewness(tree.wedge(first, second)))
    explicit = explicit_pairing(tree, first, second)
    if explicit is None:
        logger.debug("explicit pairing unavailable for a repeated irrational point")
    elif explicit != value:
        logger.error(f"pairing mismatch: wedge path {value}, explicit path {explicit}")
        raise InfinityDynamicsError(f"Pairing mismatch: {value} != {explicit}")
    return value


# -- serialization --------------------------------------------------------

def valuation_to_json(v: Valuation) -> dict:
    if isinstance(v, Divisorial):
        return {"kind": "divisorial", "at": v.divisor, "scale": fraction_str(v.scale)}
    if isinstance(v, Monomial):
        return {"kind": "monomial", "at": [v.first, v.second], "s": v.s.to_json(), "t": v.t.to_json()}
    if isinstance(v, BoundaryCurveEnd):
        return {"kind": "curve", "at": v.divisor}
    if isinstance(v, InfSingular):
        return {"kind": "infinitely-singular", "at": v.center,
                "approximants": [valuation_to_json(a) for a in v.approximants]}
    raise InfinityDynamicsError(f"Unknown valuation {v!r}")


def valuation_from_json(payload: Mapping, home: Completion) -> Valuation:
    try:
        kind = payload["kind"]
        if kind == "divisorial":
            return Divisorial(home, payload["at"], Fraction(payload.get("scale", "1")))
        if kind == "monomial":
            first, second = payload["at"]
            return Monomial(home, first, second, QuadNumber.from_json(payload["s"]),
                            QuadNumber.from_json(payload["t"]))
        if kind == "curve":
            return BoundaryCurveEnd(home, payload["at"])
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"Invalid valuation payload: {payload!r}") from e
    raise ParseError(f"Unsupported valuation kind in {payload!r}")
