"""
The circle at infinity of a surface whose boundary is a cycle.

Points of S^1 = [-inf, +inf]/(-inf = +inf) are Fractions, QuadNumbers or
INF. A ThompsonElement is a circle homeomorphism given piecewise by
integral Mobius maps on a subdivision into Farey intervals.
"""

import itertools
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import more_itertools
from tqdm import tqdm

from .config import Config, DEFAULT_CONFIG
from .errors import InfinityDynamicsError, NoLoxodromicPieceError, ParseError
from .exactnum import INF, IntMat2, MobiusMap, Point, QuadNumber, as_point, eigenvalues, mobius_apply
from .utils import fraction_str, parse_rational, setup_logger


logger = setup_logger(__name__)

MARKOV_MATRICES = {
    "x": IntMat2(-1, -2, 0, 1),
    "y": IntMat2(1, 0, 0, -1),
    "z": IntMat2(1, 0, -2, -1),
}
MARKOV_MARKS = {"x": Fraction(0), "y": Fraction(-1), "z": INF}


# -- circle order -----------------------------------------------------------

def _key(x, role: str = "point"):
    """Sort key on the cut circle: INF is -inf except as an interval end."""
    if x is INF:
        return (2, 0) if role == "end" else (0, 0)
    return (1, x)


def _same(x, y) -> bool:
    if x is INF or y is INF:
        return x is y
    return x == y


def in_interval(t, a, b, closed: bool = False) -> bool:
    """Whether t lies on the arc from a to b in circle order ([a, b) or [a, b])."""
    if _same(a, b):
        return True
    if closed and _same(t, b):
        return True
    ka, kb, kt = _key(a, "start"), _key(b, "end"), _key(t)
    if ka < kb:
        return ka <= kt < kb
    return kt >= ka or kt < kb


def _farey_coords(x, role: str) -> Tuple[int, int]:
    if x is INF:
        return (-1, 0) if role == "start" else (1, 0)
    x = Fraction(x)
    return x.numerator, x.denominator


def is_farey_interval(a, b) -> bool:
    """[p/q, r/s] with qr - ps = 1, using -inf = -1/0 and +inf = 1/0."""
    if _same(a, b):
        return False
    if isinstance(a, QuadNumber) or isinstance(b, QuadNumber):
        return False
    p, q = _farey_coords(a, "start")
    r, s = _farey_coords(b, "end")
    return q * r - p * s == 1


def simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """Rational with the smallest denominator (then numerator) strictly between a < b."""
    a, b = Fraction(a), Fraction(b)
    if a >= b:
        raise InfinityDynamicsError(f"Empty interval ({a}, {b})")
    if a < 0 < b:
        return Fraction(0)
    if b <= 0:
        return -simplest_between(-b, -a)
    n = math.floor(a)
    if n + 1 < b:
        return Fraction(n + 1)
    if a == n:
        return n + 1 / Fraction(math.floor(1 / (b - n)) + 1)
    return n + 1 / simplest_between(1 / (b - n), 1 / (a - n))


def farey_subdivide(a, b) -> List[Tuple[Point, Point]]:
    """
    Split the arc from a to b into Farey intervals along the Stern-Brocot
    tree.

    Args:
        a, b: Rational or INF endpoints (a == b means the whole circle)

    Returns:
        Consecutive Farey intervals covering the arc
    """
    if is_farey_interval(a, b):
        return [(a, b)]
    if _same(a, b) or (a is not INF and b is not INF and Fraction(a) > Fraction(b)):
        if a is INF:
            return farey_subdivide(INF, Fraction(0)) + farey_subdivide(Fraction(0), INF)
        return farey_subdivide(a, INF) + farey_subdivide(INF, b)
    if a is INF:
        b = Fraction(b)
        cut = Fraction(0) if b > 0 else Fraction(math.ceil(b) - 1)
    elif b is INF:
        a = Fraction(a)
        cut = Fraction(0) if a < 0 else Fraction(math.floor(a) + 1)
    else:
        cut = simplest_between(a, b)
    return farey_subdivide(a, cut) + farey_subdivide(cut, b)


def _interior_point(a, b) -> Fraction:
    if _same(a, b):
        return Fraction(0) if a is INF else Fraction(a) + 1
    if a is INF:
        return Fraction(b) - 1
    if b is INF:
        return Fraction(a) + 1
    if Fraction(a) > Fraction(b):
        # the arc runs through infinity
        return Fraction(a) + 1
    return (Fraction(a) + Fraction(b)) / 2


def point_str(x) -> str:
    if x is INF:
        return "inf"
    if isinstance(x, QuadNumber):
        return str(x)
    return fraction_str(x)


def parse_point(text) -> Point:
    if text is INF or (isinstance(text, str) and text.strip().lower() in ("inf", "∞", "+inf", "-inf")):
        return INF
    return parse_rational(text)


# -- circle charts ------------------------------------------------------------

@dataclass(frozen=True)
class FareyCircle:
    """Marked points in circle order, consecutive marks spanning Farey intervals."""
    marks: Tuple[Point, ...]
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        marks = tuple(as_point(m) for m in self.marks)
        if len(marks) < 2:
            raise InfinityDynamicsError("A Farey circle needs at least two marks")
        keys = [_key(m) for m in marks]
        if keys != sorted(keys):
            raise InfinityDynamicsError("Marks must be listed in circle order")
        for a, b in self.intervals_of(marks):
            if not is_farey_interval(a, b):
                raise InfinityDynamicsError(f"[{point_str(a)}, {point_str(b)}] is not a Farey interval")
        object.__setattr__(self, "marks", marks)

    @staticmethod
    def intervals_of(marks) -> List[Tuple[Point, Point]]:
        return [(marks[i], marks[(i + 1) % len(marks)]) for i in range(len(marks))]

    def intervals(self) -> List[Tuple[Point, Point]]:
        return self.intervals_of(self.marks)

    def mark(self, label: str) -> Point:
        return self.marks[self.labels.index(label)]


@dataclass(frozen=True)
class CycleChart:
    """Homeomorphism from the cycle of a completion to the circle."""
    marks: Tuple[Point, ...]
    segments: Tuple[Tuple[int, int, MobiusMap], ...]

    def phi(self, segment: int, alpha) -> Point:
        """Image of the point of skewness alpha on segment [ord_{E_i}, ord_{E_{i+1}}]."""
        return mobius_apply(self.segments[segment][2], alpha)


def cycle_chart(marks: Sequence) -> CycleChart:
    """
    Chart of a cycle E_1, ..., E_r from marks x_1 < ... < x_{r-1}, with
    ord_{E_r} sent to inf and ord_{E_i} to x_i.

    Args:
        marks: Rationals x_1, ..., x_{r-1}, x_1 and x_{r-1} integers

    Returns:
        CycleChart whose segment maps compose the skewness with
        [[x_1,-1],[1,0]], [[p_{i+1},p_i],[q_{i+1},q_i]] and [[1,x_{r-1}],[0,1]]
    """
    xs = [Fraction(x) for x in marks]
    if not xs:
        raise InfinityDynamicsError("A cycle chart needs at least one mark")
    FareyCircle(tuple([INF] + xs))
    r = len(xs) + 1
    segments = [(r - 1, 0, MobiusMap(IntMat2(int(xs[0]), -1, 1, 0)))]
    for i in range(len(xs) - 1):
        lo, hi = xs[i], xs[i + 1]
        segments.append((i, i + 1, MobiusMap(IntMat2(hi.numerator, lo.numerator, hi.denominator, lo.denominator))))
    segments.append((r - 2, r - 1, MobiusMap(IntMat2(1, int(xs[-1]), 0, 1))))
    return CycleChart(marks=tuple([INF] + xs), segments=tuple(segments))


def unit_to_line(s) -> Point:
    """[0, 1]/(0 = 1) to [-inf, inf]: (2s-1)/s on [0, 1/2], (2s-1)/(1-s) on [1/2, 1]."""
    s = Fraction(s)
    if not 0 <= s <= 1:
        raise InfinityDynamicsError(f"{s} is not in [0, 1]")
    if s in (0, 1):
        return INF
    if s <= Fraction(1, 2):
        return (2 * s - 1) / s
    return (2 * s - 1) / (1 - s)


def line_to_unit(t) -> Fraction:
    """Inverse of unit_to_line, sending inf to 0."""
    if t is INF:
        return Fraction(0)
    t = Fraction(t)
    if t <= 0:
        return 1 / (2 - t)
    return (t + 1) / (t + 2)


# -- Thompson elements ----------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    start: Point
    end: Point
    mobius: MobiusMap

    @property
    def target(self) -> Tuple[Point, Point]:
        first, second = self.mobius(self.start), self.mobius(self.end)
        return (first, second) if self.mobius.orientation > 0 else (second, first)

    def contains(self, t, closed: bool = False) -> bool:
        return in_interval(t, self.start, self.end, closed)


class ThompsonElement:
    """Piecewise integral Mobius homeomorphism of the circle."""

    __slots__ = ("pieces",)

    def __init__(self, pieces: Iterable[Piece]):
        pieces = sorted(pieces, key=lambda p: _key(p.start, "start"))
        object.__setattr__(self, "pieces", tuple(pieces))
        self._validate()

    def __setattr__(self, key, value):
        raise AttributeError("ThompsonElement is immutable")

    def _validate(self) -> None:
        pieces = self.pieces
        if not pieces:
            raise InfinityDynamicsError("A Thompson element needs at least one piece")
        if len({p.mobius.orientation for p in pieces}) != 1:
            raise InfinityDynamicsError("Pieces mix orientation preserving and reversing maps")
        for p in pieces:
            if abs(p.mobius.matrix.det) != 1:
                raise InfinityDynamicsError(f"Piece matrix {p.mobius.matrix} is not in PGL2(Z)")
        if len(pieces) == 1:
            if not _same(pieces[0].start, pieces[0].end):
                raise InfinityDynamicsError("A single piece must cover the whole circle")
            return
        for p, q in more_itertools.pairwise(pieces + (pieces[0],)):
            if not _same(p.end, q.start):
                raise InfinityDynamicsError(
                    f"Source intervals do not partition the circle at {point_str(p.end)}")
            if not _same(p.mobius(p.end), q.mobius(q.start)):
                raise InfinityDynamicsError(f"Pieces disagree at {point_str(p.end)}")
        for p in pieces:
            if not is_farey_interval(p.start, p.end):
                raise InfinityDynamicsError(f"[{point_str(p.start)}, {point_str(p.end)}] is not a Farey interval")
            if not is_farey_interval(*p.target):
                raise InfinityDynamicsError(f"Image of [{point_str(p.start)}, {point_str(p.end)}] is not Farey")
        targets = sorted((p.target for p in pieces), key=lambda iv: _key(iv[0], "start"))
        for (a, b), (c, d) in more_itertools.pairwise(targets + [targets[0]]):
            if not _same(b, c):
                raise InfinityDynamicsError("Target intervals do not partition the circle")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_mobius(cls, mobius: MobiusMap, marks: Sequence[Point] = (INF,)) -> "ThompsonElement":
        """A global Mobius map on the coarsest Farey subdivision refining marks and their preimages."""
        inverse = mobius.inverse()
        points = list(marks) + [inverse(m) for m in marks]
        return cls(Piece(a, b, mobius) for a, b in _subdivision(points))

    @classmethod
    def identity(cls) -> "ThompsonElement":
        return cls([Piece(INF, INF, MobiusMap.identity())])

    # -- evaluation -----------------------------------------------------------

    def piece_at(self, t) -> Piece:
        for p in self.pieces:
            if p.contains(t):
                return p
        raise InfinityDynamicsError(f"No piece contains {point_str(t)}")

    def apply(self, t) -> Point:
        return self.piece_at(as_point(t)).mobius(as_point(t))

    __call__ = apply

    def preimage(self, t) -> Point:
        t = as_point(t)
        for p in self.pieces:
            candidate = p.mobius.inverse()(t)
            if p.contains(candidate, closed=True):
                return candidate
        raise InfinityDynamicsError(f"No preimage found for {point_str(t)}")

    @property
    def orientation(self) -> int:
        return self.pieces[0].mobius.orientation

    @property
    def breakpoints(self) -> List[Point]:
        return [p.start for p in self.pieces]

    def is_identity(self) -> bool:
        return all(p.mobius.is_identity() for p in self.pieces)

    def inverse(self) -> "ThompsonElement":
        pieces = []
        for p in self.pieces:
            a, b = p.target
            pieces.append(Piece(a, b, p.mobius.inverse()))
        return ThompsonElement(pieces)

    def __eq__(self, other):
        if not isinstance(other, ThompsonElement):
            return NotImplemented
        return compose(self, other.inverse()).is_identity()

    def __hash__(self):
        # the maps used on arcs do not depend on the subdivision
        return hash(frozenset(p.mobius for p in self.pieces))

    def to_json(self) -> dict:
        return {"pieces": [{"start": point_str(p.start), "end": point_str(p.end),
                            "matrix": p.mobius.matrix.rows()} for p in self.pieces]}

    @classmethod
    def from_json(cls, payload: Mapping) -> "ThompsonElement":
        try:
            return cls(Piece(parse_point(item["start"]), parse_point(item["end"]),
                             MobiusMap(IntMat2.from_rows(item["matrix"])))
                       for item in payload["pieces"])
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InfinityDynamicsError) and not isinstance(e, ParseError):
                raise
            raise ParseError(f"Invalid piecewise map payload: {e}") from e

    def __repr__(self):
        body = "; ".join(f"[{point_str(p.start)},{point_str(p.end)}]->{p.mobius.matrix}" for p in self.pieces)
        return f"ThompsonElement({body})"


def _subdivision(points: Iterable[Point]) -> List[Tuple[Point, Point]]:
    unique: List[Point] = []
    for x in sorted(points, key=_key):
        if not unique or not _same(unique[-1], x):
            unique.append(x)
    if len(unique) == 1:
        unique.append(Fraction(0) if unique[0] is INF else INF)
        unique.sort(key=_key)
    arcs = []
    for a, b in FareyCircle.intervals_of(unique):
        arcs.extend(farey_subdivide(a, b))
    return arcs


def compose(g: ThompsonElement, h: ThompsonElement) -> ThompsonElement:
    """
    The element g o h on the common refinement of h's pieces and the
    preimages of g's breakpoints.
    """
    points = h.breakpoints + [h.preimage(x) for x in g.breakpoints]
    pieces = []
    for a, b in _subdivision(points):
        m = _interior_point(a, b)
        hp = h.piece_at(m)
        gp = g.piece_at(hp.mobius(m))
        pieces.append(Piece(a, b, gp.mobius @ hp.mobius))
    result = ThompsonElement(pieces)
    logger.debug(f"compose: {len(g.pieces)} x {len(h.pieces)} pieces -> {len(result.pieces)}")
    return result


def power(g: ThompsonElement, n: int) -> ThompsonElement:
    if n < 0:
        return power(g.inverse(), -n)
    result = ThompsonElement.identity()
    for _ in range(n):
        result = compose(g, result)
    return result


# -- the Markov surface ---------------------------------------------------------

def markov_circle() -> Tuple[FareyCircle, Dict[str, ThompsonElement]]:
    """
    Circle with marks j_z, j_y, j_x = inf, -1, 0 and the three involutions
    acting through M_x, M_y, M_z.
    """
    circle = FareyCircle((INF, Fraction(-1), Fraction(0)), labels=("z", "y", "x"))
    generators = {u: ThompsonElement.from_mobius(MobiusMap(m), circle.marks)
                  for u, m in MARKOV_MATRICES.items()}
    return circle, generators


def word_matrix(word: str) -> IntMat2:
    result = IntMat2.identity()
    for letter in word:
        if letter not in MARKOV_MATRICES:
            raise ParseError(f"Unknown generator {letter!r} in word {word!r}")
        result = result @ MARKOV_MATRICES[letter]
    return result


def word_element(word: str, generators: Optional[Mapping[str, ThompsonElement]] = None) -> ThompsonElement:
    """Element of a word over {x, y, z}, the last letter acting first."""
    if generators is None:
        _, generators = markov_circle()
    result = ThompsonElement.identity()
    for letter in reversed(word):
        if letter not in generators:
            raise ParseError(f"Unknown generator {letter!r} in word {word!r}")
        result = compose(generators[letter], result)
    return result


def reduced_words(length: int, alphabet: str = "xyz") -> Iterable[str]:
    """Words of the given length with no two equal adjacent letters."""
    for letters in itertools.product(alphabet, repeat=length):
        if all(a != b for a, b in more_itertools.pairwise(letters)):
            yield "".join(letters)


def free_product_check(length: Optional[int] = None, config: Optional[Config] = None) -> bool:
    """
    True iff no reduced word of length 1..L in the Markov generators is the
    identity of PGL2(Z).
    """
    config = config or DEFAULT_CONFIG
    length = length or config.word_length
    if not 1 <= length <= 10:
        raise InfinityDynamicsError(f"Word length must be between 1 and 10, got {length}")
    words = [w for n in range(1, length + 1) for w in reduced_words(n)]
    for word in tqdm(words, desc="reduced words", disable=not sys.stderr.isatty()):
        if MobiusMap(word_matrix(word)).is_identity():
            logger.warning(f"relation found: {word} = id")
            return False
    logger.info(f"free product check: {len(words)} reduced words up to length {length}, no relation")
    return True


# -- loxodromic fixed points ----------------------------------------------------

@dataclass(frozen=True)
class LoxodromicReport:
    """omega is attracting (v_+), alpha repelling (v_-)."""
    omega: Point
    alpha: Point
    omega_multiplier: QuadNumber
    alpha_multiplier: QuadNumber
    power: int

    def to_json(self) -> dict:
        def encode(x):
            return "inf" if x is INF else QuadNumber.coerce(x).to_json()
        return {"omega": encode(self.omega), "alpha": encode(self.alpha),
                "omega_text": point_str(self.omega), "alpha_text": point_str(self.alpha),
                "omega_multiplier": self.omega_multiplier.to_json(),
                "alpha_multiplier": self.alpha_multiplier.to_json(), "power": self.power}


def _fixed_in_pieces(g: ThompsonElement) -> List[Tuple[Point, QuadNumber]]:
    found = []
    for p in g.pieces:
        if p.mobius.is_identity():
            continue
        try:
            points = p.mobius.fixed_points()
        except InfinityDynamicsError:
            continue
        for x in points:
            if p.contains(x, closed=True) and not any(_same(x, y) for y, _ in found):
                found.append((x, abs(p.mobius.derivative(x))))
    return found


def loxodromic_analysis(g: ThompsonElement, config: Optional[Config] = None) -> LoxodromicReport:
    """
    Attracting and repelling fixed points of g on the circle, searched in
    the pieces of g, g^2, ..., g^depth.

    Args:
        g: Thompson element
        config: Configuration (refinement_depth)

    Returns:
        LoxodromicReport with exact fixed points and |derivative| of the power used
    """
    config = config or DEFAULT_CONFIG
    current = g
    for n in range(1, config.refinement_depth + 1):
        fixed = _fixed_in_pieces(current)
        attracting = [(x, m) for x, m in fixed if m < 1]
        repelling = [(x, m) for x, m in fixed if m > 1]
        if attracting and repelling:
            (omega, m_omega), (alpha, m_alpha) = attracting[0], repelling[0]
            logger.info(f"loxodromic at power {n}: omega={point_str(omega)}, alpha={point_str(alpha)}")
            return LoxodromicReport(omega, alpha, m_omega, m_alpha, n)
        current = compose(g, current)
    logger.error(f"no loxodromic piece within {config.refinement_depth} powers")
    raise NoLoxodromicPieceError(
        f"No loxodromic piece with fixed points in its interval up to power {config.refinement_depth}")


def monomial_circle_map(B: IntMat2) -> MobiusMap:
    """Action t -> (c + d t)/(a + b t) of the monomial map with matrix B on the circle."""
    return MobiusMap(IntMat2(B.d, B.c, B.b, B.a))


def eigenvalue_ratio(B: IntMat2) -> QuadNumber:
    """|lambda_min / lambda_max| of a hyperbolic matrix."""
    low, high = eigenvalues(B)
    small, large = sorted((abs(low), abs(high)))
    return small / large
