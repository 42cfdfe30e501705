"""
Exact arithmetic foundation: real quadratic numbers, 2x2 integer matrices
and Mobius transformations on the rational projective line.

Rationals are plain ``fractions.Fraction`` values. ``QuadNumber`` is
p + q*sqrt(d) with a square-free d fixed per value.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Optional, Tuple, Union

import mpmath
import sympy

from .errors import DegenerateMatrixError, InfinityDynamicsError, MixedFieldError, ParseError
from .utils import fraction_str, setup_logger


logger = setup_logger(__name__)

RationalLike = Union[int, Fraction]


class _Infinity:
    """The point at infinity of the projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


@lru_cache(maxsize=4096)
def square_free_decomposition(n: int) -> Tuple[int, int]:
    """
    Write a nonnegative integer as f**2 * m with m square-free.

    Args:
        n: Nonnegative integer

    Returns:
        Tuple (f, m)
    """
    if n < 0:
        raise InfinityDynamicsError(f"square_free_decomposition expects n >= 0, got {n}")
    if n == 0:
        return 0, 0
    f, m = 1, 1
    for prime, power in sympy.factorint(n).items():
        f *= prime ** (power // 2)
        if power % 2:
            m *= prime
    return f, m


@total_ordering
class QuadNumber:
    """
    Exact real number p + q*sqrt(d) with p, q rational and d square-free.

    d = 0 encodes a pure rational (and forces q = 0). Arithmetic between
    two values with q != 0 and different d raises MixedFieldError.
    """

    __slots__ = ("p", "q", "d")

    def __init__(self, p: RationalLike = 0, q: RationalLike = 0, d: int = 0):
        p = Fraction(p)
        q = Fraction(q)
        d = int(d)
        if d < 0:
            raise InfinityDynamicsError(f"QuadNumber requires d >= 0, got {d}")
        f, m = square_free_decomposition(d)
        q = q * f
        if m == 1:
            p, q, m = p + q, Fraction(0), 0
        if q == 0 or m == 0:
            q, m = Fraction(0), 0
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "d", m)

    def __setattr__(self, key, value):
        raise AttributeError("QuadNumber is immutable")

    @classmethod
    def sqrt(cls, value: RationalLike) -> "QuadNumber":
        """Exact square root of a nonnegative rational."""
        value = Fraction(value)
        if value < 0:
            raise InfinityDynamicsError(f"sqrt of negative rational {value}")
        # sqrt(a/b) = sqrt(a*b)/b
        return cls(0, Fraction(1, value.denominator), value.numerator * value.denominator)

    @classmethod
    def coerce(cls, value) -> "QuadNumber":
        if isinstance(value, QuadNumber):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        raise TypeError(f"Cannot coerce {type(value).__name__} to QuadNumber")

    # -- field bookkeeping -------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def _common_d(self, other: "QuadNumber") -> int:
        if self.d == 0:
            return other.d
        if other.d == 0 or other.d == self.d:
            return self.d
        raise MixedFieldError(f"Cannot combine values of Q(sqrt {self.d}) and Q(sqrt {other.d})")

    def conjugate(self) -> "QuadNumber":
        return QuadNumber(self.p, -self.q, self.d)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.d

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise InfinityDynamicsError(f"{self} is irrational")
        return self.p

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        try:
            other = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._common_d(other)
        return QuadNumber(self.p + other.p, self.q + other.q, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadNumber(-self.p, -self.q, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            other = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return QuadNumber.coerce(other) - self

    def __mul__(self, other):
        try:
            other = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._common_d(other)
        p = self.p * other.p + self.q * other.q * d
        q = self.p * other.q + self.q * other.p
        return QuadNumber(p, q, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        if other == 0:
            raise ZeroDivisionError("QuadNumber division by zero")
        self._common_d(other)
        numerator = self * other.conjugate()
        n = other.norm()
        return QuadNumber(numerator.p / n, numerator.q / n, numerator.d)

    def __rtruediv__(self, other):
        return QuadNumber.coerce(other) / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return QuadNumber(1) / (self ** (-exponent))
        result = QuadNumber(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- order -------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of p + q*sqrt(d)."""
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: compare p^2 with q^2 d
        diff = self.p * self.p - self.q * self.q * self.d
        s = (diff > 0) - (diff < 0)
        return sp * s

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.q == 0 and self.p == other
        if not isinstance(other, QuadNumber):
            return NotImplemented
        return self.p == other.p and self.q == other.q and self.d == other.d

    def __lt__(self, other):
        try:
            other = QuadNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q, self.d))

    def __bool__(self):
        return not (self.p == 0 and self.q == 0)

    # -- conversions -------------------------------------------------------

    def to_mpf(self, digits: int = 50):
        """Decimal value with the given number of significant digits."""
        with mpmath.workdps(digits + 10):
            value = mpmath.mpf(self.p.numerator) / self.p.denominator
            if self.q:
                value += mpmath.mpf(self.q.numerator) / self.q.denominator * mpmath.sqrt(self.d)
            return +value

    def __float__(self):
        return float(self.to_mpf(20))

    def to_json(self) -> dict:
        return {"p": fraction_str(self.p), "q": fraction_str(self.q), "d": str(self.d)}

    @classmethod
    def from_json(cls, payload) -> "QuadNumber":
        if isinstance(payload, (int, str)):
            return cls(Fraction(str(payload)))
        try:
            return cls(Fraction(str(payload["p"])), Fraction(str(payload.get("q", "0"))),
                       int(payload.get("d", 0)))
        except (KeyError, ValueError, TypeError) as e:
            raise ParseError(f"Invalid QuadNumber payload: {payload!r}") from e

    def __str__(self):
        if self.q == 0:
            return fraction_str(self.p)
        q_abs = abs(self.q)
        root = f"√{self.d}" if q_abs == 1 else f"{fraction_str(q_abs)}√{self.d}"
        if self.p == 0:
            return root if self.q > 0 else f"-{root}"
        op = "+" if self.q > 0 else "-"
        return f"{fraction_str(self.p)}{op}{root}"

    def __repr__(self):
        return f"QuadNumber({self})"


Point = Union[Fraction, QuadNumber, _Infinity]


def as_point(value) -> Point:
    """Coerce ints and finite rationals to Fraction, keep INF and QuadNumber."""
    if value is INF:
        return INF
    if isinstance(value, QuadNumber):
        return value.p if value.is_rational else value
    return Fraction(value)


def quadratic_roots(a: RationalLike, b: RationalLike, c: RationalLike) -> Tuple[QuadNumber, QuadNumber]:
    """
    Real roots of a*x^2 + b*x + c, smaller first.

    Args:
        a, b, c: Rational coefficients, a != 0

    Returns:
        The two roots (equal for a double root)
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a == 0:
        raise InfinityDynamicsError("quadratic_roots requires a nonzero leading coefficient")
    disc = b * b - 4 * a * c
    if disc < 0:
        raise InfinityDynamicsError(f"No real roots: discriminant {disc} < 0")
    root = QuadNumber.sqrt(disc)
    r1 = (QuadNumber(-b) - root) / (2 * a)
    r2 = (QuadNumber(-b) + root) / (2 * a)
    return (r1, r2) if r1 <= r2 else (r2, r1)


@dataclass(frozen=True)
class IntMat2:
    """2x2 integer matrix [[a, b], [c, d]]."""
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                if isinstance(value, Fraction) and value.denominator == 1:
                    object.__setattr__(self, name, int(value))
                else:
                    raise InfinityDynamicsError(f"IntMat2 entry {name}={value!r} is not an integer")

    @classmethod
    def from_rows(cls, rows) -> "IntMat2":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @classmethod
    def identity(cls) -> "IntMat2":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def is_nonnegative(self) -> bool:
        return min(self.a, self.b, self.c, self.d) >= 0

    def __matmul__(self, other: "IntMat2") -> "IntMat2":
        return IntMat2(self.a * other.a + self.b * other.c,
                       self.a * other.b + self.b * other.d,
                       self.c * other.a + self.d * other.c,
                       self.c * other.b + self.d * other.d)

    def __pow__(self, n: int) -> "IntMat2":
        if n < 0:
            raise InfinityDynamicsError("Negative powers of IntMat2 are not integral in general")
        result, base = IntMat2.identity(), self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def __neg__(self) -> "IntMat2":
        return IntMat2(-self.a, -self.b, -self.c, -self.d)

    def adjugate(self) -> "IntMat2":
        return IntMat2(self.d, -self.b, -self.c, self.a)

    def transpose(self) -> "IntMat2":
        return IntMat2(self.a, self.c, self.b, self.d)

    def apply(self, s, t):
        """Column action (s, t) -> (a s + b t, c s + d t)."""
        return self.a * s + self.b * t, self.c * s + self.d * t

    def max_row_sum(self) -> int:
        return max(self.a + self.b, self.c + self.d)

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


def eigenvalues(A: IntMat2) -> Tuple[QuadNumber, QuadNumber]:
    """Both real roots of T^2 - Tr(A) T + det(A), smaller first."""
    return quadratic_roots(1, -A.trace, A.det)


def spectral_radius(A: IntMat2) -> QuadNumber:
    """
    Perron root of a nonnegative matrix: the largest root of
    T^2 - Tr T + det, which dominates the other root in modulus.

    Args:
        A: Nonnegative integer matrix with nonzero determinant

    Returns:
        Exact spectral radius as a QuadNumber
    """
    if not A.is_nonnegative():
        raise ParseError(f"spectral_radius requires nonnegative entries, got {A}")
    if A.det == 0:
        raise DegenerateMatrixError(f"spectral_radius requires det != 0, got {A}")
    _, result = eigenvalues(A)
    logger.debug(f"spectral_radius({A}) = {result}")
    return result


def characteristic_report(A: IntMat2) -> dict:
    """Spectral radius with the characteristic polynomial and its factorization over Q."""
    lam = spectral_radius(A)
    T = sympy.Symbol("T")
    charpoly = T ** 2 - A.trace * T + A.det
    return {"lambda1": lam.to_json(), "lambda1_text": str(lam), "charpoly": str(charpoly),
            "factorization": str(sympy.factor(charpoly))}


def satisfies_char_poly(A: IntMat2, value: QuadNumber) -> bool:
    return value * value - A.trace * value + A.det == 0


@dataclass(frozen=True)
class MobiusAnalysis:
    """Classification of a Mobius map with exact fixed-point data."""
    kind: str
    fixed_points: Tuple[Point, ...]
    attracting: Optional[Point] = None
    repelling: Optional[Point] = None
    multiplier: Optional[QuadNumber] = None


class MobiusMap:
    """
    Integral Mobius map t -> (a t + b)/(c t + d) on Q u {inf}.

    Matrices are compared up to a nonzero scalar (PGL2 semantics).
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix: Union[IntMat2, Tuple]):
        if not isinstance(matrix, IntMat2):
            matrix = IntMat2.from_rows(matrix)
        if matrix.det == 0:
            raise DegenerateMatrixError(f"Mobius map needs det != 0, got {matrix}")
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, key, value):
        raise AttributeError("MobiusMap is immutable")

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(IntMat2.identity())

    def _normalized(self) -> Tuple[int, int, int, int]:
        m = self.matrix
        entries = (m.a, m.b, m.c, m.d)
        g = 0
        for e in entries:
            g = math.gcd(g, e)
        first = next(e for e in entries if e != 0)
        sign = 1 if first > 0 else -1
        return tuple(sign * e // g for e in entries)

    def __eq__(self, other):
        if not isinstance(other, MobiusMap):
            return NotImplemented
        return self._normalized() == other._normalized()

    def __hash__(self):
        return hash(self._normalized())

    def is_identity(self) -> bool:
        return self._normalized() == (1, 0, 0, 1)

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap(self.matrix @ other.matrix)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.matrix.adjugate())

    @property
    def orientation(self) -> int:
        """+1 if orientation preserving on the real circle, -1 otherwise."""
        return 1 if self.matrix.det > 0 else -1

    def __call__(self, t) -> Point:
        return mobius_apply(self, t)

    def derivative(self, t) -> QuadNumber:
        """Derivative at a finite point, or in the 1/t chart at a fixed infinity."""
        m = self.matrix
        if t is INF:
            if m.c != 0:
                raise InfinityDynamicsError("Derivative at inf only defined when inf is fixed")
            return QuadNumber(Fraction(m.d, m.a))
        denom = m.c * QuadNumber.coerce(t) + m.d
        return QuadNumber(m.det) / (denom * denom)

    def fixed_points(self) -> Tuple[Point, ...]:
        m = self.matrix
        if m.c == 0:
            if m.a == m.d:
                if m.b == 0:
                    raise InfinityDynamicsError("Identity map fixes every point")
                return (INF,)
            return (Fraction(m.b, m.d - m.a), INF)
        disc = (m.d - m.a) ** 2 + 4 * m.b * m.c
        if disc < 0:
            return ()
        roots = quadratic_roots(m.c, m.d - m.a, -m.b)
        return tuple(as_point(r) for r in dict.fromkeys(roots))

    def __repr__(self):
        return f"MobiusMap({self.matrix})"


def mobius_apply(M: MobiusMap, t) -> Point:
    """
    Evaluate (a t + b)/(c t + d) with the usual conventions at infinity.

    Args:
        M: Mobius map
        t: Fraction, int, QuadNumber or INF

    Returns:
        Image point
    """
    m = M.matrix
    if t is INF:
        if m.c == 0:
            return INF
        return Fraction(m.a, m.c)
    if isinstance(t, QuadNumber) and not t.is_rational:
        denom = m.c * t + m.d
        if denom == 0:
            return INF
        return as_point((m.a * t + m.b) / denom)
    t = Fraction(t.p if isinstance(t, QuadNumber) else t)
    denom = m.c * t + m.d
    if denom == 0:
        return INF
    return (m.a * t + m.b) / denom


def mobius_classify(M: MobiusMap) -> MobiusAnalysis:
    """
    Classify by Tr^2 against 4 det and report exact fixed-point data.

    Returns:
        MobiusAnalysis with kind in {elliptic, parabolic, loxodromic}
    """
    m = M.matrix
    if m.det == 0:
        raise DegenerateMatrixError(f"Cannot classify degenerate matrix {m}")
    delta = m.trace ** 2 - 4 * m.det
    if delta < 0:
        return MobiusAnalysis(kind="elliptic", fixed_points=())
    if M.is_identity():
        return MobiusAnalysis(kind="parabolic", fixed_points=())
    points = M.fixed_points()
    if delta == 0:
        return MobiusAnalysis(kind="parabolic", fixed_points=points)
    derivs = [(p, M.derivative(p)) for p in points]
    derivs.sort(key=lambda pair: abs(pair[1]))
    (att, mult), (rep, _) = derivs[0], derivs[-1]
    return MobiusAnalysis(kind="loxodromic", fixed_points=points, attracting=att,
                          repelling=rep, multiplier=abs(mult))
