"""
Weak Perron numbers of degree at most two and their realization as
spectral radii of nonnegative integer 2x2 matrices.

The set of such numbers is the dynamical spectrum of the torus, and of the
affine plane as well.
"""

from dataclasses import dataclass
from typing import Optional

from .config import Config, DEFAULT_CONFIG
from .errors import InfinityDynamicsError, NotPerronError, ParseError
from .exactnum import IntMat2, QuadNumber, quadratic_roots, spectral_radius
from .utils import setup_logger


logger = setup_logger(__name__)


@dataclass(frozen=True)
class QuadraticInteger:
    """
    Real algebraic integer of degree at most two.

    kind is "integer" (value n), "sqrt" (value sqrt(m)) or "root" (largest
    real root of T^2 - a T + b, kept with its defining pair even when the
    polynomial factors over Q).
    """
    kind: str
    a: int = 0
    b: int = 0

    def __post_init__(self):
        if self.kind not in ("integer", "sqrt", "root"):
            raise ParseError(f"Unknown quadratic integer kind: {self.kind}")
        if self.kind == "integer" and self.a < 1:
            raise NotPerronError(f"Integer {self.a} is below 1")
        if self.kind == "sqrt" and self.a < 0:
            raise ParseError(f"sqrt of negative integer {self.a}")
        if self.kind == "root" and self.a * self.a - 4 * self.b < 0:
            raise ParseError(f"T^2 - {self.a}T + {self.b} has no real root")

    @classmethod
    def integer(cls, n: int) -> "QuadraticInteger":
        return cls("integer", n)

    @classmethod
    def sqrt(cls, m: int) -> "QuadraticInteger":
        return cls("sqrt", m)

    @classmethod
    def root(cls, a: int, b: int) -> "QuadraticInteger":
        return cls("root", a, b)

    @classmethod
    def from_quad(cls, x: QuadNumber) -> "QuadraticInteger":
        """Recover the monic minimal polynomial of an exact quadratic number."""
        if x.is_rational:
            if x.p.denominator != 1:
                raise InfinityDynamicsError(f"{x} is not an algebraic integer")
            return cls.integer(int(x.p))
        trace = 2 * x.p
        norm = x.norm()
        if trace.denominator != 1 or norm.denominator != 1:
            raise InfinityDynamicsError(f"{x} is not an algebraic integer")
        if x.q < 0:
            raise NotPerronError(f"{x} is the smaller root of its minimal polynomial",
                                 conjugate=x.conjugate())
        return cls.root(int(trace), int(norm))

    @property
    def trace(self) -> int:
        if self.kind == "sqrt":
            return 0
        return self.a

    @property
    def norm(self) -> int:
        if self.kind == "sqrt":
            return -self.a
        return self.b

    def value(self) -> QuadNumber:
        if self.kind == "integer":
            return QuadNumber(self.a)
        if self.kind == "sqrt":
            return QuadNumber.sqrt(self.a)
        return quadratic_roots(1, -self.a, self.b)[1]

    def conjugate(self) -> Optional[QuadNumber]:
        """Galois conjugate, or None when the value is rational."""
        value = self.value()
        if value.is_rational:
            return None
        return value.conjugate()

    def __str__(self):
        if self.kind == "integer":
            return str(self.a)
        if self.kind == "sqrt":
            return f"√{self.a}"
        return f"root(T^2-{self.a}T+{self.b})"


def is_weak_perron(q: QuadraticInteger, config: Optional[Config] = None) -> bool:
    """
    Check |q'| <= q for the Galois conjugate q' of q (strict if configured).

    Args:
        q: Quadratic integer
        config: Configuration (strict_perron selects the classical notion)

    Returns:
        True if q is a (weak) Perron number at least 1
    """
    config = config or DEFAULT_CONFIG
    value = q.value()
    if value < 1:
        logger.debug(f"{q} = {value} is below 1")
        return False
    conj = q.conjugate()
    if conj is None:
        return True
    if config.strict_perron:
        return abs(conj) < value
    return abs(conj) <= value


def spectrum_membership(q: QuadraticInteger, config: Optional[Config] = None) -> bool:
    """Membership in the dynamical spectrum of the plane (equal to that of the torus)."""
    return is_weak_perron(q, config)


def realize_as_matrix(q: QuadraticInteger, config: Optional[Config] = None) -> IntMat2:
    """
    Build a nonnegative integer matrix whose spectral radius is q.

    Args:
        q: Weak Perron quadratic integer

    Returns:
        IntMat2 with nonnegative entries
    """
    if not is_weak_perron(q, config):
        conj = q.conjugate()
        logger.error(f"{q} is not weak Perron (conjugate {conj})")
        raise NotPerronError(f"{q} is not a weak Perron number (conjugate {conj})",
                             conjugate=conj)

    if q.kind == "integer":
        matrix = IntMat2(q.a, 0, 0, 1)
    elif q.kind == "sqrt":
        matrix = IntMat2(0, 1, q.a, 0)
    else:
        a, b = q.a, q.b
        if b == 0:
            matrix = IntMat2(a, 0, 0, 1)
        elif b < 0:
            matrix = IntMat2(a, 1, -b, 0)
        elif a % 2 == 0:
            k = a // 2
            matrix = IntMat2(k, 1, k * k - b, k)
        else:
            k = (a - 1) // 2
            matrix = IntMat2(k, 1, k * (k + 1) - b, k + 1)
        if not matrix.is_nonnegative() and q.value().is_rational:
            # reducible polynomial with a negative trace: its largest root is an integer
            matrix = IntMat2(int(q.value().p), 0, 0, 1)

    if not matrix.is_nonnegative() or spectral_radius(matrix) != q.value():
        raise InfinityDynamicsError(f"Realization of {q} failed: {matrix}")
    logger.debug(f"realize_as_matrix({q}) = {matrix}")
    return matrix
