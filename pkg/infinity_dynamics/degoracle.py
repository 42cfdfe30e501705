"""
Degree growth of polynomial endomorphisms of the affine plane.

Iterates are composed symbolically over QQ with sympy's sparse polynomial
rings; total degrees give an independent estimate of the first dynamical
degree.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

import mpmath
import pandas as pd
import sympy
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from .config import Config, DEFAULT_CONFIG
from .errors import InfinityDynamicsError, ParseError, TermCapExceeded
from .exactnum import IntMat2
from .utils import setup_logger


logger = setup_logger(__name__)

DEFAULT_VARIABLES = (("x", "y"), ("u", "v"))


class PolyMap:
    """Polynomial map (P, Q) of the affine plane with rational coefficients."""

    def __init__(self, components: Sequence, variables: Sequence[str] = ("x", "y")):
        if len(variables) != 2:
            raise InfinityDynamicsError("A plane map needs exactly two variables")
        self.variables = tuple(str(v) for v in variables)
        self.ring, *self.gens = ring(",".join(self.variables), QQ)
        try:
            self.components = tuple(c if getattr(c, "ring", None) == self.ring
                                    else self.ring.from_expr(sympy.sympify(c)) for c in components)
        except (sympy.SympifyError, ValueError, TypeError) as e:
            raise ParseError(f"Cannot read map components {components!r}: {e}") from e
        if len(self.components) != 2:
            raise InfinityDynamicsError("A plane map has exactly two components")
        if any(not c for c in self.components):
            raise InfinityDynamicsError("Map components must not vanish identically")

    @classmethod
    def parse(cls, text: str) -> "PolyMap":
        """Read "x^2, y^3" or "u*v, 2*v^2-1"."""
        parts = [part.strip() for part in text.replace("^", "**").split(",")]
        if len(parts) != 2 or not all(parts):
            raise ParseError(f"Map literal needs two comma separated components: {text!r}")
        try:
            exprs = [sympy.sympify(part) for part in parts]
        except sympy.SympifyError as e:
            raise ParseError(f"Cannot parse map literal {text!r}: {e}") from e
        names = {str(s) for e in exprs for s in e.free_symbols}
        for candidate in DEFAULT_VARIABLES:
            if names <= set(candidate):
                return cls(exprs, candidate)
        if len(names) == 2:
            return cls(exprs, sorted(names))
        raise ParseError(f"Map literal {text!r} must use two variables, got {sorted(names)}")

    @classmethod
    def monomial(cls, A: IntMat2, variables: Sequence[str] = ("x", "y")) -> "PolyMap":
        """(x^a y^b, x^c y^d) for A = [[a, b], [c, d]]."""
        if not A.is_nonnegative():
            raise InfinityDynamicsError(f"Polynomial monomial map needs a nonnegative matrix, got {A}")
        result = cls.__new__(cls)
        result.variables = tuple(variables)
        result.ring, x, y = ring(",".join(result.variables), QQ)
        result.gens = [x, y]
        result.components = (x ** A.a * y ** A.b, x ** A.c * y ** A.d)
        return result

    @property
    def degree(self) -> int:
        return max(total_degree(c) for c in self.components)

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.components)

    def compose(self, other: "PolyMap", term_cap: Optional[int] = None) -> "PolyMap":
        """self o other."""
        if other.variables != self.variables:
            raise InfinityDynamicsError("Composed maps must share their variables")
        first, second = other.components
        powers = ({0: self.ring.one}, {0: self.ring.one})
        components = tuple(_substitute(c, first, second, powers, term_cap) for c in self.components)
        result = PolyMap.__new__(PolyMap)
        result.variables, result.ring, result.gens = self.variables, self.ring, self.gens
        result.components = components
        return result

    def __str__(self):
        return ", ".join(str(c.as_expr()) for c in self.components)

    def __repr__(self):
        return f"PolyMap({self})"


def total_degree(p) -> int:
    return max((sum(m) for m in p.itermonoms()), default=0)


def _power(cache: Dict[int, object], base, k: int):
    if k not in cache:
        nearest = max(e for e in cache if e <= k)
        value = cache[nearest]
        for e in range(nearest + 1, k + 1):
            value = value * base
            cache[e] = value
    return cache[k]


def _substitute(p, first, second, powers, term_cap: Optional[int]):
    result = p.ring.zero
    for (i, j), coeff in p.terms():
        result += _power(powers[0], first, i) * _power(powers[1], second, j) * coeff
        if term_cap is not None and len(result) > term_cap:
            raise TermCapExceeded(f"Intermediate polynomial has {len(result)} terms (cap {term_cap})")
    return result


@dataclass
class DegreeSequence:
    degrees: List[int]
    capped: bool = False
    map_text: str = ""


def iterate_degrees(f: PolyMap, n: Optional[int] = None, config: Optional[Config] = None) -> DegreeSequence:
    """
    Total degrees of f, f^2, ..., f^n.

    Args:
        f: Polynomial map
        n: Number of iterates (default config.degree_iterations, at most 12)
        config: Configuration (term_cap)

    Returns:
        DegreeSequence, flagged as capped when the term cap stopped the iteration
    """
    config = config or DEFAULT_CONFIG
    n = n or config.degree_iterations
    if not 1 <= n <= 12:
        raise InfinityDynamicsError(f"Iteration count must be between 1 and 12, got {n}")
    degrees = [f.degree]
    current = f
    for k in range(2, n + 1):
        try:
            current = f.compose(current, config.term_cap)
        except TermCapExceeded as e:
            logger.warning(f"degree iteration of {f} stopped at k={k}: {e}")
            return DegreeSequence(degrees, capped=True, map_text=str(f))
        degrees.append(current.degree)
        logger.debug(f"deg f^{k} = {degrees[-1]} ({current.size} terms)")
    logger.info(f"degrees of {f}: {degrees}")
    return DegreeSequence(degrees, map_text=str(f))


@dataclass
class Lambda1Estimate:
    ratio: Fraction
    root: object
    smoothed: Fraction
    ratios: List[Fraction] = field(default_factory=list)
    ratios_monotone: bool = True

    def to_json(self) -> dict:
        return {"ratio": str(self.ratio), "root": mpmath.nstr(self.root, 15),
                "smoothed": str(self.smoothed), "ratios": [str(r) for r in self.ratios],
                "ratios_monotone": self.ratios_monotone}


def lambda1_estimate(degrees: Sequence[int], digits: int = 30) -> Lambda1Estimate:
    """
    Last ratio deg f^{k+1}/deg f^k, k-th root (deg f^k)^{1/k} and the
    Cesaro mean of the second half of the ratios.
    """
    degrees = list(degrees)
    if len(degrees) < 3:
        raise InfinityDynamicsError("lambda1_estimate needs at least three degrees")
    if any(d <= 0 for d in degrees):
        raise InfinityDynamicsError("Degrees must be positive")
    ratios = [Fraction(b, a) for a, b in zip(degrees, degrees[1:])]
    tail = ratios[len(ratios) // 2:]
    with mpmath.workdps(digits):
        root = mpmath.root(degrees[-1], len(degrees))
    increasing = all(a <= b for a, b in zip(ratios, ratios[1:]))
    decreasing = all(a >= b for a, b in zip(ratios, ratios[1:]))
    return Lambda1Estimate(ratio=ratios[-1], root=root, smoothed=sum(tail, Fraction(0)) / len(tail),
                           ratios=ratios, ratios_monotone=increasing or decreasing)


def monomial_degree_oracle(A: IntMat2, n: int) -> List[int]:
    """deg f^k of the monomial map of A, for k = 1..n: the largest row sum of A^k."""
    if not A.is_nonnegative():
        raise InfinityDynamicsError(f"Monomial degree oracle needs a nonnegative matrix, got {A}")
    degrees, power = [], IntMat2.identity()
    for _ in range(n):
        power = power @ A
        degrees.append(power.max_row_sum())
    return degrees


def degree_table(maps: Mapping[str, PolyMap], n: Optional[int] = None,
                 config: Optional[Config] = None) -> pd.DataFrame:
    """One row per (map, k) with degree and consecutive ratio."""
    rows = []
    for name, f in maps.items():
        sequence = iterate_degrees(f, n, config)
        previous = None
        for k, degree in enumerate(sequence.degrees, start=1):
            ratio = str(Fraction(degree, previous)) if previous else ""
            rows.append({"map": name, "k": k, "degree": degree, "ratio": ratio, "capped": sequence.capped})
            previous = degree
    return pd.DataFrame(rows, columns=["map", "k", "degree", "ratio", "capped"])
