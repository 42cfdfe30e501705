"""
Completions of an affine surface seen through their boundary: dual graphs
with exact self-intersections, blow-ups and Castelnuovo contractions,
divisors at infinity with pullback/pushforward, dual divisors and the
meet/join of Cartier divisors.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx
import pandas as pd
import sympy
import yaml

from .config import Config, DEFAULT_CONFIG
from .errors import (ContractionError, DegenerateFormError, InfinityDynamicsError,
                     InvalidCenterError, ParseError, UnknownDivisorError)
from .utils import fraction_str, graph_to_dot, load_json, setup_logger


logger = setup_logger(__name__)


GENUS_TAGS = {0: "rational", 1: "elliptic"}


@dataclass(frozen=True)
class PrimeDivisor:
    """Boundary prime divisor."""
    name: str
    self_int: int
    genus: int = 0

    @property
    def kind(self) -> str:
        return GENUS_TAGS.get(self.genus, "other")


@dataclass(frozen=True)
class FreePoint:
    """Point lying on exactly one boundary divisor."""
    divisor: str


@dataclass(frozen=True)
class SatellitePoint:
    """Crossing point of two boundary divisors."""
    first: str
    second: str


Center = Union[FreePoint, SatellitePoint]


@dataclass(frozen=True)
class HistoryRecord:
    """
    One step between completions: a blow-up creating `divisor` above the
    given hosts, or a contraction removing `divisor` whose neighbors were
    `hosts`.
    """
    kind: str
    divisor: str
    hosts: Tuple[str, ...]


class DivisorAtInfinity:
    """Formal rational combination of boundary prime divisors."""

    __slots__ = ("_coefficients",)

    def __init__(self, coefficients: Optional[Mapping[str, object]] = None):
        clean = {}
        for name, value in (coefficients or {}).items():
            value = Fraction(value)
            if value != 0:
                clean[name] = value
        object.__setattr__(self, "_coefficients", dict(sorted(clean.items())))

    def __setattr__(self, key, value):
        raise AttributeError("DivisorAtInfinity is immutable")

    @classmethod
    def prime(cls, name: str, coefficient=1) -> "DivisorAtInfinity":
        return cls({name: coefficient})

    @property
    def coefficients(self) -> Dict[str, Fraction]:
        return dict(self._coefficients)

    def coef(self, name: str) -> Fraction:
        return self._coefficients.get(name, Fraction(0))

    def support(self) -> List[str]:
        return list(self._coefficients)

    def is_effective(self) -> bool:
        return all(v >= 0 for v in self._coefficients.values())

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self._coefficients.values())

    def common_denominator(self) -> int:
        return reduce(lcm, (v.denominator for v in self._coefficients.values()), 1)

    def __add__(self, other: "DivisorAtInfinity") -> "DivisorAtInfinity":
        names = set(self._coefficients) | set(other._coefficients)
        return DivisorAtInfinity({n: self.coef(n) + other.coef(n) for n in names})

    def __neg__(self) -> "DivisorAtInfinity":
        return DivisorAtInfinity({n: -v for n, v in self._coefficients.items()})

    def __sub__(self, other: "DivisorAtInfinity") -> "DivisorAtInfinity":
        return self + (-other)

    def __rmul__(self, scalar) -> "DivisorAtInfinity":
        scalar = Fraction(scalar)
        return DivisorAtInfinity({n: scalar * v for n, v in self._coefficients.items()})

    def __eq__(self, other):
        if not isinstance(other, DivisorAtInfinity):
            return NotImplemented
        return self._coefficients == other._coefficients

    def __hash__(self):
        return hash(tuple(self._coefficients.items()))

    def to_dict(self) -> Dict[str, str]:
        return {n: fraction_str(v) for n, v in self._coefficients.items()}

    @classmethod
    def parse(cls, text: str) -> "DivisorAtInfinity":
        """Parse "2*E + F - 1/2*G" or "E=2,F=1"."""
        text = text.replace(" ", "")
        if not text or text == "0":
            return cls()
        coefficients: Dict[str, Fraction] = {}
        try:
            if "=" in text:
                for part in text.split(","):
                    name, value = part.split("=", 1)
                    coefficients[name] = coefficients.get(name, Fraction(0)) + Fraction(value)
                return cls(coefficients)
            for term in text.replace("-", "+-").split("+"):
                if not term:
                    continue
                sign = -1 if term.startswith("-") else 1
                term = term.lstrip("-")
                if "*" in term:
                    value, name = term.split("*", 1)
                    value = Fraction(value)
                else:
                    value, name = Fraction(1), term
                coefficients[name] = coefficients.get(name, Fraction(0)) + sign * value
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"Invalid divisor literal: {text!r}") from e
        return cls(coefficients)

    def __str__(self):
        if not self._coefficients:
            return "0"
        parts = []
        for name, value in self._coefficients.items():
            parts.append(name if value == 1 else f"{fraction_str(value)}*{name}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"DivisorAtInfinity({self})"


class Completion:
    """
    Boundary of a completion: named prime divisors, simple normal
    crossings and the history of blow-ups and contractions that produced it.

    Completions are persistent: blow_up and contract return new objects.
    """

    def __init__(self, divisors: Iterable[PrimeDivisor],
                 crossings: Iterable[Iterable[str]],
                 history: Tuple[HistoryRecord, ...] = (),
                 check_connected: bool = True):
        self.divisors: Tuple[PrimeDivisor, ...] = tuple(divisors)
        self._index = {d.name: i for i, d in enumerate(self.divisors)}
        if len(self._index) != len(self.divisors):
            raise ParseError("Duplicate divisor names in completion")
        pairs = set()
        for pair in crossings:
            a, b = tuple(pair)
            if a == b:
                raise ParseError(f"Self-crossing of {a} is not simple normal crossing")
            for name in (a, b):
                if name not in self._index:
                    raise UnknownDivisorError(f"Crossing references unknown divisor {name!r}")
            pairs.add(frozenset((a, b)))
        self.crossings = frozenset(pairs)
        self.history = tuple(history)
        if check_connected and self.divisors and not nx.is_connected(self.dual_graph()):
            raise InfinityDynamicsError("Boundary dual graph must be connected")

    # -- queries -----------------------------------------------------------

    @property
    def names(self) -> List[str]:
        return [d.name for d in self.divisors]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.divisors)

    def divisor(self, name: str) -> PrimeDivisor:
        try:
            return self.divisors[self._index[name]]
        except KeyError:
            raise UnknownDivisorError(f"Unknown divisor {name!r}") from None

    def self_int(self, name: str) -> int:
        return self.divisor(name).self_int

    def crosses(self, first: str, second: str) -> bool:
        return frozenset((first, second)) in self.crossings

    def neighbors(self, name: str) -> List[str]:
        self.divisor(name)
        return sorted(other for pair in self.crossings if name in pair
                      for other in pair if other != name)

    def crossing_pairs(self) -> List[Tuple[str, str]]:
        return sorted(tuple(sorted(pair)) for pair in self.crossings)

    def dual_graph(self) -> nx.Graph:
        graph = nx.Graph()
        for d in self.divisors:
            graph.add_node(d.name, self_int=d.self_int, genus=d.genus,
                           label=f"{d.name} ({d.self_int})")
        graph.add_edges_from(tuple(pair) for pair in self.crossings)
        return graph

    def same_boundary(self, other: "Completion") -> bool:
        """Equality of divisors and crossings, ignoring history."""
        return (sorted(self.divisors, key=lambda d: d.name) == sorted(other.divisors, key=lambda d: d.name)
                and self.crossings == other.crossings)

    def _fresh_name(self) -> str:
        index = len(self.history) + 1
        while f"Ex{index}" in self._index:
            index += 1
        return f"Ex{index}"

    # -- moves -------------------------------------------------------------

    def blow_up(self, center: Center, name: Optional[str] = None) -> Tuple["Completion", str]:
        """
        Blow up a free or satellite boundary point.

        Args:
            center: FreePoint or SatellitePoint
            name: Optional name of the exceptional divisor

        Returns:
            Tuple (new completion, exceptional divisor name)
        """
        name = name or self._fresh_name()
        if name in self._index:
            raise InvalidCenterError(f"Divisor name {name!r} already in use")
        if isinstance(center, FreePoint):
            hosts = (center.divisor,)
            self.divisor(center.divisor)
            crossings = set(self.crossings) | {frozenset((center.divisor, name))}
        elif isinstance(center, SatellitePoint):
            hosts = (center.first, center.second)
            if not self.crosses(*hosts):
                raise InvalidCenterError(f"{center.first} and {center.second} do not cross")
            crossings = set(self.crossings) - {frozenset(hosts)}
            crossings |= {frozenset((h, name)) for h in hosts}
        else:
            raise InvalidCenterError(f"Unknown center {center!r}")

        divisors = [PrimeDivisor(d.name, d.self_int - 1, d.genus) if d.name in hosts else d
                    for d in self.divisors]
        divisors.append(PrimeDivisor(name, -1, 0))
        record = HistoryRecord("blowup", name, hosts)
        logger.debug(f"blow-up at {'/'.join(hosts)} -> {name}")
        return Completion(divisors, crossings, self.history + (record,)), name

    def contract(self, name: str) -> "Completion":
        """
        Castelnuovo contraction of a (-1)-curve with at most two neighbors.

        Args:
            name: Divisor to contract

        Returns:
            New completion
        """
        target = self.divisor(name)
        if target.self_int != -1:
            raise ContractionError(f"{name} has self-intersection {target.self_int}, not -1")
        if target.genus != 0:
            raise ContractionError(f"{name} is not a rational curve")
        hosts = tuple(self.neighbors(name))
        if len(hosts) > 2:
            raise ContractionError(f"Contracting {name} would create a point on {len(hosts)} boundary curves")
        if len(hosts) == 2 and self.crosses(*hosts):
            raise ContractionError(f"Contracting {name} would make {hosts[0]} and {hosts[1]} cross twice")
        if len(self.divisors) == 1:
            raise ContractionError("Cannot contract the whole boundary")

        crossings = {pair for pair in self.crossings if name not in pair}
        if len(hosts) == 2:
            crossings.add(frozenset(hosts))
        divisors = [PrimeDivisor(d.name, d.self_int + 1, d.genus) if d.name in hosts else d
                    for d in self.divisors if d.name != name]
        record = HistoryRecord("contraction", name, hosts)
        logger.debug(f"contract {name} (neighbors {hosts})")
        return Completion(divisors, crossings, self.history + (record,))

    # -- intersection theory -----------------------------------------------

    def intersection_matrix(self) -> sympy.Matrix:
        """Symmetric integer matrix in divisor order."""
        size = len(self.divisors)
        matrix = sympy.zeros(size, size)
        for i, d in enumerate(self.divisors):
            matrix[i, i] = d.self_int
        for pair in self.crossings:
            a, b = tuple(pair)
            matrix[self._index[a], self._index[b]] = 1
            matrix[self._index[b], self._index[a]] = 1
        return matrix

    def is_nondegenerate(self) -> bool:
        return self.intersection_matrix().det() != 0

    def _check_nondegenerate(self) -> sympy.Matrix:
        matrix = self.intersection_matrix()
        if matrix.det() == 0:
            kernel = matrix.nullspace()[0]
            vector = [sympy_to_fraction(x) for x in kernel]
            logger.error(f"degenerate intersection form, kernel {vector}")
            raise DegenerateFormError("Intersection form on the boundary is degenerate", kernel=vector)
        return matrix

    def inverse_matrix(self) -> sympy.Matrix:
        return self._check_nondegenerate().inv()

    def dual_divisor(self, name: str) -> DivisorAtInfinity:
        """
        The divisor Z with Z.F = 1 if F = name and 0 for other boundary F.
        """
        matrix = self._check_nondegenerate()
        rhs = sympy.zeros(len(self.divisors), 1)
        self.divisor(name)
        rhs[self._index[name], 0] = 1
        solution = matrix.LUsolve(rhs)
        return DivisorAtInfinity({d.name: sympy_to_fraction(solution[i, 0])
                                  for i, d in enumerate(self.divisors)})

    def intersect(self, first: DivisorAtInfinity, second: DivisorAtInfinity) -> Fraction:
        """Intersection number of two divisors at infinity."""
        self._check_support(first)
        self._check_support(second)
        total = Fraction(0)
        for a, x in first.coefficients.items():
            for b, y in second.coefficients.items():
                if a == b:
                    total += x * y * self.self_int(a)
                elif self.crosses(a, b):
                    total += x * y
        return total

    def _check_support(self, divisor: DivisorAtInfinity) -> None:
        for name in divisor.support():
            if name not in self._index:
                raise UnknownDivisorError(f"Divisor {name!r} is not on this completion")

    def matrix_frame(self) -> pd.DataFrame:
        """Intersection matrix as a labelled table."""
        matrix = self.intersection_matrix()
        rows = [[int(matrix[i, j]) for j in range(len(self.divisors))]
                for i in range(len(self.divisors))]
        frame = pd.DataFrame(rows, columns=self.names)
        frame.insert(0, "divisor", self.names)
        return frame

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "divisors": [{"name": d.name, "self_int": d.self_int, "genus": d.genus}
                         for d in self.divisors],
            "crossings": [list(pair) for pair in self.crossing_pairs()],
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "Completion":
        try:
            divisors = [PrimeDivisor(str(d["name"]), int(d["self_int"]), int(d.get("genus", 0)))
                        for d in payload["divisors"]]
            crossings = [tuple(pair) for pair in payload.get("crossings", [])]
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"Invalid boundary payload: {e}") from e
        for pair in crossings:
            if len(pair) != 2:
                raise ParseError(f"Crossing must name two divisors: {pair}")
        return cls(divisors, crossings)

    def to_dot(self) -> str:
        return graph_to_dot(self.dual_graph(), name="boundary")

    def __repr__(self):
        body = ", ".join(f"{d.name}:{d.self_int}" for d in self.divisors)
        return f"Completion({body})"


def sympy_to_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def load_completion(path: str) -> Completion:
    """Read a boundary description from a JSON or YAML file."""
    ext = os.path.splitext(path)[1].lower()
    if ext in (".yaml", ".yml"):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                payload = yaml.safe_load(f)
        except (OSError, yaml.YAMLError) as e:
            raise ParseError(f"Cannot read YAML file {path}: {e}") from e
    else:
        payload = load_json(path)
    return Completion.from_json(payload)


# -- transport of divisors ------------------------------------------------

def pullback(record: HistoryRecord, divisor: DivisorAtInfinity) -> DivisorAtInfinity:
    """
    Total transform along the morphism of a history step: the curve
    created by a blow-up (or removed by a contraction) gets the sum of the
    coefficients of the divisors through its image point.
    """
    if record.kind not in ("blowup", "contraction"):
        raise InfinityDynamicsError(f"Unknown history record {record.kind}")
    if record.divisor in divisor.support():
        raise UnknownDivisorError(f"{record.divisor} does not live on the target of this step")
    value = sum((divisor.coef(h) for h in record.hosts), Fraction(0))
    return divisor + DivisorAtInfinity.prime(record.divisor, value)


def pushforward(record: HistoryRecord, divisor: DivisorAtInfinity) -> DivisorAtInfinity:
    """Direct image: drop the coefficient of the curve the step contracts."""
    if record.kind not in ("blowup", "contraction"):
        raise InfinityDynamicsError(f"Unknown history record {record.kind}")
    coefficients = divisor.coefficients
    coefficients.pop(record.divisor, None)
    return DivisorAtInfinity(coefficients)


def transport(divisor: DivisorAtInfinity, source: Completion, target: Completion) -> DivisorAtInfinity:
    """
    Move a divisor between two completions related by their histories:
    total transforms going up a blow-up, direct images going down.
    """
    n, m = len(source.history), len(target.history)
    if target.history[:n] == source.history:
        for record in target.history[n:]:
            step = pullback if record.kind == "blowup" else pushforward
            divisor = step(record, divisor)
        return divisor
    if source.history[:m] == target.history:
        for record in reversed(source.history[m:]):
            step = pushforward if record.kind == "blowup" else pullback
            divisor = step(record, divisor)
        return divisor
    raise InfinityDynamicsError("Completions are not related by a common history")


# -- meet and join --------------------------------------------------------

def _first_bad_crossing(completion: Completion, first: DivisorAtInfinity,
                        second: DivisorAtInfinity) -> Optional[Tuple[str, str]]:
    for crossing in completion.crossing_pairs():
        if not is_well_ordered(completion, first, second, crossing):
            return crossing
    return None


def is_well_ordered(completion: Completion, first: DivisorAtInfinity,
                    second: DivisorAtInfinity, crossing: Tuple[str, str]) -> bool:
    """The two local equations at the crossing are comparable monomials."""
    a, b = crossing
    return (first.coef(a) - second.coef(a)) * (first.coef(b) - second.coef(b)) >= 0


def _componentwise_min(completion: Completion, first: DivisorAtInfinity,
                       second: DivisorAtInfinity) -> DivisorAtInfinity:
    return DivisorAtInfinity({n: min(first.coef(n), second.coef(n)) for n in completion.names})


def meet(completion: Completion, first: DivisorAtInfinity, second: DivisorAtInfinity,
         config: Optional[Config] = None) -> Tuple[Completion, DivisorAtInfinity]:
    """
    Infimum of two divisors at infinity as a Cartier divisor.

    Satellite points where the pair is not well ordered are blown up until
    the pair is well ordered everywhere; the result is then the
    componentwise minimum on the final completion.

    Args:
        completion: Completion carrying both divisors
        first, second: Divisors at infinity

    Returns:
        Tuple (final completion, meet divisor on it)
    """
    config = config or DEFAULT_CONFIG
    completion._check_support(first)
    completion._check_support(second)

    scale = lcm(first.common_denominator(), second.common_denominator())
    if scale != 1:
        final, result = meet(completion, scale * first, scale * second, config)
        return final, Fraction(1, scale) * result

    if not (first.is_effective() and second.is_effective()):
        bound = _componentwise_min(completion, first, second)
        final, result = meet(completion, first - bound, second - bound, config)
        return final, result + transport(bound, completion, final)

    current, a, b = completion, first, second
    for _ in range(config.meet_max_blowups):
        bad = _first_bad_crossing(current, a, b)
        if bad is None:
            break
        current, _ = current.blow_up(SatellitePoint(*bad))
        record = current.history[-1]
        a, b = pullback(record, a), pullback(record, b)
    else:
        raise InfinityDynamicsError(f"meet did not terminate within {config.meet_max_blowups} blow-ups")

    result = _componentwise_min(current, a, b)
    logger.debug(f"meet({first}, {second}) = {result} after {len(current.history) - len(completion.history)} blow-ups")
    return current, result


def join(completion: Completion, first: DivisorAtInfinity, second: DivisorAtInfinity,
         config: Optional[Config] = None) -> Tuple[Completion, DivisorAtInfinity]:
    """Supremum, computed as the negated meet of the negated divisors."""
    final, result = meet(completion, -first, -second, config)
    return final, -result
