"""
Zigzags and cycles of rational boundary curves.

A zigzag is stored as the ordered sequence of its components with their
self-intersections. Moves (blow-ups and Castelnuovo contractions) return
new values and are recorded as ``Move`` entries so any standardization
can be replayed from its input.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import networkx as nx
import sympy

from .boundary import Completion, PrimeDivisor
from .errors import (ContractionError, InfinityDynamicsError, InvalidCenterError,
                     NotAChainError, NotStandardizableError, ParseError)
from .utils import parse_int_list, setup_logger


logger = setup_logger(__name__)

Component = Tuple[str, int]
Position = Union[int, Tuple[int, int]]

CLASS_TAGS = {
    "zigzag": "lambda1 integer, eigenvaluations infinitely singular",
    "cycle": "lambda1 quadratic integer, eigenvaluations irrational",
    "other": "no loxodromic automorphism",
}


@dataclass(frozen=True)
class Zigzag:
    """Chain (or cycle) of rational curves with their self-intersections."""
    components: Tuple[Component, ...]
    cyclic: bool = False

    def __post_init__(self):
        components = tuple((str(name), int(value)) for name, value in self.components)
        if not components:
            raise InfinityDynamicsError("A zigzag needs at least one component")
        if len({name for name, _ in components}) != len(components):
            raise InfinityDynamicsError("Zigzag component names must be distinct")
        object.__setattr__(self, "components", components)

    @classmethod
    def from_self_ints(cls, values: Sequence[int], cyclic: bool = False, prefix: str = "B") -> "Zigzag":
        return cls(tuple((f"{prefix}{i}", v) for i, v in enumerate(values)), cyclic)

    @classmethod
    def parse(cls, text: str) -> "Zigzag":
        """Parse "0,-1,-2,-2" or "cycle:-1,-1,-1"."""
        body = text.strip()
        cyclic = False
        if body.startswith("cycle:"):
            cyclic, body = True, body[len("cycle:"):]
        elif body.startswith("chain:"):
            body = body[len("chain:"):]
        values = parse_int_list(body)
        if not values:
            raise ParseError(f"Empty zigzag literal: {text!r}")
        return cls.from_self_ints(values, cyclic)

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.components]

    @property
    def self_ints(self) -> List[int]:
        return [value for _, value in self.components]

    def __len__(self) -> int:
        return len(self.components)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InfinityDynamicsError(f"No component named {name!r}") from None

    def fresh_name(self) -> str:
        taken = set(self.names)
        k = 1
        while f"N{k}" in taken:
            k += 1
        return f"N{k}"

    def intersection_matrix(self) -> sympy.Matrix:
        n = len(self)
        matrix = sympy.diag(*self.self_ints) if n > 1 else sympy.Matrix([[self.self_ints[0]]])
        for i in range(n - 1):
            matrix[i, i + 1] += 1
            matrix[i + 1, i] += 1
        if self.cyclic and n > 1:
            matrix[0, n - 1] += 1
            matrix[n - 1, 0] += 1
        return matrix

    def to_completion(self) -> Completion:
        n = len(self)
        if self.cyclic and n < 3:
            raise InfinityDynamicsError("Cycles with fewer than three components have non simple crossings")
        pairs = [(self.names[i], self.names[i + 1]) for i in range(n - 1)]
        if self.cyclic:
            pairs.append((self.names[-1], self.names[0]))
        return Completion([PrimeDivisor(name, value) for name, value in self.components], pairs)

    def __str__(self):
        body = ",".join(str(v) for v in self.self_ints)
        return f"cycle:{body}" if self.cyclic else body


@dataclass(frozen=True)
class Fork:
    """Chain with one extra curve attached to an interior component."""
    chain: Zigzag
    host: str
    branch: Component

    def to_completion(self) -> Completion:
        base = self.chain.to_completion()
        divisors = list(base.divisors) + [PrimeDivisor(self.branch[0], self.branch[1])]
        pairs = base.crossing_pairs() + [(self.host, self.branch[0])]
        return Completion(divisors, pairs)


@dataclass(frozen=True)
class Move:
    """
    One elementary move: "free" blow-up at an end of component `index`
    (`side` left or right), "satellite" blow-up between `index` and the next
    component, or "contract" of component `index`.
    """
    kind: str
    index: int
    side: str = ""
    note: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "index": self.index, "side": self.side, "note": self.note}


# -- predicates -------------------------------------------------------------

def is_standard(z: Zigzag) -> bool:
    """F ▷ E ▷ Z' with F^2 = 0, E^2 <= -1 and Z' negative."""
    if z.cyclic:
        return False
    values = z.self_ints
    if values[0] != 0:
        return False
    if len(values) > 1 and values[1] > -1:
        return False
    return all(v <= -2 for v in values[2:])


def is_almost_standard(z: Zigzag) -> bool:
    """Unique nonnegative component, and at most one (-1)-component adjacent to it."""
    if z.cyclic:
        return False
    values = z.self_ints
    nonneg = [i for i, v in enumerate(values) if v >= 0]
    if len(nonneg) != 1:
        return False
    minus_ones = [i for i, v in enumerate(values) if v == -1]
    if len(minus_ones) > 1:
        return False
    return not minus_ones or abs(minus_ones[0] - nonneg[0]) == 1


def inertia(z: Zigzag) -> Tuple[int, int, int]:
    """
    Numbers of positive, zero and negative eigenvalues of the intersection
    form (Descartes' rule is exact on the real-rooted characteristic polynomial).
    """
    x = sympy.Symbol("x")
    coeffs = [int(c) for c in z.intersection_matrix().charpoly(x).all_coeffs()]
    zeros = 0
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
        zeros += 1
    signs = [c > 0 for c in coeffs if c != 0]
    positive = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    return positive, zeros, len(z) - positive - zeros


# -- moves ------------------------------------------------------------------

def _replace(z: Zigzag, components: List[Component]) -> Zigzag:
    return Zigzag(tuple(components), z.cyclic)


def blow_up_move(z: Zigzag, position: Position, side: Optional[str] = None,
                 name: Optional[str] = None) -> Union[Zigzag, Fork]:
    """
    Blow up a free point of component `position` or the crossing
    `position = (i, i + 1)`.

    Args:
        z: Zigzag or cycle
        position: Component index (free point) or pair of consecutive indices
        side: For a free point on a chain end, which end receives the new curve
        name: Name of the exceptional curve

    Returns:
        New Zigzag, or a Fork when the free point lies on an interior component
    """
    name = name or z.fresh_name()
    if name in z.names:
        raise InvalidCenterError(f"Component name {name!r} already in use")
    comps = list(z.components)
    n = len(comps)

    if isinstance(position, tuple):
        i, j = position
        if not z.cyclic and (j != i + 1 or not 0 <= i < n - 1):
            raise InvalidCenterError(f"({i}, {j}) is not a crossing of the chain")
        if z.cyclic and (n < 2 or j % n != (i + 1) % n):
            raise InvalidCenterError(f"({i}, {j}) is not a crossing of the cycle")
        j = j % n
        comps[i] = (comps[i][0], comps[i][1] - 1)
        comps[j] = (comps[j][0], comps[j][1] - 1)
        comps.insert(i + 1, (name, -1))
        logger.debug(f"satellite blow-up between {comps[i][0]} and {comps[(i + 2) % (n + 1)][0]} -> {name}")
        return _replace(z, comps)

    i = int(position)
    if not 0 <= i < n:
        raise InvalidCenterError(f"No component at index {i}")
    host, value = comps[i]
    comps[i] = (host, value - 1)
    if not z.cyclic:
        if n == 1:
            if side == "left":
                comps.insert(0, (name, -1))
            else:
                comps.append((name, -1))
            return _replace(z, comps)
        if i == 0:
            comps.insert(0, (name, -1))
            return _replace(z, comps)
        if i == n - 1:
            comps.append((name, -1))
            return _replace(z, comps)
    logger.warning(f"free blow-up on interior component {host} creates a fork")
    return Fork(chain=_replace(z, comps), host=host, branch=(name, -1))


def contract_move(z: Zigzag, index: int) -> Zigzag:
    """Castelnuovo contraction of the (-1)-component at `index`."""
    comps = list(z.components)
    n = len(comps)
    if not 0 <= index < n:
        raise ContractionError(f"No component at index {index}")
    name, value = comps[index]
    if value != -1:
        raise ContractionError(f"{name} has self-intersection {value}, not -1")
    if n == 1:
        raise ContractionError("Cannot contract the whole boundary")
    if z.cyclic and n == 2:
        other = comps[1 - index]
        return _replace(z, [(other[0], other[1] + 4)])
    neighbors = {(index - 1) % n, (index + 1) % n} if z.cyclic else \
        {k for k in (index - 1, index + 1) if 0 <= k < n}
    for k in neighbors:
        comps[k] = (comps[k][0], comps[k][1] + 1)
    del comps[index]
    logger.debug(f"contract {name}")
    return _replace(z, comps)


def apply_move(z: Zigzag, move: Move) -> Zigzag:
    if move.kind == "free":
        result = blow_up_move(z, move.index, side=move.side or None)
        if isinstance(result, Fork):
            raise NotAChainError(f"Move {move} leaves the class of chains")
        return result
    if move.kind == "satellite":
        return blow_up_move(z, (move.index, move.index + 1))
    if move.kind == "contract":
        return contract_move(z, move.index)
    raise InfinityDynamicsError(f"Unknown move kind {move.kind!r}")


def replay(z: Zigzag, moves: Sequence[Move]) -> Zigzag:
    """Apply a move log to a zigzag."""
    for move in moves:
        z = apply_move(z, move)
    return z


# -- standardization --------------------------------------------------------

class _Recorder:
    """Current zigzag plus the moves that produced it."""

    def __init__(self, z: Zigzag):
        self.z = z
        self.moves: List[Move] = []

    def do(self, move: Move) -> None:
        self.z = apply_move(self.z, move)
        self.moves.append(move)

    def shift(self, k: int, toward: str, note: str) -> None:
        """
        Elementary link at the 0-curve k: the neighbor on side `toward`
        gains 1 and the other neighbor loses 1.
        """
        n = len(self.z)
        if toward == "left":
            if k + 1 < n:
                self.do(Move("satellite", k, note=note))
            else:
                self.do(Move("free", k, "right", note=note))
            self.do(Move("contract", k, note=note))
        else:
            if k > 0:
                self.do(Move("satellite", k - 1, note=note))
                self.do(Move("contract", k + 1, note=note))
            else:
                self.do(Move("free", 0, "left", note=note))
                self.do(Move("contract", 1, note=note))

    def lower_to_zero(self, k: int) -> None:
        """Bring a positive component to 0 by blowing up on its right."""
        if self.z.self_ints[k] > 0 and k == len(self.z) - 1:
            self.do(Move("free", k, "right", note="lower nonnegative curve"))
        while self.z.self_ints[k] > 0:
            self.do(Move("satellite", k, note="lower nonnegative curve"))


def standardize(z: Union[Zigzag, Completion]) -> Tuple[Zigzag, List[Move]]:
    """
    Bring a chain to the standard form F ▷ E ▷ Z'.

    Branch order: contract every (-1)-curve, lower the leftmost
    nonnegative curve to 0, walk it to the left end (raising the left
    neighbor by elementary links and contracting it once it is a
    (-1)-curve), contract the (-1)-curves of the tail, then lower the
    second component to -1 or below.

    Args:
        z: Zigzag or a completion whose boundary is a chain

    Returns:
        Tuple (standard zigzag, move log)
    """
    if isinstance(z, Completion):
        z = from_completion(z)
        if z.cyclic:
            raise NotAChainError("Standardization applies to chains, not cycles")
    if isinstance(z, Fork):
        raise NotAChainError("Boundary has a fork, it is neither a zigzag nor a cycle")
    if z.cyclic:
        raise NotAChainError("Standardization applies to chains, not cycles")
    if is_standard(z):
        return z, []
    rec = _Recorder(z)

    def contract_all(start: int = 0) -> None:
        while len(rec.z) > 1:
            found = next((i for i, v in enumerate(rec.z.self_ints) if i >= start and v == -1), None)
            if found is None:
                return
            rec.do(Move("contract", found, note="contract (-1)-curve"))

    positive, zeros, _ = inertia(z)
    if (positive, zeros) != (1, 0):
        # a single 0-curve is the only standard zigzag with a null direction
        contract_all()
        if (positive, zeros) == (0, 1) and is_standard(rec.z):
            return rec.z, rec.moves
        logger.error(f"zigzag {z} has inertia ({positive}, {zeros}): no standard form")
        raise NotStandardizableError(
            f"Zigzag {z} has {positive} positive and {zeros} null directions, "
            f"a standard zigzag has one positive direction and no null one")

    contract_all()
    k = next(i for i, v in enumerate(rec.z.self_ints) if v >= 0)
    rec.lower_to_zero(k)

    while k > 0:
        left = rec.z.self_ints[k - 1]
        if left < -1:
            rec.shift(k, "left", note="raise left neighbor")
        elif left == -1:
            rec.do(Move("contract", k - 1, note="contract left neighbor"))
            k -= 1
            rec.lower_to_zero(k)
        else:
            raise NotStandardizableError(f"Unexpected nonnegative curve left of the 0-curve in {rec.z}")

    contract_all(start=2)
    if any(v > -2 for v in rec.z.self_ints[2:]):
        raise NotStandardizableError(f"Tail of {rec.z} is not negative")
    while len(rec.z) > 1 and rec.z.self_ints[1] > -1:
        rec.shift(0, "left", note="lower second component")

    if not is_standard(rec.z):
        raise NotStandardizableError(f"Standardization ended at {rec.z}")
    logger.info(f"standardized {z} -> {rec.z} in {len(rec.moves)} moves")
    return rec.z, rec.moves


# -- completions ------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryClass:
    kind: str
    tag: str


def classify_boundary(X: Completion) -> BoundaryClass:
    """Zigzag (path), cycle or other, with the dynamical-degree dichotomy tag."""
    graph = X.dual_graph()
    if not nx.is_connected(graph):
        raise InfinityDynamicsError("Boundary dual graph must be connected")
    rational = all(d.genus == 0 for d in X.divisors)
    degrees = [deg for _, deg in graph.degree()]
    n = graph.number_of_nodes()
    if rational and max(degrees, default=0) <= 2 and graph.number_of_edges() == n - 1:
        kind = "zigzag"
    elif rational and n >= 3 and all(deg == 2 for deg in degrees):
        kind = "cycle"
    else:
        kind = "other"
    return BoundaryClass(kind, CLASS_TAGS[kind])


def from_completion(X: Completion) -> Zigzag:
    """Read the boundary of a completion as a chain or a cycle."""
    kind = classify_boundary(X).kind
    graph = X.dual_graph()
    order = X.names
    if kind == "zigzag":
        if len(order) == 1:
            walk = order
        else:
            start = next(name for name in order if graph.degree(name) == 1)
            walk = list(nx.dfs_preorder_nodes(graph, start))
        return Zigzag(tuple((name, X.self_int(name)) for name in walk))
    if kind == "cycle":
        start = order[0]
        first = min(graph.neighbors(start), key=order.index)
        walk = [start, first]
        while len(walk) < len(order):
            nxt = next(v for v in graph.neighbors(walk[-1]) if v != walk[-2])
            walk.append(nxt)
        return Zigzag(tuple((name, X.self_int(name)) for name in walk), cyclic=True)
    raise NotAChainError("Boundary is neither a zigzag nor a cycle")


# -- indeterminacy pruning ------------------------------------------------------

def may_be_indeterminacy_point(z: Zigzag, position: Position) -> bool:
    """
    False when an automorphism of the complement cannot have an
    indeterminacy point at `position`; True when the rules do not exclude it.
    """
    if z.cyclic:
        return True
    values = z.self_ints
    n = len(values)

    if isinstance(position, tuple):
        i, j = position
        if j != i + 1 or not 0 <= i < n - 1:
            raise InvalidCenterError(f"({i}, {j}) is not a crossing of the chain")
        minus_ones = [k for k, v in enumerate(values) if v == -1]
        others_negative = all(v <= -2 for k, v in enumerate(values) if k not in (i, j))
        if minus_ones == [i, j] and others_negative:
            return False
        # (-1, -2, ..., -2, F, E = -1, ...) with the crossing F/E
        if values[j] == -1 and values[0] == -1 and i >= 1 and all(v == -2 for v in values[1:i + 1]) \
                and all(v <= -2 for v in values[j + 1:]):
            return False
    else:
        i = int(position)
        if not 0 <= i < n:
            raise InvalidCenterError(f"No component at index {i}")

    if is_almost_standard(z) and -1 not in values:
        k = next(idx for idx, v in enumerate(values) if v >= 0)
        if isinstance(position, tuple):
            return k in position
        if i != k:
            return False
        return k in (0, n - 1)
    return True
