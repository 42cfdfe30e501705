"""
Trees of infinitely near points above a boundary point.

Each node is an exceptional prime divisor with its generic multiplicity b,
its skewness alpha and its Farey label. The dual graph of the exceptional
configuration is stored as a rooted networkx DiGraph whose edges are the
current crossings; the root-to-leaf direction is the valuative tree order.
"""

import copy
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple, Union

import networkx as nx
import sympy

from .config import Config, DEFAULT_CONFIG
from .errors import InfinityDynamicsError, InvalidCenterError, NormalizationError
from .exactnum import QuadNumber
from .utils import fraction_str, graph_to_dot, setup_logger


logger = setup_logger(__name__)

MAXIMAL_IDEAL = "maximal-ideal"
RELATIVE = "relative"


@dataclass(frozen=True)
class FreeOn:
    """Free point on a single node."""
    node: int


@dataclass(frozen=True)
class SatelliteBetween:
    """Satellite point at the crossing of two adjacent nodes."""
    first: int
    second: int


CenterSpec = Union[FreeOn, SatelliteBetween]


@dataclass
class TreeNode:
    """Exceptional divisor in a blow-up tree."""
    node_id: int
    name: str
    b: int
    alpha: Fraction
    farey: Tuple[int, int]
    created_by: str
    hosts: Tuple[int, ...] = ()
    self_int: Optional[int] = -1
    multiplicity: int = 1  # Farey determinant with the order parent


@dataclass(frozen=True)
class SegmentPoint:
    """
    Normalized monomial valuation on the segment between two adjacent
    nodes, with weights (s, t) on (lower, upper) and s*b(lower) + t*b(upper) = 1.
    """
    lower: int
    upper: int
    s: QuadNumber
    t: QuadNumber
    alpha: QuadNumber


@dataclass(frozen=True)
class CurveEnd:
    """Formal end of a curve valuation leaving a node in a fresh free direction."""
    node: int


TreePoint = Union[int, SegmentPoint, CurveEnd]


@dataclass(frozen=True)
class RootChange:
    """Affine relation between relative and ambient skewness above a free point."""
    offset: Fraction
    scale: Fraction
    multiplicity_scale: int

    def ambient_skewness(self, relative_alpha):
        return self.offset + self.scale * relative_alpha

    def ambient_multiplicity(self, relative_b: int) -> int:
        return self.multiplicity_scale * relative_b


class BlowupTree:
    """
    Rooted tree of infinitely near points.

    In maximal-ideal mode the root is the first exceptional divisor above
    p (b = 1, alpha = 1, self-intersection -1). In relative mode the root
    is a host divisor E (b = 1, alpha = 0) whose self-intersection is not
    tracked.
    """

    def __init__(self, mode: str = MAXIMAL_IDEAL, root_name: str = "E0",
                 root_farey: Optional[Tuple[int, int]] = None,
                 config: Optional[Config] = None):
        if mode not in (MAXIMAL_IDEAL, RELATIVE):
            raise InfinityDynamicsError(f"Unknown tree mode: {mode}")
        self.config = config or DEFAULT_CONFIG
        self.mode = mode
        self.frozen = False
        self.graph = nx.DiGraph()
        self.nodes: Dict[int, TreeNode] = {}
        if root_farey is None:
            root_farey = (1, 1) if mode == MAXIMAL_IDEAL else (0, 1)
        root = TreeNode(
            node_id=0,
            name=root_name,
            b=1,
            alpha=Fraction(1) if mode == MAXIMAL_IDEAL else Fraction(0),
            farey=tuple(root_farey),
            created_by="root",
            self_int=-1 if mode == MAXIMAL_IDEAL else None,
        )
        self._add(root)

    # -- structure ---------------------------------------------------------

    def _add(self, node: TreeNode) -> None:
        self.nodes[node.node_id] = node
        self.graph.add_node(node.node_id)

    @property
    def root(self) -> int:
        return 0

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.nodes))

    def node(self, node_id: int) -> TreeNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise InvalidCenterError(f"Unknown node {node_id}") from None

    def by_name(self, name: str) -> int:
        for node in self.nodes.values():
            if node.name == name:
                return node.node_id
        raise InvalidCenterError(f"Unknown node name {name!r}")

    def parent(self, node_id: int) -> Optional[int]:
        preds = list(self.graph.predecessors(node_id))
        return preds[0] if preds else None

    def children(self, node_id: int) -> List[int]:
        return sorted(self.graph.successors(node_id))

    def adjacent(self, first: int, second: int) -> bool:
        return self.graph.has_edge(first, second) or self.graph.has_edge(second, first)

    def edges(self) -> List[Tuple[int, int]]:
        """Adjacent pairs oriented (order parent, child)."""
        return sorted(self.graph.edges())

    def path_to_root(self, node_id: int) -> List[int]:
        path = [node_id]
        while (p := self.parent(path[-1])) is not None:
            path.append(p)
        return path

    def is_ancestor(self, first: int, second: int) -> bool:
        """True if first <= second in the tree order."""
        return first == second or first in nx.ancestors(self.graph, second)

    def lowest_common_ancestor(self, first: int, second: int) -> int:
        return nx.lowest_common_ancestor(self.graph, first, second)

    def freeze(self) -> "BlowupTree":
        self.frozen = True
        return self

    def copy(self) -> "BlowupTree":
        clone = copy.deepcopy(self)
        clone.frozen = False
        return clone

    # -- blow-ups ----------------------------------------------------------

    def blow_up(self, center: CenterSpec, name: Optional[str] = None) -> int:
        """
        Blow up a free or satellite point and return the new node id.

        Args:
            center: FreeOn(node) or SatelliteBetween(node, node)
            name: Optional name of the new divisor

        Returns:
            Id of the new exceptional node
        """
        if self.frozen:
            raise InfinityDynamicsError("Cannot blow up a frozen tree")
        new_id = len(self.nodes)
        name = name or f"E{new_id}"

        if isinstance(center, FreeOn):
            host = self.node(center.node)
            node = TreeNode(
                node_id=new_id,
                name=name,
                b=host.b,
                alpha=host.alpha + Fraction(1, host.b * host.b),
                farey=(host.farey[0] + 1, host.farey[1]),
                created_by="free",
                hosts=(host.node_id,),
                multiplicity=host.b,
            )
            if host.self_int is not None:
                host.self_int -= 1
            self._add(node)
            self.graph.add_edge(host.node_id, new_id)
            logger.debug(f"free blow-up on {host.name}: {name} b={node.b} alpha={node.alpha}")
            return new_id

        if isinstance(center, SatelliteBetween):
            first, second = self.node(center.first), self.node(center.second)
            if self.graph.has_edge(first.node_id, second.node_id):
                lower, upper = first, second
            elif self.graph.has_edge(second.node_id, first.node_id):
                lower, upper = second, first
            else:
                raise InvalidCenterError(
                    f"Satellite point needs adjacent nodes, {first.name} and {second.name} do not cross")
            b = lower.b + upper.b
            node = TreeNode(
                node_id=new_id,
                name=name,
                b=b,
                alpha=lower.alpha + Fraction(1, lower.b * b),
                farey=(lower.farey[0] + upper.farey[0], lower.farey[1] + upper.farey[1]),
                created_by="satellite",
                hosts=(lower.node_id, upper.node_id),
                multiplicity=upper.multiplicity,
            )
            for host in (lower, upper):
                if host.self_int is not None:
                    host.self_int -= 1
            self._add(node)
            self.graph.remove_edge(lower.node_id, upper.node_id)
            self.graph.add_edge(lower.node_id, new_id)
            self.graph.add_edge(new_id, upper.node_id)
            logger.debug(f"satellite blow-up at {lower.name}/{upper.name}: {name} b={b} alpha={node.alpha}")
            return new_id

        raise InvalidCenterError(f"Unknown center specification: {center!r}")

    # -- numerical data ----------------------------------------------------

    def farey_determinant(self, first: int, second: int) -> int:
        """a2*b1 - a1*b2 for adjacent nodes ordered first < second."""
        (a1, b1), (a2, b2) = self.node(first).farey, self.node(second).farey
        return a2 * b1 - a1 * b2

    def thinness(self, node_id: int) -> Fraction:
        """Thinness 1 + a/b of the Farey label."""
        a, b = self.node(node_id).farey
        return 1 + Fraction(a, b)

    def monomial_point(self, first: int, second: int, s, t) -> SegmentPoint:
        """
        Normalized monomial valuation at the crossing of two adjacent nodes.

        Args:
            first, second: Adjacent nodes (either order)
            s, t: Nonnegative weights on first and second

        Returns:
            SegmentPoint oriented lower -> upper
        """
        s, t = QuadNumber.coerce(s), QuadNumber.coerce(t)
        if not self.adjacent(first, second):
            raise InvalidCenterError(f"Nodes {first} and {second} are not adjacent")
        if self.graph.has_edge(second, first):
            first, second, s, t = second, first, t, s
        if s < 0 or t < 0 or (s == 0 and t == 0):
            raise NormalizationError(f"Monomial weights must be nonnegative and not both zero: {s}, {t}")
        lower, upper = self.node(first), self.node(second)
        if s * lower.b + t * upper.b != 1:
            raise NormalizationError(
                f"Weights violate s*b(E) + t*b(F) = 1: {s}*{lower.b} + {t}*{upper.b}")
        alpha = lower.alpha + t / lower.b
        return SegmentPoint(lower=first, upper=second, s=s, t=t, alpha=alpha)

    def monomial_skewness(self, first: int, second: int, s, t) -> QuadNumber:
        """Skewness of the normalized monomial valuation v_{s,t} at first/second."""
        return self.monomial_point(first, second, s, t).alpha

    def normalized_weights(self, first: int, second: int, s, t) -> Tuple[QuadNumber, QuadNumber]:
        """Rescale (s, t) so that s*b(first) + t*b(second) = 1."""
        s, t = QuadNumber.coerce(s), QuadNumber.coerce(t)
        total = s * self.node(first).b + t * self.node(second).b
        if total == 0:
            raise NormalizationError("Cannot normalize zero weights")
        return s / total, t / total

    def locate(self, point: TreePoint) -> Tuple[str, int, Optional[int]]:
        """
        Place a point in the current tree.

        Returns:
            ("node", id, None) or ("segment", upper, lower) with the point
            strictly inside the edge (lower, upper)
        """
        if isinstance(point, int):
            self.node(point)
            return ("node", point, None)
        if isinstance(point, CurveEnd):
            return ("curve", point.node, None)
        x = point.upper
        while True:
            p = self.parent(x)
            if p is None or self.nodes[p].alpha < point.alpha:
                break
            x = p
        if self.nodes[x].alpha == point.alpha:
            return ("node", x, None)
        return ("segment", x, self.parent(x))

    def skewness(self, point: TreePoint):
        """Skewness of a node or segment point; math.inf for curve ends."""
        if isinstance(point, CurveEnd):
            return math.inf
        if isinstance(point, SegmentPoint):
            return point.alpha
        return QuadNumber(self.node(point).alpha)

    def change_root_relation(self, center: CenterSpec) -> RootChange:
        """
        Relation between the relative tree at a free point q on E_q and
        this tree: alpha = alpha(E_q) + alpha_{E_q}/b(E_q)^2, b = b(E_q)*b_{E_q}.
        """
        if not isinstance(center, FreeOn):
            raise InvalidCenterError("The skewness relation only holds above a free point")
        host = self.node(center.node)
        return RootChange(offset=host.alpha, scale=Fraction(1, host.b * host.b),
                          multiplicity_scale=host.b)

    # -- order -------------------------------------------------------------

    def wedge(self, first: TreePoint, second: TreePoint) -> TreePoint:
        """
        Infimum of two points for the tree order.

        Nodes are node ids, monomial points SegmentPoint values, curve ends
        CurveEnd values.
        """
        if first == second:
            return first
        if isinstance(first, CurveEnd) and isinstance(second, CurveEnd):
            return self.lowest_common_ancestor(first.node, second.node)
        if isinstance(first, CurveEnd):
            return self._wedge_curve(first, second)
        if isinstance(second, CurveEnd):
            return self._wedge_curve(second, first)
        return self._wedge_points(first, second)

    def _anchor(self, point) -> Tuple[int, QuadNumber, str]:
        kind, x, _ = self.locate(point)
        if kind == "node":
            return x, QuadNumber(self.nodes[x].alpha), "node"
        return x, point.alpha, "segment"

    def _wedge_points(self, first, second) -> TreePoint:
        x1, a1, _ = self._anchor(first)
        x2, a2, _ = self._anchor(second)
        if x1 == x2:
            if a1 == a2:
                return x1 if isinstance(first, int) or isinstance(second, int) else first
            return first if a1 < a2 else second
        c = self.lowest_common_ancestor(x1, x2)
        if c == x1:
            return first
        if c == x2:
            return second
        return c

    def _wedge_curve(self, curve: CurveEnd, other) -> TreePoint:
        x, _, _ = self._anchor(other)
        n = curve.node
        if x != n and self.lowest_common_ancestor(n, x) == n:
            return n
        return self._wedge_points(other, n)

    # -- refinement --------------------------------------------------------

    def refine_until_node(self, point: SegmentPoint) -> int:
        """Blow up satellite points on the segment until the point is a node."""
        for _ in range(self.config.separation_depth):
            kind, x, lower = self.locate(point)
            if kind == "node":
                return x
            self.blow_up(SatelliteBetween(lower, x))
        raise InfinityDynamicsError(
            f"Point with skewness {point.alpha} is not a node after {self.config.separation_depth} refinements")

    def separate(self, first: SegmentPoint, second: SegmentPoint) -> bool:
        """Refine until two segment points no longer share an edge; False if equal."""
        if first.alpha == second.alpha and self.locate(first) == self.locate(second):
            return False
        for _ in range(self.config.separation_depth):
            loc1, loc2 = self.locate(first), self.locate(second)
            if loc1 != loc2 or loc1[0] == "node":
                return True
            _, x, lower = loc1
            self.blow_up(SatelliteBetween(lower, x))
        raise InfinityDynamicsError("Points could not be separated within the refinement depth")

    # -- exceptional configuration ----------------------------------------

    def exceptional_nodes(self) -> List[int]:
        """Nodes carrying a tracked self-intersection."""
        return [n for n in self if self.nodes[n].self_int is not None]

    def local_intersection_matrix(self) -> Tuple[List[int], sympy.Matrix]:
        """Intersection matrix of the exceptional divisors above p."""
        order = self.exceptional_nodes()
        index = {n: i for i, n in enumerate(order)}
        size = len(order)
        matrix = sympy.zeros(size, size)
        for n in order:
            matrix[index[n], index[n]] = self.nodes[n].self_int
        for u, v in self.graph.edges():
            if u in index and v in index:
                matrix[index[u], index[v]] = 1
                matrix[index[v], index[u]] = 1
        return order, matrix

    def to_dot(self) -> str:
        """DOT export with b, alpha and Farey annotations."""
        labelled = nx.DiGraph()
        for n in self:
            node = self.nodes[n]
            a, bb = node.farey
            labelled.add_node(node.name,
                              label=f"{node.name} b={node.b} α={fraction_str(node.alpha)} Far=({a},{bb})")
        for u, v in self.graph.edges():
            labelled.add_edge(self.nodes[u].name, self.nodes[v].name)
        return graph_to_dot(labelled, name="blowup_tree")
