# ==============================================================================
# GEOMETRIC PIECES
# ==============================================================================
# The four complementary regions of a finite maximal lamination on a bordered
# surface: ideal triangle, quadrilateral with two ideal vertices, pentagon with
# one ideal vertex and right-angled hexagon. Each piece has a canonical
# realization in the upper half-plane with edges listed counter-clockwise.
# Edges l1..l3 are lamination leaves, a1..a3 are boundary segments.
#
#   Triangle      A=0, B=1, C=inf            l1 A->B, l2 B->C, l3 C->A
#   Quad(s)       D=inf, C=e^s, doubled D^u=-1, C^u=0
#                                            a1 A->B, l1 B->C, l2 C->D, l3 D->A
#   Pentagon      Z=0, D=inf, D^u=-1         l1 A->B, a1 B->C, l2 C->D, l3 D->E, a2 E->A
#   Hexagon       right angles, l-lengths (s_j+s_k)/2
#                                            l2 A->B, a1 B->C, l1 C->D, a2 D->E, l3 E->F, a3 F->A
# ==============================================================================

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import ClassVar, Dict, List, Optional, Tuple, Union

from hypstretch.core.hyp_core import (
    INFINITY,
    Geodesic,
    IdealPoint,
    Isometry,
    UhpPoint,
    apply,
    axis_frame,
    dist,
    geodesic_from_point,
    geodesic_intersection,
    geodesic_through,
    horocycle_arc,
    ideal,
    left_of,
    perpendicular_at,
    perpendicular_bisector,
    point_at_signed_arc,
    reflection_across,
    signed_arc,
    unit_tangent_rotation,
)
from hypstretch.utils.errors import ErrorCode, HypStretchError

logger = logging.getLogger(__name__)

Vertex = Union[UhpPoint, IdealPoint]

L_EDGES = ("l1", "l2", "l3")
A_EDGES = ("a1", "a2", "a3")


def displacement(s: float) -> float:
    """Gap 1/2 ln(1 + e^-s) between the doubled-triangle center and the quad center."""
    if s < -30.0:
        return 0.5 * (-s + math.log1p(math.exp(s)))
    return 0.5 * math.log1p(math.exp(-s))


def _log1pexp(s: float) -> float:
    """ln(1 + e^s) without overflow."""
    if s > 30.0:
        return s + math.log1p(math.exp(-s))
    return math.log1p(math.exp(s))


# ==============================================================================
# PIECE TYPES
# ==============================================================================

class Piece:
    """Base of the four piece kinds; instances are frozen dataclasses."""
    kind: ClassVar[str] = ""
    edge_order: ClassVar[Tuple[str, ...]] = ()

    @property
    def shears(self) -> Tuple[float, ...]:
        return ()

    def with_shears(self, shears) -> "Piece":
        return make_piece(self.kind, shears)


@dataclass(frozen=True)
class Triangle(Piece):
    kind: ClassVar[str] = "triangle"
    edge_order: ClassVar[Tuple[str, ...]] = ("l1", "l2", "l3")


@dataclass(frozen=True)
class Quad(Piece):
    s: float
    kind: ClassVar[str] = "quad"
    edge_order: ClassVar[Tuple[str, ...]] = ("a1", "l1", "l2", "l3")

    def __post_init__(self):
        if not math.isfinite(self.s):
            raise HypStretchError(ErrorCode.INVALID_SHEARS, f"quad shear must be finite: {self.s}")

    @property
    def shears(self) -> Tuple[float, ...]:
        return (self.s,)


@dataclass(frozen=True)
class Pentagon(Piece):
    """Pentagon with shears s1, s2 along l1 and s1 + s2 > 0.

    The stored order is never swapped on construction, so a surface file keeps
    its edge labels. Code that needs s2 >= s1 asks for normalized(), which
    returns the mirror image and the relabeling; the special points and the
    foliation branch on the order instead.
    """

    s1: float
    s2: float
    kind: ClassVar[str] = "pentagon"
    edge_order: ClassVar[Tuple[str, ...]] = ("l1", "a1", "l2", "l3", "a2")

    def __post_init__(self):
        if not (math.isfinite(self.s1) and math.isfinite(self.s2)) or self.s1 + self.s2 <= 0.0:
            raise HypStretchError(ErrorCode.INVALID_SHEARS, f"pentagon needs s1 + s2 > 0, got ({self.s1}, {self.s2})")

    @property
    def shears(self) -> Tuple[float, ...]:
        return (self.s1, self.s2)

    def normalized(self) -> Tuple["Pentagon", Dict[str, str]]:
        """Mirror image with s2 >= s1, plus the edge relabeling old -> new.

        The mirror reverses orientation, so surfaces keep the stored order.
        """
        if self.s2 >= self.s1:
            return self, {label: label for label in self.edge_order}
        return Pentagon(self.s2, self.s1), {"l1": "l1", "a1": "a2", "a2": "a1", "l2": "l3", "l3": "l2"}


@dataclass(frozen=True)
class Hexagon(Piece):
    s1: float
    s2: float
    s3: float
    kind: ClassVar[str] = "hexagon"
    edge_order: ClassVar[Tuple[str, ...]] = ("l2", "a1", "l1", "a2", "l3", "a3")

    def __post_init__(self):
        s = (self.s1, self.s2, self.s3)
        if not all(math.isfinite(v) for v in s):
            raise HypStretchError(ErrorCode.INVALID_SHEARS, f"hexagon shears must be finite: {s}")
        for i in range(3):
            if s[i] + s[(i + 1) % 3] <= 0.0:
                raise HypStretchError(ErrorCode.INVALID_SHEARS, f"hexagon needs s_i + s_(i+1) > 0, got {s}")

    @property
    def shears(self) -> Tuple[float, ...]:
        return (self.s1, self.s2, self.s3)

    def leaf_lengths(self) -> Dict[str, float]:
        return {
            "l1": (self.s2 + self.s3) / 2.0,
            "l2": (self.s3 + self.s1) / 2.0,
            "l3": (self.s1 + self.s2) / 2.0,
        }

    def normalized(self) -> Tuple["Hexagon", Dict[str, str]]:
        """Cyclic relabeling with s2 > 0 and s3 > 0, plus the edge map old -> new."""
        current = self
        mapping = {label: label for label in self.edge_order}
        rotate = {"l1": "l2", "l2": "l3", "l3": "l1", "a1": "a3", "a2": "a1", "a3": "a2"}
        for _ in range(3):
            if current.s2 > 0.0 and current.s3 > 0.0:
                return current, mapping
            # (s1, s2, s3) -> (s3, s1, s2) moves every label one step forward
            current = Hexagon(current.s3, current.s1, current.s2)
            mapping = {old: rotate[new] for old, new in mapping.items()}
        return current, mapping


PIECE_TYPES = {cls.kind: cls for cls in (Triangle, Quad, Pentagon, Hexagon)}


def make_piece(kind: str, shears=()) -> Piece:
    """Builds a piece from its kind name and shear list."""
    cls = PIECE_TYPES.get(kind)
    if cls is None:
        raise HypStretchError(ErrorCode.INVALID_SHEARS, f"unknown piece kind {kind!r}")
    values = [float(v) for v in shears]
    expected = {"triangle": 0, "quad": 1, "pentagon": 2, "hexagon": 3}[kind]
    if len(values) != expected:
        raise HypStretchError(ErrorCode.INVALID_SHEARS, f"{kind} takes {expected} shears, got {len(values)}")
    return cls(*values)


def stretch_params(piece: Piece, t: float) -> Piece:
    """Multiplies every shear of the piece by e^t."""
    if isinstance(piece, Triangle):
        return piece
    factor = math.exp(t)
    return piece.with_shears([factor * s for s in piece.shears])


# ==============================================================================
# REALIZATION
# ==============================================================================

class EdgeKind(str, Enum):
    FINITE = "finite"
    HALF_INFINITE = "half_infinite"
    BI_INFINITE = "bi_infinite"


@dataclass(frozen=True)
class PieceEdge:
    label: str
    start: Vertex
    end: Vertex

    @property
    def kind(self) -> EdgeKind:
        ideal_ends = isinstance(self.start, IdealPoint) + isinstance(self.end, IdealPoint)
        return (EdgeKind.FINITE, EdgeKind.HALF_INFINITE, EdgeKind.BI_INFINITE)[ideal_ends]

    @property
    def is_leaf(self) -> bool:
        return self.label.startswith("l")

    @property
    def geodesic(self) -> Geodesic:
        """Supporting complete geodesic, oriented like the edge."""
        if isinstance(self.start, IdealPoint) and isinstance(self.end, IdealPoint):
            return Geodesic(self.start, self.end)
        if isinstance(self.start, UhpPoint) and isinstance(self.end, UhpPoint):
            return geodesic_through(self.start, self.end)
        if isinstance(self.end, IdealPoint):
            return geodesic_from_point(self.start, self.end)
        return geodesic_from_point(self.end, self.start).reversed()

    def finite_vertex(self) -> Optional[UhpPoint]:
        if isinstance(self.start, UhpPoint):
            return self.start
        if isinstance(self.end, UhpPoint):
            return self.end
        return None


@dataclass(frozen=True)
class PieceRealization:
    piece: Piece
    vertices: Tuple[Tuple[str, Vertex], ...]
    edges: Tuple[PieceEdge, ...]

    def vertex(self, name: str) -> Vertex:
        return dict(self.vertices)[name]

    def edge(self, label: str) -> PieceEdge:
        for e in self.edges:
            if e.label == label:
                return e
        raise HypStretchError(ErrorCode.INVALID_SURFACE, f"{self.piece.kind} has no edge {label!r}")

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(e.label for e in self.edges)

    def successor(self, label: str) -> str:
        labels = self.labels
        return labels[(labels.index(label) + 1) % len(labels)]

    def predecessor(self, label: str) -> str:
        labels = self.labels
        return labels[(labels.index(label) - 1) % len(labels)]

    def vertex_name_of(self, point: Vertex) -> str:
        for name, v in self.vertices:
            if v == point:
                return name
        raise KeyError(point)

    def ideal_corners(self) -> List[str]:
        """Names of the ideal vertices, in counter-clockwise order."""
        return [self.vertex_name_of(e.end) for e in self.edges if isinstance(e.end, IdealPoint)]

    def incoming_edge(self, vertex_name: str) -> str:
        v = self.vertex(vertex_name)
        for e in self.edges:
            if e.end == v:
                return e.label
        raise KeyError(vertex_name)

    def contains(self, point: UhpPoint, tol: float = 1e-9) -> bool:
        return all(left_of(e.geodesic, point, tol) for e in self.edges)


def _chain(piece: Piece, names: List[str], points: List[Vertex]) -> PieceRealization:
    vertices = tuple(zip(names, points))
    edges = []
    for k, label in enumerate(piece.edge_order):
        edges.append(PieceEdge(label, points[k], points[(k + 1) % len(points)]))
    return PieceRealization(piece, vertices, tuple(edges))


def _quad_points(s: float) -> Dict[str, Vertex]:
    es = math.exp(s)
    return {
        "A": UhpPoint(-1.0, math.sqrt(1.0 + es)),
        "B": UhpPoint(es / (es + 2.0), es * math.sqrt(es + 1.0) / (es + 2.0)),
        "C": ideal(es),
        "D": INFINITY,
    }


def pentagon_constants(p: Pentagon) -> Dict[str, float]:
    """W, the a-edge radii r (center -1) and r' (center e^s1), and e^s1."""
    e1, e2 = math.exp(p.s1), math.exp(p.s2)
    w = math.expm1(p.s1 + p.s2) / (e2 + 1.0)
    return {
        "W": w,
        "r": math.sqrt(1.0 + w),
        "r_prime": math.sqrt(e1 * (e1 + 1.0) / (e2 + 1.0)),
        "e1": e1,
    }


def _pentagon_points(p: Pentagon) -> Dict[str, Vertex]:
    k = pentagon_constants(p)
    w, r, rp, e1 = k["W"], k["r"], k["r_prime"], k["e1"]
    x_a = w / (w + 2.0)
    x_b = (e1 * e1 - rp * rp) / (2.0 * e1 - w)
    return {
        "A": UhpPoint(x_a, math.sqrt(w * x_a - x_a * x_a)),
        "B": UhpPoint(x_b, math.sqrt(w * x_b - x_b * x_b)),
        "C": UhpPoint(e1, rp),
        "D": INFINITY,
        "E": UhpPoint(-1.0, r),
    }


def _hexagon_side(x: float, y: float, opposite: float) -> float:
    """Side of a right-angled hexagon between the alternate sides x and y, facing opposite."""
    ch = (math.cosh(x) * math.cosh(y) + math.cosh(opposite)) / (math.sinh(x) * math.sinh(y))
    return math.acosh(ch)


def hexagon_side_lengths(h: Hexagon) -> Dict[str, float]:
    l = h.leaf_lengths()
    return {
        "l1": l["l1"],
        "l2": l["l2"],
        "l3": l["l3"],
        "a1": _hexagon_side(l["l1"], l["l2"], l["l3"]),
        "a2": _hexagon_side(l["l1"], l["l3"], l["l2"]),
        "a3": _hexagon_side(l["l2"], l["l3"], l["l1"]),
    }


def _hexagon_points(h: Hexagon) -> Tuple[List[str], List[Vertex]]:
    lengths = hexagon_side_lengths(h)
    frame = Isometry.identity()
    turn = unit_tangent_rotation(math.pi / 2.0)
    names = ["A", "B", "C", "D", "E", "F"]
    points: List[Vertex] = []
    for label in h.edge_order:
        points.append(apply(frame, UhpPoint(0.0, 1.0)))
        frame = frame @ Isometry.diagonal(lengths[label]) @ turn
    closure = dist(apply(frame, UhpPoint(0.0, 1.0)), points[0])
    if closure > 1e-7:
        logger.warning(f"Hexagon {h.shears} closes up only to {closure:.3g}")
    return names, points


@lru_cache(maxsize=512)
def realize(piece: Piece) -> PieceRealization:
    """Canonical upper half-plane realization of a piece."""
    if isinstance(piece, Triangle):
        return _chain(piece, ["A", "B", "C"], [ideal(0.0), ideal(1.0), INFINITY])
    if isinstance(piece, Quad):
        pts = _quad_points(piece.s)
        return _chain(piece, ["A", "B", "C", "D"], [pts["A"], pts["B"], pts["C"], pts["D"]])
    if isinstance(piece, Pentagon):
        pts = _pentagon_points(piece)
        names = ["A", "B", "C", "D", "E"]
        return _chain(piece, names, [pts[n] for n in names])
    if isinstance(piece, Hexagon):
        names, points = _hexagon_points(piece)
        return _chain(piece, names, points)
    raise HypStretchError(ErrorCode.INVALID_SHEARS, f"unsupported piece {piece!r}")


def doubled_vertices(piece: Piece) -> Dict[str, IdealPoint]:
    """Ideal vertices of the double along the boundary edges, in canonical coordinates."""
    if isinstance(piece, Quad):
        return {"D_u": ideal(-1.0), "C_u": ideal(0.0), "C": ideal(math.exp(piece.s)), "D": INFINITY}
    if isinstance(piece, Pentagon):
        k = pentagon_constants(piece)
        return {"D_u": ideal(-1.0), "Z": ideal(0.0), "W": ideal(k["W"]), "C_u": ideal(k["e1"]), "D": INFINITY}
    if isinstance(piece, Triangle):
        return {"A": ideal(0.0), "B": ideal(1.0), "C": INFINITY}
    return {}


def edge_lengths(piece: Piece) -> Dict[str, float]:
    """Length of every edge; infinite edges get math.inf."""
    real = realize(piece)
    lengths = {}
    for e in real.edges:
        if e.kind is EdgeKind.FINITE:
            lengths[e.label] = dist(e.start, e.end)
        else:
            lengths[e.label] = math.inf
    return lengths


# ==============================================================================
# CENTERS AND SPECIAL POINTS
# ==============================================================================

def quad_center(s: float) -> UhpPoint:
    es = math.exp(s)
    return UhpPoint(es, math.sqrt(es * (1.0 + es)))


def centers(piece: Piece) -> Dict[str, UhpPoint]:
    """Centers of the bi-infinite edges: O_T^i for triangles, O_Q for quads."""
    if isinstance(piece, Triangle):
        return {"l1": UhpPoint(0.5, 0.5), "l2": UhpPoint(1.0, 1.0), "l3": UhpPoint(0.0, 1.0)}
    if isinstance(piece, Quad):
        return {"l2": quad_center(piece.s)}
    raise HypStretchError(ErrorCode.NO_CENTER, f"{piece.kind} has no bi-infinite edge")


@dataclass(frozen=True)
class SpecialPoint:
    name: str
    point: UhpPoint
    edge: str
    vertex: str
    signed_distance: float
    expected: float

    @property
    def residual(self) -> float:
        return abs(self.signed_distance - self.expected)


def signed_distance_from_vertex(real: PieceRealization, label: str, vertex_name: str, point: UhpPoint) -> float:
    """Signed arc from a finite vertex of an edge, positive into the edge."""
    e = real.edge(label)
    v = real.vertex(vertex_name)
    g = e.geodesic if e.start == v else e.geodesic.reversed()
    return signed_arc(g, v, point)


def _from_vertex(real: PieceRealization, label: str, vertex_name: str, d: float) -> UhpPoint:
    e = real.edge(label)
    v = real.vertex(vertex_name)
    g = e.geodesic if e.start == v else e.geodesic.reversed()
    return point_at_signed_arc(g, v, d)


def _quad_special(piece: Quad) -> Dict[str, SpecialPoint]:
    real = realize(piece)
    o_q = quad_center(piece.s)
    p_ad = horocycle_arc(INFINITY, o_q, real.edge("l3").geodesic)
    p_bc = horocycle_arc(real.vertex("C"), o_q, real.edge("l1").geodesic)
    half = piece.s / 2.0
    return {
        "P_AD": SpecialPoint("P_AD", p_ad, "l3", "A", signed_distance_from_vertex(real, "l3", "A", p_ad), half),
        "P_BC": SpecialPoint("P_BC", p_bc, "l1", "B", signed_distance_from_vertex(real, "l1", "B", p_bc), half),
    }


def _pentagon_special(piece: Pentagon) -> Dict[str, SpecialPoint]:
    real = realize(piece)
    A, B, C, E = (real.vertex(n) for n in "ABCE")
    l1 = dist(A, B)
    # H_DE and H_DC share a horocycle at D=inf: log y_E + u = log y_C + l1 - u
    u = (l1 + math.log(C.y) - math.log(E.y)) / 2.0
    h_ab = _from_vertex(real, "l1", "A", u)
    h_dc = apply(reflection_across(perpendicular_bisector(B, C)), h_ab)
    h_de = apply(reflection_across(perpendicular_bisector(E, A)), h_ab)
    points = {
        "H_AB": SpecialPoint("H_AB", h_ab, "l1", "A", signed_distance_from_vertex(real, "l1", "A", h_ab), piece.s1 / 2.0),
        "H_DC": SpecialPoint("H_DC", h_dc, "l2", "C", signed_distance_from_vertex(real, "l2", "C", h_dc), piece.s2 / 2.0),
        "H_DE": SpecialPoint("H_DE", h_de, "l3", "E", signed_distance_from_vertex(real, "l3", "E", h_de), piece.s1 / 2.0),
    }
    return points


def _hexagon_special(piece: Hexagon) -> Dict[str, SpecialPoint]:
    real = realize(piece)
    A, B, C, D, E, F = (real.vertex(n) for n in "ABCDEF")
    l1, l2, l3 = dist(C, D), dist(A, B), dist(E, F)
    u = (l2 + l3 - l1) / 2.0
    h_ab = _from_vertex(real, "l2", "A", u)
    h_dc = apply(reflection_across(perpendicular_bisector(B, C)), h_ab)
    h_ef = apply(reflection_across(perpendicular_bisector(F, A)), h_ab)
    s1, s2, s3 = piece.shears
    out = {}
    for name, point, label, pairs in (
        ("H_AB", h_ab, "l2", (("A", s1), ("B", s3))),
        ("H_DC", h_dc, "l1", (("C", s3), ("D", s2))),
        ("H_EF", h_ef, "l3", (("F", s1), ("E", s2))),
    ):
        for vertex, s in pairs:
            key = f"{name}@{vertex}"
            d = signed_distance_from_vertex(real, label, vertex, point)
            out[key] = SpecialPoint(name, point, label, vertex, d, s / 2.0)
    return out


def special_points(piece: Piece) -> Dict[str, SpecialPoint]:
    """Special points with measured and closed-form signed distances."""
    if isinstance(piece, Quad):
        return _quad_special(piece)
    if isinstance(piece, Pentagon):
        return _pentagon_special(piece)
    if isinstance(piece, Hexagon):
        return _hexagon_special(piece)
    raise HypStretchError(ErrorCode.NO_CENTER, "triangles carry centers, not special points")


def special_center(piece: Piece) -> Optional[UhpPoint]:
    """The point H whose projections to the l-edges are the special points, if it exists."""
    sp = special_points(piece)
    real = realize(piece)
    if isinstance(piece, Pentagon):
        g1 = perpendicular_at(real.edge("l1").geodesic, sp["H_AB"].point)
        g2 = perpendicular_at(real.edge("l2").geodesic, sp["H_DC"].point)
    elif isinstance(piece, Hexagon):
        g1 = perpendicular_at(real.edge("l2").geodesic, sp["H_AB@A"].point)
        g2 = perpendicular_at(real.edge("l1").geodesic, sp["H_DC@C"].point)
    else:
        return None
    return geodesic_intersection(g1, g2)


def corner_reference_points(piece: Piece, vertex_name: str) -> Dict[str, UhpPoint]:
    """Points on the two edges at an ideal vertex lying on the piece's own horocycle there."""
    real = realize(piece)
    incoming = real.incoming_edge(vertex_name)
    outgoing = real.successor(incoming)
    if isinstance(piece, Triangle):
        c = centers(piece)
        return {incoming: c[incoming], outgoing: c[outgoing]}
    if isinstance(piece, Quad):
        o_q = quad_center(piece.s)
        sp = _quad_special(piece)
        table = {"l1": sp["P_BC"].point, "l2": o_q, "l3": sp["P_AD"].point}
        return {incoming: table[incoming], outgoing: table[outgoing]}
    if isinstance(piece, Pentagon):
        sp = _pentagon_special(piece)
        return {"l2": sp["H_DC"].point, "l3": sp["H_DE"].point}
    raise HypStretchError(ErrorCode.NO_CENTER, f"{piece.kind} has no ideal vertex")


# ==============================================================================
# HOROCYCLIC FOLIATIONS
# ==============================================================================

@dataclass(frozen=True)
class FoliationSector:
    name: str
    center: IdealPoint
    bound: float


@dataclass(frozen=True)
class HorocyclicFoliation:
    piece: Piece
    sectors: Tuple[FoliationSector, ...]

    def sector(self, name: Optional[str] = None) -> FoliationSector:
        if not self.sectors:
            raise HypStretchError(ErrorCode.NOT_IN_SUPPORT, f"{self.piece.kind} is not foliated")
        if name is None:
            return self.sectors[0]
        for s in self.sectors:
            if s.name == name:
                return s
        raise HypStretchError(ErrorCode.NOT_IN_SUPPORT, f"no sector {name!r}")

    def leaf(self, point: UhpPoint, tol: float = 1e-12) -> Tuple[str, float]:
        """Sector name and leaf parameter d of a point, or NOT_IN_SUPPORT."""
        if not realize(self.piece).contains(point, 1e-9):
            raise HypStretchError(ErrorCode.OUT_OF_PIECE, f"{point} is outside the {self.piece.kind}")
        for sector in self.sectors:
            d = _leaf_parameter(self.piece, sector.name, point)
            if d is not None and d >= sector.bound - tol:
                return sector.name, d
        raise HypStretchError(ErrorCode.NOT_IN_SUPPORT, f"{point} lies in the unfoliated region")


_TRIANGLE_ROTATION = Isometry(0.0, 1.0, -1.0, 1.0)


def _leaf_parameter(piece: Piece, sector: str, point: UhpPoint) -> Optional[float]:
    if isinstance(piece, Triangle):
        turns = {"C": 0, "B": 1, "A": 2}[sector]
        m = Isometry.identity()
        for _ in range(turns):
            m = _TRIANGLE_ROTATION @ m
        w = apply(m, point)
        return math.log(w.y) if 0.0 <= w.x <= 1.0 else None
    if isinstance(piece, Quad):
        es = math.exp(piece.s)
        y_oq = quad_center(piece.s).y
        if sector == "K_D":
            return math.log(point.y / y_oq)
        diameter = ((point.x - es) ** 2 + point.y ** 2) / point.y
        return math.log(y_oq / diameter)
    if isinstance(piece, Pentagon):
        k = pentagon_constants(piece)
        if piece.s2 >= piece.s1:
            return math.log(point.y / k["r"])
        return math.log(point.y / k["r_prime"])
    return None


def foliation(piece: Piece) -> HorocyclicFoliation:
    """Partial horocyclic foliation of a piece."""
    if isinstance(piece, Triangle):
        sectors = tuple(FoliationSector(n, v, 0.0) for n, v in (("C", INFINITY), ("A", ideal(0.0)), ("B", ideal(1.0))))
    elif isinstance(piece, Quad):
        bound = displacement(piece.s)
        sectors = (FoliationSector("K_D", INFINITY, bound), FoliationSector("K_C", ideal(math.exp(piece.s)), bound))
    elif isinstance(piece, Pentagon):
        k = pentagon_constants(piece)
        if piece.s2 >= piece.s1:
            bound = math.log(k["r"])
        else:
            bound = math.log(k["e1"] / k["r_prime"])
        sectors = (FoliationSector("K_D", INFINITY, bound),)
    else:
        sectors = ()
    return HorocyclicFoliation(piece, sectors)


def foliation_image(piece: Piece, t: float, d: float, sector: Optional[str] = None, slack: float = 1e-12) -> float:
    """Leaf parameter d of the piece goes to e^t d in the stretched piece."""
    source = foliation(piece).sector(sector)
    if d < source.bound - slack:
        raise HypStretchError(ErrorCode.NOT_IN_SUPPORT, f"leaf {d} is below the sector bound {source.bound}")
    image = math.exp(t) * d
    target = foliation(stretch_params(piece, t)).sector(source.name)
    if image < target.bound - slack:
        raise HypStretchError(ErrorCode.NOT_IN_SUPPORT, f"stretched leaf {image} falls below {target.bound}")
    return image


def sample_points(piece: Piece, n: int, rng) -> List[UhpPoint]:
    """Points of the piece drawn uniformly in x and log y over a window, rejection-filtered."""
    real = realize(piece)
    finite = [v for _, v in real.vertices if isinstance(v, UhpPoint)]
    finite_x = [v.x for v in finite] + [v.x for _, v in real.vertices if isinstance(v, IdealPoint) and not v.infinite]
    x_lo, x_hi = min(finite_x), max(finite_x)
    y_lo = min([v.y for v in finite] + [0.05 * max(x_hi - x_lo, 1e-3)])
    y_hi = 4.0 * max([v.y for v in finite] + [x_hi - x_lo, 1.0])
    if not any(isinstance(v, IdealPoint) and v.infinite for _, v in real.vertices):
        y_hi = max(v.y for v in finite)
    points: List[UhpPoint] = []
    attempts = 0
    while len(points) < n and attempts < 200 * max(n, 1):
        attempts += 1
        x = rng.uniform(x_lo, x_hi)
        y = math.exp(rng.uniform(math.log(y_lo), math.log(y_hi)))
        p = UhpPoint(x, y)
        if real.contains(p, 0.0):
            points.append(p)
    return points


def edge_frame(real: PieceRealization, label: str, center: Optional[UhpPoint] = None) -> Isometry:
    """Isometry placing the standard model of an edge onto the edge.

    Finite edges: i -> start, i e^L -> end. Half-infinite: i -> finite vertex,
    inf -> ideal vertex. Bi-infinite: 0 -> start, inf -> end, i -> center.
    """
    e = real.edge(label)
    if e.kind is EdgeKind.FINITE:
        return axis_frame(e.geodesic, e.start).inverse()
    if e.kind is EdgeKind.HALF_INFINITE:
        finite = e.finite_vertex()
        xi = e.end if isinstance(e.end, IdealPoint) else e.start
        return axis_frame(geodesic_from_point(finite, xi), finite).inverse()
    if center is None:
        raise HypStretchError(ErrorCode.NO_CENTER, f"bi-infinite edge {label} needs a center")
    return axis_frame(e.geodesic, center).inverse()
