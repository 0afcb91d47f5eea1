# ==============================================================================
# SURFACES: VALIDATION, DEVELOPING MAPS, LENGTHS, BLOCK DECOMPOSITION
# ==============================================================================
# Pieces are glued along their l-edges. The gluing isometry of an edge maps the
# neighbouring piece's canonical coordinates into this piece's coordinates:
#
#   finite        F_e o (z -> -e^L / z) o F_e'^-1
#   half-infinite F_e o F_e'^-1
#   bi-infinite   F_e o (z -> e^shear z) o (z -> -1/z) o F_e'^-1
#
# with F the edge frames of pieces.edge_frame. A positive shear puts the
# neighbour's center further along the orientation of e than e's own center.
# ==============================================================================

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Set, Tuple

from hypstretch.core.hyp_core import (
    Geodesic,
    IdealPoint,
    Isometry,
    UhpPoint,
    apply,
    dist,
    dist_between_geodesics,
    fixed_point_multiplier,
    reflection_across,
    to_infinity,
    translation_length,
)
from hypstretch.core.pieces import (
    EdgeKind,
    Piece,
    Quad,
    Triangle,
    Pentagon,
    centers,
    corner_reference_points,
    edge_frame,
    realize,
)
from hypstretch.data.surface_io import EdgeRef, Surface
from hypstretch.utils.config import get_tolerance
from hypstretch.utils.errors import ErrorCode, HypStretchError

logger = logging.getLogger(__name__)

_FLIP = Isometry(0.0, -1.0, 1.0, 0.0)


# ==============================================================================
# GLUING ISOMETRIES AND DEVELOPING
# ==============================================================================

@lru_cache(maxsize=4096)
def gluing_isometry(surface: Surface, ref: EdgeRef) -> Isometry:
    """Maps the coordinates of the piece across ref into the coordinates of ref's piece."""
    gl = surface.gluing_at(ref)
    if gl is None:
        raise HypStretchError(ErrorCode.PATH_BROKEN, f"edge {ref} is not glued")
    other = gl.other(ref)
    real, real_o = realize(surface.piece(ref[0])), realize(surface.piece(other[0]))
    e, e_o = real.edge(ref[1]), real_o.edge(other[1])
    if e.kind is not e_o.kind:
        raise HypStretchError(ErrorCode.INVALID_SURFACE, f"edges {ref} and {other} have different types")
    if e.kind is EdgeKind.FINITE:
        length = dist(e.start, e.end)
        h = math.exp(length / 2.0)
        swap = Isometry(0.0, -h, 1.0 / h, 0.0)
        return edge_frame(real, ref[1]) @ swap @ edge_frame(real_o, other[1]).inverse()
    if e.kind is EdgeKind.HALF_INFINITE:
        return edge_frame(real, ref[1]) @ edge_frame(real_o, other[1]).inverse()
    if gl.shear is None:
        raise HypStretchError(ErrorCode.INVALID_SURFACE, f"bi-infinite gluing {ref} has no shear")
    frame = edge_frame(real, ref[1], centers(real.piece)[ref[1]])
    frame_o = edge_frame(real_o, other[1], centers(real_o.piece)[other[1]])
    return frame @ Isometry.diagonal(gl.shear) @ _FLIP @ frame_o.inverse()


@dataclass(frozen=True)
class DualPath:
    """Sequence of edge crossings; arcs also name their start and end a-edges."""
    crossings: Tuple[EdgeRef, ...]
    start: Optional[EdgeRef] = None
    end: Optional[EdgeRef] = None

    @property
    def closed(self) -> bool:
        return self.start is None

    def __len__(self) -> int:
        return len(self.crossings)

    def describe(self) -> str:
        body = " ".join(f"{p}.{e}" for p, e in self.crossings)
        if self.closed:
            return f"({body})"
        head = f"{self.start[0]}.{self.start[1]}"
        tail = f"{self.end[0]}.{self.end[1]}"
        return f"[{head} | {body} | {tail}]" if body else f"[{head} | {tail}]"


def develop(surface: Surface, path: DualPath) -> Isometry:
    """Composes the gluing isometries along the path; maps the last piece into the first."""
    m = Isometry.identity()
    if not path.crossings:
        if not path.closed and path.start[0] != path.end[0]:
            raise HypStretchError(ErrorCode.PATH_BROKEN, "empty arc must start and end in one piece")
        return m
    current = path.crossings[0][0]
    if not path.closed and path.start[0] != current:
        raise HypStretchError(ErrorCode.PATH_BROKEN, f"arc starts in {path.start[0]} but first crossing leaves {current}")
    for ref in path.crossings:
        if ref[0] != current:
            raise HypStretchError(ErrorCode.PATH_BROKEN, f"crossing {ref} does not leave {current}")
        m = m @ gluing_isometry(surface, ref)
        current = surface.neighbor(ref)[0]
    if path.closed and current != path.crossings[0][0]:
        raise HypStretchError(ErrorCode.PATH_BROKEN, "closed word does not return to its first piece")
    if not path.closed and path.end[0] != current:
        raise HypStretchError(ErrorCode.PATH_BROKEN, f"arc ends in {current}, not {path.end[0]}")
    return m


def inverse_word(surface: Surface, crossings: Tuple[EdgeRef, ...]) -> Tuple[EdgeRef, ...]:
    return tuple(surface.neighbor(ref) for ref in reversed(crossings))


def reduce_word(surface: Surface, path: DualPath) -> DualPath:
    """Cancels immediate backtracks (and cyclic ones for closed words)."""
    stack: List[EdgeRef] = []
    for ref in path.crossings:
        if stack and surface.neighbor(stack[-1]) == ref:
            stack.pop()
        else:
            stack.append(ref)
    if path.closed:
        while len(stack) >= 2 and surface.neighbor(stack[-1]) == stack[0]:
            stack = stack[1:-1]
    return DualPath(tuple(stack), path.start, path.end)


def curve_length(surface: Surface, word: DualPath) -> float:
    """Length of the closed geodesic in the class of a closed dual word."""
    if not word.closed:
        raise HypStretchError(ErrorCode.PATH_BROKEN, "curve_length needs a closed word")
    m = develop(surface, word)
    if abs(m.trace) <= 2.0 + get_tolerance() or not word.crossings:
        raise HypStretchError(ErrorCode.PARABOLIC_OR_TRIVIAL, f"word {word.describe()} is not hyperbolic")
    return translation_length(m)


def _arc_geodesics(surface: Surface, arc: DualPath) -> Tuple[Geodesic, Geodesic]:
    if arc.closed:
        raise HypStretchError(ErrorCode.PATH_BROKEN, "arc_length needs an open path")
    for ref in (arc.start, arc.end):
        if not ref[1].startswith("a"):
            raise HypStretchError(ErrorCode.PATH_BROKEN, f"arc endpoints must be a-edges, got {ref}")
    if not arc.crossings and arc.start == arc.end:
        raise HypStretchError(ErrorCode.GEODESICS_INTERSECT, "trivial arc from an edge to itself")
    m = develop(surface, arc)
    g1 = realize(surface.piece(arc.start[0])).edge(arc.start[1]).geodesic
    g2 = apply(m, realize(surface.piece(arc.end[0])).edge(arc.end[1]).geodesic)
    return g1, g2


def arc_length(surface: Surface, arc: DualPath) -> float:
    """Length of the geodesic arc orthogonal to the boundary in the class of arc."""
    g1, g2 = _arc_geodesics(surface, arc)
    try:
        return dist_between_geodesics(g1, g2)
    except HypStretchError as e:
        raise HypStretchError(ErrorCode.GEODESICS_INTERSECT, f"no orthogeodesic for {arc.describe()}") from e


def doubled_arc_length(surface: Surface, arc: DualPath) -> float:
    """Length of the doubled arc: translation length of the product of the two boundary reflections."""
    g1, g2 = _arc_geodesics(surface, arc)
    return translation_length(reflection_across(g2) @ reflection_across(g1))


# ==============================================================================
# VERTEX CLASSES AND BOUNDARY CURVES
# ==============================================================================

@dataclass(frozen=True)
class VertexClass:
    corners: Tuple[Tuple[str, str], ...]
    word: DualPath
    log_multiplier: float
    displacements: Tuple[float, ...]

    def is_parabolic(self, tol: Optional[float] = None) -> bool:
        tol = 1e3 * get_tolerance() if tol is None else tol
        return abs(self.log_multiplier) <= tol

    @property
    def length(self) -> float:
        return abs(self.log_multiplier)


def _next_corner(surface: Surface, piece_id: str, vertex: str) -> Tuple[EdgeRef, Tuple[str, str]]:
    real = realize(surface.piece(piece_id))
    ref = (piece_id, real.incoming_edge(vertex))
    other = surface.neighbor(ref)
    real_o = realize(surface.piece(other[0]))
    return ref, (other[0], real_o.vertex_name_of(real_o.edge(other[1]).start))


def _horocycle_gap(center: IdealPoint, mine: UhpPoint, theirs: UhpPoint) -> float:
    t = to_infinity(center)
    return math.log(apply(t, theirs).y / apply(t, mine).y)


def vertex_classes(surface: Surface) -> List[VertexClass]:
    """Cycles of ideal corners glued around a common ideal point, with their holonomy."""
    seen: Set[Tuple[str, str]] = set()
    classes = []
    for pid, piece in surface.pieces:
        for vertex in realize(piece).ideal_corners():
            if (pid, vertex) in seen:
                continue
            corners, crossings, gaps = [], [], []
            corner = (pid, vertex)
            while corner not in seen:
                seen.add(corner)
                corners.append(corner)
                ref, nxt = _next_corner(surface, *corner)
                crossings.append(ref)
                real = realize(surface.piece(ref[0]))
                mine = corner_reference_points(real.piece, corner[1])[ref[1]]
                other = surface.neighbor(ref)
                theirs = corner_reference_points(surface.piece(other[0]), nxt[1])[other[1]]
                theirs = apply(gluing_isometry(surface, ref), theirs)
                gaps.append(_horocycle_gap(real.vertex(corner[1]), mine, theirs))
                corner = nxt
            if corner != (pid, vertex):
                raise HypStretchError(ErrorCode.INVALID_SURFACE, f"corner walk from {pid}.{vertex} does not close")
            word = DualPath(tuple(crossings))
            holonomy = develop(surface, word)
            xi = realize(piece).vertex(vertex)
            log_mult = fixed_point_multiplier(holonomy, xi)
            classes.append(VertexClass(tuple(corners), word, log_mult, tuple(gaps)))
    return classes


@dataclass(frozen=True)
class BoundaryCurve:
    a_edges: Tuple[EdgeRef, ...]
    word: DualPath


def boundary_curves(surface: Surface) -> List[BoundaryCurve]:
    """Boundary components traced through the a-edges."""
    seen: Set[EdgeRef] = set()
    curves = []
    for pid, piece in surface.pieces:
        real = realize(piece)
        for label in real.labels:
            if not label.startswith("a") or (pid, label) in seen:
                continue
            a_edges, crossings = [], []
            ref = (pid, label)
            while ref not in seen:
                seen.add(ref)
                a_edges.append(ref)
                here = realize(surface.piece(ref[0]))
                leaf = (ref[0], here.successor(ref[1]))
                crossings.append(leaf)
                other = surface.neighbor(leaf)
                nxt = realize(surface.piece(other[0])).successor(other[1])
                if not nxt.startswith("a"):
                    raise HypStretchError(ErrorCode.INVALID_SURFACE, f"boundary walk hits {other[0]}.{nxt}")
                ref = (other[0], nxt)
            curves.append(BoundaryCurve(tuple(a_edges), DualPath(tuple(crossings))))
    return curves


# ==============================================================================
# VALIDATION
# ==============================================================================

@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)
    piece_count: int = 0
    expected_pieces: int = 0
    punctures: int = 0
    boundary_components: int = 0
    closed_leaf_lengths: List[float] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {
            "valid": self.valid,
            "violations": list(self.violations),
            "piece_count": self.piece_count,
            "expected_pieces": self.expected_pieces,
            "punctures": self.punctures,
            "boundary_components": self.boundary_components,
            "closed_leaf_lengths": list(self.closed_leaf_lengths),
        }


def _check_gluings(surface: Surface, report: ValidationReport, tol: float) -> bool:
    """Adds gluing violations; False when the edge pairing itself is broken."""
    ids = set(surface.piece_ids)
    before = len(report.violations)
    uses: Dict[EdgeRef, int] = {}
    for gl in surface.gluings:
        for ref in (gl.first, gl.second):
            if ref[0] not in ids:
                report.violations.append(f"gluing names unknown piece {ref[0]}")
                continue
            if ref[1] not in realize(surface.piece(ref[0])).labels:
                report.violations.append(f"{ref[0]} has no edge {ref[1]}")
                continue
            if not ref[1].startswith("l"):
                report.violations.append(f"boundary edge {ref[0]}.{ref[1]} is glued")
            uses[ref] = uses.get(ref, 0) + 1
        if gl.first == gl.second:
            report.violations.append(f"edge {gl.first[0]}.{gl.first[1]} is glued to itself")
    for pid, piece in surface.pieces:
        for label in realize(piece).labels:
            if label.startswith("l") and uses.get((pid, label), 0) != 1:
                n = uses.get((pid, label), 0)
                report.violations.append(f"leaf {pid}.{label} is glued {n} times (dangling)" if n == 0 else f"leaf {pid}.{label} is glued {n} times")
    if len(report.violations) > before:
        return False
    for gl in surface.gluings:
        e = realize(surface.piece(gl.first[0])).edge(gl.first[1])
        f = realize(surface.piece(gl.second[0])).edge(gl.second[1])
        name = f"{gl.first[0]}.{gl.first[1]}~{gl.second[0]}.{gl.second[1]}"
        if e.kind is not f.kind:
            report.violations.append(f"{name}: {e.kind.value} edge glued to {f.kind.value} edge")
            continue
        if e.kind is EdgeKind.FINITE:
            le, lf = dist(e.start, e.end), dist(f.start, f.end)
            if abs(le - lf) > tol * max(1.0, le):
                report.violations.append(f"{name}: lengths {le:.12g} and {lf:.12g} differ")
        elif e.kind is EdgeKind.HALF_INFINITE:
            if isinstance(e.end, IdealPoint) == isinstance(f.end, IdealPoint):
                report.violations.append(f"{name}: half-infinite edges must run in opposite directions")
        elif gl.shear is None:
            report.violations.append(f"{name}: bi-infinite gluing needs a shear")
        if e.kind is not EdgeKind.BI_INFINITE and gl.shear is not None:
            report.violations.append(f"{name}: only bi-infinite gluings carry a shear")
    return True


def _connected(surface: Surface) -> bool:
    ids = surface.piece_ids
    if not ids:
        return False
    adjacency: Dict[str, Set[str]] = {pid: set() for pid in ids}
    for gl in surface.gluings:
        adjacency[gl.first[0]].add(gl.second[0])
        adjacency[gl.second[0]].add(gl.first[0])
    seen = {ids[0]}
    queue = deque([ids[0]])
    while queue:
        for nxt in adjacency[queue.popleft()]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == len(ids)


def pair_closed_leaves(classes: List[VertexClass], tol: float) -> Tuple[List[Tuple[VertexClass, VertexClass]], List[VertexClass]]:
    """Matches the two sides of every closed leaf by length; returns pairs and leftovers."""
    pending = sorted((c for c in classes if not c.is_parabolic()), key=lambda c: c.length)
    pairs, leftovers = [], []
    while pending:
        first = pending.pop(0)
        match = next((c for c in pending if abs(c.length - first.length) <= tol * max(1.0, first.length)), None)
        if match is None:
            leftovers.append(first)
        else:
            pending.remove(match)
            pairs.append((first, match))
    return pairs, leftovers


def validate(surface: Surface) -> ValidationReport:
    """Checks every structural invariant; never raises."""
    tol = 1e3 * get_tolerance()
    report = ValidationReport(piece_count=len(surface.pieces), expected_pieces=surface.topology.expected_pieces)
    if report.piece_count != report.expected_pieces:
        report.violations.append(
            f"{report.piece_count} pieces, topology (g={surface.topology.g}, b={surface.topology.b}, "
            f"p={surface.topology.p}) needs {report.expected_pieces}"
        )
    if len(set(surface.piece_ids)) != len(surface.piece_ids):
        report.violations.append("piece ids are not unique")
    if not _check_gluings(surface, report, get_tolerance()):
        return report
    if not _connected(surface):
        report.violations.append("gluing graph is not connected")
    try:
        classes = vertex_classes(surface)
        curves = boundary_curves(surface)
    except HypStretchError as e:
        report.violations.append(f"cannot trace the surface: {e.message}")
        return report
    report.punctures = sum(1 for c in classes if c.is_parabolic())
    report.boundary_components = len(curves)
    if report.punctures != surface.topology.p:
        report.violations.append(f"{report.punctures} punctures found, topology declares {surface.topology.p}")
    if report.boundary_components != surface.topology.b:
        report.violations.append(f"{report.boundary_components} boundary curves found, topology declares {surface.topology.b}")
    pairs, leftovers = pair_closed_leaves(classes, tol)
    report.closed_leaf_lengths = [a.length for a, _ in pairs]
    for c in leftovers:
        report.violations.append(f"spiralling class at {c.corners[0][0]}.{c.corners[0][1]} (length {c.length:.12g}) has no partner side")
    if report.valid:
        logger.info(f"Surface valid: {report.piece_count} pieces, {report.punctures} punctures, {report.boundary_components} boundary curves")
    else:
        logger.info(f"Surface invalid: {len(report.violations)} violations")
    return report


def closed_leaves(surface: Surface) -> List[Tuple[VertexClass, VertexClass]]:
    return pair_closed_leaves(vertex_classes(surface), 1e3 * get_tolerance())[0]


def same_combinatorics(x: Surface, y: Surface) -> bool:
    """Same topology, piece ids and kinds, and the same edge pairing."""
    if x.topology != y.topology:
        return False
    if [(pid, p.kind) for pid, p in x.pieces] != [(pid, p.kind) for pid, p in y.pieces]:
        return False
    pairs_x = {frozenset((gl.first, gl.second)) for gl in x.gluings}
    pairs_y = {frozenset((gl.first, gl.second)) for gl in y.gluings}
    return pairs_x == pairs_y


# ==============================================================================
# BOUNDARY BLOCK AND CROWNS
# ==============================================================================

@dataclass(frozen=True)
class Spike:
    """Ideal point shared by two consecutive boundary leaves of a crown."""
    first_quad: str
    last_quad: str
    corners: Tuple[Tuple[str, str], ...]
    crossings: Tuple[EdgeRef, ...]
    middle: Tuple[str, ...] = ()

    @property
    def case(self) -> int:
        """1: quads glued directly; 2: through pentagons; 3: through quad pairs; 0: mixed."""
        kinds = set(self.middle)
        if not kinds:
            return 1
        if kinds == {"pentagon"}:
            return 2
        if kinds == {"quad"}:
            return 3
        return 0


@dataclass(frozen=True)
class Crown:
    quads: Tuple[str, ...]
    spikes: Tuple[Spike, ...]
    core_word: DualPath


@dataclass(frozen=True)
class BlockDecomposition:
    block: Tuple[str, ...]
    complement: Tuple[str, ...]
    crowns: Tuple[Crown, ...]

    @property
    def cycles(self) -> List[Tuple[str, ...]]:
        return [c.quads for c in self.crowns]


def crown_quads(surface: Surface) -> List[str]:
    """Quads whose bi-infinite edge faces a triangle."""
    out = []
    for pid, piece in surface.pieces:
        if isinstance(piece, Quad):
            other = surface.neighbor((pid, "l2"))
            if isinstance(surface.piece(other[0]), Triangle):
                out.append(pid)
    return out


def _spike_from(surface: Surface, quad_id: str, boundary: Set[str]) -> Spike:
    corner = (quad_id, "C")
    corners, crossings, kinds = [corner], [], []
    for _ in range(4 * len(surface.pieces) + 4):
        ref, corner = _next_corner(surface, *corner)
        crossings.append(ref)
        corners.append(corner)
        piece = surface.piece(corner[0])
        if isinstance(piece, Quad) and corner[1] == "D" and corner[0] in boundary:
            return Spike(quad_id, corner[0], tuple(corners), tuple(crossings), tuple(kinds))
        if isinstance(piece, Pentagon):
            kinds.append("pentagon")
        elif isinstance(piece, Quad) and corner[1] == "D":
            kinds.append("quad")
        elif not isinstance(piece, Quad):
            raise HypStretchError(ErrorCode.NOT_A_CROWN, f"spike walk from {quad_id} enters {piece.kind} {corner[0]}")
    raise HypStretchError(ErrorCode.NOT_A_CROWN, f"spike walk from {quad_id} does not reach a boundary leaf")


def classify(surface: Surface) -> BlockDecomposition:
    """Boundary block, its crowns with their spikes and core words."""
    block = tuple(pid for pid, p in surface.pieces if not isinstance(p, Triangle))
    complement = tuple(pid for pid, p in surface.pieces if isinstance(p, Triangle))
    boundary = crown_quads(surface)
    spikes = {q: _spike_from(surface, q, set(boundary)) for q in boundary}
    crowns = []
    done: Set[str] = set()
    for start in boundary:
        if start in done:
            continue
        quads, chain = [], []
        q = start
        while q not in done:
            done.add(q)
            quads.append(q)
            chain.append(spikes[q])
            q = spikes[q].last_quad
        if q != start:
            raise HypStretchError(ErrorCode.NOT_A_CROWN, f"crown through {start} does not close")
        core = DualPath(tuple(ref for sp in chain for ref in sp.crossings))
        crowns.append(Crown(tuple(quads), tuple(chain), core))
    logger.info(f"Boundary block of {len(block)} pieces, {len(crowns)} crowns")
    return BlockDecomposition(block, complement, tuple(crowns))


def measurable_leaves(surface: Surface) -> Dict[str, int]:
    """Counts of finite leaves and closed leaves."""
    finite = 0
    for gl in surface.gluings:
        e = realize(surface.piece(gl.first[0])).edge(gl.first[1])
        if e.kind is EdgeKind.FINITE:
            finite += 1
    return {"finite": finite, "closed": len(closed_leaves(surface))}
