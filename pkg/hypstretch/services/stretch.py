# ==============================================================================
# GENERALIZED STRETCH LINES
# ==============================================================================
# Stretching a surface multiplies every piece parameter and every shear by e^t.
# Around each crown the boundary block is compared with the triangulated
# auxiliary cylinder: at every spike the ideal triangles of the doubled quads
# and pentagons form a fan, and the shears of the fan edges carry the
# stretch difference. The fan weights, the spiralling closed leaves, the
# finite leaves and the cusps make up the cocycle track on which rho^t and
# epsilon^t are checked.
#
# Sign of epsilon on the b-branches: delta(e^t s) - e^t delta(s). It vanishes
# at t = 0 and balances every spike switch.
# ==============================================================================

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from hypstretch.core.hyp_core import (
    Geodesic,
    Isometry,
    UhpPoint,
    apply,
    dist,
    foot_of_perpendicular,
    horocycle_arc,
    point_at_signed_arc,
    signed_arc,
    to_infinity,
)
from hypstretch.core.pieces import (
    EdgeKind,
    Pentagon,
    Quad,
    Triangle,
    displacement,
    doubled_vertices,
    quad_center,
    realize,
    signed_distance_from_vertex,
    special_points,
    stretch_params,
)
from hypstretch.core.traintrack import (
    Switch,
    TrainTrack,
    check_cusp_condition,
    omega,
    positivity_test,
    split_to_generic,
    switch_residuals,
)
from hypstretch.data.surface_io import Surface
from hypstretch.services.surface import (
    BlockDecomposition,
    Crown,
    Spike,
    classify,
    closed_leaves,
    gluing_isometry,
    validate,
    vertex_classes,
)
from hypstretch.utils.config import get_tolerance
from hypstretch.utils.errors import ErrorCode, HypStretchError

logger = logging.getLogger(__name__)

__all__ = [
    "displacement",
    "horocyclic_shift",
    "build_cylinder",
    "stretched_cylinder_shears",
    "stretch_difference_check",
    "epsilon_cocycle",
    "realized_displacement",
    "realized_crown_shear",
    "generalized_stretch",
    "thurston_stretch",
    "leaf_stretch_report",
]

MERGE_TOL = 1e-7


# ==============================================================================
# STRETCHING SURFACES
# ==============================================================================

def _crown_adjacent(surface: Surface) -> Dict[int, str]:
    """Gluing index -> crown quad id, for quad-triangle gluings."""
    out = {}
    for i, gl in enumerate(surface.gluings):
        for ref, other in ((gl.first, gl.second), (gl.second, gl.first)):
            if (
                ref[1] == "l2"
                and isinstance(surface.piece(ref[0]), Quad)
                and isinstance(surface.piece(other[0]), Triangle)
            ):
                out[i] = ref[0]
    return out


def crown_adjacent_shear(sigma: float, s: float, t: float) -> float:
    """Closed form of the crown shear after stretching.

    rho^t(b) = e^t (sigma + delta(s)) + epsilon^t(b), and the stretched quad
    center sits delta(e^t s) below the doubled-triangle center.
    """
    factor = math.exp(t)
    rho_t = factor * (sigma + displacement(s)) + (displacement(factor * s) - factor * displacement(s))
    return rho_t - displacement(factor * s)


def _crown_edge(quad: Quad) -> Tuple[Geodesic, UhpPoint, UhpPoint]:
    """l2 of the doubled quad oriented from C to D, the quad center and the doubled-triangle center."""
    vertices = doubled_vertices(quad)
    l2 = Geodesic(vertices["C"], vertices["D"])
    return l2, quad_center(quad.s), foot_of_perpendicular(vertices["C_u"], l2)


def realized_displacement(quad: Quad) -> float:
    """Signed gap along l2 from the doubled-triangle center to the quad center."""
    l2, o_q, o_t = _crown_edge(quad)
    return signed_arc(l2, o_t, o_q)


def realized_crown_shear(sigma: float, quad: Quad, t: float) -> float:
    """Crown shear after stretching, measured on the realized stretched quad.

    The triangle across l2 is placed rho^t past the doubled-triangle center of
    the stretched quad and its center is read off against the quad center.
    """
    factor = math.exp(t)
    quad_t = stretch_params(quad, t)
    gap, gap_t = realized_displacement(quad), realized_displacement(quad_t)
    rho_t = factor * (sigma + gap) + (gap_t - factor * gap)
    l2, o_q, o_t = _crown_edge(quad_t)
    return signed_arc(l2, o_q, point_at_signed_arc(l2, o_t, rho_t))


def has_measurable_leaf(surface: Surface) -> bool:
    for gl in surface.gluings:
        if realize(surface.piece(gl.first[0])).edge(gl.first[1]).kind is EdgeKind.FINITE:
            return True
    return bool(closed_leaves(surface))


def generalized_stretch(surface: Surface, t: float, check: bool = True) -> Surface:
    """The surface at time t on the stretch line through surface."""
    if check:
        report = validate(surface)
        if not report.valid:
            raise HypStretchError(ErrorCode.INVALID_SURFACE, "; ".join(report.violations))
        if not has_measurable_leaf(surface):
            logger.warning("Lamination has no finite or closed leaf; the stretch line need not be a geodesic")
    factor = math.exp(t)
    pieces = {pid: stretch_params(p, t) for pid, p in surface.pieces}
    adjacent = _crown_adjacent(surface)
    shears = {}
    for i, gl in enumerate(surface.gluings):
        if gl.shear is None:
            continue
        if i in adjacent:
            quad = surface.piece(adjacent[i])
            shears[i] = realized_crown_shear(gl.shear, quad, t)
            drift = abs(shears[i] - crown_adjacent_shear(gl.shear, quad.s, t))
            if drift > 1e3 * get_tolerance() * max(1.0, abs(gl.shear)):
                logger.warning(f"Realized crown shear at {adjacent[i]} is {drift:.3g} off its closed form")
        else:
            shears[i] = factor * gl.shear
    previous = float(dict(surface.metadata).get("stretch_t", 0.0))
    out = surface.with_pieces(pieces).with_shears(shears).with_metadata(stretch_t=previous + t)
    if check:
        report = validate(out)
        if not report.valid:
            raise HypStretchError(ErrorCode.INVALID_SURFACE, "stretched surface: " + "; ".join(report.violations))
    logger.info(f"Stretched {len(surface.pieces)} pieces by t={t:.12g}")
    return out


def thurston_stretch(surface: Surface, t: float) -> Surface:
    """Stretch of a triangulated surface: every shear times e^t."""
    for pid, piece in surface.pieces:
        if not isinstance(piece, Triangle):
            raise HypStretchError(ErrorCode.NON_TRIANGLE_PIECE, f"{pid} is a {piece.kind}")
    factor = math.exp(t)
    return surface.with_shears({i: factor * gl.shear for i, gl in enumerate(surface.gluings) if gl.shear is not None})


# ==============================================================================
# SPIKE FANS AND AUXILIARY CYLINDERS
# ==============================================================================

@dataclass(frozen=True)
class FanEdge:
    name: str
    kind: str
    shear: float

    @property
    def special(self) -> bool:
        return self.kind != "diagonal"


@dataclass(frozen=True)
class SpikeFan:
    spike: Spike
    name: str
    endpoints: Tuple[Tuple[float, str], ...]
    edges: Tuple[FanEdge, ...]
    first_s: float
    last_s: float

    @property
    def total_shear(self) -> float:
        return sum(e.shear for e in self.edges)


@dataclass(frozen=True)
class CylinderModel:
    surface: Surface
    crown_index: int
    crown: Crown
    fans: Tuple[SpikeFan, ...]

    @property
    def triangle_count(self) -> int:
        """Ideal triangles of the doubled pieces along the crown."""
        seen = set()
        for sp in self.crown.spikes:
            for pid, _ in sp.corners:
                seen.add(pid)
        return sum(len(doubled_vertices(self.surface.piece(pid))) - 2 for pid in seen)

    @property
    def case(self) -> Tuple[int, ...]:
        return tuple(f.spike.case for f in self.fans)


def _fan_entries(piece, vertex: str, role: str):
    dv = doubled_vertices(piece)
    if isinstance(piece, Pentagon):
        return [(dv["D_u"], "special"), (dv["W"], "diagonal"), (dv["C_u"], "special")]
    if role == "first":
        return [(dv["D"], "b_first"), (dv["C_u"], "special")]
    if role == "last":
        return [(dv["D_u"], "special"), (dv["C_u"], "diagonal"), (dv["C"], "b_last")]
    if vertex == "D":
        return [(dv["D_u"], "special"), (dv["C"], "shared")]
    return [(dv["D"], "shared"), (dv["D_u"], "diagonal"), (dv["C_u"], "special")]


def _chain_frames(surface: Surface, spike: Spike) -> List[Isometry]:
    frames = [Isometry.identity()]
    for ref in spike.crossings:
        frames.append(frames[-1] @ gluing_isometry(surface, ref))
    return frames


def _spike_point(surface: Surface, spike: Spike):
    return realize(surface.piece(spike.first_quad)).vertex("C")


def _merge(points: List[Tuple[float, str]]) -> List[Tuple[float, str]]:
    points = sorted(points)
    merged: List[Tuple[float, List[str]]] = []
    for x, kind in points:
        if merged and abs(x - merged[-1][0]) <= MERGE_TOL * max(1.0, abs(x)):
            merged[-1][1].append(kind)
        else:
            merged.append((x, [kind]))
    out = []
    for x, kinds in merged:
        if "b_first" in kinds or "b_last" in kinds:
            kind = "b_first" if "b_first" in kinds else "b_last"
        elif "diagonal" in kinds:
            kind = "diagonal"
        elif "shared" in kinds:
            kind = "shared"
        else:
            kind = "special"
        if len(kinds) > 2:
            logger.debug(f"{len(kinds)} fan endpoints merge at {x:.6g}")
        out.append((x, kind))
    return out


def _build_fan(surface: Surface, crown_index: int, spike_index: int, spike: Spike) -> SpikeFan:
    frames = _chain_frames(surface, spike)
    to_top = to_infinity(_spike_point(surface, spike))
    points = []
    last = len(spike.corners) - 1
    for k, (pid, vertex) in enumerate(spike.corners):
        role = "first" if k == 0 else "last" if k == last else "middle"
        m = to_top @ frames[k]
        for xi, kind in _fan_entries(surface.piece(pid), vertex, role):
            image = apply(m, xi)
            if image.infinite:
                raise HypStretchError(ErrorCode.NOT_A_CROWN, f"fan edge of {pid} runs into the spike")
            points.append((image.x, kind))
    ordered = _merge(points)
    kinds = [k for _, k in ordered]
    if kinds[0] == "b_last" and kinds[-1] == "b_first":
        ordered.reverse()
    elif not (kinds[0] == "b_first" and kinds[-1] == "b_last"):
        raise HypStretchError(ErrorCode.NOT_A_CROWN, f"boundary leaves are not the outer edges of the fan at {spike.first_quad}")
    name = f"crown{crown_index}/spike{spike_index}"
    edges = []
    for k in range(1, len(ordered) - 1):
        before = abs(ordered[k][0] - ordered[k - 1][0])
        after = abs(ordered[k + 1][0] - ordered[k][0])
        edges.append(FanEdge(f"{name}/e{k}", ordered[k][1], math.log(after / before)))
    first_s = surface.piece(spike.first_quad).s
    last_s = surface.piece(spike.last_quad).s
    return SpikeFan(spike, name, tuple(ordered), tuple(edges), first_s, last_s)


def _crown(surface: Surface, crown_index: int, decomposition: Optional[BlockDecomposition] = None) -> Crown:
    decomposition = decomposition or classify(surface)
    if not 0 <= crown_index < len(decomposition.crowns):
        raise HypStretchError(ErrorCode.NOT_A_CROWN, f"surface has {len(decomposition.crowns)} crowns, no index {crown_index}")
    return decomposition.crowns[crown_index]


def build_cylinder(surface: Surface, crown_index: int = 0, decomposition: Optional[BlockDecomposition] = None) -> CylinderModel:
    """Triangulated auxiliary cylinder of one crown, with the fan shears at every spike."""
    crown = _crown(surface, crown_index, decomposition)
    fans = tuple(_build_fan(surface, crown_index, i, sp) for i, sp in enumerate(crown.spikes))
    model = CylinderModel(surface, crown_index, crown, fans)
    logger.info(f"Cylinder of crown {crown_index}: {len(fans)} spikes, cases {model.case}")
    return model


def stretched_cylinder_shears(model: CylinderModel, t: float) -> List[Tuple[float, ...]]:
    """Fan shears per spike of the same crown on the stretched surface."""
    if t == 0.0:
        return [tuple(e.shear for e in fan.edges) for fan in model.fans]
    stretched = build_cylinder(generalized_stretch(model.surface, t, check=False), model.crown_index)
    out = []
    for before, after in zip(model.fans, stretched.fans):
        if [e.kind for e in before.edges] != [e.kind for e in after.edges]:
            raise HypStretchError(ErrorCode.NOT_A_CROWN, f"fan at {before.name} changes shape under stretching")
        out.append(tuple(e.shear for e in after.edges))
    return out


def stretch_difference_rhs(s_first: float, s_last: float, t: float) -> float:
    factor = math.exp(t)
    return (
        -displacement(factor * s_first) + factor * displacement(s_first)
        - displacement(factor * s_last) + factor * displacement(s_last)
    )


def stretch_difference_check(model: CylinderModel, t: float) -> List[float]:
    """Residual of the stretch difference formula at every spike."""
    factor = math.exp(t)
    residuals = []
    for fan, shears_t in zip(model.fans, stretched_cylinder_shears(model, t)):
        lhs = sum(shears_t) - factor * fan.total_shear
        rhs = stretch_difference_rhs(fan.first_s, fan.last_s, t)
        residuals.append(abs(lhs - rhs))
        logger.debug(f"{fan.name}: lhs {lhs:.12g} rhs {rhs:.12g}")
    return residuals


@dataclass(frozen=True)
class ShiftRecord:
    spike: str
    value_0: float
    value_t: float

    def residual(self, t: float) -> float:
        return abs(self.value_t - math.exp(t) * self.value_0)


def _spike_shift(surface: Surface, spike: Spike) -> float:
    frames = _chain_frames(surface, spike)
    xi = _spike_point(surface, spike)
    o_first = quad_center(surface.piece(spike.first_quad).s)
    last = realize(surface.piece(spike.last_quad))
    o_last = apply(frames[-1], quad_center(last.piece.s))
    # the developed leaf ends at the spike; pin that endpoint exactly
    leaf = Geodesic(apply(frames[-1], last.vertex("C")), xi)
    hit = horocycle_arc(xi, o_first, leaf)
    top = to_infinity(xi)
    return math.log(apply(top, hit).y / apply(top, o_last).y)


def horocyclic_shift(surface: Surface, crown_index: int, t: float) -> List[ShiftRecord]:
    """Offset along the next boundary leaf of the horocyclic image of each quad center.

    Positive values put the image closer to the spike than the next quad center.
    """
    crown = _crown(surface, crown_index)
    stretched = generalized_stretch(surface, t, check=False)
    crown_t = _crown(stretched, crown_index)
    records = []
    for i, (sp, sp_t) in enumerate(zip(crown.spikes, crown_t.spikes)):
        records.append(ShiftRecord(f"crown{crown_index}/spike{i}", _spike_shift(surface, sp), _spike_shift(stretched, sp_t)))
    return records


# ==============================================================================
# COCYCLES
# ==============================================================================

@dataclass
class StretchCocycle:
    t: float
    track: TrainTrack
    epsilon: Dict[str, float]
    rho0: Dict[str, float]
    rho_t: Dict[str, float]
    measures: Dict[str, Dict[str, float]] = field(default_factory=dict)
    core_measures: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def omega_epsilon(self) -> Dict[str, float]:
        """omega(epsilon^t, mu) for every leaf and core measure."""
        split, tables = split_to_generic(
            self.track, [self.epsilon] + list(self.measures.values()) + list(self.core_measures.values())
        )
        eps, rest = tables[0], tables[1:]
        names = list(self.measures) + list(self.core_measures)
        return {name: omega(split, eps, mu) for name, mu in zip(names, rest)}

    def leaf_lengths(self) -> Dict[str, float]:
        """omega(rho^t, mu) for every leaf measure: the leaf lengths at time t."""
        split, tables = split_to_generic(self.track, [self.rho_t] + list(self.measures.values()))
        return {name: omega(split, tables[0], mu) for name, mu in zip(self.measures, tables[1:])}

    def positive(self) -> Optional[bool]:
        """omega-positivity of rho^t against the leaf measures; None without measurable leaves."""
        if not self.measures:
            return None
        return positivity_test(self.track, self.rho_t, list(self.measures.values()))

    def is_rho_consistent(self, tol: float) -> bool:
        factor = math.exp(self.t)
        return all(abs(self.rho_t[b] - factor * self.rho0[b] - self.epsilon[b]) <= tol * max(1.0, abs(self.rho_t[b])) for b in self.rho_t)


class _TrackBuilder:
    def __init__(self):
        self.switches: List[Switch] = []
        self.open_ends: List[str] = []
        self.loops: List[Tuple[str, ...]] = []
        self.rho0: Dict[str, float] = {}
        self.rho_t: Dict[str, float] = {}
        self.epsilon: Dict[str, float] = {}

    def weigh(self, branch: str, rho0: float, rho_t: float, epsilon: float):
        self.rho0[branch] = rho0
        self.rho_t[branch] = rho_t
        self.epsilon[branch] = epsilon

    def track(self) -> TrainTrack:
        return TrainTrack(tuple(self.switches), frozenset(self.open_ends), tuple(self.loops))

    def measure(self, ones: Dict[str, float]) -> Dict[str, float]:
        mu = {b: 0.0 for b in self.rho0}
        mu.update(ones)
        return mu


def _add_crowns(builder: _TrackBuilder, surface: Surface, stretched: Surface, decomposition: BlockDecomposition, t: float):
    factor = math.exp(t)
    core = {}
    for j, crown in enumerate(decomposition.crowns):
        model = build_cylinder(surface, j, decomposition)
        shears_t = stretched_cylinder_shears(model, t) if t != 0.0 else None
        ones: Dict[str, float] = {}
        for quad_id in crown.quads:
            gap = realized_displacement(surface.piece(quad_id))
            gap_t = realized_displacement(stretched.piece(quad_id))
            sigma = surface.gluing_at((quad_id, "l2")).shear
            sigma_t = stretched.gluing_at((quad_id, "l2")).shear
            b = f"crown{j}/b:{quad_id}"
            builder.weigh(b, sigma + gap, sigma_t + gap_t, gap_t - factor * gap)
            ones[b] = 1.0
        for i, fan in enumerate(model.fans):
            a = f"{fan.name}/a"
            after = shears_t[i] if shears_t is not None else tuple(e.shear for e in fan.edges)
            for edge, s_t in zip(fan.edges, after):
                builder.weigh(edge.name, edge.shear, s_t, s_t - factor * edge.shear)
                builder.open_ends.append(edge.name)
            outgoing = (
                (f"crown{j}/b:{fan.spike.first_quad}",)
                + tuple(e.name for e in fan.edges)
                + (f"crown{j}/b:{fan.spike.last_quad}",)
            )
            builder.weigh(
                a,
                sum(builder.rho0[b] for b in outgoing),
                sum(builder.rho_t[b] for b in outgoing),
                0.0,
            )
            builder.open_ends.append(a)
            builder.switches.append(Switch(fan.name, (a,), outgoing))
            ones[a] = 2.0
        core[f"core{j}"] = ones
    return core


def _add_leaf_chain(builder: _TrackBuilder, name: str, parts: Tuple[float, ...], parts_t: Tuple[float, ...], t: float, on_right: bool) -> Dict[str, float]:
    """A leaf branch c0 -> c1 -> ... peeling off one branch per part; returns the leaf's measure.

    rho on the peeled branch k is parts[k], so omega(rho, mu_leaf) is the
    signed sum of the parts: plus when they leave on the right, minus on the left.
    """
    factor = math.exp(t)
    n = len(parts)
    for k in range(n + 1):
        r0, rt = sum(parts[k:]), sum(parts_t[k:])
        builder.weigh(f"{name}/c{k}", r0, rt, rt - factor * r0)
    for k in range(n):
        builder.weigh(f"{name}/d{k}", parts[k], parts_t[k], parts_t[k] - factor * parts[k])
        pair = (f"{name}/c{k + 1}", f"{name}/d{k}") if on_right else (f"{name}/d{k}", f"{name}/c{k + 1}")
        builder.switches.append(Switch(f"{name}/z{k}", (f"{name}/c{k}",), pair))
        builder.open_ends.append(f"{name}/d{k}")
    builder.open_ends.extend([f"{name}/c0", f"{name}/c{n}"])
    return {f"{name}/c{k}": 1.0 for k in range(n + 1)}


def _add_closed_leaves(builder: _TrackBuilder, surface: Surface, stretched: Surface, t: float) -> Dict[str, Dict[str, float]]:
    """Each side of a closed leaf, carried by the horocyclic displacements of its spiralling corners."""
    after = {frozenset(c.corners): c for c in vertex_classes(stretched)}
    measures = {}
    for k, pair in enumerate(closed_leaves(surface)):
        for side, vc in zip("ab", pair):
            twin = after.get(frozenset(vc.corners))
            if twin is None or len(twin.displacements) != len(vc.displacements):
                raise HypStretchError(ErrorCode.INVALID_SURFACE, f"closed leaf {k} has no counterpart after stretching")
            name = f"leaf{k}{side}"
            on_right = sum(vc.displacements) > 0.0
            measures[name] = _add_leaf_chain(builder, name, vc.displacements, twin.displacements, t, on_right)
    return measures


def _leaf_split(piece, label: str) -> Tuple[float, float]:
    """Signed arcs from both ends of a finite leaf to the piece's special point on it."""
    real = realize(piece)
    e = real.edge(label)
    point = next(sp.point for sp in special_points(piece).values() if sp.edge == label)
    return (
        signed_distance_from_vertex(real, label, real.vertex_name_of(e.start), point),
        signed_distance_from_vertex(real, label, real.vertex_name_of(e.end), point),
    )


def _add_finite_leaves(builder: _TrackBuilder, surface: Surface, stretched: Surface, t: float) -> Dict[str, Dict[str, float]]:
    """Each finite leaf seen from both of its pieces, split at that piece's special point."""
    measures = {}
    for i, gl in enumerate(surface.gluings):
        if realize(surface.piece(gl.first[0])).edge(gl.first[1]).kind is not EdgeKind.FINITE:
            continue
        for pid, label in (gl.first, gl.second):
            name = f"arc{i}:{pid}.{label}"
            parts = _leaf_split(surface.piece(pid), label)
            parts_t = _leaf_split(stretched.piece(pid), label)
            measures[name] = _add_leaf_chain(builder, name, parts, parts_t, t, on_right=True)
    return measures


def _add_cusps(builder: _TrackBuilder, surface: Surface, stretched: Surface, t: float):
    factor = math.exp(t)
    after = {frozenset(c.corners): c for c in vertex_classes(stretched)}
    j = 0
    for vc in vertex_classes(surface):
        if not vc.is_parabolic():
            continue
        twin = after.get(frozenset(vc.corners))
        gaps_t = twin.displacements if twin is not None else vc.displacements
        name = f"cusp{j}"
        outgoing = []
        for k, (d0, dt) in enumerate(zip(vc.displacements, gaps_t)):
            branch = f"{name}/d{k}"
            builder.weigh(branch, d0, dt, dt - factor * d0)
            outgoing.append(branch)
        entry = f"{name}/in"
        builder.weigh(entry, sum(vc.displacements), sum(gaps_t), sum(gaps_t) - factor * sum(vc.displacements))
        builder.switches.append(Switch(name, (entry,), tuple(outgoing)))
        builder.open_ends.extend([entry] + outgoing)
        builder.loops.append(tuple(outgoing))
        j += 1


def epsilon_cocycle(surface: Surface, decomposition: Optional[BlockDecomposition] = None, t: float = 0.0) -> StretchCocycle:
    """epsilon^t, rho^0 and rho^t on the cocycle track of the surface."""
    decomposition = decomposition or classify(surface)
    stretched = generalized_stretch(surface, t, check=False)
    builder = _TrackBuilder()
    core = _add_crowns(builder, surface, stretched, decomposition, t)
    measures = _add_closed_leaves(builder, surface, stretched, t)
    measures.update(_add_finite_leaves(builder, surface, stretched, t))
    _add_cusps(builder, surface, stretched, t)
    track = builder.track()
    residuals = switch_residuals(track, builder.epsilon)
    tol = 1e3 * get_tolerance()
    for name, value in residuals.items():
        if value >= tol:
            raise HypStretchError(ErrorCode.SWITCH_VIOLATION, f"switch {name} is off by {value:.3g}", switch=name)
    if not check_cusp_condition(track, builder.epsilon, tol):
        raise HypStretchError(ErrorCode.SWITCH_VIOLATION, "epsilon breaks the cusp condition")
    cocycle = StretchCocycle(
        t,
        track,
        builder.epsilon,
        builder.rho0,
        builder.rho_t,
        {k: builder.measure(v) for k, v in measures.items()},
        {k: builder.measure(v) for k, v in core.items()},
    )
    logger.info(f"Cocycle track: {len(track.switches)} switches, {len(builder.rho0)} branches")
    return cocycle


# ==============================================================================
# LEAF LENGTHS
# ==============================================================================

@dataclass(frozen=True)
class LeafRecord:
    name: str
    kind: str
    length_0: float
    length_t: float

    def residual(self, t: float) -> float:
        return abs(self.length_t - math.exp(t) * self.length_0)


def leaf_stretch_report(surface: Surface, t: float, stretched: Optional[Surface] = None) -> List[LeafRecord]:
    """Lengths of the finite and closed leaves before and after stretching."""
    stretched = stretched or generalized_stretch(surface, t, check=False)
    records = []
    for gl in surface.gluings:
        e = realize(surface.piece(gl.first[0])).edge(gl.first[1])
        if e.kind is not EdgeKind.FINITE:
            continue
        e_t = realize(stretched.piece(gl.first[0])).edge(gl.first[1])
        name = f"{gl.first[0]}.{gl.first[1]}"
        records.append(LeafRecord(name, "finite", dist(e.start, e.end), dist(e_t.start, e_t.end)))
    after = {frozenset(c.corners): c.length for pair in closed_leaves(stretched) for c in pair}
    for side, _ in closed_leaves(surface):
        corner = side.corners[0]
        name = f"{corner[0]}.{corner[1]}"
        records.append(LeafRecord(name, "closed", side.length, after.get(frozenset(side.corners), math.nan)))
    return records
