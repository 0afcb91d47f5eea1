# ==============================================================================
# SVG RENDERING
# ==============================================================================
# Draws the pieces of a surface in the upper half-plane chart. Pieces are laid
# out breadth-first from the first piece through the gluing isometries; l-edges
# are drawn as lamination leaves, a-edges as boundary, ideal vertices as ticks
# on the real line. Optional layers: centers and special points, horocyclic
# foliation leaves.
# ==============================================================================

import logging
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import svgwrite

from hypstretch.core.hyp_core import IdealPoint, Isometry, UhpPoint, apply, to_infinity
from hypstretch.core.pieces import (
    Hexagon,
    Quad,
    Triangle,
    centers,
    foliation,
    realize,
    special_points,
)
from hypstretch.data.surface_io import Surface
from hypstretch.services.surface import gluing_isometry, vertex_classes
from hypstretch.utils.errors import ErrorCode, HypStretchError

logger = logging.getLogger(__name__)

WIDTH = 900.0
X_LIMIT = 50.0

LEAF_STYLE = {"stroke": "#1f4e8c", "fill": "none"}
BOUNDARY_STYLE = {"stroke": "#b03a2e", "fill": "none"}
FOLIATION_STYLE = {"stroke": "#7d9c5a", "fill": "none", "opacity": 0.7}


@dataclass(frozen=True)
class RenderOptions:
    clip: float = 4.0
    foliation: bool = False
    marks: bool = True
    leaves_per_sector: int = 6
    stroke_width: float = 1.2


def layout(surface: Surface) -> Dict[str, Isometry]:
    """Breadth-first placement of every piece in the chart of the first one."""
    first = surface.piece_ids[0]
    frames = {first: Isometry.identity()}
    queue = deque([first])
    while queue:
        pid = queue.popleft()
        for label in realize(surface.piece(pid)).labels:
            gl = surface.gluing_at((pid, label))
            if gl is None:
                continue
            other = gl.other((pid, label))[0]
            if other in frames:
                continue
            frames[other] = frames[pid] @ gluing_isometry(surface, (pid, label))
            queue.append(other)
    return frames


def _endpoint(v: Union[UhpPoint, IdealPoint]) -> Optional[Tuple[float, float]]:
    if isinstance(v, UhpPoint):
        return v.x, v.y
    if v.infinite:
        return None
    return v.x, 0.0


def geodesic_segment(u, v, clip: float, n: int = 48) -> np.ndarray:
    """Polyline of the geodesic segment between two points or ideal points, cut at height clip."""
    a, b = _endpoint(u), _endpoint(v)
    if a is None and b is None:
        raise HypStretchError(ErrorCode.INVALID_POINT, "segment between two points at infinity")
    if a is None or b is None or abs(a[0] - b[0]) <= 1e-12 * max(1.0, abs(a[0])):
        x = (a or b)[0]
        ya = a[1] if a is not None else clip
        yb = b[1] if b is not None else clip
        ys = np.linspace(ya, yb, n)
        pts = np.column_stack([np.full(n, x), ys])
    else:
        c = ((a[0] ** 2 + a[1] ** 2) - (b[0] ** 2 + b[1] ** 2)) / (2.0 * (a[0] - b[0]))
        r = math.hypot(a[0] - c, a[1])
        ta, tb = math.atan2(a[1], a[0] - c), math.atan2(b[1], b[0] - c)
        thetas = np.linspace(ta, tb, n)
        pts = np.column_stack([c + r * np.cos(thetas), r * np.sin(thetas)])
    pts[:, 1] = np.minimum(pts[:, 1], clip)
    return pts


def _foliation_runs(piece, clip: float, per_sector: int) -> List[np.ndarray]:
    """Horocycle arcs of the foliation, in piece coordinates, kept inside the support."""
    fol = foliation(piece)
    real = realize(piece)
    runs = []
    for sector in fol.sectors:
        top = to_infinity(sector.center)
        back = top.inverse()
        xs = []
        for _, v in real.vertices:
            image = apply(top, v)
            if isinstance(image, UhpPoint):
                xs.append(image.x)
            elif not image.infinite:
                xs.append(image.x)
        lo, hi = min(xs) - 1.0, max(xs) + 1.0
        for h in np.exp(np.linspace(-3.0, 3.0, 4 * per_sector)):
            run: List[Tuple[float, float]] = []
            for x in np.linspace(lo, hi, 160):
                p = apply(back, UhpPoint(float(x), float(h)))
                try:
                    name, _ = fol.leaf(p)
                    inside = name == sector.name
                except HypStretchError:
                    inside = False
                if inside and p.y <= clip:
                    run.append((p.x, p.y))
                elif run:
                    runs.append(np.array(run))
                    run = []
            if len(run) > 1:
                runs.append(np.array(run))
    return [r for r in runs if len(r) > 1]


def _marks(piece) -> List[Tuple[str, UhpPoint]]:
    out = []
    if isinstance(piece, Triangle):
        return [(f"O_T{k}", c) for k, c in enumerate(centers(piece).values(), start=1)]
    if isinstance(piece, Quad):
        out.append(("O_Q", centers(piece)["l2"]))
    seen = set()
    for sp in special_points(piece).values():
        if sp.name in seen:
            continue
        seen.add(sp.name)
        out.append((sp.name, sp.point))
    return out


class _Canvas:
    def __init__(self, x_lo: float, x_hi: float, clip: float):
        self.x_lo, self.x_hi, self.clip = x_lo, x_hi, clip
        self.scale = WIDTH / max(x_hi - x_lo, 1e-6)

    @property
    def size(self) -> Tuple[float, float]:
        return WIDTH, self.clip * self.scale + 20.0

    def xy(self, x: float, y: float) -> Tuple[float, float]:
        return round((x - self.x_lo) * self.scale, 3), round((self.clip - y) * self.scale, 3)

    def points(self, pts: np.ndarray) -> List[Tuple[float, float]]:
        return [self.xy(float(x), float(y)) for x, y in pts]


def _extent(surface: Surface, frames: Dict[str, Isometry]) -> Tuple[float, float]:
    xs = []
    for pid, m in frames.items():
        for _, v in realize(surface.piece(pid)).vertices:
            image = apply(m, v)
            if isinstance(image, UhpPoint) or not image.infinite:
                xs.append(min(max(image.x, -X_LIMIT), X_LIMIT))
    lo, hi = min(xs), max(xs)
    pad = 0.1 * max(hi - lo, 1.0)
    return lo - pad, hi + pad


def render_surface(surface: Surface, options: RenderOptions = RenderOptions()) -> str:
    """SVG document of the laid-out surface."""
    frames = layout(surface)
    canvas = _Canvas(*_extent(surface, frames), options.clip)
    dwg = svgwrite.Drawing(profile="tiny", size=canvas.size)
    sw = options.stroke_width
    closed_corners = set()
    for vc in vertex_classes(surface):
        if not vc.is_parabolic():
            closed_corners.update(vc.corners)
    for pid, piece in surface.pieces:
        m = frames[pid]
        real = realize(piece)
        group = dwg.g(id=f"piece-{pid}")
        for e in real.edges:
            pts = geodesic_segment(apply(m, e.start), apply(m, e.end), options.clip)
            style = LEAF_STYLE if e.is_leaf else BOUNDARY_STYLE
            group.add(dwg.polyline(points=canvas.points(pts), stroke_width=sw, id=f"{pid}-{e.label}", **style))
        for name, v in real.vertices:
            image = apply(m, v)
            if isinstance(image, IdealPoint) and not image.infinite:
                x, y = canvas.xy(image.x, 0.0)
                color = "#c0392b" if (pid, name) in closed_corners else "#555555"
                group.add(dwg.line(start=(x, y - 6.0), end=(x, y + 6.0), stroke=color, stroke_width=sw, id=f"{pid}-{name}"))
        if options.foliation and not isinstance(piece, Hexagon):
            leaves = dwg.g(id=f"foliation-{pid}", **FOLIATION_STYLE)
            for run in _foliation_runs(piece, options.clip, options.leaves_per_sector):
                mapped = np.array([[q.x, q.y] for q in (apply(m, UhpPoint(float(x), float(y))) for x, y in run)])
                mapped[:, 1] = np.minimum(mapped[:, 1], options.clip)
                leaves.add(dwg.polyline(points=canvas.points(mapped), stroke_width=0.6 * sw))
            group.add(leaves)
        if options.marks:
            for name, point in _marks(piece):
                image = apply(m, point)
                if image.y > options.clip:
                    continue
                x, y = canvas.xy(image.x, image.y)
                group.add(dwg.circle(center=(x, y), r=3.0, fill="#222222", id=f"{pid}-{name}"))
                group.add(dwg.text(name, insert=(x + 4.0, y - 4.0), font_size=10))
        dwg.add(group)
    logger.info(f"Rendered {len(surface.pieces)} pieces")
    return dwg.tostring()


def save_render(surface: Surface, path: Union[str, Path], options: RenderOptions = RenderOptions()):
    text = render_surface(surface, options)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise HypStretchError(ErrorCode.BAD_FILE, f"cannot write {path}: {e}", path=path) from e
