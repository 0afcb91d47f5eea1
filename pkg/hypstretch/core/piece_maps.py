# ==============================================================================
# STRETCH MAPS OF PIECES
# ==============================================================================
# Pointwise stretch maps: Thurston's map of the ideal triangle and the averaged
# maps of quads and pentagons. A quad or pentagon is doubled along its boundary
# edges, the double is triangulated and stretched triangle by triangle, and the
# result is averaged with its mirror-conjugate by taking geodesic midpoints.
# ==============================================================================

import logging
import math
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np

from hypstretch.core.hyp_core import (
    Geodesic,
    Isometry,
    UhpPoint,
    apply,
    dist,
    ideal,
    midpoint,
    reflection_across,
)
from hypstretch.core.pieces import (
    Hexagon,
    Pentagon,
    Piece,
    Quad,
    Triangle,
    pentagon_constants,
    realize,
)
from hypstretch.utils.config import get_max_unroll
from hypstretch.utils.errors import ErrorCode, HypStretchError

logger = logging.getLogger(__name__)

PointMap = Callable[[UhpPoint], UhpPoint]

# z -> 1/(1-z) permutes 0 -> 1 -> inf -> 0
_ROTATION = Isometry(0.0, 1.0, -1.0, 1.0)
_ROTATION_INV = _ROTATION.inverse()
_SLACK = 1e-9


def _in_canonical_triangle(z: complex, tol: float = _SLACK) -> bool:
    return -tol <= z.real <= 1.0 + tol and abs(z - 0.5) >= 0.5 - tol


def _stretch_at_infinity(z: complex, factor: float) -> complex:
    return complex(z.real, z.imag ** factor)


def triangle_stretch(point: UhpPoint, t: float) -> UhpPoint:
    """Thurston's stretch map of the ideal triangle (0, 1, inf).

    Horocyclic leaves at distance d from the centers go to distance e^t d,
    affinely along each leaf; the central unfoliated region is fixed.
    """
    return UhpPoint.from_complex(_triangle_stretch_complex(point.z, t))


def _triangle_stretch_complex(z: complex, t: float) -> complex:
    if not _in_canonical_triangle(z):
        raise HypStretchError(ErrorCode.OUT_OF_PIECE, f"({z.real}, {z.imag}) is outside the ideal triangle")
    factor = math.exp(t)
    w = z
    for turns in range(3):
        if w.imag >= 1.0 and -_SLACK <= w.real <= 1.0 + _SLACK:
            image = _stretch_at_infinity(w, factor)
            for _ in range(turns):
                image = _ROTATION_INV.act_complex(image)
            return image
        w = _ROTATION.act_complex(w)
    return z


# ==============================================================================
# QUADRILATERAL
# ==============================================================================

def _doubled_quad_map(z: complex, s: float, s_t: float, t: float) -> complex:
    """Stretch of the ideal quad (-1, 0, e^s, inf) triangulated by the diagonal (0, inf)."""
    if z.real >= 0.0:
        # triangle (0, e^s, inf) with chart z -> e^s z
        w = _triangle_stretch_complex(z * math.exp(-s), t)
        return w * math.exp(s_t)
    # triangle (-1, 0, inf) with chart z -> z - 1
    return _triangle_stretch_complex(z + 1.0, t) - 1.0


def _quad_mirror(s: float) -> Isometry:
    radius = math.sqrt(1.0 + math.exp(s))
    return reflection_across(Geodesic(ideal(-1.0 - radius), ideal(-1.0 + radius)))


def quad_map(piece: Quad, t: float) -> Tuple[PointMap, PointMap]:
    """The doubled-triangle map and its mirror-conjugate for Quad(s)."""
    s = piece.s
    s_t = math.exp(t) * s
    sigma, sigma_t = _quad_mirror(s), _quad_mirror(s_t)

    def psi(p: UhpPoint) -> UhpPoint:
        return UhpPoint.from_complex(_doubled_quad_map(p.z, s, s_t, t))

    def psi_mirror(p: UhpPoint) -> UhpPoint:
        return apply(sigma_t, psi(apply(sigma, p)))

    return psi, psi_mirror


# ==============================================================================
# PENTAGON
# ==============================================================================

class _PentagonFan:
    """Lift of the doubled pentagon seen from Z=0, after z -> -1/z.

    The lift is the half-plane x > w*, tiled by the triangles (x_(j+1), x_j, inf)
    with x_0 = 1, x_1 = 0, x_2 = -e^(-s1) and x_(j+2) = g(x_j), where g is the
    deck translation x -> w* + lam (x - w*) along the doubled leaf l1.
    """

    def __init__(self, piece: Pentagon):
        k = pentagon_constants(piece)
        self.w_star = -1.0 / k["W"]
        self.lam = math.exp(-(piece.s1 + piece.s2))
        self.base = (1.0, 0.0, -math.exp(-piece.s1))

    def deck(self, x: float, power: int) -> float:
        return self.w_star + (self.lam ** power) * (x - self.w_star)

    def locate(self, x: float) -> Tuple[int, int]:
        """Deck power k and strip j in {0, 1} with g^-k(x) in [x_(j+1), x_j]."""
        cap = get_max_unroll()
        x0 = self.base[0]
        ratio = (x - self.w_star) / (x0 - self.w_star)
        k = int(math.floor(math.log(ratio) / math.log(self.lam))) if ratio > 0 else 0
        for _ in range(4):
            y = self.deck(x, -k)
            if y > x0:
                k += 1
            elif y < self.base[2]:
                k -= 1
            else:
                break
        if abs(k) > cap:
            raise HypStretchError(ErrorCode.UNROLL_LIMIT, f"needs {abs(k)} deck translations, cap is {cap}")
        y = self.deck(x, -k)
        return k, (0 if y >= self.base[1] else 1)


def _pentagon_fan_map(z: complex, fan: _PentagonFan, fan_t: _PentagonFan, t: float) -> complex:
    if abs(z.real - fan.w_star) <= 1e-13 * max(1.0, abs(fan.w_star)):
        return complex(fan_t.w_star, z.imag ** math.exp(t))
    if z.real < fan.w_star:
        raise HypStretchError(ErrorCode.OUT_OF_PIECE, "point lies beyond the doubled leaf")
    k, j = fan.locate(z.real)
    scale = fan.lam ** (-k)
    w = fan.w_star + scale * (z - fan.w_star)
    right, left = fan.base[j], fan.base[j + 1]
    right_t, left_t = fan_t.base[j], fan_t.base[j + 1]
    u = (w - left) / (right - left)
    u = complex(min(max(u.real, 0.0), 1.0), u.imag)
    image = left_t + (right_t - left_t) * _triangle_stretch_complex(u, t)
    return fan_t.w_star + (fan_t.lam ** k) * (image - fan_t.w_star)


_FLIP = Isometry(0.0, -1.0, 1.0, 0.0)


def _a1_mirror(piece: Pentagon) -> Isometry:
    k = pentagon_constants(piece)
    c, r = k["e1"], k["r_prime"]
    return reflection_across(Geodesic(ideal(c - r), ideal(c + r)))


def pentagon_map(piece: Pentagon, t: float) -> Tuple[PointMap, PointMap]:
    """The fan map of the doubled pentagon and its conjugate by the a1 mirror."""
    stretched = Pentagon(math.exp(t) * piece.s1, math.exp(t) * piece.s2)
    fan, fan_t = _PentagonFan(piece), _PentagonFan(stretched)
    mirror, mirror_t = _a1_mirror(piece), _a1_mirror(stretched)

    def psi(p: UhpPoint) -> UhpPoint:
        w = _FLIP.act_complex(p.z)
        image = _pentagon_fan_map(w, fan, fan_t, t)
        return UhpPoint.from_complex(_FLIP.inverse().act_complex(image))

    def psi_mirror(p: UhpPoint) -> UhpPoint:
        return apply(mirror_t, psi(apply(mirror, p)))

    return psi, psi_mirror


# ==============================================================================
# AVERAGING
# ==============================================================================

def midpoint_average(f: PointMap, g: PointMap) -> PointMap:
    """The map sending p to the midpoint of the segment from f(p) to g(p)."""
    def averaged(p: UhpPoint) -> UhpPoint:
        return midpoint(f(p), g(p))
    return averaged


def averaged_stretch_eval(piece: Piece, t: float, point: UhpPoint) -> UhpPoint:
    """Averaged stretch map of a quad or pentagon evaluated at a point of its realization."""
    if isinstance(piece, Hexagon):
        raise HypStretchError(ErrorCode.HEXAGON_UNSUPPORTED, "hexagon stretch maps are not evaluated pointwise")
    if isinstance(piece, Triangle):
        return triangle_stretch(point, t)
    if not realize(piece).contains(point, _SLACK):
        raise HypStretchError(ErrorCode.OUT_OF_PIECE, f"{point} is outside the {piece.kind}")
    if isinstance(piece, Quad):
        psi, psi_mirror = quad_map(piece, t)
    elif isinstance(piece, Pentagon):
        psi, psi_mirror = pentagon_map(piece, t)
    else:
        raise HypStretchError(ErrorCode.INVALID_SHEARS, f"unsupported piece {piece!r}")
    return midpoint(psi(point), psi_mirror(point))


def piece_stretch_map(piece: Piece, t: float) -> PointMap:
    return lambda p: averaged_stretch_eval(piece, t, p)


def sampled_lipschitz(f: PointMap, points: Sequence[UhpPoint], pairs: int, rng, min_dist: float = 1e-6) -> float:
    """Largest distance ratio over random pairs of the given points."""
    if len(points) < 2:
        return 0.0
    images = [f(p) for p in points]
    idx = rng.integers(0, len(points), size=(pairs, 2))
    ratios = []
    for i, j in idx:
        if i == j:
            continue
        d = dist(points[i], points[j])
        if d < min_dist:
            continue
        ratios.append(dist(images[i], images[j]) / d)
    return float(np.max(ratios)) if ratios else 0.0


def grid_points(xs: Iterable[float], ys: Iterable[float], keep: Callable[[UhpPoint], bool]) -> List[UhpPoint]:
    """Grid of points filtered by a membership test."""
    out = []
    for x in xs:
        for y in ys:
            p = UhpPoint(float(x), float(y))
            if keep(p):
                out.append(p)
    return out
