# ==============================================================================
# UPPER HALF-PLANE GEOMETRY
# ==============================================================================
# Points, ideal points, geodesics, horocycles and isometries of H^2 in the
# upper half-plane model. Infinity is a symbolic ideal point; every Mobius
# formula special-cases it. Isometries are 2x2 real matrices normalized to
# determinant 1, optionally preceded by the reflection z -> -conj(z).
# ==============================================================================

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from hypstretch.utils.config import get_tolerance
from hypstretch.utils.errors import ErrorCode, HypStretchError

# Relative size below which c*x + d counts as a pole of the Mobius map.
_POLE_EPS = 1e-14


@dataclass(frozen=True)
class UhpPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)) or self.y <= 0.0:
            raise HypStretchError(ErrorCode.INVALID_POINT, f"not in the upper half-plane: ({self.x}, {self.y})")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "UhpPoint":
        return cls(z.real, z.imag)

    def __repr__(self) -> str:
        return f"UhpPoint({self.x:.12g}, {self.y:.12g})"


@dataclass(frozen=True)
class IdealPoint:
    x: float = 0.0
    infinite: bool = False

    def __post_init__(self):
        if self.infinite:
            object.__setattr__(self, "x", 0.0)
        elif not math.isfinite(self.x):
            raise HypStretchError(ErrorCode.INVALID_POINT, f"ideal point must be finite or symbolic: {self.x}")

    def is_close(self, other: "IdealPoint", tol: Optional[float] = None) -> bool:
        tol = get_tolerance() if tol is None else tol
        if self.infinite or other.infinite:
            return self.infinite and other.infinite
        return abs(self.x - other.x) <= tol * max(1.0, abs(self.x))

    def __repr__(self) -> str:
        return "IdealPoint(inf)" if self.infinite else f"IdealPoint({self.x:.12g})"


INFINITY = IdealPoint(infinite=True)


def ideal(x: float) -> IdealPoint:
    return IdealPoint(float(x))


@dataclass(frozen=True)
class Geodesic:
    """Oriented complete geodesic from p to q."""
    p: IdealPoint
    q: IdealPoint

    def __post_init__(self):
        if self.p.is_close(self.q, 1e-15):
            raise HypStretchError(ErrorCode.INVALID_POINT, "geodesic endpoints coincide")

    def reversed(self) -> "Geodesic":
        return Geodesic(self.q, self.p)

    def has_endpoint(self, xi: IdealPoint, tol: Optional[float] = None) -> bool:
        return self.p.is_close(xi, tol) or self.q.is_close(xi, tol)


@dataclass(frozen=True)
class Horocycle:
    center: IdealPoint
    anchor: UhpPoint

    def height(self) -> float:
        """Height of the horocycle once its center is sent to infinity."""
        return apply(to_infinity(self.center), self.anchor).y

    def same_as(self, other: "Horocycle", tol: Optional[float] = None) -> bool:
        tol = get_tolerance() if tol is None else tol
        if not self.center.is_close(other.center, tol):
            return False
        return abs(math.log(self.height() / other.height())) <= tol


# ==============================================================================
# ISOMETRIES
# ==============================================================================

@dataclass(frozen=True)
class Isometry:
    a: float
    b: float
    c: float
    d: float
    reflect: bool = False

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not math.isfinite(det) or det <= 0.0:
            raise HypStretchError(ErrorCode.DEGENERATE_ISOMETRY, f"Isometry matrix needs a positive determinant, got {det}", det=det)
        s = math.sqrt(det)
        if abs(s - 1.0) > 0.0:
            object.__setattr__(self, "a", self.a / s)
            object.__setattr__(self, "b", self.b / s)
            object.__setattr__(self, "c", self.c / s)
            object.__setattr__(self, "d", self.d / s)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diagonal(cls, log_scale: float) -> "Isometry":
        """z -> e^log_scale * z."""
        h = math.exp(log_scale / 2.0)
        return cls(h, 0.0, 0.0, 1.0 / h)

    @classmethod
    def translation(cls, dx: float) -> "Isometry":
        return cls(1.0, dx, 0.0, 1.0)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def _conjugated(self) -> "Isometry":
        return Isometry(self.a, -self.b, -self.c, self.d)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        # (M1 R^r1)(M2 R^r2) = M1 conj^r1(M2) R^(r1 xor r2)
        m2 = other._conjugated() if self.reflect else other
        return Isometry(
            self.a * m2.a + self.b * m2.c,
            self.a * m2.b + self.b * m2.d,
            self.c * m2.a + self.d * m2.c,
            self.c * m2.b + self.d * m2.d,
            self.reflect != other.reflect,
        )

    def inverse(self) -> "Isometry":
        if self.reflect:
            return Isometry(self.d, self.b, self.c, self.a, True)
        return Isometry(self.d, -self.b, -self.c, self.a)

    def act_complex(self, z: complex) -> complex:
        if self.reflect:
            z = -z.conjugate()
        return (self.a * z + self.b) / (self.c * z + self.d)

    def act_ideal(self, xi: IdealPoint) -> IdealPoint:
        if xi.infinite:
            if self.c == 0.0:
                return INFINITY
            return IdealPoint(self.a / self.c)
        x = -xi.x if self.reflect else xi.x
        den = self.c * x + self.d
        if abs(den) <= _POLE_EPS * (abs(self.c * x) + abs(self.d)):
            return INFINITY
        return IdealPoint((self.a * x + self.b) / den)


Transformable = Union[UhpPoint, IdealPoint, Geodesic, Horocycle]


def apply(m: Isometry, obj: Transformable) -> Transformable:
    """Action of an isometry on any primitive."""
    if isinstance(obj, UhpPoint):
        w = m.act_complex(obj.z)
        return UhpPoint(w.real, max(w.imag, 1e-300))
    if isinstance(obj, IdealPoint):
        return m.act_ideal(obj)
    if isinstance(obj, Geodesic):
        return Geodesic(m.act_ideal(obj.p), m.act_ideal(obj.q))
    if isinstance(obj, Horocycle):
        return Horocycle(m.act_ideal(obj.center), apply(m, obj.anchor))
    raise TypeError(f"Cannot apply an isometry to {type(obj).__name__}")


def iso_to_axis(u: IdealPoint, v: IdealPoint) -> Isometry:
    """Orientation-preserving isometry sending u to 0 and v to infinity."""
    if u.infinite:
        return Isometry(0.0, -1.0, 1.0, -v.x)
    if v.infinite:
        return Isometry.translation(-u.x)
    k = 1.0 if u.x > v.x else -1.0
    return Isometry(k, -k * u.x, 1.0, -v.x)


def to_infinity(xi: IdealPoint) -> Isometry:
    """Orientation-preserving isometry sending xi to infinity."""
    if xi.infinite:
        return Isometry.identity()
    return Isometry(0.0, -1.0, 1.0, -xi.x)


def axis_frame(g: Geodesic, origin: Optional[UhpPoint] = None) -> Isometry:
    """Sends g to the imaginary axis oriented upward, and origin (if given) to i."""
    t = iso_to_axis(g.p, g.q)
    if origin is None:
        return t
    h = abs(t.act_complex(origin.z))
    return Isometry.diagonal(-math.log(h)) @ t


def frame_from_triple(p: IdealPoint, q: IdealPoint, r: IdealPoint) -> Isometry:
    """Isometry sending 0, 1, infinity to the counter-clockwise triple p, q, r."""
    t = iso_to_axis(p, r)
    w = t.act_ideal(q)
    if w.infinite or w.x <= 0.0:
        raise HypStretchError(ErrorCode.INVALID_POINT, "ideal triple is not counter-clockwise")
    return (Isometry.diagonal(-math.log(w.x)) @ t).inverse()


# ==============================================================================
# DISTANCES AND CONSTRUCTIONS
# ==============================================================================

def dist(p: UhpPoint, q: UhpPoint) -> float:
    """Hyperbolic distance, arccosh(1 + |p-q|^2 / (2 y_p y_q)) in a stable form."""
    chord = math.hypot(p.x - q.x, p.y - q.y)
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(p.y * q.y)))


def points_close(p: UhpPoint, q: UhpPoint, tol: Optional[float] = None) -> bool:
    tol = get_tolerance() if tol is None else tol
    return dist(p, q) <= tol


def _to_hyperboloid(p: UhpPoint) -> Tuple[float, float, float]:
    r2 = p.x * p.x + p.y * p.y
    return ((1.0 + r2) / (2.0 * p.y), (r2 - 1.0) / (2.0 * p.y), p.x / p.y)


def midpoint(p: UhpPoint, q: UhpPoint) -> UhpPoint:
    """Midpoint of the geodesic segment, computed on the hyperboloid."""
    x0, x1, x2 = _to_hyperboloid(p)
    y0, y1, y2 = _to_hyperboloid(q)
    s0, s1, s2 = x0 + y0, x1 + y1, x2 + y2
    norm = math.sqrt(s0 * s0 - s1 * s1 - s2 * s2)
    m0, m1, m2 = s0 / norm, s1 / norm, s2 / norm
    y = 1.0 / (m0 - m1)
    return UhpPoint(m2 * y, y)


def geodesic_through(p: UhpPoint, q: UhpPoint) -> Geodesic:
    """Complete geodesic through p and q, oriented from p toward q."""
    if abs(p.x - q.x) <= 1e-14 * max(1.0, abs(p.x)):
        if q.y > p.y:
            return Geodesic(ideal(p.x), INFINITY)
        return Geodesic(INFINITY, ideal(p.x))
    c = (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / (2.0 * (q.x - p.x))
    r = math.hypot(p.x - c, p.y)
    if q.x > p.x:
        return Geodesic(ideal(c - r), ideal(c + r))
    return Geodesic(ideal(c + r), ideal(c - r))


def geodesic_from_point(p: UhpPoint, xi: IdealPoint) -> Geodesic:
    """Complete geodesic through p ending at the ideal point xi."""
    t = to_infinity(xi)
    w = apply(t, p)
    foot = apply(t.inverse(), IdealPoint(w.x))
    return Geodesic(foot, xi)


def foot_of_perpendicular(p: Union[UhpPoint, IdealPoint], g: Geodesic) -> UhpPoint:
    """Nearest point of g to p (for an ideal p, the foot of the perpendicular from p)."""
    t = iso_to_axis(g.p, g.q)
    if isinstance(p, IdealPoint):
        w = t.act_ideal(p)
        if w.infinite or w.x == 0.0:
            raise HypStretchError(ErrorCode.INTERSECTING_GEODESICS, "ideal point is an endpoint of the geodesic")
        h = abs(w.x)
    else:
        h = abs(t.act_complex(p.z))
    return apply(t.inverse(), UhpPoint(0.0, h))


def common_perpendicular_feet(g1: Geodesic, g2: Geodesic) -> Tuple[UhpPoint, UhpPoint]:
    """Feet on g1 and g2 of their common perpendicular."""
    t = iso_to_axis(g1.p, g1.q)
    u, v = t.act_ideal(g2.p), t.act_ideal(g2.q)
    tiny = 1e-13
    if u.infinite or v.infinite or abs(u.x) <= tiny or abs(v.x) <= tiny or u.x * v.x <= 0.0:
        raise HypStretchError(ErrorCode.INTERSECTING_GEODESICS, "geodesics meet or share an endpoint")
    uv = u.x * v.x
    rho = math.sqrt(uv)
    c = (u.x + v.x) / 2.0
    x = uv / c
    y = math.sqrt(max(rho * rho - x * x, 0.0))
    if y <= 0.0:
        raise HypStretchError(ErrorCode.INTERSECTING_GEODESICS, "degenerate common perpendicular")
    back = t.inverse()
    return apply(back, UhpPoint(0.0, rho)), apply(back, UhpPoint(x, y))


def common_perpendicular(g1: Geodesic, g2: Geodesic) -> Geodesic:
    f1, f2 = common_perpendicular_feet(g1, g2)
    return geodesic_through(f1, f2)


def dist_between_geodesics(g1: Geodesic, g2: Geodesic) -> float:
    f1, f2 = common_perpendicular_feet(g1, g2)
    return dist(f1, f2)


def geodesic_intersection(g1: Geodesic, g2: Geodesic) -> Optional[UhpPoint]:
    """Crossing point of two geodesics, or None when they are disjoint or asymptotic."""
    t = iso_to_axis(g1.p, g1.q)
    u, v = t.act_ideal(g2.p), t.act_ideal(g2.q)
    if u.infinite or v.infinite or u.x * v.x >= 0.0:
        return None
    return apply(t.inverse(), UhpPoint(0.0, math.sqrt(-u.x * v.x)))


def perpendicular_bisector(p: UhpPoint, q: UhpPoint) -> Geodesic:
    m = midpoint(p, q)
    t = axis_frame(geodesic_through(p, q), m)
    back = t.inverse()
    return Geodesic(back.act_ideal(ideal(-1.0)), back.act_ideal(ideal(1.0)))


def reflection_across(g: Geodesic) -> Isometry:
    t = iso_to_axis(g.p, g.q)
    return t.inverse() @ Isometry(1.0, 0.0, 0.0, 1.0, True) @ t


def point_at_signed_arc(g: Geodesic, origin: UhpPoint, s: float) -> UhpPoint:
    """Point of g at signed arc length s from origin, positive toward g.q."""
    t = axis_frame(g, origin)
    return apply(t.inverse(), UhpPoint(0.0, math.exp(s)))


def signed_arc(g: Geodesic, origin: UhpPoint, point: UhpPoint) -> float:
    """Signed arc length from origin to point along g (both on g)."""
    t = iso_to_axis(g.p, g.q)
    return math.log(abs(t.act_complex(point.z)) / abs(t.act_complex(origin.z)))


def translation_length(m: Isometry) -> float:
    if m.reflect:
        raise HypStretchError(ErrorCode.DEGENERATE_ISOMETRY, "translation length is defined for orientation-preserving isometries")
    tr = abs(m.trace)
    if tr <= 2.0:
        return 0.0
    return 2.0 * math.acosh(tr / 2.0)


def fixed_point_multiplier(m: Isometry, xi: IdealPoint) -> float:
    """Signed log-multiplier of m at an ideal point it fixes."""
    t = to_infinity(xi)
    conj = t @ m @ t.inverse()
    return 2.0 * math.log(abs(conj.a))


def horocycle_arc(center: IdealPoint, from_point: UhpPoint, to_geodesic: Geodesic) -> UhpPoint:
    """Where the horocycle centered at center through from_point meets to_geodesic."""
    t = to_infinity(center)
    w = t.act_complex(from_point.z)
    h = w.imag
    g = apply(t, to_geodesic)
    if g.p.infinite or g.q.infinite:
        x = g.q.x if g.p.infinite else g.p.x
        hit = complex(x, h)
    else:
        c = (g.p.x + g.q.x) / 2.0
        r = abs(g.p.x - g.q.x) / 2.0
        if h > r * (1.0 + 1e-12):
            raise HypStretchError(ErrorCode.NO_INTERSECTION, "horocycle misses the geodesic")
        dx = math.sqrt(max(r * r - h * h, 0.0))
        left, right = complex(c - dx, h), complex(c + dx, h)
        hit = left if abs(left - w) <= abs(right - w) else right
    back = t.inverse().act_complex(hit)
    return UhpPoint(back.real, back.imag)


def unit_tangent_rotation(theta: float) -> Isometry:
    """Rotation about i turning tangent vectors counter-clockwise by theta."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return Isometry(c, s, -s, c)


def perpendicular_at(g: Geodesic, point: UhpPoint) -> Geodesic:
    """Geodesic crossing g at a right angle in point, oriented to the left of g."""
    back = axis_frame(g, point).inverse()
    return Geodesic(back.act_ideal(ideal(1.0)), back.act_ideal(ideal(-1.0)))


def left_of(g: Geodesic, point: UhpPoint, tol: float = 0.0) -> bool:
    """True when point lies on the closed left side of the oriented geodesic g."""
    w = iso_to_axis(g.p, g.q).act_complex(point.z)
    return w.real <= tol * abs(w)
