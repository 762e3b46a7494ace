"""Planar geometry on the Riemann sphere: exact predicates, circles, angles.

Points are Python ``complex`` numbers; the point at infinity is the
singleton :data:`INF`.  Predicates use a floating-point filter backed by an
exact rational fallback, so their signs are always correct for the given
double-precision inputs.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

_EPS = 2.0**-53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS


class _Infinity:
    """The point at infinity of the Riemann sphere (singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Point = Union[complex, _Infinity]


def is_inf(p) -> bool:
    return p is INF


class DegenerateError(ValueError):
    """Raised when a construction needs a non-degenerate input."""


# ---------------------------------------------------------------------------
# exact predicates


def _frac(x: float) -> Fraction:
    return Fraction(x)


def _orient_exact(a: complex, b: complex, c: complex) -> int:
    ax, ay, bx, by = _frac(a.real), _frac(a.imag), _frac(b.real), _frac(b.imag)
    cx, cy = _frac(c.real), _frac(c.imag)
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def orient2d(a: complex, b: complex, c: complex) -> int:
    """Sign of the signed area of (a, b, c): +1 ccw, -1 cw, 0 collinear."""
    detleft = (a.real - c.real) * (b.imag - c.imag)
    detright = (a.imag - c.imag) * (b.real - c.real)
    det = detleft - detright
    bound = _CCW_BOUND * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _orient_exact(a, b, c)


def _incircle_exact(a: complex, b: complex, c: complex, d: complex) -> int:
    dx, dy = _frac(d.real), _frac(d.imag)
    rows = []
    for p in (a, b, c):
        x, y = _frac(p.real) - dx, _frac(p.imag) - dy
        rows.append((x, y, x * x + y * y))
    (ax, ay, al), (bx, by, bl), (cx, cy, cl) = rows
    det = (
        al * (bx * cy - cx * by)
        + bl * (cx * ay - ax * cy)
        + cl * (ax * by - bx * ay)
    )
    return (det > 0) - (det < 0)


def _incircle(a: complex, b: complex, c: complex, d: complex) -> int:
    adx, ady = a.real - d.real, a.imag - d.imag
    bdx, bdy = b.real - d.real, b.imag - d.imag
    cdx, cdy = c.real - d.real, c.imag - d.imag
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    alift = adx * adx + ady * ady
    cdxady, adxcdy = cdx * ady, adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    clift = cdx * cdx + cdy * cdy
    det = (
        alift * (bdxcdy - cdxbdy)
        + blift * (cdxady - adxcdy)
        + clift * (adxbdy - bdxady)
    )
    permanent = (
        (abs(bdxcdy) + abs(cdxbdy)) * alift
        + (abs(cdxady) + abs(adxcdy)) * blift
        + (abs(adxbdy) + abs(bdxady)) * clift
    )
    bound = _ICC_BOUND * permanent
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _incircle_exact(a, b, c, d)


def incircle(a: complex, b: complex, c: complex, d: complex) -> int:
    """Exact sign of the in-circle determinant.

    For a ccw triangle (a, b, c): +1 if d is strictly inside its circumcircle,
    -1 outside, 0 when the four points are cocyclic.  The sign flips with the
    orientation of (a, b, c).  A degenerate triangle raises.
    """
    if orient2d(a, b, c) == 0:
        raise DegenerateError("incircle needs a non-degenerate triangle")
    return _incircle(a, b, c, d)


def in_disk(face: Sequence[Point], x: Point) -> int:
    """Generalized in-circle test for a positively oriented face on the sphere.

    For a finite face this is :func:`incircle`.  For a face ``(s, t, INF)``
    (in any rotation) the disk is the open half-plane left of ``s -> t``.
    ``INF`` is never inside a finite disk.
    """
    a, b, c = face
    if is_inf(a):
        a, b, c = b, c, a
    elif is_inf(b):
        a, b, c = c, a, b
    if is_inf(c):
        if is_inf(x):
            return 0
        return orient2d(a, b, x)
    if is_inf(x):
        return -1
    return _incircle(a, b, c, x)


# ---------------------------------------------------------------------------
# generalized circles


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def power(self, z: complex) -> float:
        """Negative inside, positive outside."""
        return abs(z - self.center) ** 2 - self.radius**2


@dataclass(frozen=True)
class Line:
    anchor: complex
    direction: complex  # unit vector

    def power(self, z: complex) -> float:
        """Positive to the left of ``direction``, negative to the right."""
        return (self.direction.conjugate() * (z - self.anchor)).imag


GeneralizedCircle = Union[Circle, Line]


def line_through(a: complex, b: complex) -> Line:
    if a == b:
        raise DegenerateError("coincident points do not define a line")
    d = b - a
    return Line(a, d / abs(d))


def circumcircle(a: Point, b: Point, c: Point) -> GeneralizedCircle:
    """Generalized circle through three distinct points of the sphere."""
    pts = [a, b, c]
    finite = [p for p in pts if not is_inf(p)]
    if len(finite) < 2:
        raise DegenerateError("at most one point may be INF")
    if len(set(finite)) != len(finite):
        raise DegenerateError("coincident points")
    if len(finite) == 2:
        return line_through(*finite)
    if orient2d(a, b, c) == 0:
        return line_through(a, b)
    b1, c1 = b - a, c - a
    d = 2.0 * (b1.real * c1.imag - b1.imag * c1.real)
    bb, cc = abs(b1) ** 2, abs(c1) ** 2
    ux = (c1.imag * bb - b1.imag * cc) / d
    uy = (b1.real * cc - c1.real * bb) / d
    center = a + complex(ux, uy)
    return Circle(center, abs(complex(ux, uy)))


def triangle_angles(a: complex, b: complex, c: complex) -> tuple[float, float, float]:
    """Interior angles at a, b and c of a non-degenerate finite triangle."""
    if orient2d(a, b, c) == 0:
        raise DegenerateError("degenerate triangle")

    def at(p, q, r):
        u, v = q - p, r - p
        return math.atan2(abs(u.real * v.imag - u.imag * v.real), u.real * v.real + u.imag * v.imag)

    return at(a, b, c), at(b, c, a), at(c, a, b)


def wrap_angle(x: float) -> float:
    """Reduce an angle into (-pi, pi]."""
    y = math.remainder(x, 2.0 * math.pi)
    return math.pi if y == -math.pi else y


def _ratio(num: Iterable[complex], den: Iterable[complex]) -> complex:
    out = 1.0 + 0.0j
    for x in num:
        out *= x
    for x in den:
        out /= x
    return out


def edge_angle(u: Point, v: Point, p: Point, q: Point) -> float:
    """Intersection angle of the circumcircles of faces (u, v, p) and (v, u, q).

    Equals pi minus the two angles opposite the edge, an angle at INF counting
    as zero.  Computed from the cross-ratio, so it is Moebius-invariant and
    also defined when u or v is INF.
    """
    num, den = [], []
    for x, y, bucket in ((v, p, num), (u, q, num), (u, p, den), (v, q, den)):
        if not (is_inf(x) or is_inf(y)):
            bucket.append(x - y)
    cr = _ratio(num, den)
    return wrap_angle(math.pi - cmath.phase(cr))


def intersection_angle(f: Sequence[Point], g: Sequence[Point], e: Sequence[Point]) -> float:
    """Intersection angle theta(e) of two positively oriented adjacent faces."""
    u, v = e
    fl, gl = list(f), list(g)
    for face in (fl, gl):
        if not any(_same(x, u) for x in face) or not any(_same(x, v) for x in face):
            raise ValueError("faces are not adjacent along the given edge")
    # rotate f so that it reads (u, v, p); if it reads (v, u, p) swap the roles
    p = _apex(fl, u, v)
    if p is None:
        u, v = v, u
        p = _apex(fl, u, v)
    q = _apex(gl, v, u)
    if p is None or q is None:
        raise ValueError("faces do not share the edge with opposite orientations")
    return edge_angle(u, v, p, q)


def _same(x: Point, y: Point) -> bool:
    if is_inf(x) or is_inf(y):
        return is_inf(x) and is_inf(y)
    return x == y


def _apex(face: list, u: Point, v: Point):
    for k in range(3):
        if _same(face[k], u) and _same(face[(k + 1) % 3], v):
            return face[(k + 2) % 3]
    return None


# ---------------------------------------------------------------------------
# configurations


def _parse_point(s) -> Point:
    if isinstance(s, str):
        if s.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        return complex(s.replace(" ", ""))
    if isinstance(s, (list, tuple)):
        x, y = s
        return complex(float(x), float(y))
    return complex(s)


def _format_point(p: Point) -> str:
    if is_inf(p):
        return "inf"
    if p.imag == 0 and float(p.real).is_integer():
        return str(int(p.real))
    return repr(complex(p)).strip("()")


@dataclass(frozen=True)
class PointConfiguration:
    """Labelled points of the sphere with three gauge-fixed vertices.

    ``points[i]`` is the position of vertex ``i``.  ``gauge`` lists the
    three vertices held fixed; all other vertices are free.
    """

    points: tuple
    gauge: tuple = (0, 1, 2)
    _free: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple(p if is_inf(p) else complex(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "gauge", tuple(int(g) for g in self.gauge))
        if len(pts) < 3:
            raise ValueError("a configuration needs at least three points")
        finite = [p for p in pts if not is_inf(p)]
        if len(pts) - len(finite) > 1:
            raise ValueError("INF may appear at most once")
        if any(not (math.isfinite(p.real) and math.isfinite(p.imag)) for p in finite):
            raise ValueError("finite points must have finite coordinates")
        if len(set(finite)) != len(finite):
            raise ValueError("coincident points")
        g = self.gauge
        if len(g) != 3 or len(set(g)) != 3 or any(not 0 <= i < len(pts) for i in g):
            raise ValueError("gauge must name three distinct vertices")
        object.__setattr__(self, "_free", tuple(i for i in range(len(pts)) if i not in g))

    @classmethod
    def standard(cls, free: Iterable[complex]) -> "PointConfiguration":
        """Gauge 0, 1, INF at vertices 0, 1, 2 followed by the free points."""
        return cls((0j, 1 + 0j, INF, *[complex(z) for z in free]), (0, 1, 2))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def free_ids(self) -> tuple:
        return self._free

    @property
    def n_free(self) -> int:
        return len(self._free)

    @property
    def inf_id(self):
        for i, p in enumerate(self.points):
            if is_inf(p):
                return i
        return None

    @property
    def finite_ids(self) -> tuple:
        return tuple(i for i, p in enumerate(self.points) if not is_inf(p))

    def with_point(self, z: complex) -> "PointConfiguration":
        """A new configuration with ``z`` appended as a free vertex."""
        return PointConfiguration(self.points + (complex(z),), self.gauge)

    def moved(self, positions: dict) -> "PointConfiguration":
        pts = list(self.points)
        for i, z in positions.items():
            pts[i] = z
        return PointConfiguration(tuple(pts), self.gauge)

    def to_json(self) -> dict:
        if self.gauge == (0, 1, 2):
            return {
                "gauge": [_format_point(p) for p in self.points[:3]],
                "free": [[p.real, p.imag] for p in self.points[3:]],
            }
        return {"points": [_format_point(p) for p in self.points], "gauge_ids": list(self.gauge)}

    @classmethod
    def from_json(cls, doc) -> "PointConfiguration":
        if isinstance(doc, str):
            doc = json.loads(doc)
        if "points" in doc:
            pts = tuple(_parse_point(p) for p in doc["points"])
            return cls(pts, tuple(doc.get("gauge_ids", (0, 1, 2))))
        if "free" not in doc:
            raise ValueError("configuration needs a 'points' or a 'free' list")
        gauge = tuple(_parse_point(s) for s in doc.get("gauge", ["0", "1", "inf"]))
        free = tuple(_parse_point(p) for p in doc["free"])
        return cls(gauge + free, (0, 1, 2))


def delta3(i: int, j: int, k: int, config: PointConfiguration) -> complex:
    """Discriminant (z_i - z_j)(z_i - z_k)(z_j - z_k).

    Factors touching INF are dropped, which is also the limit of
    Delta3 / R^2 as that point runs off to R: Delta3(INF, p, q) = z_p - z_q.
    """
    if len({i, j, k}) != 3:
        raise ValueError("delta3 needs distinct vertices")
    pts = config.points
    out = 1.0 + 0.0j
    for a, b in ((i, j), (i, k), (j, k)):
        pa, pb = pts[a], pts[b]
        if is_inf(pa) or is_inf(pb):
            continue
        out *= pa - pb
    return out


@dataclass(frozen=True)
class Mobius:
    """z -> (a z + b) / (c z + d)."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("singular Moebius map")

    def __call__(self, z: Point) -> Point:
        if is_inf(z):
            return INF if self.c == 0 else self.a / self.c
        den = self.c * z + self.d
        if den == 0:
            return INF
        return (self.a * z + self.b) / den

    def derivative(self, z: complex) -> complex:
        return (self.a * self.d - self.b * self.c) / (self.c * z + self.d) ** 2


def mobius_apply(m: Mobius, config: PointConfiguration) -> PointConfiguration:
    """Push every point of a configuration forward by ``m``; labels are kept."""
    pts = tuple(m(p) for p in config.points)
    return PointConfiguration(pts, config.gauge)
