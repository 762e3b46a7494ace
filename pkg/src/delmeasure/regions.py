"""Regions attached to a face and the four-point density.

Every circle through the endpoints u, v of an edge is labelled by its
inscribed angle phi (mod pi) as seen from the left of u -> v.  A face
(u, v, p) has its circumcircle at phi = gamma_p, the angle at p.  All the
arcs used here are members of such pencils.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .geom import Circle, DegenerateError, GeneralizedCircle, Line, circumcircle, is_inf, orient2d, triangle_angles
from .mc import McEstimate, batch_estimate
from .tri import Triangulation

_LINE_EPS = 1e-14


def pencil_circle(u: complex, v: complex, phi: float) -> GeneralizedCircle:
    """Circle through u, v whose inscribed angle seen from the left of u -> v is phi."""
    d = v - u
    L = abs(d)
    s = math.sin(phi)
    if abs(s) < _LINE_EPS:
        return Line(u, d / L)
    normal = 1j * d / L
    center = 0.5 * (u + v) + normal * (0.5 * L) * (math.cos(phi) / s)
    return Circle(center, 0.5 * L / abs(s))


def _gamma(t: Triangulation, u: int, v: int) -> float:
    """Angle at the apex of the face left of u -> v (0 at INF)."""
    p = t.apex(u, v)
    P = t._pts
    if is_inf(P[p]):
        return 0.0
    if is_inf(P[u]) or is_inf(P[v]):
        raise ValueError("edge to INF")
    return triangle_angles(P[u], P[v], P[p])[2]


def bisector_arc(t: Triangulation, e: tuple) -> GeneralizedCircle:
    """Circle through the endpoints of e making angle (pi - theta(e)) / 2 with both circumcircles."""
    u, v = e
    P = t._pts
    if is_inf(P[u]) or is_inf(P[v]):
        raise ValueError("bisector of an edge to INF is not a finite arc")
    gp, gq = _gamma(t, u, v), _gamma(t, v, u)
    return pencil_circle(P[u], P[v], 0.5 * (gp - gq))


def orthogonal_arc(face: tuple, edge: tuple) -> GeneralizedCircle:
    """Circle through the edge endpoints orthogonal to the circumcircle of ``face``."""
    a, b = edge
    C = circumcircle(*face)
    if not isinstance(C, Circle):
        raise DegenerateError("face has no finite circumcircle")
    O, R = C.center, C.radius
    m = 0.5 * (a + b)
    h = abs(m - O)
    if h < _LINE_EPS * R:
        return line_through_diameter(a, b)
    u = (m - O) / h
    w = O + (R * R / h) * u
    return Circle(w, math.sqrt(abs(w - O) ** 2 - R * R))


def line_through_diameter(a: complex, b: complex) -> Line:
    d = b - a
    return Line(a, d / abs(d))


def _inner_side(face: tuple, k: int, z) -> np.ndarray:
    """z is strictly on the side of the orthogonal arc on edge k that holds vertex k.

    Inside the circumdisk the orthogonal arcs are hyperbolic geodesics, and
    these three sides cut out the ideal triangle spanned by the face.  For
    acute faces this is the outside of each orthogonal disk; across the long
    edge of an obtuse face it is the inside.
    """
    c = face[k]
    a, b = face[(k + 1) % 3], face[(k + 2) % 3]
    arc = orthogonal_arc(face, (a, b))
    return np.sign(arc.power(z)) == np.sign(arc.power(c))


def _circumdisk(face: tuple) -> Circle:
    C = circumcircle(*face)
    if not isinstance(C, Circle):
        raise DegenerateError("face has no finite circumcircle")
    return C


def in_region_B(face: tuple, z):
    """z in the ideal triangle of ``face`` inside its circumdisk.

    The region is bounded by the three arcs through the edge endpoints
    orthogonal to the circumcircle.  ``face`` is a ccw triple of finite
    points; ``z`` may be an array.
    """
    C = _circumdisk(face)
    z = np.asarray(z)
    # the margin keeps the vertices, which sit on the circle up to rounding, outside
    inside = np.abs(z - C.center) ** 2 < C.radius**2 * (1 - 1e-12)
    for k in range(3):
        inside = inside & _inner_side(face, k, z)
    return inside if inside.ndim else bool(inside)


def _require_interior_face(t: Triangulation, f: int) -> None:
    a, b, c = t.faces[f]
    if t.inf in (a, b, c):
        raise ValueError("region R is defined for bounded faces")
    if not all(t.is_interior_edge(u, v) for u, v in ((a, b), (b, c), (c, a))):
        raise ValueError("faces with a hull edge are not supported")


def in_region_R(t: Triangulation, f: int, z):
    """z strictly on the same side as the opposite vertex of all three bisector arcs of face f."""
    a, b, c = t.faces[f]
    _require_interior_face(t, f)
    P = t._pts
    z = np.asarray(z)
    out = np.ones(z.shape, dtype=bool)
    for u, v, opp in ((a, b, c), (b, c, a), (c, a, b)):
        arc = bisector_arc(t, (u, v))
        ref = np.sign(arc.power(P[opp]))
        out = out & (np.sign(arc.power(z)) == ref)
    return out if out.ndim else bool(out)


def pencil_coordinates(face: tuple, z) -> tuple:
    """Angles x_e in (0, pi) locating z inside the circumdisk of ``face``.

    For edge (a, b) with opposite vertex c, x = arg((b - z)/(a - z)) - arg((b - c)/(a - c))
    modulo 2 pi.  Returned in the order (x_bc, x_ca, x_ab); they sum to pi.
    """
    a, b, c = face
    z = np.asarray(z, dtype=complex)

    def x(p, q, r):
        return np.mod(np.angle((q - z) / (p - z)) - cmath.phase((q - r) / (p - r)), 2 * math.pi)

    return x(b, c, a), x(c, a, b), x(a, b, c)


def angle_coordinates(face: tuple, z: complex) -> tuple:
    """Angles (theta_1, theta_2, theta_3) of the three internal edges z - v_i.

    theta_i = pi - theta(z v_i) is the angle-pattern coordinate opposite
    v_i after inserting z into the face; they sum to pi.
    """
    a, b, c = face
    if orient2d(a, b, c) <= 0:
        raise DegenerateError("face must be positively oriented")
    if not (orient2d(a, b, z) > 0 and orient2d(b, c, z) > 0 and orient2d(c, a, z) > 0):
        raise ValueError("z must lie strictly inside the face")
    return tuple(float(v) for v in pencil_coordinates(face, z))


def four_point_density(a: complex, b: complex, c: complex, z):
    """D_{z zbar} of the four-point configuration {a, b, c, z} with a, b, c fixed.

    Closed form |Im[(a - z)(conj a - conj b)(conj z - conj c)(b - c)]| / (2 |z-a|^2 |z-b|^2 |z-c|^2).
    """
    z = np.asarray(z, dtype=complex)
    num = np.abs(((a - z) * np.conj(a - b) * np.conj(z - c) * (b - c)).imag)
    return num / (2 * np.abs(z - a) ** 2 * np.abs(z - b) ** 2 * np.abs(z - c) ** 2)


def _uniform_disk(rng: np.random.Generator, C: Circle, n: int) -> np.ndarray:
    r = C.radius * np.sqrt(rng.random(n))
    phi = 2 * math.pi * rng.random(n)
    return C.center + r * np.exp(1j * phi)


def integral_B(face: tuple, n: int = 10**6, seed: int = 0, n_batches: int = 100) -> McEstimate:
    """Monte Carlo estimate of the integral of the four-point density over B(face).

    Uniform sampling in the circumdisk, which contains B.
    """
    a, b, c = face
    C = _circumdisk(face)
    area = math.pi * C.radius**2

    def batch(rng, m):
        z = _uniform_disk(rng, C, m)
        w = np.where(in_region_B(face, z), four_point_density(a, b, c, z), 0.0)
        return area * w

    return batch_estimate(batch, n, seed, n_batches)


def integral_R(t: Triangulation, f: int, n: int = 10**6, seed: int = 0, n_batches: int = 100) -> McEstimate:
    """Monte Carlo estimate of the four-point density integrated over R(f).

    R(f) lies inside the circumdisk of f, so the same uniform proposal is used.
    """
    _require_interior_face(t, f)
    face = t.face_points(f)
    a, b, c = face
    C = _circumdisk(face)
    area = math.pi * C.radius**2

    def batch(rng, m):
        z = _uniform_disk(rng, C, m)
        w = np.where(in_region_R(t, f, z), four_point_density(a, b, c, z), 0.0)
        return area * w

    return batch_estimate(batch, n, seed, n_batches)


def closed_form_I() -> float:
    return math.pi**2 / 16


def closed_form_I1(t: Triangulation, f: int) -> float:
    """pi^2/16 + (1/16) sum over the edges of f of theta (2 pi - theta)."""
    a, b, c = t.faces[f]
    s = 0.0
    for u, v in ((a, b), (b, c), (c, a)):
        th = t.theta(u, v)
        s += th * (2 * math.pi - th)
    return math.pi**2 / 16 + s / 16


__all__ = [
    "angle_coordinates",
    "bisector_arc",
    "closed_form_I",
    "closed_form_I1",
    "four_point_density",
    "in_region_B",
    "in_region_R",
    "integral_B",
    "integral_R",
    "orthogonal_arc",
    "pencil_circle",
    "pencil_coordinates",
]
