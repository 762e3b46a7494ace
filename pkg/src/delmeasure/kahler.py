"""Prepotential, Kaehler matrix and the determinant measure.

The prepotential of a triangulation is minus the total hyperbolic volume of
the ideal tetrahedra spanned by its bounded faces and the point at
infinity.  Its complex Hessian in the free coordinates is the Kaehler
matrix ``D``, assembled here face by face in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.special import zeta

from .geom import INF, DegenerateError, PointConfiguration, circumcircle, delta3, in_disk, is_inf, orient2d, triangle_angles
from .tri import Triangulation, delaunay, flip, flip_is_valid

# Series for the Clausen function: Cl2(t) = t - t log|t| + sum_k C_k t^(2k+1), |t| <= pi.
_CL2_TERMS = 24
_CL2_COEFFS = tuple(
    float(zeta(2 * k, 1)) / (k * (2 * k + 1) * (2 * math.pi) ** (2 * k)) for k in range(1, _CL2_TERMS + 1)
)


def _clausen2_scalar(t: float) -> float:
    t = math.remainder(t, 2 * math.pi)
    if t == 0.0:
        return 0.0
    t2 = t * t
    acc = 0.0
    for c in reversed(_CL2_COEFFS):
        acc = acc * t2 + c
    return t - t * math.log(abs(t)) + acc * t2 * t


def lobachevsky(x):
    """Lobachevsky function  -int_0^x log|2 sin t| dt.

    Accepts scalars or numpy arrays.  Evaluated via the Clausen series after
    reduction into (-pi/2, pi/2]; absolute error below 1e-15.
    """
    if np.ndim(x) == 0:
        return 0.5 * _clausen2_scalar(2.0 * float(x))
    t = np.remainder(2.0 * np.asarray(x, dtype=float) + math.pi, 2 * math.pi) - math.pi
    t2 = t * t
    acc = np.zeros_like(t)
    for c in reversed(_CL2_COEFFS):
        acc = acc * t2 + c
    with np.errstate(divide="ignore", invalid="ignore"):
        log_term = np.where(t == 0.0, 0.0, t * np.log(np.abs(np.where(t == 0.0, 1.0, t))))
    return 0.5 * (t - log_term + acc * t2 * t)


def ideal_tetra_volume(a, b, c) -> float:
    """Volume of the ideal tetrahedron with vertices a, b, c and INF."""
    if any(is_inf(p) for p in (a, b, c)):
        return 0.0
    if len({a, b, c}) != 3:
        raise DegenerateError("coincident vertices")
    if orient2d(a, b, c) == 0:
        return 0.0
    return math.fsum(lobachevsky(x) for x in triangle_angles(a, b, c))


def prepotential(t: Triangulation, points: Optional[dict] = None) -> float:
    """Minus the summed ideal volumes over bounded faces.

    ``points`` optionally overrides vertex positions while keeping the
    combinatorics of ``t`` fixed.
    """
    P = dict(t._pts)
    if points:
        P.update(points)
    total = []
    for f in t.bounded_faces():
        a, b, c = (P[v] for v in t.faces[f])
        if orient2d(a, b, c) <= 0:
            raise DegenerateError("a face lost its orientation")
        total.append(ideal_tetra_volume(a, b, c))
    return -math.fsum(total)


@dataclass(frozen=True)
class KahlerMatrix:
    """Hermitian matrix indexed by vertex ids ``labels``."""

    matrix: np.ndarray
    labels: tuple

    def index(self, v: int) -> int:
        return self.labels.index(v)

    def restrict(self, keep: Iterable[int]) -> "KahlerMatrix":
        keep = [v for v in self.labels if v in set(keep)]
        idx = [self.labels.index(v) for v in keep]
        return KahlerMatrix(self.matrix[np.ix_(idx, idx)], tuple(keep))

    def exclude(self, drop: Iterable[int]) -> "KahlerMatrix":
        drop = set(drop)
        return self.restrict([v for v in self.labels if v not in drop])

    def det(self) -> float:
        if not self.labels:
            return 1.0
        return float(np.linalg.det(self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def face_kahler_block(a: complex, b: complex, c: complex) -> np.ndarray:
    """3x3 contribution of the ccw face (a, b, c) to ``D``.

    With edges e0 = ab, e1 = bc, e2 = ca and A[u, e] = 1 / (z_u - z_other),
    the block is (1 / 4i) A E A^H where E[i, j] = -1 if e_j follows e_i
    counterclockwise and +1 if it follows clockwise.
    """
    z = (a, b, c)
    A = np.zeros((3, 3), dtype=complex)
    for k in range(3):
        u, w = k, (k + 1) % 3
        A[u, k] = 1.0 / (z[u] - z[w])
        A[w, k] = 1.0 / (z[w] - z[u])
    E = np.array([[0, -1, 1], [1, 0, -1], [-1, 1, 0]], dtype=float)
    return (A @ E @ A.conj().T) / 4j


def kahler_matrix(t: Triangulation) -> KahlerMatrix:
    """Analytic Kaehler matrix over all finite vertices of ``t``."""
    if t.inf < 0:
        raise ValueError("the Kaehler matrix needs INF among the vertices")
    labels = tuple(v for v in sorted(t._pts) if v != t.inf)
    pos = {v: i for i, v in enumerate(labels)}
    D = np.zeros((len(labels), len(labels)), dtype=complex)
    P = t._pts
    for f in t.bounded_faces():
        vs = t.faces[f]
        block = face_kahler_block(*(P[v] for v in vs))
        idx = [pos[v] for v in vs]
        D[np.ix_(idx, idx)] += block
    return KahlerMatrix(0.5 * (D + D.conj().T), labels)


def free_kahler_matrix(t: Triangulation) -> KahlerMatrix:
    return kahler_matrix(t).restrict(t.config.free_ids)


def _check_fixed_combinatorics(t: Triangulation, P: dict, was_delaunay: bool) -> None:
    for f in t.bounded_faces():
        a, b, c = (P[v] for v in t.faces[f])
        if orient2d(a, b, c) <= 0:
            raise DegenerateError("perturbation inverts a face; use a smaller step")
    if was_delaunay:
        for u, v in t.edges():
            f = t.faces[t.face_of(u, v)]
            q = t.apex(v, u)
            if in_disk(tuple(P[w] for w in f), P[q]) > 0:
                raise DegenerateError("perturbation crosses a flip; use a smaller step")


def kahler_matrix_fd(t: Triangulation, h: float = 1e-4) -> KahlerMatrix:
    """Finite-difference oracle: D = (H_xx + H_yy + i (H_xy - H_yx)) / 4.

    H is the central-difference real Hessian of the prepotential in the free
    coordinates, with the combinatorics of ``t`` held fixed.
    """
    free = list(t.config.free_ids)
    n = 2 * len(free)
    base = {v: t._pts[v] for v in free}
    was_delaunay = t.is_delaunay()

    def coord_shift(k: int, s: float) -> tuple:
        v = free[k // 2]
        return v, (s if k % 2 == 0 else 1j * s)

    def F(shifts) -> float:
        pts = dict(base)
        for k, s in shifts:
            v, d = coord_shift(k, s)
            pts[v] = pts[v] + d
        full = dict(t._pts)
        full.update(pts)
        _check_fixed_combinatorics(t, full, was_delaunay)
        return prepotential(t, pts)

    f0 = F([])
    H = np.zeros((n, n))
    for i in range(n):
        H[i, i] = (F([(i, h)]) - 2 * f0 + F([(i, -h)])) / h**2
        for j in range(i + 1, n):
            H[i, j] = H[j, i] = (
                F([(i, h), (j, h)]) - F([(i, h), (j, -h)]) - F([(i, -h), (j, h)]) + F([(i, -h), (j, -h)])
            ) / (4 * h * h)
    m = len(free)
    D = np.zeros((m, m), dtype=complex)
    for u in range(m):
        for v in range(m):
            xu, yu, xv, yv = 2 * u, 2 * u + 1, 2 * v, 2 * v + 1
            D[u, v] = 0.25 * (H[xu, xv] + H[yu, yv] + 1j * (H[xu, yv] - H[yu, xv]))
    return KahlerMatrix(D, tuple(free))


def det_excluding(t: Triangulation, exclude: Iterable[int], D: Optional[KahlerMatrix] = None) -> float:
    """Determinant of ``D`` with the rows and columns of ``exclude`` removed.

    The infinite vertex never has a row, so excluding it is a no-op.
    """
    if D is None:
        D = kahler_matrix(t)
    return D.exclude(set(exclude) - {t.inf}).det()


def _flip_quad(t: Triangulation, e: tuple) -> tuple:
    """Label the quadrilateral around edge e as (1, 2, 3, 4) with e = (2, 4)."""
    u, v = e
    p = t.apex(u, v)
    q = t.apex(v, u)
    # face f = (p, u, v) = (1, 2, 4) rotated; twin face (v, u, q) = (4, 2, 3)
    return p, u, q, v


def flip_delta_predicted(t: Triangulation, e: tuple) -> float:
    """Predicted det_excluding(T, {1,2,4}) - det_excluding(T', {1,2,4}) across a flip.

    Edge e = (2, 4) lies in face f = (1, 2, 4); vertex 3 is the apex of the
    twin face.  The change equals det_excluding(T, {1,2,3,4}) times the
    area of f times the power of z_3 w.r.t. the circumcircle of f, divided
    by |z_31|^2 |z_32|^2 |z_34|^2.  All four vertices must be finite.
    """
    v1, v2, v3, v4 = _flip_quad(t, e)
    P = t._pts
    if any(is_inf(P[v]) for v in (v1, v2, v3, v4)):
        raise ValueError("the flipped quadrilateral must be finite")
    z1, z2, z3, z4 = P[v1], P[v2], P[v3], P[v4]
    area = 0.5 * ((z2 - z1).conjugate() * (z4 - z1)).imag
    C = circumcircle(z1, z2, z4)
    power = abs(z3 - C.center) ** 2 - C.radius**2
    base = det_excluding(t, {v1, v2, v3, v4})
    return base * area * power / (abs(z3 - z1) ** 2 * abs(z3 - z2) ** 2 * abs(z3 - z4) ** 2)


def flip_delta_observed(t: Triangulation, e: tuple) -> float:
    v1, v2, _, v4 = _flip_quad(t, e)
    t2 = flip(t, e)
    ex = {v1, v2, v4}
    return det_excluding(t, ex) - det_excluding(t2, ex)


def normalized_det(t: Triangulation, triple: tuple, D: Optional[KahlerMatrix] = None) -> float:
    """det D over the complement of ``triple`` divided by |Delta3(triple)|^2.

    ``triple`` must contain the infinite vertex; by covariance the result is
    the same for every such triple.
    """
    if t.inf not in triple:
        raise ValueError("covariance is checked on triples containing INF")
    i, j, k = triple
    d3 = delta3(i, j, k, t.config)
    return det_excluding(t, triple, D) / abs(d3) ** 2


def measure_density_tri(t: Triangulation) -> float:
    """2^N det D over the free vertices, for any triangulation ``t``."""
    for f in t.bounded_faces():
        if orient2d(*t.face_points(f)) <= 0:
            raise DegenerateError("degenerate face")
    D = free_kahler_matrix(t)
    return 2.0 ** len(D.labels) * D.det()


def measure_density(config: PointConfiguration) -> float:
    """Density of the Delaunay measure at a configuration in the given gauge."""
    if config.inf_id is None or config.inf_id not in config.gauge:
        raise ValueError("density is defined in a gauge that fixes INF")
    return measure_density_tri(delaunay(config))


def density_one_point(z: np.ndarray) -> np.ndarray:
    """Vectorised density for gauge (0, 1, INF) plus one free point.

    The only bounded face is (0, 1, z) or (1, 0, z), and D reduces to
    |Im z| / (2 |z|^2 |z - 1|^2); the factor 2^1 is included.
    """
    z = np.asarray(z, dtype=complex)
    return np.abs(z.imag) / (np.abs(z) ** 2 * np.abs(z - 1) ** 2)


__all__ = [
    "INF",
    "KahlerMatrix",
    "density_one_point",
    "det_excluding",
    "face_kahler_block",
    "flip_delta_observed",
    "flip_delta_predicted",
    "flip_is_valid",
    "free_kahler_matrix",
    "ideal_tetra_volume",
    "kahler_matrix",
    "kahler_matrix_fd",
    "lobachevsky",
    "measure_density",
    "measure_density_tri",
    "normalized_det",
    "prepotential",
]
