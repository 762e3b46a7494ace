"""Real differential forms on the space of free vertex positions.

Coordinates are ordered (x_u, y_u) for each free vertex u in id order, so a
configuration with N free vertices has a 2N-dimensional tangent space.
Tangent vectors are plain numpy arrays of that length.  One-forms are
(possibly complex) coefficient vectors; two-forms are antisymmetric
matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geom import Circle, DegenerateError, circumcircle, edge_angle, is_inf, orient2d, triangle_angles
from .kahler import KahlerMatrix
from .tri import Triangulation, flip

FD_STEP = 1e-5


@dataclass(frozen=True)
class OneForm:
    coeffs: np.ndarray
    labels: tuple  # free vertex ids

    def __call__(self, v: np.ndarray):
        return self.coeffs @ v

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.coeffs + other.coeffs, self.labels)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.coeffs - other.coeffs, self.labels)

    def scale(self, c) -> "OneForm":
        return OneForm(c * self.coeffs, self.labels)

    def conj(self) -> "OneForm":
        return OneForm(self.coeffs.conj(), self.labels)


@dataclass(frozen=True)
class TwoForm:
    """omega(X, Y) = X^T M Y with M antisymmetric."""

    matrix: np.ndarray
    labels: tuple

    def __call__(self, x: np.ndarray, y: np.ndarray):
        return x @ self.matrix @ y

    def __add__(self, other: "TwoForm") -> "TwoForm":
        return TwoForm(self.matrix + other.matrix, self.labels)

    def scale(self, c) -> "TwoForm":
        return TwoForm(c * self.matrix, self.labels)

    @property
    def real(self) -> "TwoForm":
        return TwoForm(np.real(self.matrix), self.labels)


def wedge(a: OneForm, b: OneForm) -> TwoForm:
    M = np.outer(a.coeffs, b.coeffs)
    return TwoForm(M - M.T, a.labels)


def zero_two_form(labels: tuple) -> TwoForm:
    n = 2 * len(labels)
    return TwoForm(np.zeros((n, n)), labels)


def _index(labels: tuple) -> dict:
    return {v: k for k, v in enumerate(labels)}


def dz(v: int, labels: tuple) -> OneForm:
    """dz_v; zero if v is not free."""
    c = np.zeros(2 * len(labels), dtype=complex)
    idx = _index(labels)
    if v in idx:
        c[2 * idx[v]] = 1.0
        c[2 * idx[v] + 1] = 1j
    return OneForm(c, labels)


def dlog_diff(i: int, j: int, points: dict, labels: tuple) -> OneForm:
    """d log(z_j - z_i)."""
    zij = points[j] - points[i]
    return (dz(j, labels) - dz(i, labels)).scale(1.0 / zij)


def _face_z(P: dict, face: tuple, labels: tuple) -> TwoForm:
    a, b, c = face
    l12, l23, l31 = dlog_diff(a, b, P, labels), dlog_diff(b, c, P, labels), dlog_diff(c, a, P, labels)
    M = np.zeros((2 * len(labels),) * 2, dtype=complex)
    for x, y in ((l12, l23), (l23, l31), (l31, l12)):
        M += wedge(x, y.conj()).matrix + wedge(x.conj(), y).matrix
    return TwoForm(np.real(M / 8.0), labels)


def _face_lengths(P: dict, face: tuple, labels: tuple) -> TwoForm:
    a, b, c = face
    l12, l23, l31 = (OneForm(np.real(dlog_diff(i, j, P, labels).coeffs), labels) for i, j in ((a, b), (b, c), (c, a)))
    return (wedge(l12, l23) + wedge(l23, l31) + wedge(l31, l12)).scale(0.5)


def _local(a: complex, b: complex, c: complex, free: Sequence[bool]) -> tuple:
    if orient2d(a, b, c) == 0:
        raise DegenerateError("degenerate face")
    P = {0: complex(a), 1: complex(b), 2: complex(c)}
    return P, tuple(k for k in range(3) if free[k])


def omega_face_z(a: complex, b: complex, c: complex, free: Sequence[bool] = (True, True, True)) -> TwoForm:
    """Per-face Kaehler form from complex logarithmic differentials.

    omega = (1/8) sum over cyclic pairs of (dlog z_12 ^ dlog conj z_23 +
    dlog conj z_12 ^ dlog z_23).  The basis is (x, y) of each vertex whose
    ``free`` flag is set, in the order a, b, c.
    """
    P, labels = _local(a, b, c, free)
    return _face_z(P, (0, 1, 2), labels)


def omega_face_lengths(a: complex, b: complex, c: complex, free: Sequence[bool] = (True, True, True)) -> TwoForm:
    """The same form as (1/2) sum over cyclic pairs of dl_12 ^ dl_23, with l = log|z_ij|."""
    P, labels = _local(a, b, c, free)
    return _face_lengths(P, (0, 1, 2), labels)


def angle_wedge_fd(a: complex, b: complex, c: complex, h: float = FD_STEP) -> TwoForm:
    """d alpha_1 ^ d alpha_2 over all six coordinates, angles differentiated numerically."""
    pts = [complex(a), complex(b), complex(c)]

    def grad(k):
        g = np.zeros(6)
        for i in range(3):
            for d, col in ((1.0, 2 * i), (1j, 2 * i + 1)):
                up, dn = list(pts), list(pts)
                up[i] += h * d
                dn[i] -= h * d
                g[col] = (triangle_angles(*up)[k] - triangle_angles(*dn)[k]) / (2 * h)
        return OneForm(g, (0, 1, 2))

    return wedge(grad(0), grad(1))


def length_wedge_fd(a: complex, b: complex, c: complex, h: float = FD_STEP) -> TwoForm:
    """dl_12 ^ dl_23 + dl_23 ^ dl_31 + dl_31 ^ dl_12 with numerically differentiated log lengths."""
    pts = [complex(a), complex(b), complex(c)]

    def grad(i, j):
        g = np.zeros(6)
        for k in range(3):
            for d, col in ((1.0, 2 * k), (1j, 2 * k + 1)):
                up, dn = list(pts), list(pts)
                up[k] += h * d
                dn[k] -= h * d
                g[col] = (math.log(abs(up[j] - up[i])) - math.log(abs(dn[j] - dn[i]))) / (2 * h)
        return OneForm(g, (0, 1, 2))

    l12, l23, l31 = grad(0, 1), grad(1, 2), grad(2, 0)
    return wedge(l12, l23) + wedge(l23, l31) + wedge(l31, l12)


def omega_total(t: Triangulation) -> TwoForm:
    """Sum of the per-face forms over bounded faces, in the free coordinates of ``t``."""
    out = zero_two_form(t.config.free_ids)
    for f in t.bounded_faces():
        out = out + _face_z(t._pts, t.faces[f], t.config.free_ids)
    return out


def kahler_two_form(D: KahlerMatrix) -> TwoForm:
    """(1/2i) sum D_uv dz_u ^ dzbar_v over the labels of D."""
    labels = D.labels
    M = np.zeros((2 * len(labels),) * 2, dtype=complex)
    for a, u in enumerate(labels):
        for b, v in enumerate(labels):
            M += D.matrix[a, b] * wedge(dz(u, labels), dz(v, labels).conj()).matrix
    return TwoForm(np.real(M / 2j), labels)


def pfaffian(A: np.ndarray) -> float:
    """Pfaffian of a real antisymmetric matrix by pivoted skew tridiagonalization."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("square matrix required")
    if n % 2:
        raise ValueError("odd dimension")
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(A[k + 1 :, k]).argmax())
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        if A[k + 1, k] == 0.0:
            return 0.0
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2 :] / A[k, k + 1]
            col = A[k + 2 :, k + 1].copy()
            A[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return pf


def top_coefficient(omega: TwoForm, n: int) -> float:
    """Coefficient of dx_1 dy_1 ... dx_n dy_n in omega^n / n!, i.e. its Pfaffian."""
    if omega.matrix.shape[0] != 2 * n:
        raise ValueError("form dimension does not match 2N")
    return pfaffian(omega.matrix)


# ---------------------------------------------------------------------------
# decorations and lambda lengths


def lambda_length(zi: complex, zj: complex, ri: float, rj: float) -> float:
    """Penner lambda length between horocycles of Euclidean radii ri, rj."""
    if ri <= 0 or rj <= 0:
        raise ValueError("radii must be positive")
    return abs(zi - zj) / math.sqrt(4 * ri * rj)


@dataclass(frozen=True)
class Decoration:
    radii: dict  # finite vertex id -> horocycle radius
    inf_height: float = 1.0


def random_decoration(t: Triangulation, rng: np.random.Generator) -> Decoration:
    radii = {v: float(rng.uniform(0.05, 2.0)) for v in t.vertices if v != t.inf}
    return Decoration(radii, float(rng.uniform(0.5, 3.0)))


def dlog_lambda(t: Triangulation, i: int, j: int, dec: Decoration) -> OneForm:
    """d log lambda_ij with the horocycles held fixed (only positions move)."""
    labels = t.config.free_ids
    return OneForm(np.real(dlog_diff(i, j, t._pts, labels).coeffs), labels)


def wp_form(t: Triangulation, dec: Decoration) -> TwoForm:
    """Weil-Petersson form as a sum of dlog lambda wedges over bounded faces."""
    out = zero_two_form(t.config.free_ids)
    for f in t.bounded_faces():
        a, b, c = t.faces[f]
        l12, l23, l31 = dlog_lambda(t, a, b, dec), dlog_lambda(t, b, c, dec), dlog_lambda(t, c, a, dec)
        out = out + wedge(l12, l23) + wedge(l23, l31) + wedge(l31, l12)
    return out


# ---------------------------------------------------------------------------
# angle-based forms with pinned combinatorics


def _fd_gradient(t: Triangulation, fn: Callable[[dict], float], h: float = FD_STEP, wrap: bool = False) -> OneForm:
    labels = t.config.free_ids
    g = np.zeros(2 * len(labels))
    base = dict(t._pts)
    for k, v in enumerate(labels):
        for d, col in ((1.0, 2 * k), (1j, 2 * k + 1)):
            P1, P0 = dict(base), dict(base)
            P1[v] = base[v] + h * d
            P0[v] = base[v] - h * d
            diff = fn(P1) - fn(P0)
            if wrap:
                diff = math.remainder(diff, 2 * math.pi)
            g[col] = diff / (2 * h)
    return OneForm(g, labels)


def _theta_fn(t: Triangulation, u: int, v: int) -> Callable[[dict], float]:
    p, q = t.apex(u, v), t.apex(v, u)
    return lambda P: edge_angle(P[u], P[v], P[p], P[q])


def dtheta(t: Triangulation, u: int, v: int) -> OneForm:
    return _fd_gradient(t, _theta_fn(t, u, v))


def chern_form_vertex(t: Triangulation, v: int) -> TwoForm:
    """psi_v = (2 pi)^-2 sum over edge pairs e' < e at v of dtheta(e) ^ dtheta(e').

    Edges at v are labelled ccw starting from the neighbour with the
    smallest id.
    """
    if any(not t.is_bounded(f) for f in t.faces_around(v)):
        raise ValueError("Chern form is defined at interior vertices")
    star = t.star(v)
    dth = [dtheta(t, v, w) for w in star]
    out = zero_two_form(t.config.free_ids)
    for i in range(len(dth)):
        for j in range(i):
            out = out + wedge(dth[i], dth[j])
    return out.scale(1.0 / (2 * math.pi) ** 2)


def _circumcenter(P: dict, face: tuple) -> complex:
    C = circumcircle(*(P[w] for w in face))
    if not isinstance(C, Circle):
        raise ValueError("face has no finite circumcenter")
    return C.center


def connection_form_vertex(t: Triangulation, v: int, ref_angle: float = 0.0, plus: str = "left") -> OneForm:
    """u_v = (2 pi)^-2 sum over faces f at v of theta(f_+) d gamma_v(f).

    gamma_v(f) is the argument of (w_f - z_v) measured from ``ref_angle``.
    ``plus`` picks which edge of f at v is f_+: "left" is the edge reached
    last when turning ccw around v through f, "right" the first one.
    """
    if is_inf(t._pts[v]):
        raise ValueError("connection form is defined at finite vertices")
    out = OneForm(np.zeros(2 * len(t.config.free_ids)), t.config.free_ids)
    for w in t.star(v):
        f = t.face_of(v, w)
        face = t.faces[f]
        if t.inf in face:
            raise ValueError("all faces at v must be bounded")
        nxt = t.apex(v, w)  # face reads (v, w, nxt) ccw
        e_plus = (v, nxt) if plus == "left" else (v, w)
        theta = t.theta(*e_plus)
        gamma = lambda P, face=face: np.angle((_circumcenter(P, face) - P[v]) * np.exp(-1j * ref_angle))  # noqa: E731
        out = out + _fd_gradient(t, gamma, wrap=True).scale(theta)
    return out.scale(1.0 / (2 * math.pi) ** 2)


@dataclass(frozen=True)
class FlipDiscontinuity:
    lhs: OneForm
    rhs: OneForm
    scale: float  # least-squares c with lhs ~ c * rhs
    residual: float  # relative residual of that fit


def flip_discontinuity(t: Triangulation, e: tuple, plus: str = "left", max_theta: float = 1e-6) -> FlipDiscontinuity:
    """Jump of sum_v u_v across the flip of e, next to the predicted form.

    Quadrilateral labels: e = (2, 4) in T, (1, 3) in the flipped T'.
    lhs = (2 pi)^2 [sum_v u_v(T) - sum_v u_v(T')] over the four quad vertices;
    rhs = (t14 + t23 - t12 - t34)(dt12 - dt12') + (t14 + t23) dt24.
    """
    u, v = e
    if abs(t.theta(u, v)) > max_theta:
        raise ValueError("configuration is too far from cocyclic at this edge")
    v1, v2, v3, v4 = t.apex(u, v), u, t.apex(v, u), v
    t2 = flip(t, e)
    quad = (v1, v2, v3, v4)
    lhs = OneForm(np.zeros(2 * len(t.config.free_ids)), t.config.free_ids)
    for w in quad:
        lhs = lhs + connection_form_vertex(t, w, plus=plus) - connection_form_vertex(t2, w, plus=plus)
    lhs = lhs.scale((2 * math.pi) ** 2)
    th = lambda tt, a, b: tt.theta(a, b)  # noqa: E731
    coef = th(t, v1, v4) + th(t, v2, v3) - th(t, v1, v2) - th(t, v3, v4)
    rhs = (dtheta(t, v1, v2) - dtheta(t2, v1, v2)).scale(coef) + dtheta(t, v2, v4).scale(th(t, v1, v4) + th(t, v2, v3))
    a, b = lhs.coeffs, rhs.coeffs
    denom = float(b @ b)
    c = float(a @ b) / denom if denom > 0 else 0.0
    res = float(np.linalg.norm(a - c * b) / max(np.linalg.norm(a), 1e-300))
    return FlipDiscontinuity(lhs, rhs, c, res)


__all__ = [
    "Decoration",
    "FlipDiscontinuity",
    "OneForm",
    "TwoForm",
    "chern_form_vertex",
    "connection_form_vertex",
    "dtheta",
    "dz",
    "flip_discontinuity",
    "kahler_two_form",
    "lambda_length",
    "omega_face_lengths",
    "omega_face_z",
    "omega_total",
    "angle_wedge_fd",
    "length_wedge_fd",
    "pfaffian",
    "random_decoration",
    "top_coefficient",
    "wedge",
    "wp_form",
]
