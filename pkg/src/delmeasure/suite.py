"""Acceptance checks, each returning a :class:`CheckRecord`.

Every check is deterministic for a fixed seed.  ``quick`` lowers sample
counts and configuration counts without changing any tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .configs import QUAD_IDS, cocyclic_quad_config, kite_path, radial_path, random_configs
from .forms import (
    angle_wedge_fd,
    flip_discontinuity,
    kahler_two_form,
    lambda_length,
    length_wedge_fd,
    omega_face_lengths,
    omega_face_z,
    omega_total,
    random_decoration,
    top_coefficient,
    wp_form,
)
from .geom import Circle, PointConfiguration, circumcircle
from .kahler import (
    face_kahler_block,
    flip_delta_observed,
    flip_delta_predicted,
    free_kahler_matrix,
    kahler_matrix,
    kahler_matrix_fd,
    normalized_det,
)
from .mc import PI2_8, conditional_growth_check, estimate_volume
from .regions import angle_coordinates, closed_form_I, closed_form_I1, integral_B, integral_R
from .tri import (
    angle_pattern,
    check_contour_condition,
    delaunay,
    enumerate_triangulations,
    flip_is_valid,
    lawson_restore,
    replay,
)
from .voronoi import dual_graph, dual_length_flat, dual_length_hyperbolic, flip_continuity_check

SCHEMA_VERSION = 1
PASS, FAIL, REPORT = "PASS", "FAIL", "REPORT-ONLY"


@dataclass
class CheckRecord:
    name: str
    anchor: str
    status: str
    measured: float
    expected: float
    tolerance: float
    sigma: Optional[float] = None
    duration: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def to_json(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        sig = "" if self.sigma is None else f" sigma={self.sigma:.2f}"
        return (
            f"[{self.status}] {self.name}: measured={self.measured:.6g} expected={self.expected:.6g} "
            f"tol={self.tolerance:.3g}{sig} ({self.duration:.1f}s)"
        )


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _rel_matrix(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - b| / max |b|: entrywise ratios are meaningless on zero entries."""
    return float(np.abs(a - b).max() / np.abs(b).max())


# ---------------------------------------------------------------------------


def check_hessian(seed: int, quick: bool = False) -> CheckRecord:
    sizes = [1, 2, 3, 4, 5, 6]
    count = 6 if quick else 24
    worst = 0.0
    t0 = time.perf_counter()
    for config in random_configs(seed, count, sizes, min_sep=0.1, min_theta=0.05):
        t = delaunay(config)
        worst = max(worst, _rel_matrix(kahler_matrix_fd(t).matrix, free_kahler_matrix(t).matrix))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-5 and dt < 60
    return CheckRecord("hessian_oracle", "kahler-hessian", _status(ok), worst, 0.0, 1e-5, duration=dt,
                       details={"configs": count, "N": sizes, "runtime_limit_s": 60})


def check_positivity(seed: int, quick: bool = False) -> CheckRecord:
    count = 20 if quick else 100
    worst = math.inf
    for config in random_configs(seed, count, list(range(1, 9))):
        D = kahler_matrix(delaunay(config))
        ev = D.eigenvalues()
        worst = min(worst, float(ev.min() / np.trace(D.matrix).real))
    return CheckRecord("positivity", "kahler-positive", _status(worst >= -1e-10), worst, 0.0, 1e-10,
                       details={"configs": count, "measure": "min eigenvalue / trace"})


def check_flip_lemma(seed: int, quick: bool = False) -> CheckRecord:
    want = 25 if quick else 100
    worst = 0.0
    done = 0
    k = 0
    while done < want:
        for config in random_configs(seed + k, 10, [3, 4, 5, 6, 7], min_theta=1e-2):
            t = delaunay(config)
            for e in t.interior_edges():
                quad = (t.apex(*e), t.apex(e[1], e[0]), *e)
                if t.inf in quad or not flip_is_valid(t, *e):
                    continue
                pred = flip_delta_predicted(t, e)
                obs = flip_delta_observed(t, e)
                worst = max(worst, abs(obs - pred) / abs(pred))
                done += 1
                if done == want:
                    break
            if done == want:
                break
        k += 1
    t = delaunay(cocyclic_quad_config(0.0))
    e = (3, 5) if t.has_edge(3, 5) else (4, 6)
    coc = max(abs(flip_delta_predicted(t, e)), abs(flip_delta_observed(t, e)))
    ok = worst <= 1e-9 and coc <= 1e-12
    return CheckRecord("flip_lemma", "flip-determinant-change", _status(ok), worst, 0.0, 1e-9,
                       details={"flips": done, "cocyclic_abs": coc, "cocyclic_tol": 1e-12})


def check_maximality(seed: int, quick: bool = False) -> CheckRecord:
    count = 8 if quick else 20
    excess = -math.inf
    violations = 0
    n_tri = 0
    for config in random_configs(seed, count, [2, 3, 4]):
        td = delaunay(config)
        d0 = free_kahler_matrix(td).det()
        for T in enumerate_triangulations(config):
            n_tri += 1
            excess = max(excess, (free_kahler_matrix(T).det() - d0) / d0)
            if T.canonical_key() == td.canonical_key():
                continue
            out, recs = lawson_restore(T)
            if out.canonical_key() != td.canonical_key():
                violations += 1
            dets = [free_kahler_matrix(s).det() for s in replay(T, recs)]
            violations += sum(b < a * (1 - 1e-12) for a, b in zip(dets, dets[1:]))
    ok = excess <= 1e-12 and violations == 0
    return CheckRecord("maximality", "delaunay-maximizes-det", _status(ok), excess, 0.0, 1e-12,
                       details={"configs": count, "triangulations": n_tri, "lawson_violations": violations})


def check_covariance(seed: int, quick: bool = False) -> CheckRecord:
    count = 10 if quick else 50
    worst = 0.0
    for config in random_configs(seed, count, [1, 2, 3, 4, 5]):
        t = delaunay(config)
        D = kahler_matrix(t)
        finite = config.finite_ids
        vals = [normalized_det(t, (t.inf, i, j), D) for a, i in enumerate(finite) for j in finite[a + 1 :]]
        worst = max(worst, (max(vals) - min(vals)) / abs(np.mean(vals)))
    return CheckRecord("covariance", "gauge-covariance", _status(worst <= 1e-9), worst, 0.0, 1e-9,
                       details={"configs": count})


def check_top_form(seed: int, quick: bool = False) -> CheckRecord:
    per = 2 if quick else 4
    worst = 0.0
    for N in range(1, 6):
        for config in random_configs(seed + N, per, N):
            t = delaunay(config)
            D = free_kahler_matrix(t)
            target = (-1) ** N * D.det()
            for omega in (omega_total(t), kahler_two_form(D)):
                worst = max(worst, abs(top_coefficient(omega, N) - target) / abs(target))
    return CheckRecord("top_form", "pfaffian-equals-det", _status(worst <= 1e-8), worst, 0.0, 1e-8,
                       details={"N": [1, 2, 3, 4, 5], "sign": "(-1)^N from the 1/2i normalisation"})


def check_weil_petersson(seed: int, quick: bool = False) -> CheckRecord:
    count = 5 if quick else 20
    rng = np.random.default_rng(seed)
    worst = 0.0
    dec_diff = 0.0
    for config in random_configs(seed, count, [1, 2, 3, 4, 5, 6]):
        t = delaunay(config)
        w1 = wp_form(t, random_decoration(t, rng))
        w2 = wp_form(t, random_decoration(t, rng))
        worst = max(worst, _rel_matrix(w1.matrix, 2 * omega_total(t).matrix))
        dec_diff = max(dec_diff, float(np.abs(w1.matrix - w2.matrix).max()))
    ok = worst <= 1e-9 and dec_diff == 0.0
    return CheckRecord("weil_petersson", "wp-equals-twice-omega", _status(ok), worst, 0.0, 1e-9,
                       details={"configs": count, "decoration_max_diff": dec_diff})


def _random_triangle(rng) -> tuple:
    while True:
        a, b, c = rng.normal(size=3) + 1j * rng.normal(size=3)
        area = ((b - a).conjugate() * (c - a)).imag / 2
        if abs(area) > 0.05:
            return (a, b, c) if area > 0 else (a, c, b)


def check_face_identities(seed: int, quick: bool = False) -> CheckRecord:
    rng = np.random.default_rng(seed)
    count = 10 if quick else 50
    worst_z, worst_fd = 0.0, 0.0
    for _ in range(count):
        a, b, c = _random_triangle(rng)
        worst_z = max(worst_z, _rel_matrix(omega_face_z(a, b, c).matrix, omega_face_lengths(a, b, c).matrix))
        worst_fd = max(worst_fd, _rel_matrix(angle_wedge_fd(a, b, c).matrix, length_wedge_fd(a, b, c).matrix))
    ok = worst_z <= 1e-9 and worst_fd <= 1e-7
    return CheckRecord("face_identities", "omega-z-equals-omega-length", _status(ok), worst_z, 0.0, 1e-9,
                       details={"faces": count, "angle_vs_length_fd": worst_fd, "fd_tol": 1e-7})


def check_ptolemy(seed: int, quick: bool = False) -> CheckRecord:
    rng = np.random.default_rng(seed)
    count = 10 if quick else 50
    worst = 0.0
    for _ in range(count):
        center = complex(*rng.normal(size=2))
        r = rng.uniform(0.3, 2.0)
        z = center + r * np.exp(1j * np.sort(rng.uniform(0, 2 * math.pi, 4)))
        R = rng.uniform(0.25, 2.0, 4)
        L = lambda i, j: lambda_length(z[i], z[j], R[i], R[j])  # noqa: E731
        worst = max(worst, abs(L(0, 2) * L(1, 3) - L(0, 1) * L(2, 3) - L(0, 3) * L(1, 2)))
    sq = [0, 1, 1 + 1j, 1j]
    L = lambda i, j: lambda_length(sq[i], sq[j], 0.25, 0.25)  # noqa: E731
    square = abs(L(0, 2) * L(1, 3) - L(0, 1) * L(2, 3) - L(0, 3) * L(1, 2))
    worst = max(worst, square)
    return CheckRecord("ptolemy", "lambda-length-ptolemy", _status(worst <= 1e-12), worst, 0.0, 1e-12,
                       details={"quads": count, "unit_square_residual": square,
                                "unit_square_product": L(0, 2) * L(1, 3)})


VARIED_FACES = (
    (0j, 1 + 0j, 0.5 + 0.8660254037844386j),  # equilateral
    (0j, 1 + 0j, 1j),  # right
    (0j, 2 + 0j, 1 + 0.3j),  # obtuse
    (0j, 1 + 0j, 0.2 + 2.5j),  # tall and thin
    (-0.3 + 0.1j, 0.9 - 0.4j, 0.4 + 0.7j),  # generic
)


def check_integral_B(seed: int, quick: bool = False) -> CheckRecord:
    n = 10**5 if quick else 10**6
    t0 = time.perf_counter()
    worst = 0.0
    ests = []
    for k, face in enumerate(VARIED_FACES):
        est = integral_B(face, n, seed + k)
        ests.append(est.to_json())
        worst = max(worst, abs(est.mean - closed_form_I()) / est.stderr)
    dt = time.perf_counter() - t0
    ok = worst <= 3.0 and dt < 120
    return CheckRecord("region_integral_B", "integral-over-B", _status(ok), worst, 0.0, 3.0, sigma=worst,
                       duration=dt, details={"samples": n, "closed_form": closed_form_I(), "estimates": ests,
                                             "measure": "max |estimate - pi^2/16| / stderr"})


def _interior_faces(t) -> list:
    out = []
    for f in t.bounded_faces():
        a, b, c = t.faces[f]
        if all(t.is_interior_edge(u, v) for u, v in ((a, b), (b, c), (c, a))):
            out.append(f)
    return out


def check_integral_R(seed: int, quick: bool = False) -> CheckRecord:
    n = 10**5 if quick else 10**6
    worst = 0.0
    ests = []
    t = delaunay(cocyclic_quad_config(0.3))
    faces = _interior_faces(t)[:3]
    cases = [(t, f) for f in faces]
    for config in random_configs(seed, 5, 7, min_theta=0.05):
        t = delaunay(config)
        inner = _interior_faces(t)
        if inner:
            cases.append((t, inner[0]))
        if len(cases) == 5:
            break
    for k, (t, f) in enumerate(cases):
        est = integral_R(t, f, n, seed + k)
        exact = closed_form_I1(t, f)
        ests.append({**est.to_json(), "closed_form": exact})
        worst = max(worst, abs(est.mean - exact) / est.stderr)
    return CheckRecord("region_integral_R", "refined-integral-over-R", _status(worst <= 3.0), worst, 0.0, 3.0,
                       sigma=worst, details={"samples": n, "faces": len(cases), "estimates": ests})


def check_growth(seed: int, quick: bool = False) -> CheckRecord:
    t0 = time.perf_counter()
    n1 = 10**5 if quick else 10**6
    n2 = 4000 if quick else 20000
    nc = 4000 if quick else 20000
    v0 = estimate_volume(0, 1, seed)
    v1 = estimate_volume(1, n1, seed + 1)
    v2 = estimate_volume(2, n2, seed + 2)
    ratio2 = v2.mean / (2 * v1.mean)
    ratio2_err = ratio2 * math.hypot(v2.stderr / v2.mean, v1.stderr / v1.mean)
    cond = []
    rng = np.random.default_rng(seed)
    for N in (0, 1, 2):
        free = rng.uniform(-1, 2, N) + 1j * rng.uniform(-1.5, 1.5, N)
        cond.append(conditional_growth_check(PointConfiguration.standard(free), nc, seed + 10 + N))
    dt = time.perf_counter() - t0
    v1_lower = v1.lower() / PI2_8
    ok = (
        v0.mean == 1.0
        and v1.lower() >= PI2_8 * 0.99
        and ratio2 - 3 * ratio2_err >= PI2_8 * 0.99
        and all(c.passed for c in cond)
        and dt < 300
    )
    return CheckRecord(
        "growth", "volume-growth-bound", _status(ok), v1_lower, 1.0, 0.01, duration=dt,
        details={
            "V0": v0.mean,
            "V1": v1.to_json(),
            "V2": v2.to_json(),
            "V2_over_2V1": ratio2,
            "V2_over_2V1_stderr": ratio2_err,
            "bound": PI2_8,
            "conditional": [c.to_json() for c in cond],
            "measure": "3-sigma lower bound of V1 divided by pi^2/8",
            "runtime_limit_s": 300,
        },
    )


def _jacobian_fd(face, z, h=1e-6) -> float:
    def th(w):
        return np.array(angle_coordinates(face, w)[:2])

    dx = (th(z + h) - th(z - h)) / (2 * h)
    dy = (th(z + 1j * h) - th(z - 1j * h)) / (2 * h)
    return abs(dx[0] * dy[1] - dx[1] * dy[0])


def check_jacobian(seed: int, quick: bool = False) -> CheckRecord:
    rng = np.random.default_rng(seed)
    count = 20 if quick else 100
    worst = 0.0
    for _ in range(count):
        face = _random_triangle(rng)
        w = rng.dirichlet([2.0, 2.0, 2.0])
        z = complex(np.dot(w, face))
        a, b, c = face
        D = sum(face_kahler_block(*tri)[2, 2] for tri in ((a, b, z), (b, c, z), (c, a, z))).real
        J = _jacobian_fd(face, z)
        worst = max(worst, abs(D - 0.5 * J) / abs(D))
    return CheckRecord("jacobian", "angle-basis-jacobian", _status(worst <= 1e-6), worst, 0.0, 1e-6,
                       details={"pairs": count})


def _far_faces(path, ds: float) -> tuple:
    before, after = delaunay(path(-ds)), delaunay(path(ds))
    keep = {frozenset(before.faces[f]) for f in before.bounded_faces()}
    keep &= {frozenset(after.faces[f]) for f in after.bounded_faces()}
    pts = before._pts
    centers = {}
    for fs in keep:
        C = circumcircle(*(pts[v] for v in fs))
        if isinstance(C, Circle):
            centers[fs] = C.center
    best = max(((f, g) for f in centers for g in centers), key=lambda fg: abs(centers[fg[0]] - centers[fg[1]]))
    return tuple(tuple(sorted(f)) for f in best)


def check_dual(seed: int, quick: bool = False) -> CheckRecord:
    ds = 1e-9
    path = radial_path()
    cont = flip_continuity_check(path, 0.0, QUAD_IDS, _far_faces(path, ds), ds=ds)
    kite = kite_path()
    slopes = []
    for s in (1e-4, 1e-5, 1e-6):
        d = dual_graph(delaunay(kite(s))).edge_for(QUAD_IDS[0], QUAD_IDS[2])
        slopes.append((d.theta, dual_length_hyperbolic(d) / d.theta, dual_length_flat(d) / d.theta))
    slope_err = max(abs(h - 1) for th, h, _ in slopes if th <= 1e-3)
    ok = cont.passed and slope_err <= 1e-3
    return CheckRecord("dual_continuity", "voronoi-dual-lengths", _status(ok), cont.crossing_length, 0.0, 1e-8,
                       details={"distance_jump": cont.distance_jump, "jump_tol": 1e-6,
                                "slope_max_error": slope_err, "slope_tol": 1e-3,
                                "slopes": [{"theta": a, "hyperbolic": b, "flat": c} for a, b, c in slopes]})


def check_angle_pattern(seed: int, quick: bool = False) -> CheckRecord:
    count = 5 if quick else 20
    worst = 0.0
    range_ok = True
    contour_ok = True
    for config in random_configs(seed, count, [4, 5, 6, 7, 8]):
        t = delaunay(config)
        pat = angle_pattern(t)
        worst = max(worst, max(abs(pat.vertex_sum(t, v) - 2 * math.pi) for v in t.vertices))
        range_ok &= all(-1e-12 <= th < math.pi for th in pat.theta.values())
        contour_ok &= check_contour_condition(t, pat, max_cycle_len=6)
    ok = worst <= 1e-10 and range_ok and contour_ok
    return CheckRecord("angle_pattern", "vertex-and-contour-sums", _status(ok), worst, 0.0, 1e-10,
                       details={"configs": count, "theta_in_range": range_ok, "contour_condition": contour_ok})


def check_flip_discontinuity(seed: int, quick: bool = False) -> CheckRecord:
    t = delaunay(cocyclic_quad_config(1e-8))
    e = (3, 5) if t.has_edge(3, 5) else (4, 6)
    left = flip_discontinuity(t, e, plus="left")
    right = flip_discontinuity(t, e, plus="right")
    return CheckRecord("flip_discontinuity", "connection-form-jump", REPORT, left.residual, 0.0, 1e-5,
                       details={"scale_left": left.scale, "residual_left": left.residual,
                                "scale_right": right.scale, "residual_right": right.residual,
                                "convention": "f_plus = edge reached last turning ccw around v"})


CHECKS: tuple = (
    check_hessian,
    check_positivity,
    check_flip_lemma,
    check_maximality,
    check_covariance,
    check_top_form,
    check_weil_petersson,
    check_face_identities,
    check_ptolemy,
    check_integral_B,
    check_integral_R,
    check_growth,
    check_jacobian,
    check_dual,
    check_angle_pattern,
    check_flip_discontinuity,
)


def run_check(fn: Callable, seed: int, quick: bool) -> CheckRecord:
    t0 = time.perf_counter()
    rec = fn(seed, quick)
    if not rec.duration:
        rec.duration = time.perf_counter() - t0
    return rec


def run_suite(seed: int = 7, quick: bool = False, echo: Optional[Callable[[str], None]] = None) -> dict:
    records = []
    for fn in CHECKS:
        rec = run_check(fn, seed, quick)
        records.append(rec)
        if echo:
            echo(rec.line())
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "quick": quick,
        "passed": all(r.ok for r in records),
        "checks": [r.to_json() for r in records],
    }
