import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from delmeasure.geom import (
    INF,
    DegenerateError,
    Line,
    Mobius,
    PointConfiguration,
    circumcircle,
    delta3,
    edge_angle,
    in_disk,
    incircle,
    intersection_angle,
    is_inf,
    mobius_apply,
    orient2d,
    triangle_angles,
)
from strategies import points, triangles


@pytest.mark.parametrize("a,b,c,sign", [(0, 1, 1j, 1), (0, 1, 2, 0), (0, 1j, 1, -1)])
def test_orient2d_examples(a, b, c, sign):
    assert orient2d(a, b, c) == sign


@pytest.mark.parametrize("d,sign", [(0.25 + 0.25j, 1), (1 + 1j, 0), (5, -1)])
def test_incircle_examples(d, sign):
    assert incircle(0, 1, 1j, d) == sign


def test_incircle_collinear_raises():
    with pytest.raises(DegenerateError):
        incircle(0, 1, 2, 1j)


def test_orient2d_exact_near_collinear():
    # a float filter alone gets this wrong; the exact fallback must not
    a, b = 0.5 + 0.5j, 12 + 12j
    c = 24 + 24j
    assert orient2d(a, b, c) == 0
    assert orient2d(a, b, c + 1e-13j) == 1
    assert orient2d(a, b, c - 1e-13j) == -1


def test_incircle_exact_on_tiny_perturbation():
    d = 1 + 1j
    assert incircle(0, 1, 1j, d) == 0
    assert incircle(0, 1, 1j, d - 1e-15) == 1
    assert incircle(0, 1, 1j, d + 1e-15) == -1


@given(triangles(), points)
def test_incircle_flips_with_orientation(tri, d):
    a, b, c = tri
    assert incircle(a, b, c, d) == -incircle(a, c, b, d)


@given(triangles(), points)
def test_incircle_antisymmetric_under_vertex_swap(tri, d):
    a, b, c = tri
    if orient2d(d, b, c) == 0:
        return
    # the determinant is alternating in its four arguments
    assert incircle(d, b, c, a) == -incircle(a, b, c, d)


def test_circumcircle_examples():
    C = circumcircle(0, 2, 1 + 1j)
    assert abs(C.center - 1) < 1e-15 and abs(C.radius - 1) < 1e-15
    L = circumcircle(0, 1, INF)
    assert isinstance(L, Line) and L.anchor == 0 and L.direction == 1
    C = circumcircle(0, 1, 1j)
    assert abs(C.center - (0.5 + 0.5j)) < 1e-15 and abs(C.radius - math.sqrt(2) / 2) < 1e-15


@given(triangles())
def test_circumcircle_passes_through_vertices(tri):
    C = circumcircle(*tri)
    for p in tri:
        assert abs(abs(p - C.center) - C.radius) <= 1e-9 * max(1.0, C.radius)


@pytest.mark.parametrize(
    "tri,angles",
    [
        ((0, 1, 1j), (math.pi / 2, math.pi / 4, math.pi / 4)),
        ((0, 1, cmath.exp(1j * math.pi / 3)), (math.pi / 3,) * 3),
        ((0, 2, 1 + 1j), (math.pi / 4, math.pi / 4, math.pi / 2)),
    ],
)
def test_triangle_angles_examples(tri, angles):
    assert np.allclose(triangle_angles(*tri), angles, atol=1e-15)


@given(triangles(), points, st.floats(0.1, 5.0))
def test_triangle_angles_similarity_invariant(tri, b, s):
    a = s * cmath.exp(0.7j)
    mapped = [a * z + b for z in tri]
    assert np.allclose(triangle_angles(*tri), triangle_angles(*mapped), atol=1e-9)
    assert abs(sum(triangle_angles(*tri)) - math.pi) < 1e-12


def test_intersection_angle_examples():
    assert abs(intersection_angle((0, 1, 1j), (1, 0, -1j), (0, 1)) - math.pi / 2) < 1e-15
    assert abs(intersection_angle((0, 1, 1j), (1, 0, INF), (0, 1)) - 3 * math.pi / 4) < 1e-15
    # square split by (1, i): cocyclic
    assert abs(intersection_angle((0, 1, 1j), (1, 1 + 1j, 1j), (1, 1j))) < 1e-15


@given(triangles(), points)
def test_intersection_angle_symmetric_and_diagonals_opposite(tri, q):
    a, b, c = tri
    # q must sit across edge (a, b) with the quad convex
    if orient2d(b, a, q) <= 0 or orient2d(q, c, a) == 0 or orient2d(q, c, b) == 0:
        return
    convex = orient2d(c, q, a) != orient2d(c, q, b)
    th = intersection_angle((a, b, c), (b, a, q), (a, b))
    assert th == pytest.approx(intersection_angle((b, a, q), (a, b, c), (a, b)), abs=1e-12)
    if convex and orient2d(q, c, a) < 0:
        other = edge_angle(c, q, a, b)
        if abs(th) > 1e-9:
            assert np.sign(th) == -np.sign(other)


def test_delta3_examples():
    c = PointConfiguration((0j, 1 + 0j, 1j, INF), (0, 1, 3))
    assert delta3(0, 1, 2, c) == 1 + 1j
    assert abs(delta3(0, 1, 3, c)) == 1
    with pytest.raises(ValueError):
        delta3(0, 0, 1, c)


@given(st.lists(points, min_size=3, max_size=3, unique=True), points, st.floats(0.1, 4.0))
def test_delta3_affine_scaling(pts, b, s):
    if min(abs(pts[0] - pts[1]), abs(pts[1] - pts[2]), abs(pts[0] - pts[2])) < 1e-3:
        return
    a = s * cmath.exp(1.1j)
    c1 = PointConfiguration(tuple(pts), (0, 1, 2))
    c2 = PointConfiguration(tuple(a * z + b for z in pts), (0, 1, 2))
    assert abs(delta3(0, 1, 2, c2)) == pytest.approx(abs(a) ** 3 * abs(delta3(0, 1, 2, c1)), rel=1e-9)


def test_mobius_examples():
    cfg = PointConfiguration.standard([0.3 + 0.4j])
    assert mobius_apply(Mobius(1, 0, 0, 1), cfg).points == cfg.points
    inv = Mobius(0, 1, 1, 0)
    assert inv(1) == 1 and inv(2) == 0.5 and inv(INF) == 0 and is_inf(inv(0))
    shift = mobius_apply(Mobius(1, 2 - 1j, 0, 1), cfg)
    assert shift.points[0] == 2 - 1j and is_inf(shift.points[2])
    with pytest.raises(ValueError):
        Mobius(1, 2, 2, 4)


def test_in_disk_with_infinity():
    assert in_disk((0, 1, INF), 0.5j) == 1
    assert in_disk((0, 1, INF), -0.5j) == -1
    assert in_disk((0, 1, 1j), INF) == -1


def test_configuration_json_roundtrip():
    cfg = PointConfiguration.standard([0.3 + 0.4j, -1 + 2j])
    again = PointConfiguration.from_json(cfg.to_json())
    assert again.points[3:] == cfg.points[3:] and is_inf(again.points[2])
    odd = PointConfiguration((1j, INF, 0j, 2 + 0j), (3, 1, 0))
    assert PointConfiguration.from_json(odd.to_json()).gauge == (3, 1, 0)


def test_configuration_rejects_bad_input():
    with pytest.raises(ValueError):
        PointConfiguration((0j, 0j, 1 + 0j))
    with pytest.raises(ValueError):
        PointConfiguration((0j, INF, INF))
    with pytest.raises(ValueError):
        PointConfiguration((0j, 1 + 0j, 2 + 0j), (0, 1, 1))
