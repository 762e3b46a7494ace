import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from delmeasure.configs import ConfigSpec, random_config
from delmeasure.geom import INF, DegenerateError, PointConfiguration, incircle, in_disk
from delmeasure.tri import (
    angle_pattern,
    check_contour_condition,
    delaunay,
    dual_cycles,
    edge_is_illegal,
    enumerate_triangulations,
    flip,
    flip_is_valid,
    insert_in_face,
    insert_point,
    lawson_restore,
    locate,
    replay,
)
from strategies import configs


def empty_circumdisks(t) -> bool:
    """Brute-force oracle: no finite vertex strictly inside any bounded face's circumdisk."""
    P = t._pts
    for f in t.bounded_faces():
        face = t.faces[f]
        for v in t.vertices:
            if v in face or v == t.inf:
                continue
            if incircle(*(P[w] for w in face), P[v]) > 0:
                return False
    return True


def square_config():
    return PointConfiguration((0j, 1 + 0j, INF, 1 + 1j, 1j), (0, 1, 2))


def test_minimal_sphere():
    t = delaunay(PointConfiguration.standard([]))
    assert sorted(sorted(f) for f in t.faces.values()) == [[0, 1, 2], [0, 1, 2]]
    assert t.bounded_faces() == []


def test_single_free_point():
    t = delaunay(PointConfiguration.standard([0.3 + 0.4j]))
    assert [sorted(t.faces[f]) for f in t.bounded_faces()] == [[0, 1, 3]]
    assert len(t.faces) - len(t.bounded_faces()) == 3


@given(configs(1, 8))
def test_delaunay_empty_circumdisk_and_euler(config):
    t = delaunay(config)
    assert empty_circumdisks(t)
    assert len(t.faces) == 2 * (len(config.points) - 2)
    assert t.is_delaunay()


@given(configs(1, 8))
def test_lawson_fixed_point(config):
    _, recs = lawson_restore(delaunay(config))
    assert recs == []


def test_square_flip_and_involution():
    t = delaunay(square_config())
    assert t.has_edge(0, 3)  # tie-break: lexicographically smallest diagonal
    t = flip(t, (0, 3))  # diagonal (1, i)
    t2 = flip(t, (1, 4))
    assert t2.has_edge(0, 3) and not t2.has_edge(1, 4)
    assert flip(t2, (0, 3)).canonical_key() == t.canonical_key()


def test_flip_hull_edge_raises():
    t = delaunay(square_config())
    with pytest.raises(ValueError):
        flip(t, (0, 1))
    with pytest.raises(ValueError):
        flip(t, (0, 2))


def test_lawson_single_flip_example():
    cfg = PointConfiguration((0j, 1 + 0j, INF, 1.1 + 1j, 1j), (0, 1, 2))
    t = delaunay(cfg)
    d = (1, 4) if t.has_edge(1, 4) else (0, 3)
    other = flip(t, d)
    out, recs = lawson_restore(other)
    assert len(recs) == 1
    assert out.canonical_key() == t.canonical_key() and empty_circumdisks(out)


@given(configs(4, 8), st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_lawson_after_scrambling(config, seed, k):
    rng = np.random.default_rng(seed)
    t = delaunay(config)
    for _ in range(k):
        cands = [e for e in t.interior_edges() if flip_is_valid(t, *e)]
        if not cands:
            break
        t = flip(t, cands[rng.integers(len(cands))])
    out, recs = lawson_restore(t)
    assert out.canonical_key() == delaunay(config).canonical_key()
    assert replay(t, recs)[-1].canonical_key() == out.canonical_key()


def test_insert_in_face_centroid_of_equilateral():
    h = math.sqrt(3) / 2
    t = delaunay(PointConfiguration.standard([0.5 + h * 1j]))
    f = t.bounded_faces()[0]
    out = insert_in_face(t, f, 0.5 + h / 3 * 1j)
    assert len(out.bounded_faces()) == 3
    areas = [abs(((b - a).conjugate() * (c - a)).imag) for a, b, c in map(out.face_points, out.bounded_faces())]
    assert np.allclose(areas, areas[0])


@given(configs(2, 7), st.floats(0.05, 0.9), st.floats(0.05, 0.9))
def test_insert_then_restore_matches_delaunay(config, s, r):
    t = delaunay(config)
    f = t.bounded_faces()[0]
    a, b, c = t.face_points(f)
    w = np.array([s, r * (1 - s), (1 - s) * (1 - r)])
    z = complex(w @ np.array([a, b, c]))
    out = insert_in_face(t, f, z)
    assert out.n_vertices == t.n_vertices + 1
    assert len(out.bounded_faces()) == len(t.bounded_faces()) + 2
    restored, _ = lawson_restore(out)
    assert restored.canonical_key() == delaunay(config.with_point(z)).canonical_key()
    assert insert_point(t, z).canonical_key() == restored.canonical_key()


def test_locate_examples():
    t = delaunay(square_config())
    for f in t.bounded_faces():
        a, b, c = t.face_points(f)
        assert locate(t, (a + b + c) / 3) == f
    assert not t.is_bounded(locate(t, 50 - 40j))
    # midpoint of the interior diagonal: shared by both bounded faces
    assert locate(t, 0.5 + 0.5j) == min(t.bounded_faces())


def test_enumeration_counts():
    assert len(enumerate_triangulations(square_config())) == 2
    pent = [1.2 + 0.8j, 0.5 + 1.5j, -0.2 + 0.8j]
    assert len(enumerate_triangulations(PointConfiguration.standard(pent))) == 5
    assert len(enumerate_triangulations(PointConfiguration.standard([0.3 + 0.4j]))) == 1


def test_enumeration_pentagon_matches_catalan_bruteforce():
    # the pentagon here: 0, 1, 1.2+0.8i, 0.5+1.5i, -0.2+0.8i; catalan(3) = 5
    catalan = math.comb(6, 3) // 4
    pent = [1.2 + 0.8j, 0.5 + 1.5j, -0.2 + 0.8j]
    ts = enumerate_triangulations(PointConfiguration.standard(pent))
    assert len({t.canonical_key() for t in ts}) == catalan


def test_angle_pattern_minimal_and_square():
    t = delaunay(PointConfiguration.standard([]))
    pat = angle_pattern(t)
    assert len(pat.theta) == 3
    for v in t.vertices:
        assert pat.vertex_sum(t, v) == pytest.approx(2 * math.pi, abs=1e-12)
    sq = delaunay(square_config())
    assert abs(sq.theta(0, 3)) < 1e-15


@given(configs(1, 8))
def test_vertex_sums_and_theta_range(config):
    t = delaunay(config)
    pat = angle_pattern(t)
    for v in t.vertices:
        if all(t.is_bounded(f) for f in t.faces_around(v)):
            assert abs(pat.vertex_sum(t, v) - 2 * math.pi) <= 1e-10
    assert all(-1e-12 <= th < math.pi for th in pat.theta.values())


def test_contour_condition_on_delaunay_and_vertex_cycles():
    rng = np.random.default_rng(5)
    t = delaunay(random_config(rng, ConfigSpec(5)))
    pat = angle_pattern(t)
    assert check_contour_condition(t, pat, 6)
    # cycles around a single interior vertex carry exactly 2 pi
    for v in t.vertices:
        if not all(t.is_bounded(f) for f in t.faces_around(v)):
            continue
        star = {tuple(sorted((v, w))) for w in t.star(v)}
        cycles = [c for c in dual_cycles(t, len(star)) if set(c) == star]
        assert len(cycles) == 1
        assert math.fsum(pat.theta[e] for e in cycles[0]) == pytest.approx(2 * math.pi, abs=1e-12)


def test_illegal_flip_creates_negative_angle():
    rng = np.random.default_rng(11)
    t = delaunay(random_config(rng, ConfigSpec(6, min_theta=1e-3)))
    e = next(e for e in t.interior_edges() if flip_is_valid(t, *e))
    bad = flip(t, e)
    assert edge_is_illegal(bad, *next(x for x in bad.edges() if x not in t.edges()))
    assert min(angle_pattern(bad).theta.values()) < 0


def test_in_disk_is_consistent_with_edge_angle():
    rng = np.random.default_rng(2)
    t = delaunay(random_config(rng, ConfigSpec(6)))
    P = t._pts
    for u, v in t.edges():
        f = t.faces[t.face_of(u, v)]
        q = t.apex(v, u)
        assert in_disk(tuple(P[w] for w in f), P[q]) <= 0


def test_cocyclic_tie_break_is_deterministic():
    t1 = delaunay(square_config())
    t2 = delaunay(square_config())
    assert t1.canonical_key() == t2.canonical_key()


def test_collinear_gauge_only_raises_on_degenerate_query():
    t = delaunay(PointConfiguration.standard([]))
    with pytest.raises(DegenerateError):
        locate(t, 3 + 0j)
