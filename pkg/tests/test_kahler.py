import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from delmeasure.configs import ConfigSpec, cocyclic_quad_config, random_config, random_configs
from delmeasure.geom import INF, Mobius, PointConfiguration, circumcircle, mobius_apply
from delmeasure.kahler import (
    density_one_point,
    det_excluding,
    face_kahler_block,
    flip_delta_observed,
    flip_delta_predicted,
    free_kahler_matrix,
    ideal_tetra_volume,
    kahler_matrix,
    kahler_matrix_fd,
    lobachevsky,
    measure_density,
    measure_density_tri,
    normalized_det,
    prepotential,
)
from delmeasure.tri import delaunay, enumerate_triangulations, flip_is_valid
from strategies import configs, triangles


def lobachevsky_quad(x):
    return float(-mpmath.quad(lambda t: mpmath.log(abs(2 * mpmath.sin(t))), [0, x]))


def rel_matrix(a, b):
    return np.abs(a - b).max() / np.abs(b).max()


def test_lobachevsky_examples():
    assert lobachevsky(0.0) == 0.0
    assert abs(lobachevsky(math.pi / 2)) <= 1e-15
    assert lobachevsky(math.pi / 6) == pytest.approx(lobachevsky_quad(math.pi / 6), abs=1e-12)


@given(st.floats(-4.0, 4.0))
def test_lobachevsky_odd_periodic_and_vectorized(x):
    assert lobachevsky(-x) == pytest.approx(-lobachevsky(x), abs=1e-15)
    assert lobachevsky(x + math.pi) == pytest.approx(lobachevsky(x), abs=1e-14)
    assert float(lobachevsky(np.array([x]))[0]) == pytest.approx(lobachevsky(x), abs=1e-15)


@pytest.mark.parametrize("x", [0.1, 0.4, 1.0, 1.3, 2.0, 2.9])
def test_lobachevsky_matches_quadrature(x):
    assert lobachevsky(x) == pytest.approx(lobachevsky_quad(x), abs=1e-12)


def test_ideal_volume_examples():
    assert ideal_tetra_volume(0, 1, 2) == 0.0
    eq = ideal_tetra_volume(0, 1, cmath.exp(1j * math.pi / 3))
    assert eq == pytest.approx(3 * lobachevsky(math.pi / 3), abs=1e-15)
    assert eq == pytest.approx(1.0149416064096536, abs=1e-14)


@given(triangles(), st.floats(0.2, 3.0), st.floats(-3, 3))
def test_ideal_volume_similarity_and_bound(tri, s, phase):
    a = s * cmath.exp(1j * phase)
    v = ideal_tetra_volume(*tri)
    assert ideal_tetra_volume(*(a * z + 0.3 for z in tri)) == pytest.approx(v, abs=1e-12)
    assert 0 <= v <= 3 * lobachevsky(math.pi / 3) + 1e-12


def test_prepotential_examples():
    assert prepotential(delaunay(PointConfiguration.standard([]))) == 0
    t = delaunay(PointConfiguration.standard([cmath.exp(1j * math.pi / 3)]))
    assert prepotential(t) == pytest.approx(-3 * lobachevsky(math.pi / 3), abs=1e-15)


def test_kahler_minimal_and_single_point():
    t = delaunay(PointConfiguration.standard([]))
    assert free_kahler_matrix(t).matrix.shape == (0, 0)
    assert kahler_matrix_fd(t).matrix.shape == (0, 0)
    t = delaunay(PointConfiguration.standard([0.3 + 0.4j]))
    D = free_kahler_matrix(t).matrix
    assert D.shape == (1, 1) and D[0, 0].real > 0
    assert rel_matrix(kahler_matrix_fd(t).matrix, D) <= 1e-5


def test_kahler_matches_fd_oracle_n5():
    t = delaunay(random_configs(3, 1, 5, min_sep=0.1, min_theta=0.05)[0])
    assert rel_matrix(kahler_matrix_fd(t).matrix, free_kahler_matrix(t).matrix) <= 1e-5


def test_fd_richardson_ratio_and_hermiticity():
    t = delaunay(random_configs(4, 1, 2, min_sep=0.2, min_theta=0.1)[0])
    D = free_kahler_matrix(t).matrix
    e1 = np.abs(kahler_matrix_fd(t, 4e-3).matrix - D).max()
    e2 = np.abs(kahler_matrix_fd(t, 2e-3).matrix - D).max()
    assert 3.0 < e1 / e2 < 5.0
    H = kahler_matrix_fd(t, 1e-3).matrix
    assert np.abs(H - H.conj().T).max() <= 1e-5 * np.abs(H).max()


def test_fd_refuses_to_cross_a_flip():
    t = delaunay(cocyclic_quad_config(1e-9))
    with pytest.raises(ValueError):
        kahler_matrix_fd(t, 1e-4)


@given(configs(1, 7))
def test_kahler_hermitian_with_affine_kernel(config):
    t = delaunay(config)
    D = kahler_matrix(t)
    M = D.matrix
    assert np.allclose(M, M.conj().T, atol=1e-12 * np.abs(M).max())
    z = np.array([t._pts[v] for v in D.labels])
    scale = np.abs(M).max() * (1 + np.abs(z).max())
    assert np.abs(M @ np.ones(len(z))).max() <= 1e-10 * scale
    assert np.abs(M @ z.conj()).max() <= 1e-10 * scale


def test_face_block_rows_sum_to_zero():
    B = face_kahler_block(0, 1, 0.3 + 0.8j)
    assert np.allclose(B.sum(axis=1), 0, atol=1e-14)


def test_det_excluding_examples():
    t = delaunay(PointConfiguration.standard([]))
    assert det_excluding(t, (0, 1, 2)) == 1.0
    t = delaunay(PointConfiguration.standard([0.3 + 0.4j]))
    D = kahler_matrix(t)
    assert det_excluding(t, (0, 1, 2), D) == pytest.approx(D.restrict([3]).matrix[0, 0].real)


@given(configs(1, 8))
def test_minors_nonnegative_on_delaunay(config):
    t = delaunay(config)
    D = kahler_matrix(t)
    assert det_excluding(t, (0, 1, 2), D) >= 0
    assert D.eigenvalues().min() >= -1e-10 * np.trace(D.matrix).real


def test_flip_lemma_examples():
    t = delaunay(cocyclic_quad_config(0.0))
    e = (3, 5) if t.has_edge(3, 5) else (4, 6)
    assert abs(flip_delta_predicted(t, e)) <= 1e-12
    assert abs(flip_delta_observed(t, e)) <= 1e-12


@given(configs(3, 7, min_theta=1e-2))
def test_flip_lemma_random(config):
    t = delaunay(config)
    for e in t.interior_edges():
        quad = (t.apex(*e), t.apex(e[1], e[0]), *e)
        if t.inf in quad or not flip_is_valid(t, *e):
            continue
        pred = flip_delta_predicted(t, e)
        # Delaunay: z3 lies outside the circumcircle of f, so the change is positive
        assert pred > 0
        assert abs(flip_delta_observed(t, e) - pred) <= 1e-9 * abs(pred)


def test_normalized_det_examples():
    t = delaunay(PointConfiguration.standard([]))
    assert normalized_det(t, (2, 0, 1)) == 1.0
    t = delaunay(PointConfiguration.standard([0.3 + 0.4j, -0.5 + 1.1j]))
    a = normalized_det(t, (2, 0, 1))
    b = normalized_det(t, (2, 0, 3))
    assert a == pytest.approx(b, rel=1e-9)
    with pytest.raises(ValueError):
        normalized_det(t, (0, 1, 3))


@given(configs(1, 5), st.floats(0.2, 5.0))
def test_normalized_det_under_scaling(config, s):
    t1 = delaunay(config)
    scaled = PointConfiguration(tuple(p if p is INF else s * p for p in config.points), config.gauge)
    t2 = delaunay(scaled)
    finite = config.finite_ids
    r1 = [normalized_det(t1, (t1.inf, i, j)) for i in finite for j in finite if i < j]
    r2 = [normalized_det(t2, (t2.inf, i, j)) for i in finite for j in finite if i < j]
    assert np.allclose(np.array(r1) / r1[0], 1, rtol=1e-9)
    assert np.allclose(np.array(r2) / r2[0], 1, rtol=1e-9)
    # the free minor scales by s^(-2N) and |Delta3|^2 by s^2
    assert r2[0] / r1[0] == pytest.approx(s ** (-2 * config.n_free - 2), rel=1e-8)


def test_measure_density_examples():
    assert measure_density(PointConfiguration.standard([])) == 1.0
    z = 0.3 + 0.4j
    t = delaunay(PointConfiguration.standard([z]))
    D = free_kahler_matrix(t).matrix[0, 0].real
    assert measure_density(PointConfiguration.standard([z])) == pytest.approx(2 * D)
    assert float(density_one_point(np.array([z]))[0]) == pytest.approx(2 * D, rel=1e-12)
    with pytest.raises(ValueError):
        measure_density(PointConfiguration((0j, 1 + 0j, 1j, 2 + 0j), (0, 1, 2)))


@given(configs(2, 4))
def test_maximality_over_flip_orbit(config):
    d0 = measure_density(config)
    for T in enumerate_triangulations(config):
        assert measure_density_tri(T) <= d0 * (1 + 1e-12)


def test_density_mobius_covariance_with_inf_fixed():
    # an affine map keeps INF; the normalized determinant scales by |a|^(-2(N+1))
    rng = np.random.default_rng(9)
    cfg = random_config(rng, ConfigSpec(3))
    m = Mobius(1.3 - 0.4j, 0.2 + 0.1j, 0, 1)
    t1, t2 = delaunay(cfg), delaunay(mobius_apply(m, cfg))
    assert normalized_det(t2, (2, 0, 1)) == pytest.approx(normalized_det(t1, (2, 0, 1)) * abs(1.3 - 0.4j) ** -8, rel=1e-9)


def test_circumcircle_power_sign_matches_lemma_direction():
    t = delaunay(cocyclic_quad_config(0.2))
    e = (3, 5) if t.has_edge(3, 5) else (4, 6)
    p, u, q, v = t.apex(*e), e[0], t.apex(e[1], e[0]), e[1]
    C = circumcircle(t._pts[p], t._pts[u], t._pts[v])
    assert C.power(t._pts[q]) > 0
