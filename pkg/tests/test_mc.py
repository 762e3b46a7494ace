import math

import numpy as np
import pytest
from scipy import integrate

from delmeasure.geom import PointConfiguration
from delmeasure.kahler import density_one_point
from delmeasure.mc import (
    PI2_8,
    MixtureProposal,
    batch_estimate,
    conditional_growth_check,
    draw_free_points,
    estimate_volume,
    growth_chain,
    sphere_density,
    sphere_proposal,
)


def test_volume_zero_is_one():
    assert estimate_volume(0, 10, 3).mean == 1.0


def test_sphere_proposal_normalised():
    val, _ = integrate.quad(lambda r: 2 * math.pi * r * sphere_density(r), 0, np.inf)
    assert val == pytest.approx(1.0, abs=1e-9)
    z, q = sphere_proposal(np.random.default_rng(0), 200_000)
    assert np.median(np.abs(z)) == pytest.approx(1.0, abs=0.01)
    assert np.allclose(q, sphere_density(z))


def test_mixture_density_is_a_density():
    # E_q[f / q] = 1 for any probability density f; use the sphere density
    rng = np.random.default_rng(1)
    anchors = np.tile(np.array([0j, 1 + 0j, 0.3 + 0.4j]), (400_000, 1))
    z, q = MixtureProposal().draw(rng, anchors)
    w = sphere_density(z) / q
    assert np.all(q > 0)
    assert abs(w.mean() - 1) < 4 * w.std() / math.sqrt(len(w))


def test_draw_free_points_shapes():
    z, q = draw_free_points(np.random.default_rng(2), 50, 3)
    assert z.shape == (50, 3) and q.shape == (50,)
    assert np.all(q > 0)
    with pytest.raises(ValueError):
        draw_free_points(np.random.default_rng(2), 5, 1, "nope")


def test_unbiased_on_known_integral():
    # integral of x over [0, 1) via uniform draws
    est = batch_estimate(lambda rng, m: rng.random(m), 100_000, 5, n_batches=50)
    assert est.within(0.5, 4)


def test_reproducible_and_worker_independent():
    a = estimate_volume(2, 400, 11, n_batches=8, workers=1)
    b = estimate_volume(2, 400, 11, n_batches=8, workers=1)
    c = estimate_volume(2, 400, 11, n_batches=8, workers=2)
    assert a.mean == b.mean == c.mean
    assert a.stderr == c.stderr
    assert estimate_volume(2, 400, 12, n_batches=8).mean != a.mean


def test_weights_nonnegative():
    def batch(rng, m):
        z, q = draw_free_points(rng, m, 1)
        return density_one_point(z[:, 0]) / q

    w = batch(np.random.default_rng(4), 10_000)
    assert np.all(w >= 0) and np.all(np.isfinite(w))


def test_one_point_volume_near_pi_squared():
    est = estimate_volume(1, 200_000, 9)
    assert est.within(math.pi**2, 4)
    assert est.lower() >= PI2_8


def test_growth_chain_rows():
    rows = growth_chain(1, 20_000, seed=3)
    assert rows[0].volume.mean == 1.0 and rows[0].passed
    assert rows[0].to_json()["Z"] == 1.0
    assert rows[1].ratio == pytest.approx(rows[1].volume.mean)
    assert rows[1].passed


def test_conditional_growth_empty_base():
    chk = conditional_growth_check(PointConfiguration.standard([]), 20_000, 1)
    assert chk.n_free == 0 and chk.rhs == pytest.approx(PI2_8 * chk.base_det)
    assert chk.passed
    assert chk.rhs_refined == chk.rhs  # no interior edges
    assert chk.rhs_refined_all >= chk.rhs


def test_batch_estimate_rejects_empty():
    with pytest.raises(ValueError):
        batch_estimate(lambda rng, m: np.ones(m), 0, 0)
