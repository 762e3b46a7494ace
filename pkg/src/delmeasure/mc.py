"""Monte Carlo estimation of measure volumes and growth checks.

Each batch draws from its own PCG64 stream spawned from one
``SeedSequence``, so results depend only on the seed and the batch layout,
never on the number of worker processes.  Standard errors come from batch
means.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geom import DegenerateError, PointConfiguration
from .kahler import density_one_point, free_kahler_matrix, measure_density_tri
from .tri import Triangulation, delaunay, insert_point

PI2_8 = math.pi**2 / 8
THREADS_ENV = "DELMEASURE_THREADS"


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int
    n_batches: int = 1
    duration: float = 0.0
    n_rejected: int = 0

    def lower(self, k: float = 3.0) -> float:
        return self.mean - k * self.stderr

    def upper(self, k: float = 3.0) -> float:
        return self.mean + k * self.stderr

    def within(self, value: float, k: float = 3.0) -> bool:
        return abs(self.mean - value) <= k * self.stderr

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "n": self.n,
            "seed": self.seed,
            "n_batches": self.n_batches,
            "duration_s": self.duration,
            "n_rejected": self.n_rejected,
        }


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _batch_sizes(n: int, n_batches: int) -> list:
    n_batches = max(1, min(n_batches, n))
    base, extra = divmod(n, n_batches)
    return [base + (k < extra) for k in range(n_batches)]


def _run_batch(args):
    fn, seed_seq, m = args
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    out = fn(rng, m)
    if isinstance(out, tuple):
        w, rejected = out
    else:
        w, rejected = out, 0
    return float(np.sum(w)), m, int(rejected)


def batch_estimate(
    batch_fn: Callable,
    n: int,
    seed: int,
    n_batches: int = 100,
    workers: Optional[int] = None,
) -> McEstimate:
    """Estimate E[w] where ``batch_fn(rng, m)`` returns m weights (optionally with a reject count).

    With ``workers > 1`` the batches run in a process pool; ``batch_fn``
    must then be picklable.  The reduction is in batch order either way.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    t0 = time.perf_counter()
    sizes = _batch_sizes(n, n_batches)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(batch_fn, s, m) for s, m in zip(seqs, sizes)]
    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_batch, jobs))
    else:
        results = [_run_batch(j) for j in jobs]
    sums = np.array([r[0] for r in results])
    counts = np.array([r[1] for r in results], dtype=float)
    means = sums / counts
    mean = float(sums.sum() / counts.sum())
    B = len(means)
    stderr = float(np.std(means, ddof=1) / math.sqrt(B)) if B > 1 else float("nan")
    return McEstimate(mean, stderr, n, seed, B, time.perf_counter() - t0, sum(r[2] for r in results))


def sphere_proposal(rng: np.random.Generator, size) -> tuple:
    """Points of the plane from the uniform measure on the sphere.

    Returns (z, q) with q = 1 / (pi (1 + |z|^2)^2), a probability density
    with respect to d^2 z.
    """
    u = rng.random(size)
    r = np.sqrt(u / (1.0 - u))
    z = r * np.exp(2j * math.pi * rng.random(size))
    q = 1.0 / (math.pi * (1.0 + np.abs(z) ** 2) ** 2)
    return z, q


def sphere_density(z) -> np.ndarray:
    return 1.0 / (math.pi * (1.0 + np.abs(z) ** 2) ** 2)


@dataclass(frozen=True)
class MixtureProposal:
    """Defensive mixture: sphere, a 1/r^3 tail at INF and 1/r spikes at anchors.

    The density ~ 1/|z - p| near every existing vertex p and ~ |z|^-3 near
    INF, which is how the measure itself behaves there; importance weights
    then stay bounded near collisions, unlike with the sphere proposal alone.
    """

    w_sphere: float = 0.4
    w_inf: float = 0.1
    near_scale: float = 0.5
    inf_scale: float = 2.0

    def density(self, z: np.ndarray, anchors: np.ndarray) -> np.ndarray:
        K = anchors.shape[1]
        r = np.abs(z[:, None] - anchors)
        s = self.near_scale
        near = np.where(r < s, 1.0 / (2 * math.pi * np.maximum(r, 1e-300) * s), 0.0).sum(axis=1)
        R = np.abs(z)
        tail = np.where(R > self.inf_scale, self.inf_scale / (2 * math.pi * np.maximum(R, 1e-300) ** 3), 0.0)
        w_near = 1.0 - self.w_sphere - self.w_inf
        return self.w_sphere * sphere_density(z) + self.w_inf * tail + w_near / K * near

    def draw(self, rng: np.random.Generator, anchors: np.ndarray) -> tuple:
        """One new point per row of ``anchors`` (shape (m, K)); returns (z, q)."""
        m, K = anchors.shape
        u = rng.random(m)
        zs, _ = sphere_proposal(rng, m)
        zi = self.inf_scale / (1.0 - rng.random(m)) * np.exp(2j * math.pi * rng.random(m))
        k = rng.integers(0, K, m)
        zn = anchors[np.arange(m), k] + self.near_scale * rng.random(m) * np.exp(2j * math.pi * rng.random(m))
        z = np.where(u < self.w_sphere, zs, np.where(u < self.w_sphere + self.w_inf, zi, zn))
        return z, self.density(z, anchors)


def draw_free_points(rng: np.random.Generator, m: int, n_free: int, proposal: str = "mixture") -> tuple:
    """m samples of n_free points in gauge (0, 1, INF) with their joint proposal density."""
    if proposal == "sphere":
        z, q = sphere_proposal(rng, (m, n_free))
        return z, np.prod(q, axis=1)
    if proposal != "mixture":
        raise ValueError(f"unknown proposal {proposal!r}")
    mix = MixtureProposal()
    anchors = np.tile(np.array([0j, 1 + 0j]), (m, 1))
    Z = np.empty((m, n_free), dtype=complex)
    q = np.ones(m)
    for j in range(n_free):
        z, qj = mix.draw(rng, anchors)
        Z[:, j] = z
        q *= qj
        anchors = np.column_stack([anchors, z])
    return Z, q


@dataclass(frozen=True)
class VolumeBatch:
    """Importance weights for V_N = integral of the density over N free points."""

    n_free: int
    proposal: str = "mixture"

    def __call__(self, rng: np.random.Generator, m: int):
        N = self.n_free
        if N == 0:
            return np.ones(m), 0
        z, qprod = draw_free_points(rng, m, N, self.proposal)
        if N == 1:
            return density_one_point(z[:, 0]) / qprod, 0
        w = np.empty(m)
        rejected = 0
        for k in range(m):
            try:
                t = delaunay(PointConfiguration.standard(z[k]))
                w[k] = measure_density_tri(t) / qprod[k]
            except (DegenerateError, ValueError):
                w[k] = 0.0
                rejected += 1
        return w, rejected


def estimate_volume(
    n_free: int,
    n: int,
    seed: int = 0,
    n_batches: int = 100,
    workers: Optional[int] = None,
    proposal: str = "mixture",
) -> McEstimate:
    """Importance-sampling estimate of the volume V_N of the Delaunay measure."""
    if n_free < 0:
        raise ValueError("N must be non-negative")
    if n_free == 0:
        return McEstimate(1.0, 0.0, n, seed, 1, 0.0, 0)
    return batch_estimate(VolumeBatch(n_free, proposal), n, seed, n_batches, workers)


@dataclass(frozen=True)
class GrowthBatch:
    """Weights det D(T^D(config + z)) / q(z) for a new free point z."""

    base: Triangulation = field(compare=False)
    proposal: str = "mixture"

    def __call__(self, rng: np.random.Generator, m: int):
        if self.proposal == "sphere":
            z, q = sphere_proposal(rng, m)
        else:
            finite = [self.base.point(v) for v in self.base.vertices if v != self.base.inf]
            z, q = MixtureProposal().draw(rng, np.tile(np.array(finite, dtype=complex), (m, 1)))
        w = np.empty(m)
        rejected = 0
        for k in range(m):
            try:
                t = insert_point(self.base, complex(z[k]))
                w[k] = free_kahler_matrix(t).det() / q[k]
            except (DegenerateError, ValueError):
                w[k] = 0.0
                rejected += 1
        return w, rejected


@dataclass(frozen=True)
class GrowthCheck:
    n_free: int
    lhs: McEstimate
    base_det: float
    rhs: float
    rhs_refined: float  # interior-edge refinement
    rhs_refined_all: float  # refinement summed over every edge
    tolerance: float = 0.01

    @property
    def passed(self) -> bool:
        return self.lhs.lower() >= self.rhs * (1 - self.tolerance)

    @property
    def passed_refined(self) -> bool:
        return self.lhs.lower() >= self.rhs_refined * (1 - self.tolerance)

    def to_json(self) -> dict:
        return {
            "N": self.n_free,
            "lhs": self.lhs.to_json(),
            "base_det": self.base_det,
            "rhs": self.rhs,
            "rhs_refined_interior": self.rhs_refined,
            "rhs_refined_all_edges": self.rhs_refined_all,
            "pass": self.passed,
            "pass_refined": self.passed_refined,
        }


def conditional_growth_check(
    config: PointConfiguration,
    n: int,
    seed: int = 0,
    n_batches: int = 50,
    workers: Optional[int] = None,
    proposal: str = "mixture",
) -> GrowthCheck:
    """Compare the integral over a new point z of det D(T^D(config + z)) with its lower bound.

    The bound is (N + 1) (pi^2 / 8) det D(T^D(config)); the refined bound adds
    (1/8) sum theta (2 pi - theta) det D, over interior edges (asserted) or
    over all edges (reported).
    """
    base = delaunay(config)
    base_det = free_kahler_matrix(base).det()
    N = config.n_free
    lhs = batch_estimate(GrowthBatch(base, proposal), n, seed, n_batches, workers)
    rhs = (N + 1) * PI2_8 * base_det

    def extra(edges) -> float:
        return sum(th * (2 * math.pi - th) for th in (base.theta(*e) for e in edges)) / 8 * base_det

    return GrowthCheck(N, lhs, base_det, rhs, rhs + extra(base.interior_edges()), rhs + extra(base.edges()))


@dataclass(frozen=True)
class GrowthRow:
    n_free: int
    volume: McEstimate
    ratio: float  # V_N / (N V_{N-1})
    ratio_stderr: float
    bound: float = PI2_8

    @property
    def passed(self) -> bool:
        if self.n_free == 0:
            return self.volume.mean == 1.0
        return self.ratio - 3 * self.ratio_stderr >= self.bound * 0.99

    def to_json(self) -> dict:
        return {
            "N": self.n_free,
            "V": self.volume.mean,
            "V_stderr": self.volume.stderr,
            "Z": self.volume.mean / math.factorial(self.n_free),
            "ratio": self.ratio,
            "ratio_stderr": self.ratio_stderr,
            "bound": self.bound,
            "pass": self.passed,
        }


def growth_chain(n_max: int, n: int, seed: int = 0, n_batches: int = 100, workers: Optional[int] = None) -> list:
    """V_0 .. V_{n_max} with the ratios V_N / (N V_{N-1}) and their standard errors."""
    rows = []
    prev = None
    for N in range(n_max + 1):
        est = estimate_volume(N, n, seed + N, n_batches, workers)
        if prev is None:
            ratio, err = float("nan"), 0.0
        else:
            ratio = est.mean / (N * prev.mean)
            rel = math.hypot(est.stderr / est.mean, prev.stderr / prev.mean)
            err = ratio * rel
        rows.append(GrowthRow(N, est, ratio, err))
        prev = est
    return rows


__all__ = [
    "GrowthBatch",
    "GrowthCheck",
    "GrowthRow",
    "McEstimate",
    "MixtureProposal",
    "PI2_8",
    "VolumeBatch",
    "batch_estimate",
    "conditional_growth_check",
    "draw_free_points",
    "estimate_volume",
    "growth_chain",
    "rng_for",
    "sphere_proposal",
]
