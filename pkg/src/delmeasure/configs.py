"""Seeded generators for the configurations used by tests, scripts and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geom import DegenerateError, PointConfiguration
from .tri import delaunay


@dataclass(frozen=True)
class ConfigSpec:
    n_free: int
    box: tuple = (-1.0, 2.0, -1.5, 1.5)
    min_sep: float = 0.05
    min_theta: float = 0.0  # reject Delaunay triangulations with a near-cocyclic edge


def _min_separation(points: list) -> float:
    finite = np.array(points)
    d = np.abs(finite[:, None] - finite[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def random_config(rng: np.random.Generator, spec: ConfigSpec, max_tries: int = 1000) -> PointConfiguration:
    """Free points uniform in ``spec.box`` with gauge 0, 1, INF, resampled until admissible."""
    x0, x1, y0, y1 = spec.box
    for _ in range(max_tries):
        free = rng.uniform(x0, x1, spec.n_free) + 1j * rng.uniform(y0, y1, spec.n_free)
        if _min_separation([0j, 1 + 0j, *free]) < spec.min_sep:
            continue
        config = PointConfiguration.standard(free)
        if spec.min_theta > 0:
            try:
                t = delaunay(config)
            except DegenerateError:
                continue
            if any(t.theta(*e) < spec.min_theta for e in t.edges()):
                continue
        return config
    raise RuntimeError("could not draw an admissible configuration")


def random_configs(seed: int, count: int, n_free, **kw) -> list:
    """``count`` configurations; ``n_free`` is an int or a sequence cycled over."""
    rng = np.random.default_rng(seed)
    sizes = [n_free] * count if isinstance(n_free, int) else [n_free[k % len(n_free)] for k in range(count)]
    return [random_config(rng, ConfigSpec(n, **kw)) for n in sizes]


CENTER = 0.5 + 2.0j


def cocyclic_quad_config(offset: float = 0.0, radius: float = 0.7, angles=(0.3, 1.9, 3.4, 4.9)) -> PointConfiguration:
    """Four free points (ids 3..6) on a circle, surrounded by a ring of six more.

    Vertex 5 is pushed radially outward by ``offset``; at offset 0 the quad
    is cocyclic up to rounding.  All quad vertices are interior.
    """
    quad = [CENTER + radius * np.exp(1j * a) for a in angles]
    quad[2] = CENTER + (radius + offset) * np.exp(1j * angles[2])
    ring = [CENTER + 1.8 * np.exp(1j * (a + 0.2)) for a in np.linspace(0, 2 * math.pi, 7)[:-1]]
    return PointConfiguration.standard(quad + ring)


QUAD_IDS = (3, 4, 5, 6)


def kite_path(radius: float = 0.7) -> Callable[[float], PointConfiguration]:
    """Symmetric kite around the diameter (3, 5): vertices 4 and 6 sit at distance radius + s.

    At s = 0 the four points are cocyclic and the circumcenters lie on the
    edge, so both half-angles of the dual edge are small near the crossing.
    """
    ring = [CENTER + 1.8 * np.exp(1j * (a + 0.2)) for a in np.linspace(0, 2 * math.pi, 7)[:-1]]

    def path(s: float) -> PointConfiguration:
        quad = [CENTER + radius, CENTER + 1j * (radius + s), CENTER - radius, CENTER - 1j * (radius + s)]
        return PointConfiguration.standard(quad + ring)

    return path


def radial_path(radius: float = 0.7) -> Callable[[float], PointConfiguration]:
    """Generic quad crossing cocyclicity as vertex 5 moves radially."""
    return lambda s: cocyclic_quad_config(s, radius)
