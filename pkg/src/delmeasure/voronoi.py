"""Voronoi dual of a Delaunay triangulation with intrinsic edge lengths.

Nodes are the circumcenters of bounded faces.  A dual edge crosses an
interior primal edge e = (v1, v2); its two half-angles are measured at v1
between the edge and the circumcenters on either side and add up to
theta(e).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .geom import Circle, PointConfiguration, circumcircle
from .tri import Triangulation, delaunay


@dataclass(frozen=True)
class DualEdge:
    edge: tuple  # primal edge (v1, v2), v1 < v2
    faces: tuple  # (f, f') with f left of v1 -> v2
    theta_n: float
    theta_s: float

    @property
    def theta(self) -> float:
        return self.theta_n + self.theta_s


@dataclass(frozen=True)
class DualGraph:
    nodes: dict  # face id -> circumcenter
    edges: tuple

    def edge_for(self, u: int, v: int) -> DualEdge:
        key = (min(u, v), max(u, v))
        for d in self.edges:
            if d.edge == key:
                return d
        raise KeyError(key)


def _center(t: Triangulation, f: int) -> complex:
    C = circumcircle(*t.face_points(f))
    if not isinstance(C, Circle):
        raise ValueError("degenerate face")
    return C.center


def dual_graph(t: Triangulation) -> DualGraph:
    nodes = {f: _center(t, f) for f in t.bounded_faces()}
    edges = []
    P = t._pts
    for v1, v2 in t.interior_edges():
        f, g = t.face_of(v1, v2), t.face_of(v2, v1)
        z1, z2 = P[v1], P[v2]
        th_n = cmath.phase((nodes[f] - z1) / (z2 - z1))
        th_s = cmath.phase((z2 - z1) / (nodes[g] - z1))
        edges.append(DualEdge((v1, v2), (f, g), th_n, th_s))
    return DualGraph(nodes, tuple(edges))


def dual_length_hyperbolic(d: DualEdge) -> float:
    """Sum over both half-angles of (1/2) log((1 + sin x) / (1 - sin x))."""
    total = 0.0
    for x in (d.theta_n, d.theta_s):
        if abs(x) >= math.pi / 2:
            raise ValueError("half-angle out of (-pi/2, pi/2)")
        total += math.atanh(math.sin(x))
    return total


def dual_length_flat(d: DualEdge) -> float:
    """2 sin(theta / 2), an increasing function of theta on [0, pi)."""
    return 2.0 * math.sin(0.5 * d.theta)


def dual_distances(g: DualGraph, length: Callable[[DualEdge], float] = dual_length_hyperbolic) -> tuple:
    """All-pairs shortest paths over the dual graph; returns (face ids, matrix)."""
    ids = sorted(g.nodes)
    pos = {f: k for k, f in enumerate(ids)}
    rows, cols, vals = [], [], []
    for d in g.edges:
        w = max(length(d), 0.0)
        a, b = pos[d.faces[0]], pos[d.faces[1]]
        rows += [a, b]
        cols += [b, a]
        # zero-length edges would vanish from the sparse matrix
        vals += [w or 1e-300, w or 1e-300]
    M = csr_matrix((vals, (rows, cols)), shape=(len(ids), len(ids)))
    return ids, shortest_path(M, directed=False)


@dataclass(frozen=True)
class FlipContinuity:
    params: tuple
    crossing_length: float  # dual length of the flipping edge at the cocyclic point
    distance_jump: float  # |d(s* - ds) - d(s* + ds)| between two far nodes
    passed: bool


def _face_with(t: Triangulation, verts: set) -> int:
    for f in t.bounded_faces():
        if set(t.faces[f]) == verts:
            return f
    raise KeyError(verts)


def flip_continuity_check(
    path: Callable[[float], PointConfiguration],
    s_star: float,
    quad: Sequence[int],
    far_faces: Sequence[tuple],
    ds: float = 1e-9,
    tol: float = 1e-6,
) -> FlipContinuity:
    """Distances in the dual graph stay continuous when a path crosses a flip.

    ``path(s)`` makes the quadrilateral ``quad`` (four vertex ids, ccw)
    cocyclic at ``s_star``; ``far_faces`` name two faces (as vertex
    triples) that the flip does not touch.
    """
    before, at, after = (delaunay(path(s)) for s in (s_star - ds, s_star, s_star + ds))
    a, b, c, d = quad
    diag = (a, c) if at.has_edge(a, c) else (b, d)
    crossing = abs(dual_length_hyperbolic(dual_graph(at).edge_for(*diag)))
    dist = []
    for t in (before, after):
        ids, M = dual_distances(dual_graph(t))
        f1, f2 = (_face_with(t, set(fs)) for fs in far_faces)
        dist.append(M[ids.index(f1), ids.index(f2)])
    jump = abs(dist[0] - dist[1])
    return FlipContinuity((s_star - ds, s_star + ds), crossing, jump, crossing <= 1e-8 and jump <= tol)


__all__ = [
    "DualEdge",
    "DualGraph",
    "FlipContinuity",
    "dual_distances",
    "dual_graph",
    "dual_length_flat",
    "dual_length_hyperbolic",
    "flip_continuity_check",
]
