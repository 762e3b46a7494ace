"""Triangulations of the sphere with the point at infinity as a vertex.

Every triangulation is stored as a set of positively oriented vertex
triples.  Faces containing the infinite vertex are the unbounded faces of
the planar picture, so every edge has exactly two adjacent faces and the
face count is ``2 (M - 2)`` for ``M`` vertices.

Configurations that do not contain ``INF`` get a virtual infinite vertex
with id ``-1``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional

from .geom import (
    INF,
    DegenerateError,
    PointConfiguration,
    edge_angle,
    in_disk,
    is_inf,
    orient2d,
)

VIRTUAL_INF = -1


@dataclass(frozen=True)
class FlipRecord:
    old_edge: tuple
    new_edge: tuple
    faces: tuple


class Triangulation:
    """An immutable snapshot of a sphere triangulation.

    ``faces`` maps face ids to ccw vertex triples; ``inf`` is the id of the
    infinite vertex.  Builders in this module mutate private copies only.
    """

    __slots__ = ("config", "inf", "faces", "_he", "_pts", "_next_id", "_hint")

    def __init__(self, config: PointConfiguration, faces: dict, inf: int, next_id: Optional[int] = None):
        self.config = config
        self.inf = inf
        self.faces = dict(faces)
        self._pts = dict(enumerate(config.points))
        self._pts[inf] = INF
        self._he = {}
        for fid, (a, b, c) in self.faces.items():
            self._he[(a, b)] = fid
            self._he[(b, c)] = fid
            self._he[(c, a)] = fid
        self._next_id = next_id if next_id is not None else (max(self.faces, default=-1) + 1)
        self._hint = None

    # -- basic queries -------------------------------------------------------

    def copy(self) -> "Triangulation":
        return Triangulation(self.config, self.faces, self.inf, self._next_id)

    def point(self, v: int):
        return self._pts[v]

    @property
    def vertices(self) -> list:
        return sorted(self._pts)

    @property
    def n_vertices(self) -> int:
        return len(self._pts)

    def face_of(self, u: int, v: int) -> int:
        """Id of the face containing the directed edge u -> v."""
        return self._he[(u, v)]

    def apex(self, u: int, v: int) -> int:
        a, b, c = self.faces[self._he[(u, v)]]
        if (a, b) == (u, v):
            return c
        if (b, c) == (u, v):
            return a
        return b

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._he

    def edges(self) -> list:
        """Undirected edges as sorted pairs, in sorted order."""
        return sorted({(min(u, v), max(u, v)) for (u, v) in self._he})

    def is_bounded(self, fid: int) -> bool:
        return self.inf not in self.faces[fid]

    def bounded_faces(self) -> list:
        return [fid for fid in sorted(self.faces) if self.inf not in self.faces[fid]]

    def is_interior_edge(self, u: int, v: int) -> bool:
        """Both adjacent faces are bounded."""
        return self.is_bounded(self._he[(u, v)]) and self.is_bounded(self._he[(v, u)])

    def interior_edges(self) -> list:
        return [e for e in self.edges() if self.is_interior_edge(*e)]

    def face_points(self, fid: int) -> tuple:
        return tuple(self._pts[v] for v in self.faces[fid])

    def star(self, v: int) -> list:
        """Neighbours of v in ccw order, starting from the smallest id."""
        nbrs = sorted(w for (u, w) in self._he if u == v)
        if not nbrs:
            raise KeyError(v)
        out = [nbrs[0]]
        while True:
            nxt = self.apex(v, out[-1])
            if nxt == out[0]:
                return out
            out.append(nxt)

    def faces_around(self, v: int) -> list:
        """Face ids around v in ccw order, following :meth:`star`."""
        return [self._he[(v, w)] for w in self.star(v)]

    def theta(self, u: int, v: int) -> float:
        """Intersection angle of the circumcircles on both sides of edge (u, v)."""
        p, q = self.apex(u, v), self.apex(v, u)
        P = self._pts
        return edge_angle(P[u], P[v], P[p], P[q])

    def canonical_key(self) -> frozenset:
        def rot(f):
            k = f.index(min(f))
            return f[k:] + f[:k]

        return frozenset(rot(f) for f in self.faces.values())

    def is_delaunay(self) -> bool:
        return all(not _strictly_illegal(self, u, v) for (u, v) in self.edges())

    def to_json(self) -> dict:
        name = lambda v: "inf" if v == self.inf else v  # noqa: E731
        verts = {}
        for v, p in sorted(self._pts.items()):
            verts[str(v)] = "inf" if is_inf(p) else [p.real, p.imag]
        return {
            "vertices": verts,
            "faces": [[name(v) for v in self.faces[f]] for f in sorted(self.faces)],
            "edges": [
                {"v": [name(u), name(v)], "theta": self.theta(u, v)} for (u, v) in self.edges()
            ],
        }

    # -- private mutation (builders only) ------------------------------------

    def _add_face(self, a: int, b: int, c: int, fid: Optional[int] = None) -> int:
        if fid is None:
            fid = self._next_id
            self._next_id += 1
        self.faces[fid] = (a, b, c)
        self._he[(a, b)] = fid
        self._he[(b, c)] = fid
        self._he[(c, a)] = fid
        return fid

    def _remove_face(self, fid: int) -> None:
        a, b, c = self.faces.pop(fid)
        for e in ((a, b), (b, c), (c, a)):
            if self._he.get(e) == fid:
                del self._he[e]

    def _flip_inplace(self, u: int, v: int) -> FlipRecord:
        f, g = self._he[(u, v)], self._he[(v, u)]
        p, q = self.apex(u, v), self.apex(v, u)
        self._remove_face(f)
        self._remove_face(g)
        self._add_face(p, q, v, f)
        self._add_face(q, p, u, g)
        return FlipRecord((u, v), (p, q), (f, g))

    def _split_face(self, fid: int, x: int) -> list:
        a, b, c = self.faces[fid]
        self._remove_face(fid)
        self._add_face(a, b, x, fid)
        self._add_face(b, c, x)
        self._add_face(c, a, x)
        return [(a, b), (b, c), (c, a)]

    def _split_edge(self, u: int, v: int, x: int) -> list:
        f, g = self._he[(u, v)], self._he[(v, u)]
        p, q = self.apex(u, v), self.apex(v, u)
        self._remove_face(f)
        self._remove_face(g)
        self._add_face(u, x, p, f)
        self._add_face(x, v, p, g)
        self._add_face(v, x, q)
        self._add_face(x, u, q)
        return [(v, p), (p, u), (u, q), (q, v)]


# ---------------------------------------------------------------------------
# predicates on edges


def _bounded_positive(t: Triangulation, face: tuple) -> bool:
    if t.inf in face:
        return True
    P = t._pts
    return orient2d(P[face[0]], P[face[1]], P[face[2]]) > 0


def flip_is_valid(t: Triangulation, u: int, v: int) -> bool:
    """The two faces created by flipping (u, v) are positively oriented and bounded faces stay bounded."""
    p, q = t.apex(u, v), t.apex(v, u)
    if p == q or t.has_edge(p, q):
        return False
    return _bounded_positive(t, (p, q, v)) and _bounded_positive(t, (q, p, u))


def _strictly_illegal(t: Triangulation, u: int, v: int) -> bool:
    f = t.faces[t._he[(u, v)]]
    q = t.apex(v, u)
    P = t._pts
    return in_disk(tuple(P[w] for w in f), P[q]) > 0


def edge_is_illegal(t: Triangulation, u: int, v: int) -> bool:
    """Lawson legality with a deterministic tie-break.

    An edge is illegal when the opposite apex lies strictly inside the
    circumdisk of the face.  On an exact tie the edge is flipped only if the
    other diagonal is lexicographically smaller and the flip is valid, so
    cocyclic configurations get a unique Delaunay triangulation.
    """
    f = t.faces[t._he[(u, v)]]
    p, q = t.apex(u, v), t.apex(v, u)
    P = t._pts
    s = in_disk(tuple(P[w] for w in f), P[q])
    if s > 0:
        return flip_is_valid(t, u, v)
    if s < 0:
        return False
    return (min(p, q), max(p, q)) < (min(u, v), max(u, v)) and flip_is_valid(t, u, v)


def _legalize(t: Triangulation, stack: list) -> None:
    while stack:
        u, v = stack.pop()
        if not t.has_edge(u, v):
            continue
        if edge_is_illegal(t, u, v):
            p, q = t.apex(u, v), t.apex(v, u)
            t._flip_inplace(u, v)
            stack.extend([(u, q), (q, v), (v, p), (p, u)])


# ---------------------------------------------------------------------------
# construction


def _locate_for_insert(t: Triangulation, z: complex):
    """Return ('face', fid) or ('edge', (u, v)) for the cell containing z."""
    P = t._pts
    inf = t.inf
    for fid in sorted(t.faces):
        a, b, c = t.faces[fid]
        if inf in (a, b, c):
            continue
        pa, pb, pc = P[a], P[b], P[c]
        o1, o2, o3 = orient2d(pa, pb, z), orient2d(pb, pc, z), orient2d(pc, pa, z)
        if o1 < 0 or o2 < 0 or o3 < 0:
            continue
        zeros = [e for e, o in (((a, b), o1), ((b, c), o2), ((c, a), o3)) if o == 0]
        if not zeros:
            return "face", fid
        if len(zeros) == 1:
            return "edge", zeros[0]
        raise DegenerateError("point coincides with a vertex")
    # outside the convex hull of the finite points
    on_hull = None
    for fid in sorted(t.faces):
        f = t.faces[fid]
        if inf not in f:
            continue
        k = f.index(inf)
        s, u = f[(k + 1) % 3], f[(k + 2) % 3]
        o = orient2d(P[s], P[u], z)
        if o > 0:
            return "face", fid
        if o == 0 and on_hull is None and _between(P[s], P[u], z):
            on_hull = (s, u)
    if on_hull is not None:
        return "edge", on_hull
    raise DegenerateError("all finite points are collinear")


def _between(a: complex, b: complex, z: complex) -> bool:
    d = b - a
    s = ((z - a) * d.conjugate()).real
    return 0 < s < abs(d) ** 2


def _insert_vertex(t: Triangulation, x: int) -> None:
    kind, where = _locate_for_insert(t, t._pts[x])
    if kind == "face":
        stack = t._split_face(where, x)
    else:
        stack = t._split_edge(where[0], where[1], x)
    _legalize(t, stack)


def delaunay(config: PointConfiguration) -> Triangulation:
    """Delaunay triangulation of the sphere on ``config`` (INF is a vertex)."""
    inf = config.inf_id
    if inf is None:
        inf = VIRTUAL_INF
    finite = list(config.finite_ids)
    if len(finite) < 2:
        raise DegenerateError("need at least two finite points")
    if len(finite) == 2:
        a, b = finite
        return Triangulation(config, {0: (a, b, inf), 1: (b, a, inf)}, inf)
    P = config.points
    a, b = finite[0], finite[1]
    c = next((x for x in finite[2:] if orient2d(P[a], P[b], P[x]) != 0), None)
    if c is None:
        raise DegenerateError("all finite points are collinear")
    if orient2d(P[a], P[b], P[c]) < 0:
        a, b = b, a
    faces = {0: (a, b, c), 1: (b, a, inf), 2: (c, b, inf), 3: (a, c, inf)}
    t = Triangulation(config, faces, inf)
    for x in finite:
        if x not in (a, b, c):
            _insert_vertex(t, x)
    return t


def insert_point(t: Triangulation, z: complex) -> Triangulation:
    """Delaunay triangulation of ``t.config`` plus the new free point ``z``.

    ``t`` must be Delaunay; the result equals ``delaunay(t.config.with_point(z))``
    up to face ids.
    """
    config = t.config.with_point(z)
    out = Triangulation(config, t.faces, t.inf, t._next_id)
    _insert_vertex(out, len(config.points) - 1)
    return out


def insert_in_face(t: Triangulation, f: int, z: complex) -> Triangulation:
    """Split face ``f`` by a new free vertex at ``z`` (no legalization)."""
    P = t._pts
    a, b, c = t.faces[f]
    if t.inf not in (a, b, c):
        inside = orient2d(P[a], P[b], z) > 0 and orient2d(P[b], P[c], z) > 0 and orient2d(P[c], P[a], z) > 0
    else:
        k = (a, b, c).index(t.inf)
        s, u = (a, b, c)[(k + 1) % 3], (a, b, c)[(k + 2) % 3]
        inside = orient2d(P[s], P[u], z) > 0
    if not inside:
        raise ValueError("point is not strictly inside the face")
    config = t.config.with_point(z)
    out = Triangulation(config, t.faces, t.inf, t._next_id)
    out._split_face(f, len(config.points) - 1)
    return out


def flip(t: Triangulation, e: tuple) -> Triangulation:
    """Flip an interior edge whose quadrilateral is strictly convex."""
    u, v = e
    if not t.has_edge(u, v):
        raise ValueError(f"{e} is not an edge")
    if not t.is_interior_edge(u, v):
        raise ValueError(f"{e} is a hull edge or an edge to INF")
    if not flip_is_valid(t, u, v):
        raise ValueError(f"quadrilateral around {e} is not strictly convex")
    out = t.copy()
    out._flip_inplace(u, v)
    return out


def lawson_restore(t: Triangulation) -> tuple:
    """Flip illegal interior edges until the triangulation is Delaunay.

    The smallest illegal edge is flipped first.  Returns the Delaunay
    triangulation and the list of :class:`FlipRecord`; :func:`replay`
    rebuilds the intermediate triangulations.
    """
    out = t.copy()
    records = []
    while True:
        for u, v in out.edges():
            if out.is_interior_edge(u, v) and edge_is_illegal(out, u, v):
                records.append(out._flip_inplace(u, v))
                break
        else:
            return out, records


def replay(t: Triangulation, records: list) -> list:
    """Triangulations after each recorded flip, starting from ``t``."""
    states = [t]
    for r in records:
        states.append(flip(states[-1], r.old_edge))
    return states


def locate(t: Triangulation, z: complex) -> int:
    """Face id containing ``z``.

    Bounded faces are closed; on a shared boundary the smaller face id wins.
    Outside the hull, the answer is the smallest-id unbounded face whose hull
    edge sees ``z``.  A visibility walk from the last located face is tried
    first, with an exhaustive scan as fallback.
    """
    if is_inf(z):
        raise ValueError("cannot locate INF")
    P = t._pts
    inf = t.inf

    def contains(fid):
        a, b, c = t.faces[fid]
        return orient2d(P[a], P[b], z) >= 0 and orient2d(P[b], P[c], z) >= 0 and orient2d(P[c], P[a], z) >= 0

    bounded = t.bounded_faces()
    found = None
    fid = t._hint if t._hint in t.faces and t.is_bounded(t._hint) else (bounded[0] if bounded else None)
    for _ in range(4 * len(t.faces) + 4):
        if fid is None:
            break
        a, b, c = t.faces[fid]
        for u, v in ((a, b), (b, c), (c, a)):
            if orient2d(P[u], P[v], z) < 0:
                nxt = t.face_of(v, u)
                fid = nxt if t.is_bounded(nxt) else None
                break
        else:
            found = fid
            break
    if found is None:
        found = next((f for f in bounded if contains(f)), None)
    if found is not None:
        cands = [f for f in bounded if contains(f)]
        found = min(cands)
        t._hint = found
        return found
    for fid in sorted(t.faces):
        f = t.faces[fid]
        if inf in f:
            k = f.index(inf)
            if orient2d(P[f[(k + 1) % 3]], P[f[(k + 2) % 3]], z) > 0:
                return fid
    raise DegenerateError("point lies on the line of a collinear hull")


def enumerate_triangulations(config: PointConfiguration, cap: int = 9) -> list:
    """All triangulations reachable from the Delaunay one by valid interior flips."""
    if len(config.points) > cap:
        raise ValueError(f"enumeration capped at {cap} vertices")
    start = delaunay(config)
    seen = {start.canonical_key(): start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for u, v in t.interior_edges():
            if not flip_is_valid(t, u, v):
                continue
            nt = t.copy()
            nt._flip_inplace(u, v)
            key = nt.canonical_key()
            if key not in seen:
                seen[key] = nt
                queue.append(nt)
    return list(seen.values())


# ---------------------------------------------------------------------------
# angle patterns


@dataclass(frozen=True)
class AnglePattern:
    theta: dict  # sorted edge -> intersection angle

    def vertex_sum(self, t: Triangulation, v: int) -> float:
        return math.fsum(self.theta[(min(v, w), max(v, w))] for w in t.star(v))


def angle_pattern(t: Triangulation) -> AnglePattern:
    return AnglePattern({e: t.theta(*e) for e in t.edges()})


def dual_cycles(t: Triangulation, max_len: int) -> Iterator[tuple]:
    """Simple cycles of the dual graph, each given by the crossed edges."""
    adj = {}
    for u, v in t.edges():
        f, g = t.face_of(u, v), t.face_of(v, u)
        adj.setdefault(f, []).append((g, (u, v)))
        adj.setdefault(g, []).append((f, (u, v)))
    seen = set()

    def extend(start, node, visited, crossed):
        for nxt, e in adj[node]:
            if e in crossed:
                continue
            if nxt == start and len(crossed) >= 1:
                cyc = frozenset(crossed + [e])
                if len(cyc) >= 2 and cyc not in seen:
                    seen.add(cyc)
                    yield tuple(sorted(cyc))
                continue
            if nxt in visited or nxt < start or len(crossed) + 1 >= max_len:
                continue
            yield from extend(start, nxt, visited | {nxt}, crossed + [e])

    for s in sorted(adj):
        yield from extend(s, s, {s}, [])


def check_contour_condition(t: Triangulation, pattern: AnglePattern, max_cycle_len: int = 6) -> bool:
    """Every dual cycle of length at most ``max_cycle_len`` carries angle at least 2 pi."""
    for cyc in dual_cycles(t, max_cycle_len):
        if math.fsum(pattern.theta[e] for e in cyc) < 2 * math.pi - 1e-9:
            return False
    return True
