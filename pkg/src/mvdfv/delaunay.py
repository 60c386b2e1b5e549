"""Incremental Bowyer-Watson Delaunay triangulation.

Hull handling uses a single vertex at infinity instead of a finite
super-triangle: a "ghost" triangle ``(a, b, INF)`` conflicts with a point
that lies strictly outside its hull edge, or on the edge itself.  This keeps
collinear boundary points (rectangle sides) exact, which a far-away
super-triangle does not.
"""
import random

import numpy as np

from .errors import DegenerateTriangle

INF = -1


def orient(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def incircle(a, b, c, d):
    """Positive when ``d`` lies strictly inside the circle through CCW ``a, b, c``."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    return (
        adx * (bdy * cd - bd * cdy)
        - ady * (bdx * cd - bd * cdx)
        + ad * (bdx * cdy - bdy * cdx)
    )


class _Triangulation:
    def __init__(self, pts, seed):
        self.p = pts
        self.tris = {}
        # directed edge (a, b) -> id of the triangle having a->b in CCW order
        self.edge = {}
        self.next_id = 0
        self.last = None
        self.rng = random.Random(seed)

    def add(self, a, b, c):
        t = self.next_id
        self.next_id += 1
        self.tris[t] = (a, b, c)
        self.edge[(a, b)] = t
        self.edge[(b, c)] = t
        self.edge[(c, a)] = t
        if INF not in (a, b, c):
            self.last = t
        return t

    def remove(self, t):
        a, b, c = self.tris.pop(t)
        for e in ((a, b), (b, c), (c, a)):
            if self.edge.get(e) == t:
                del self.edge[e]

    def in_conflict(self, t, q):
        a, b, c = self.tris[t]
        p = self.p
        if INF in (a, b, c):
            # rotate so the finite edge comes first
            while c != INF:
                a, b, c = b, c, a
            pa, pb, pq = p[a], p[b], p[q]
            o = orient(pa, pb, pq)
            if o > 0:
                return True
            if o == 0:
                dx, dy = pb[0] - pa[0], pb[1] - pa[1]
                s = (pq[0] - pa[0]) * dx + (pq[1] - pa[1]) * dy
                return 0 < s < dx * dx + dy * dy
            return False
        return incircle(p[a], p[b], p[c], p[q]) > 0

    def locate(self, q):
        """Return a triangle in conflict with point ``q`` by a stochastic walk."""
        p = self.p
        t = self.last
        pq = p[q]
        for _ in range(4 * len(self.tris) + 16):
            a, b, c = self.tris[t]
            edges = [(a, b), (b, c), (c, a)]
            self.rng.shuffle(edges)
            for u, v in edges:
                if orient(p[u], p[v], pq) < 0:
                    t = self.edge[(v, u)]
                    if INF in self.tris[t]:
                        return t
                    break
            else:
                return t
        # Walk failed to terminate; fall back to a linear scan.
        for t in self.tris:
            if self.in_conflict(t, q):
                return t
        raise DegenerateTriangle(f"could not locate point {q}")

    def insert(self, q):
        start = self.locate(q)
        cavity = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            a, b, c = self.tris[t]
            for u, v in ((a, b), (b, c), (c, a)):
                n = self.edge.get((v, u))
                if n is not None and n not in cavity and self.in_conflict(n, q):
                    cavity.add(n)
                    stack.append(n)
        boundary = []
        for t in cavity:
            a, b, c = self.tris[t]
            for u, v in ((a, b), (b, c), (c, a)):
                if self.edge.get((v, u)) not in cavity:
                    boundary.append((u, v))
        for t in cavity:
            self.remove(t)
        for u, v in boundary:
            self.add(u, v, q)


def _insertion_order(pts):
    """Snake order over horizontal bands keeps consecutive points close."""
    n = len(pts)
    lo = pts.min(axis=0)
    span = np.maximum(pts.max(axis=0) - lo, 1e-300)
    bands = max(1, int(np.sqrt(n / 2)))
    band = np.minimum(((pts[:, 1] - lo[1]) / span[1] * bands).astype(int), bands - 1)
    x = np.where(band % 2 == 0, pts[:, 0], -pts[:, 0])
    return np.lexsort((x, band))


def delaunay(points, seed=0):
    """Delaunay triangulation of ``points``; returns an ``(T, 3)`` CCW index array.

    Duplicate points raise :class:`DegenerateTriangle`, as does a point set
    without three non-collinear points.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if len(np.unique(pts, axis=0)) != n:
        raise DegenerateTriangle("duplicate points")
    p = [tuple(x) for x in pts.tolist()]
    order = [int(i) for i in _insertion_order(pts)]

    # seed triangle from the first three non-collinear points in order
    i0, i1 = order[0], order[1]
    k = next(
        (k for k in range(2, n) if orient(p[i0], p[i1], p[order[k]]) != 0),
        None,
    )
    if k is None:
        raise DegenerateTriangle("all points are collinear")
    i2 = order[k]
    if orient(p[i0], p[i1], p[i2]) < 0:
        i1, i2 = i2, i1
    tri = _Triangulation(p, seed)
    tri.add(i0, i1, i2)
    tri.add(i1, i0, INF)
    tri.add(i2, i1, INF)
    tri.add(i0, i2, INF)
    for q in order[2:k] + order[k + 1:]:
        tri.insert(q)

    out = np.array(
        sorted(t for t in tri.tris.values() if INF not in t), dtype=np.int64
    ).reshape(-1, 3)
    # canonical rotation: smallest index first
    for r in range(len(out)):
        j = int(np.argmin(out[r]))
        out[r] = np.roll(out[r], -j)
    out = out[np.lexsort(out.T[::-1])]
    a, b, c = pts[out[:, 0]], pts[out[:, 1]], pts[out[:, 2]]
    area = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    if np.any(area <= 0):
        raise DegenerateTriangle("triangulation produced a degenerate triangle")
    return out
