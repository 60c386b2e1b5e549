"""Planar geometry primitives: circumcenters, angles, areas, tensor rotation.

Points are plain length-2 sequences (tuples or numpy arrays).  Scalar
functions here operate on a single element; the ``*_array`` variants are
vectorised over whole meshes and follow the same formulas.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import (
    DegenerateTriangle,
    NegativeArea,
    NonIntersecting,
    NonOrthogonal,
    TooFewVertices,
)

AREA_EPS = 1e-14
GEOM_EPS = 1e-12


@dataclass(frozen=True)
class Tensor2:
    """A 2x2 diffusion tensor ``[[k11, k12], [k21, k22]]``."""

    k11: float
    k12: float
    k21: float
    k22: float

    @classmethod
    def from_array(cls, a):
        a = np.asarray(a, dtype=float)
        return cls(float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1]))

    @classmethod
    def diag(cls, a, b):
        return cls(float(a), 0.0, 0.0, float(b))

    def as_array(self):
        return np.array([[self.k11, self.k12], [self.k21, self.k22]])

    def is_symmetric(self, rtol=1e-12):
        scale = max(abs(self.k11), abs(self.k12), abs(self.k21), abs(self.k22))
        return abs(self.k12 - self.k21) <= rtol * scale

    def is_spd(self):
        det = self.k11 * self.k22 - self.k12 * self.k21
        return self.is_symmetric() and self.k11 > 0 and det > 0

    def trace(self):
        return self.k11 + self.k22

    def det(self):
        return self.k11 * self.k22 - self.k12 * self.k21

    def min_eigenvalue(self):
        """Smallest eigenvalue, i.e. the ellipticity constant of the tensor."""
        return float(np.linalg.eigvalsh(self.as_array())[0])


@dataclass(frozen=True)
class LocalFrame:
    """Orthonormal frame of an MVD cell; ``e_V`` is ``e_D`` turned by +90 deg."""

    e_D: tuple
    e_V: tuple
    theta: float

    @classmethod
    def from_angle(cls, theta):
        c, s = math.cos(theta), math.sin(theta)
        return cls((c, s), (-s, c), theta)


def _scale(*points):
    pts = np.asarray(points, dtype=float)
    span = pts.max(axis=0) - pts.min(axis=0)
    return float(math.hypot(span[0], span[1]))


def signed_area(a, b, c):
    """Signed area, positive when ``a, b, c`` run counterclockwise."""
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _check_triangle(a, b, c, scale=None):
    area = signed_area(a, b, c)
    if scale is None:
        scale = _scale(a, b, c)
    if not math.isfinite(area) or abs(area) <= AREA_EPS * scale * scale:
        raise DegenerateTriangle(f"degenerate triangle {a}, {b}, {c}")
    return area


def circumcenter(a, b, c, scale=None):
    """Center of the circle through ``a``, ``b`` and ``c``."""
    _check_triangle(a, b, c, scale)
    # Work relative to a to limit cancellation.
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return (a[0] + ux, a[1] + uy)


def circumcenters_array(points, triangles):
    """Vectorised :func:`circumcenter` for an ``(T, 3)`` index array."""
    p = np.asarray(points, dtype=float)
    t = np.asarray(triangles)
    a, b, c = p[t[:, 0]], p[t[:, 1]], p[t[:, 2]]
    bx, by = (b - a).T
    cx, cy = (c - a).T
    d = 2.0 * (bx * cy - by * cx)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return a + np.column_stack([ux, uy])


def triangle_angles(a, b, c):
    """Interior angles in degrees at ``a``, ``b`` and ``c``."""
    _check_triangle(a, b, c)
    return tuple(float(x) for x in triangle_angles_array(np.array([a, b, c], dtype=float), [[0, 1, 2]])[0])


def triangle_angles_array(points, triangles):
    """Angles in degrees, shape ``(T, 3)``; column k is the angle at vertex k.

    Uses ``atan2(|cross|, dot)`` which stays accurate near 0 and 180 degrees.
    """
    p = np.asarray(points, dtype=float)
    t = np.asarray(triangles)
    out = np.empty(t.shape, dtype=float)
    for k in range(3):
        o = p[t[:, k]]
        u = p[t[:, (k + 1) % 3]] - o
        v = p[t[:, (k + 2) % 3]] - o
        cross = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
        dot = u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1]
        out[:, k] = np.degrees(np.arctan2(cross, dot))
    return out


def polygon_signed_area(vertices):
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    # Shoelace relative to the first vertex.
    x = x - x[0]
    y = y - y[0]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_area(vertices):
    """Area of a simple counterclockwise polygon.

    Raises :class:`NegativeArea` for clockwise input so orientation bugs
    surface instead of silently flipping the sign.
    """
    if len(vertices) < 3:
        raise TooFewVertices(f"polygon needs at least 3 vertices, got {len(vertices)}")
    area = polygon_signed_area(vertices)
    if area < 0:
        raise NegativeArea(f"polygon is clockwise (signed area {area:.6g})")
    return area


def polygon_centroid(vertices):
    v = np.asarray(vertices, dtype=float)
    o = v[0]
    x, y = (v - o).T
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = 0.5 * cr.sum()
    cx = ((x + xn) * cr).sum() / (6.0 * a)
    cy = ((y + yn) * cr).sum() / (6.0 * a)
    return o + np.array([cx, cy])


def rotation_matrix(theta):
    """Clockwise rotation by ``theta``: maps Cartesian components to the local frame."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def rotate_tensor(K, theta):
    """Return ``Q K Q^T`` as a :class:`Tensor2` with entries (k_DD, k_DV, k_VD, k_VV).

    ``theta`` is the counterclockwise angle from the x-axis to ``e_D``, so
    ``k_DD = e_D . K e_D`` and ``k_DV = e_D . K e_V``.
    """
    Q = rotation_matrix(theta)
    R = Q @ K.as_array() @ Q.T
    # Symmetrise: the two off-diagonal products differ only by rounding.
    off = 0.5 * (R[0, 1] + R[1, 0])
    return Tensor2(float(R[0, 0]), float(off), float(off), float(R[1, 1]))


def diagonal_intersection(p1, p2, q1, q2, ortho_tol=1e-8, tol=GEOM_EPS):
    """Intersection point of the orthogonal segments ``p1p2`` and ``q1q2``."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    d = p2 - p1
    e = q2 - q1
    ld, le = math.hypot(*d), math.hypot(*e)
    if ld == 0 or le == 0:
        raise NonIntersecting("zero-length segment")
    cosine = abs(float(d @ e)) / (ld * le)
    if cosine > ortho_tol:
        raise NonOrthogonal(cosine)
    # p1 + t d = q1 + s e
    den = d[0] * e[1] - d[1] * e[0]
    w = q1 - p1
    t = (w[0] * e[1] - w[1] * e[0]) / den
    s = (w[0] * d[1] - w[1] * d[0]) / den
    if not (-tol <= t <= 1 + tol and -tol <= s <= 1 + tol):
        raise NonIntersecting(f"segments do not meet (t={t:.3g}, s={s:.3g})")
    return tuple(p1 + t * d)


def clip_halfplane(poly, point, normal):
    """Keep the part of ``poly`` where ``(x - point) . normal <= 0``."""
    out = []
    n = len(poly)
    if n == 0:
        return out
    px, py = point
    nx, ny = normal
    dist = [(x - px) * nx + (y - py) * ny for x, y in poly]
    for k in range(n):
        cur, nxt = poly[k], poly[(k + 1) % n]
        dc, dn = dist[k], dist[(k + 1) % n]
        if dc <= 0:
            out.append(cur)
        if (dc < 0 < dn) or (dn < 0 < dc):
            t = dc / (dc - dn)
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    return out


def clip_convex(subject, clipper):
    """Sutherland-Hodgman clip of ``subject`` by the convex CCW polygon ``clipper``."""
    poly = [tuple(p) for p in subject]
    m = len(clipper)
    for k in range(m):
        a, b = clipper[k], clipper[(k + 1) % m]
        # Outward normal of a CCW edge points to its right.
        normal = (b[1] - a[1], -(b[0] - a[0]))
        poly = clip_halfplane(poly, a, normal)
        if not poly:
            break
    return poly


def convex_hull(points, tol=1e-10):
    """Counterclockwise convex hull (monotone chain), collinear points dropped."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) < 3:
        return pts
    scale = _scale(*pts)
    eps = tol * scale * scale

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= eps:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= eps:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def point_segment_distance(p, a, b):
    p, a, b = (np.asarray(x, dtype=float) for x in (p, a, b))
    d = b - a
    t = np.clip((p - a) @ d / (d @ d), 0.0, 1.0)
    return float(np.hypot(*(p - a - t * d)))
