"""Voronoi dual (V-mesh) and merged Voronoi-Delaunay (MVD) mesh construction.

Indexing conventions
--------------------
* V-node ``j < T`` is the circumcenter of triangle ``j``; V-node ``T + b`` is
  the midpoint of the ``b``-th boundary edge.  Only circumcenters are
  interior V-nodes.
* MVD cell ``m`` belongs to Delaunay edge ``m`` (``mesh.edges`` order).  Its
  D-diagonal runs from the lower node index ``i`` to the higher ``i+``; its
  V-diagonal runs from ``j`` (right of ``i -> i+``) to ``j+`` (left), so that
  ``e_V`` is ``e_D`` turned counterclockwise by a right angle.
"""
from dataclasses import dataclass
from functools import cached_property
import warnings

import numpy as np

from . import geometry
from .errors import (
    CircumcenterOutsideTriangle,
    InvalidMesh,
    NonAcuteMesh,
    NonOrthogonal,
    ZeroLengthDiagonal,
)
from .meshio import ANGLE_TOL, validate_acute

ORTHO_TOL = 1e-8
LENGTH_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class VoronoiDual:
    vertices: np.ndarray
    boundary_vertices: np.ndarray
    cells: list
    mesh: object
    # boundary-edge index (into mesh.edges) for each boundary V-node
    boundary_edge_ids: np.ndarray

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_interior(self):
        return self.mesh.num_triangles

    @cached_property
    def is_boundary(self):
        mask = np.zeros(self.num_vertices, dtype=bool)
        mask[self.boundary_vertices] = True
        return mask


@dataclass(frozen=True)
class MvdCell:
    center: tuple
    d_nodes: tuple
    v_nodes: tuple
    frame: geometry.LocalFrame
    len_D: float
    len_V: float
    S_star: float
    is_boundary_degenerate: bool


@dataclass(frozen=True, eq=False)
class MvdMesh:
    """Per-cell data as parallel arrays of length ``M`` plus node measures.

    ``S_D`` has one entry per D-node and ``S_V`` one per V-node (zero on
    boundary V-nodes, which carry no control volume).  ``delta_D[m]`` and
    ``delta_V[m]`` hold the orientation signs of the cell's two D-nodes and
    two V-nodes (0 for a boundary V-node).
    """

    mesh: object
    dual: VoronoiDual
    center: np.ndarray
    d_nodes: np.ndarray
    v_nodes: np.ndarray
    e_D: np.ndarray
    e_V: np.ndarray
    theta: np.ndarray
    len_D: np.ndarray
    len_V: np.ndarray
    S_star: np.ndarray
    is_boundary_degenerate: np.ndarray
    S_D: np.ndarray
    S_V: np.ndarray
    delta_D: np.ndarray
    delta_V: np.ndarray

    @property
    def num_cells(self):
        return len(self.center)

    @property
    def M_D(self):
        return self.mesh.num_nodes

    @property
    def M_V(self):
        return self.dual.num_vertices

    @property
    def M(self):
        return self.num_cells

    @cached_property
    def interior_D(self):
        return np.flatnonzero(~self.mesh.is_boundary)

    @cached_property
    def interior_V(self):
        return np.flatnonzero(~self.dual.is_boundary)

    def cell(self, m):
        return MvdCell(
            center=tuple(self.center[m]),
            d_nodes=tuple(int(k) for k in self.d_nodes[m]),
            v_nodes=tuple(int(k) for k in self.v_nodes[m]),
            frame=geometry.LocalFrame(tuple(self.e_D[m]), tuple(self.e_V[m]), float(self.theta[m])),
            len_D=float(self.len_D[m]),
            len_V=float(self.len_V[m]),
            S_star=float(self.S_star[m]),
            is_boundary_degenerate=bool(self.is_boundary_degenerate[m]),
        )

    def cells(self):
        return [self.cell(m) for m in range(self.num_cells)]


def _incident_triangles(mesh):
    inc = [[] for _ in range(mesh.num_nodes)]
    for t, tri in enumerate(mesh.triangles):
        for i in tri:
            inc[i].append(t)
    return inc


def build_voronoi(mesh, allow_nonacute=False, angle_tol=ANGLE_TOL):
    """Voronoi vertices and per-node control volumes of an acute triangulation."""
    report = validate_acute(mesh, angle_tol)
    if not report.is_acute:
        if not allow_nonacute:
            raise NonAcuteMesh(report)
        warnings.warn(f"building the dual of a non-acute mesh: {report}", stacklevel=2)
    p = mesh.nodes
    tri = mesh.triangles
    cc = geometry.circumcenters_array(p, tri)
    if allow_nonacute:
        outside = _outside_triangles(p, tri, cc)
        if len(outside):
            warnings.warn(
                str(CircumcenterOutsideTriangle(
                    f"{len(outside)} circumcenters outside their triangles, e.g. triangle {outside[0]}"
                )),
                stacklevel=2,
            )
    edges, _, _ = mesh.edges
    bedges = mesh.boundary_edges
    mids = 0.5 * (p[edges[bedges, 0]] + p[edges[bedges, 1]])
    T = len(tri)
    vertices = np.vstack([cc, mids])
    boundary_vertices = np.arange(T, T + len(bedges))

    mid_of_node = [[] for _ in range(mesh.num_nodes)]
    for b, e in enumerate(bedges):
        for i in edges[e]:
            mid_of_node[i].append(T + b)
    inc = _incident_triangles(mesh)
    domain = [tuple(v) for v in mesh.domain]
    cells = []
    for i in range(mesh.num_nodes):
        ids = list(inc[i]) + mid_of_node[i]
        poly = vertices[ids]
        if mesh.is_boundary[i]:
            poly = np.vstack([poly, p[i]])
        # Control volumes are convex, so the vertex mean is inside and an
        # angular sort yields the counterclockwise boundary.
        c = poly.mean(axis=0)
        order = np.argsort(np.arctan2(poly[:, 1] - c[1], poly[:, 0] - c[0]), kind="stable")
        clipped = geometry.clip_convex([tuple(x) for x in poly[order]], domain)
        cells.append(np.array(clipped))
    return VoronoiDual(vertices, boundary_vertices, cells, mesh, bedges)


def _outside_triangles(p, tri, cc):
    out = []
    for t, (a, b, c) in enumerate(tri):
        x = cc[t]
        if (geometry.signed_area(p[a], p[b], x) < 0 or geometry.signed_area(p[b], p[c], x) < 0
                or geometry.signed_area(p[c], p[a], x) < 0):
            out.append(t)
    return out


def build_mvd(mesh, dual):
    """One orthodiagonal cell per Delaunay edge, with frames, lengths and measures."""
    if dual.mesh is not mesh:
        raise InvalidMesh("dual was built from a different mesh")
    p = mesh.nodes
    edges, left, right = mesh.edges
    T = mesh.num_triangles
    M = len(edges)
    mid_id = np.full(M, -1, dtype=np.int64)
    mid_id[dual.boundary_edge_ids] = T + np.arange(len(dual.boundary_edge_ids))
    j_lo = np.where(right >= 0, right, mid_id)
    j_hi = np.where(left >= 0, left, mid_id)
    d_nodes = edges.astype(np.int64)
    v_nodes = np.column_stack([j_lo, j_hi])
    degenerate = (left < 0) | (right < 0)

    xd0, xd1 = p[d_nodes[:, 0]], p[d_nodes[:, 1]]
    xv0, xv1 = dual.vertices[j_lo], dual.vertices[j_hi]
    dD = xd1 - xd0
    dV = xv1 - xv0
    len_D = np.hypot(dD[:, 0], dD[:, 1])
    len_V = np.hypot(dV[:, 0], dV[:, 1])
    eps = LENGTH_EPS * mesh.scale
    short = np.flatnonzero(len_V < eps)
    if len(short):
        raise ZeroLengthDiagonal(
            f"{len(short)} Voronoi diagonals shorter than {eps:.3g}, first at cell {short[0]} "
            "(a right triangle slipped past validation?)"
        )
    e_D = dD / len_D[:, None]
    e_V = dV / len_V[:, None]
    rot = np.column_stack([-e_D[:, 1], e_D[:, 0]])
    along = np.einsum("ij,ij->i", e_V, rot)
    if np.any(along <= 0):
        m = int(np.flatnonzero(along <= 0)[0])
        raise ZeroLengthDiagonal(f"Voronoi diagonal of cell {m} is reversed (circumcenters out of order)")
    cosine = np.abs(np.einsum("ij,ij->i", e_D, e_V))
    if cosine.max() > ORTHO_TOL:
        raise NonOrthogonal(float(cosine.max()))
    theta = np.arctan2(e_D[:, 1], e_D[:, 0])

    # intersection of the carrier lines: xd0 + t dD = xv0 + s dV
    w = xv0 - xd0
    den = dD[:, 0] * dV[:, 1] - dD[:, 1] * dV[:, 0]
    t = (w[:, 0] * dV[:, 1] - w[:, 1] * dV[:, 0]) / den
    center = xd0 + t[:, None] * dD

    S_star = 0.5 * len_D * len_V

    S_D = np.array([geometry.polygon_area(c) for c in dual.cells])
    tri = mesh.triangles
    a, b, c = p[tri[:, 0]], p[tri[:, 1]], p[tri[:, 2]]
    tri_area = 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    S_V = np.zeros(dual.num_vertices)
    S_V[:T] = tri_area

    delta_D, delta_V = _orientation_signs(p, tri, d_nodes, v_nodes, e_D, e_V, T)
    return MvdMesh(
        mesh=mesh, dual=dual, center=center, d_nodes=d_nodes, v_nodes=v_nodes,
        e_D=e_D, e_V=e_V, theta=theta, len_D=len_D, len_V=len_V, S_star=S_star,
        is_boundary_degenerate=degenerate, S_D=S_D, S_V=S_V,
        delta_D=delta_D, delta_V=delta_V,
    )


def _orientation_signs(p, tri, d_nodes, v_nodes, e_D, e_V, T):
    """Signs ``e . n`` with ``n`` the outward normal of each endpoint's control volume.

    The Voronoi cell of a D-node is left through the face crossed by the
    Delaunay edge, in the direction of the other D-node.  The triangle of an
    interior V-node is left through the Delaunay edge, away from its centroid.
    """
    M = len(d_nodes)
    delta_D = np.empty((M, 2))
    for k in range(2):
        n = p[d_nodes[:, 1 - k]] - p[d_nodes[:, k]]
        delta_D[:, k] = np.sign(np.einsum("ij,ij->i", e_D, n))
    centroid = p[tri].mean(axis=1)
    mid = 0.5 * (p[d_nodes[:, 0]] + p[d_nodes[:, 1]])
    normal = np.column_stack([e_D[:, 1], -e_D[:, 0]])
    delta_V = np.zeros((M, 2))
    for k in range(2):
        j = v_nodes[:, k]
        inner = j < T
        away = mid[inner] - centroid[j[inner]]
        n = normal[inner] * np.sign(np.einsum("ij,ij->i", away, normal[inner]))[:, None]
        delta_V[inner, k] = np.sign(np.einsum("ij,ij->i", e_V[inner], n))
    return delta_D, delta_V


def build(mesh, allow_nonacute=False):
    """Convenience wrapper: ``build_mvd(mesh, build_voronoi(mesh))``."""
    return build_mvd(mesh, build_voronoi(mesh, allow_nonacute=allow_nonacute))


def dump_cells(mvd):
    """Plain-text listing of all cells, one per line, for fixture diffing."""
    lines = ["# m i i+ j j+ cx cy len_D len_V S_star degenerate"]
    for m in range(mvd.num_cells):
        i, ip = mvd.d_nodes[m]
        j, jp = mvd.v_nodes[m]
        cx, cy = mvd.center[m]
        lines.append(
            f"{m} {i} {ip} {j} {jp} {cx:.12g} {cy:.12g} {mvd.len_D[m]:.12g} "
            f"{mvd.len_V[m]:.12g} {mvd.S_star[m]:.12g} {int(mvd.is_boundary_degenerate[m])}"
        )
    lines.append(f"# sum S_D {mvd.S_D.sum():.15g} sum S_V {mvd.S_V.sum():.15g} "
                 f"sum S_star {mvd.S_star.sum():.15g}")
    return "\n".join(lines) + "\n"


def tiling_errors(mvd):
    """Relative deviation of the three measure sums from the domain area."""
    area = mvd.mesh.domain_area()
    return tuple(abs(s - area) / area for s in (mvd.S_D.sum(), mvd.S_V.sum(), mvd.S_star.sum()))


def count_identities(mvd):
    """``(M_V == T + B, M == (3T + B) / 2)`` for the mesh behind ``mvd``."""
    T = mvd.mesh.num_triangles
    B = len(mvd.mesh.boundary_edges)
    return mvd.M_V == T + B, 2 * mvd.M == 3 * T + B


__all__ = [
    "VoronoiDual", "MvdCell", "MvdMesh", "build_voronoi", "build_mvd", "build",
    "dump_cells", "tiling_errors", "count_identities",
]
