"""Triangular meshes: MSH 2.2 reader, quality checks and an acute mesh generator."""
from dataclasses import dataclass, field
from functools import cached_property
import logging
import math

import numpy as np

from . import geometry
from .delaunay import delaunay
from .errors import (
    AcutenessNotAchieved,
    InvalidMesh,
    MalformedSection,
    NonPlanarNode,
    NoTriangles,
    UnsupportedVersion,
)

log = logging.getLogger(__name__)

ANGLE_TOL = 0.5
HULL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Delaunay triangulation of a convex polygonal domain.

    ``nodes`` is ``(M_D, 2)``, ``triangles`` is ``(T, 3)`` with counterclockwise
    rows, ``boundary_nodes`` a sorted index array and ``domain`` the CCW
    vertex list of the convex domain polygon.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_nodes: np.ndarray
    domain: np.ndarray = field(repr=False)

    @property
    def num_nodes(self):
        return len(self.nodes)

    @property
    def num_triangles(self):
        return len(self.triangles)

    @cached_property
    def scale(self):
        """Bounding-box diagonal; the reference length for all tolerances."""
        span = self.nodes.max(axis=0) - self.nodes.min(axis=0)
        return float(math.hypot(*span))

    @cached_property
    def is_boundary(self):
        mask = np.zeros(self.num_nodes, dtype=bool)
        mask[self.boundary_nodes] = True
        return mask

    @cached_property
    def edges(self):
        """Unique edges ``(E, 2)`` with ``i < j``, plus left/right triangle ids.

        Returns ``(edges, left, right)``; ``left[e]`` is the triangle on the
        left of the directed edge ``i -> j`` (or -1), likewise ``right``.
        """
        t = self.triangles
        n = self.num_nodes
        tail = t.reshape(-1)
        head = np.roll(t, -1, axis=1).reshape(-1)
        owner = np.repeat(np.arange(len(t)), 3)
        lo = np.minimum(tail, head)
        hi = np.maximum(tail, head)
        key = lo.astype(np.int64) * n + hi
        uniq, inv = np.unique(key, return_inverse=True)
        edges = np.column_stack([uniq // n, uniq % n])
        left = np.full(len(uniq), -1, dtype=np.int64)
        right = np.full(len(uniq), -1, dtype=np.int64)
        forward = tail < head
        # a CCW triangle lies to the left of each of its directed edges
        left[inv[forward]] = owner[forward]
        right[inv[~forward]] = owner[~forward]
        if np.bincount(inv, minlength=len(uniq)).max() > 2:
            raise InvalidMesh("an edge is shared by more than two triangles")
        return edges, left, right

    @property
    def num_edges(self):
        return len(self.edges[0])

    @cached_property
    def boundary_edges(self):
        """Indices into :attr:`edges` of edges with a single adjacent triangle."""
        _, left, right = self.edges
        return np.flatnonzero((left < 0) | (right < 0))

    def domain_area(self):
        return geometry.polygon_area(self.domain)

    def check(self):
        """Raise :class:`InvalidMesh` unless the mesh invariants hold."""
        t = self.triangles
        if t.min() < 0 or t.max() >= self.num_nodes:
            raise InvalidMesh("triangle refers to a missing node")
        p = self.nodes
        a, b, c = p[t[:, 0]], p[t[:, 1]], p[t[:, 2]]
        area = 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                      - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
        if np.any(area <= 0):
            raise InvalidMesh("triangle with non-positive area")
        dom = self.domain_area()
        if abs(area.sum() - dom) > 1e-10 * dom:
            raise InvalidMesh(
                f"triangles cover area {area.sum():.12g}, domain has {dom:.12g}"
            )
        self.edges  # raises on non-manifold edges
        eps = 1e-10 * self.scale
        dom_pts = self.domain
        for i in self.boundary_nodes:
            d = min(
                geometry.point_segment_distance(p[i], dom_pts[k], dom_pts[(k + 1) % len(dom_pts)])
                for k in range(len(dom_pts))
            )
            if d > eps:
                raise InvalidMesh(f"boundary node {i} is off the domain boundary by {d:.3g}")
        edges, _, _ = self.edges
        topo = np.unique(edges[self.boundary_edges])
        missing = np.setdiff1d(topo, self.boundary_nodes)
        if len(missing):
            raise InvalidMesh(f"hull nodes not marked as boundary: {missing.tolist()}")
        return self


def make_mesh(nodes, triangles, boundary_nodes=None, domain=None):
    """Build a :class:`TriMesh`, orienting triangles CCW and filling defaults.

    Without ``boundary_nodes`` the nodes of edges with one incident triangle
    are used; without ``domain`` the convex hull of the boundary nodes.
    """
    nodes = np.ascontiguousarray(nodes, dtype=float)
    tri = np.array(triangles, dtype=np.int64).reshape(-1, 3)
    p = nodes
    a, b, c = p[tri[:, 0]], p[tri[:, 1]], p[tri[:, 2]]
    cw = ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])) < 0
    tri[cw] = tri[cw][:, [0, 2, 1]]
    if boundary_nodes is None:
        tmp = TriMesh(nodes, tri, np.zeros(0, dtype=np.int64), np.zeros((0, 2)))
        edges, _, _ = tmp.edges
        boundary_nodes = np.unique(edges[tmp.boundary_edges])
    boundary_nodes = np.unique(np.asarray(boundary_nodes, dtype=np.int64))
    if domain is None:
        domain = geometry.convex_hull(nodes[boundary_nodes], tol=HULL_TOL)
    domain = np.asarray(domain, dtype=float)
    return TriMesh(nodes, tri, boundary_nodes, domain)


# ---------------------------------------------------------------------------
# MSH 2.2 reader

_NODES_PER_TYPE = {1: 2, 2: 3, 15: 1}


class _Lines:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, what):
        while self.pos < len(self.lines):
            line = self.lines[self.pos].strip()
            self.pos += 1
            if line:
                return line
        raise MalformedSection(f"unexpected end of file while reading {what}", self.pos + 1)

    @property
    def lineno(self):
        return self.pos


def _ints(line, lines, what):
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise MalformedSection(f"expected integers in {what}: {line!r}", lines.lineno) from None


def parse_msh(text):
    """Parse gmsh MSH 2.2 ASCII text into a :class:`TriMesh`.

    Line elements (type 1) mark the boundary and triangles (type 2) form the
    mesh; point elements are ignored and any other type is rejected.  All
    errors derive from :class:`~mvdfv.errors.MeshFormatError` and carry the
    offending line number.
    """
    lines = _Lines(text)
    node_xy = None
    node_index = {}
    tris = []
    bnd = []
    seen_format = False
    while True:
        try:
            head = lines.next("section header")
        except MalformedSection:
            break
        if not head.startswith("$"):
            raise MalformedSection(f"expected a section header, got {head!r}", lines.lineno)
        name = head[1:]
        if name == "MeshFormat":
            fmt = lines.next("$MeshFormat").split()
            if len(fmt) != 3:
                raise MalformedSection("bad $MeshFormat record", lines.lineno)
            if fmt[0] not in ("2.2", "2.2.0") or fmt[1] != "0":
                raise UnsupportedVersion(
                    f"only MSH 2.2 ASCII is supported, got version {fmt[0]} type {fmt[1]}",
                    lines.lineno,
                )
            seen_format = True
        elif not seen_format:
            raise UnsupportedVersion("missing $MeshFormat header", lines.lineno)
        elif name == "Nodes":
            count = _ints(lines.next("$Nodes count"), lines, "$Nodes count")
            if len(count) != 1 or count[0] < 0:
                raise MalformedSection("bad $Nodes count", lines.lineno)
            node_xy = np.empty((count[0], 2))
            for k in range(count[0]):
                rec = lines.next("$Nodes").split()
                if len(rec) != 4 or rec[0].startswith("$"):
                    raise MalformedSection(f"bad node record {' '.join(rec)!r}", lines.lineno)
                try:
                    tag = int(rec[0])
                    x, y, z = (float(v) for v in rec[1:])
                except ValueError:
                    raise MalformedSection(f"bad node record {' '.join(rec)!r}", lines.lineno) from None
                if not all(math.isfinite(v) for v in (x, y, z)):
                    raise MalformedSection("non-finite coordinate", lines.lineno)
                if abs(z) > 1e-12:
                    raise NonPlanarNode(f"node {tag} has z = {z}", lines.lineno)
                if tag in node_index:
                    raise MalformedSection(f"duplicate node tag {tag}", lines.lineno)
                node_index[tag] = k
                node_xy[k] = (x, y)
        elif name == "Elements":
            if node_xy is None:
                raise MalformedSection("$Elements before $Nodes", lines.lineno)
            count = _ints(lines.next("$Elements count"), lines, "$Elements count")
            if len(count) != 1 or count[0] < 0:
                raise MalformedSection("bad $Elements count", lines.lineno)
            for _ in range(count[0]):
                line = lines.next("$Elements")
                if line.startswith("$"):
                    raise MalformedSection("fewer elements than declared", lines.lineno)
                rec = _ints(line, lines, "$Elements")
                if len(rec) < 3:
                    raise MalformedSection(f"short element record {line!r}", lines.lineno)
                etype, ntags = rec[1], rec[2]
                if etype not in _NODES_PER_TYPE:
                    raise MalformedSection(f"unsupported element type {etype}", lines.lineno)
                if ntags < 0 or len(rec) != 3 + ntags + _NODES_PER_TYPE[etype]:
                    raise MalformedSection(f"wrong field count in element record {line!r}", lines.lineno)
                try:
                    idx = [node_index[t] for t in rec[3 + ntags:]]
                except KeyError as exc:
                    raise MalformedSection(f"element refers to unknown node {exc.args[0]}", lines.lineno) from None
                if etype == 2:
                    tris.append(idx)
                elif etype == 1:
                    bnd.extend(idx)
        else:
            # skip unknown sections such as $PhysicalNames
            pass
        # every section ends with its matching $End marker
        if name in ("MeshFormat", "Nodes", "Elements"):
            end = lines.next(f"$End{name}")
            if end != f"$End{name}":
                raise MalformedSection(f"expected $End{name}, got {end!r}", lines.lineno)
        else:
            while lines.next(f"$End{name}") != f"$End{name}":
                pass
    if not seen_format:
        raise UnsupportedVersion("missing $MeshFormat header", lines.lineno)
    if node_xy is None:
        raise MalformedSection("missing $Nodes section", lines.lineno)
    if not tris:
        raise NoTriangles("no triangle elements", lines.lineno)
    try:
        mesh = make_mesh(node_xy, tris, boundary_nodes=bnd if bnd else None)
        return mesh.check()
    except InvalidMesh as exc:
        raise MalformedSection(f"inconsistent mesh: {exc}", lines.lineno) from None


def load_msh(path):
    with open(path, encoding="ascii") as fh:
        return parse_msh(fh.read())


def format_msh(mesh):
    """Serialise ``mesh`` as MSH 2.2 ASCII (used to produce test fixtures)."""
    out = ["$MeshFormat", "2.2 0 8", "$EndMeshFormat", "$Nodes", str(mesh.num_nodes)]
    for k, (x, y) in enumerate(mesh.nodes):
        out.append(f"{k + 1} {float(x)!r} {float(y)!r} 0")
    out.append("$EndNodes")
    edges, _, _ = mesh.edges
    bedges = edges[mesh.boundary_edges]
    out.append("$Elements")
    out.append(str(len(bedges) + mesh.num_triangles))
    tag = 1
    for i, j in bedges:
        out.append(f"{tag} 1 2 1 1 {i + 1} {j + 1}")
        tag += 1
    for a, b, c in mesh.triangles:
        out.append(f"{tag} 2 2 2 1 {a + 1} {b + 1} {c + 1}")
        tag += 1
    out.append("$EndElements")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# quality


@dataclass(frozen=True)
class QualityReport:
    min_angle: float
    max_angle: float
    num_obtuse_or_right: int
    is_acute: bool

    def __str__(self):
        return (
            f"min angle {self.min_angle:.2f}, max angle {self.max_angle:.2f}, "
            f"non-acute triangles {self.num_obtuse_or_right}"
        )


def validate_acute(mesh, angle_tol=ANGLE_TOL):
    """Angle statistics; a triangle counts as non-acute once an angle reaches ``90 - angle_tol``."""
    ang = geometry.triangle_angles_array(mesh.nodes, mesh.triangles)
    limit = 90.0 - angle_tol
    bad = int(np.count_nonzero(ang.max(axis=1) >= limit))
    return QualityReport(float(ang.min()), float(ang.max()), bad, bad == 0)


# ---------------------------------------------------------------------------
# fixtures and generation


def equitri(k):
    """Equilateral triangle with unit side split by ``k`` rounds of midpoint subdivision."""
    n = 2 ** k
    index = {}
    nodes = []
    h = math.sqrt(3.0) / 2.0
    for r in range(n + 1):
        for c in range(n + 1 - r):
            index[r, c] = len(nodes)
            nodes.append(((c + 0.5 * r) / n, r * h / n))
    tris = []
    for r in range(n):
        for c in range(n - r):
            tris.append((index[r, c], index[r, c + 1], index[r + 1, c]))
            if c < n - r - 1:
                tris.append((index[r, c + 1], index[r + 1, c + 1], index[r + 1, c]))
    domain = [(0.0, 0.0), (1.0, 0.0), (0.5, h)]
    return make_mesh(nodes, tris, domain=domain).check()


RATIO_RANGE = (0.75, 0.95)


def _lattice_shape(w, hgt, h):
    """Columns and (even) rows of the lattice whose density best matches spacing ``h``.

    The row/column spacing ratio is kept inside ``RATIO_RANGE``; outside it
    the wall and corner triangles of the layout stop being acute.
    """
    best = None
    c0 = max(4, round(w / h))
    for cols in range(max(4, c0 - 3), c0 + 4):
        dx = w / cols
        for rows in range(4, 2 * round(hgt / dx) + 6, 2):
            ratio = (hgt / rows) / dx
            if not RATIO_RANGE[0] <= ratio <= RATIO_RANGE[1]:
                continue
            # match the node density of a regular hex lattice, then its shape
            cost = (abs(math.log(dx * dx * ratio / (h * h * math.sqrt(3.0) / 2.0)))
                    + 0.1 * abs(math.log(ratio / (math.sqrt(3.0) / 2.0))))
            if best is None or cost < best[0]:
                best = (cost, cols, rows)
    if best is None:
        raise ValueError(f"no acute lattice fits a {w} x {hgt} rectangle at h={h}")
    return best[1], best[2]


CORNER_OFFSET = (0.7, 0.65)


def _rectangle_points(x0, y0, w, hgt, h):
    """Boundary points and an offset hexagonal interior lattice.

    Rows alternate between full-step and half-step offsets.  On the vertical
    sides the half-step point of each odd row is replaced by a wall point,
    and every corner gets one extra point so no right angle sits there.
    """
    cols, rows = _lattice_shape(w, hgt, h)
    dx, dy = w / cols, hgt / rows
    bnd = []
    for c in range(cols + 1):
        bnd.append((x0 + c * dx, y0))
    for r in range(1, rows, 2):
        bnd.append((x0 + w, y0 + r * dy))
    for c in range(cols, -1, -1):
        bnd.append((x0 + c * dx, y0 + hgt))
    for r in range(rows - 1, 0, -2):
        bnd.append((x0, y0 + r * dy))
    inner = []
    for r in range(1, rows):
        y = y0 + r * dy
        if r % 2 == 0:
            inner.extend((x0 + c * dx, y) for c in range(1, cols))
        else:
            inner.extend((x0 + (c + 0.5) * dx, y) for c in range(1, cols - 1))
    a, b = CORNER_OFFSET
    for cx, sx in ((x0, 1), (x0 + w, -1)):
        for cy, sy in ((y0, 1), (y0 + hgt, -1)):
            inner.append((cx + sx * a * dx, cy + sy * b * dy))
    return np.array(bnd), np.array(inner).reshape(-1, 2)


def voronoi_cells(points, triangles, domain):
    """Voronoi cell of every point intersected with the convex ``domain``.

    Each cell is the domain polygon clipped by the bisector half-planes of
    the point's Delaunay neighbours, so it is exact even for obtuse meshes.
    """
    n = len(points)
    nbrs = [set() for _ in range(n)]
    for a, b, c in triangles:
        nbrs[a].update((b, c))
        nbrs[b].update((a, c))
        nbrs[c].update((a, b))
    dom = [tuple(v) for v in domain]
    cells = []
    for i in range(n):
        poly = dom
        pi = points[i]
        for j in sorted(nbrs[i]):
            pj = points[j]
            mid = (0.5 * (pi[0] + pj[0]), 0.5 * (pi[1] + pj[1]))
            poly = geometry.clip_halfplane(poly, mid, (pj[0] - pi[0], pj[1] - pi[1]))
        cells.append(poly)
    return cells


def generate_rectangle_mesh(domain=((0.0, 0.0), (1.0, 0.75)), target_h=0.1,
                            max_smoothing_iters=50, angle_tol=ANGLE_TOL,
                            jitter=0.0, seed=0):
    """Acute Delaunay mesh of an axis-aligned rectangle ``((x0, y0), (x1, y1))``.

    Boundary points stay fixed.  ``jitter`` displaces interior points by up
    to that fraction of the spacing (seeded, so output is reproducible).
    While the triangulation is not acute, the interior vertices of the
    offending triangles are moved halfway to the centroids of their clipped
    Voronoi cells (a local, relaxed Lloyd step) and the set is
    re-triangulated.
    """
    (x0, y0), (x1, y1) = domain
    w, hgt = x1 - x0, y1 - y0
    if not target_h > 0 or target_h >= min(w, hgt):
        raise ValueError(f"target_h must be in (0, {min(w, hgt)}), got {target_h}")
    bnd, inner = _rectangle_points(x0, y0, w, hgt, target_h)
    if jitter:
        rng = np.random.default_rng(seed)
        inner = inner + jitter * target_h * rng.uniform(-1.0, 1.0, inner.shape)
    poly = np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    nb = len(bnd)
    pts = np.vstack([bnd, inner])
    tris = delaunay(pts)
    report = validate_acute(make_mesh(pts, tris, np.arange(nb), poly), angle_tol)
    it = 0
    while not report.is_acute and it < max_smoothing_iters:
        # Lloyd steps on the interior vertices of offending triangles only,
        # relaxed by one half; a global sweep pulls near-wall points onto
        # the fixed boundary and creates new obtuse angles there.
        bad = geometry.triangle_angles_array(pts, tris).max(axis=1) >= 90.0 - angle_tol
        move = np.unique(tris[bad])
        move = move[move >= nb]
        if len(move) == 0:
            break
        cells = voronoi_cells(pts, tris, poly)
        for k in move:
            pts[k] = 0.5 * pts[k] + 0.5 * geometry.polygon_centroid(cells[k])
        tris = delaunay(pts)
        report = validate_acute(make_mesh(pts, tris, np.arange(nb), poly), angle_tol)
        it += 1
    log.debug("rectangle mesh h=%g: %d nodes after %d Lloyd steps, %s", target_h, len(pts), it, report)
    if not report.is_acute:
        raise AcutenessNotAchieved(report)
    return make_mesh(pts, tris, np.arange(nb), poly).check()
