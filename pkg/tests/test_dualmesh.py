import math
import warnings

import numpy as np
import pytest

from conftest import equitri_mvd, fixture_mvd
from mvdfv import geometry
from mvdfv.dualmesh import build, build_mvd, build_voronoi, count_identities, dump_cells, tiling_errors
from mvdfv.errors import NonAcuteMesh, ZeroLengthDiagonal
from mvdfv.meshio import generate_rectangle_mesh, make_mesh


def test_equitri1():
    mvd = equitri_mvd(1)
    assert mvd.M_V == 10
    assert mvd.dual.num_interior == 4
    # circumcenters of equilateral triangles are their centroids
    tri = mvd.mesh.triangles
    assert np.allclose(mvd.dual.vertices[:4], mvd.mesh.nodes[tri].mean(axis=1))
    assert mvd.M == 9
    assert mvd.S_star.sum() == pytest.approx(math.sqrt(3) / 4, rel=1e-12)


def test_mesh01_counts():
    mvd = fixture_mvd("mesh01.msh")
    assert (mvd.M_D, mvd.M_V, mvd.M) == (16, 30, 35)
    assert mvd.is_boundary_degenerate.sum() == 10


def test_single_triangle():
    mesh = make_mesh([(0, 0), (1, 0), (0.45, 0.8)], [(0, 1, 2)]).check()
    mvd = build(mesh)
    assert mvd.M_V == 4
    assert mvd.S_D.sum() == pytest.approx(0.4, rel=1e-12)
    assert mvd.S_star.sum() == pytest.approx(0.4, rel=1e-12)


def test_cell_invariants(mvd):
    assert np.allclose(mvd.S_star, 0.5 * mvd.len_D * mvd.len_V, rtol=1e-12)
    assert np.abs(np.einsum("ij,ij->i", mvd.e_D, mvd.e_V)).max() <= 1e-8
    rot = np.column_stack([-mvd.e_D[:, 1], mvd.e_D[:, 0]])
    assert np.allclose(mvd.e_V, rot, atol=1e-8)
    p = mvd.mesh.nodes
    d = p[mvd.d_nodes[:, 1]] - p[mvd.d_nodes[:, 0]]
    assert np.allclose(mvd.e_D, d / mvd.len_D[:, None])
    assert np.all(mvd.d_nodes[:, 0] < mvd.d_nodes[:, 1])
    # center on both diagonals
    v = mvd.dual.vertices
    for a, b in ((p[mvd.d_nodes[:, 0]], p[mvd.d_nodes[:, 1]]), (v[mvd.v_nodes[:, 0]], v[mvd.v_nodes[:, 1]])):
        ab = b - a
        cross = ab[:, 0] * (mvd.center - a)[:, 1] - ab[:, 1] * (mvd.center - a)[:, 0]
        assert np.abs(cross).max() <= 1e-10 * np.hypot(*ab.T).max() ** 2


def test_degenerate_cells_meet_at_midpoint(mvd):
    deg = mvd.is_boundary_degenerate
    p = mvd.mesh.nodes
    mid = 0.5 * (p[mvd.d_nodes[deg, 0]] + p[mvd.d_nodes[deg, 1]])
    assert np.allclose(mvd.center[deg], mid, atol=1e-12)
    # exactly one endpoint of each degenerate V-diagonal is a boundary midpoint
    is_b = mvd.dual.is_boundary[mvd.v_nodes[deg]]
    assert np.all(is_b.sum(axis=1) == 1)


def test_interior_centers_inside_cells(mvd):
    inner = ~mvd.is_boundary_degenerate
    p = mvd.mesh.nodes
    a, b = p[mvd.d_nodes[inner, 0]], p[mvd.d_nodes[inner, 1]]
    t = np.einsum("ij,ij->i", mvd.center[inner] - a, b - a) / mvd.len_D[inner] ** 2
    assert np.all((t > 0) & (t < 1))


def test_tiling_and_counts(mvd):
    assert max(tiling_errors(mvd)) <= 1e-10
    assert count_identities(mvd) == (True, True)


def test_boundary_vertices_are_midpoints(mvd):
    edges, _, _ = mvd.mesh.edges
    e = edges[mvd.dual.boundary_edge_ids]
    p = mvd.mesh.nodes
    assert np.allclose(mvd.dual.vertices[mvd.dual.boundary_vertices], 0.5 * (p[e[:, 0]] + p[e[:, 1]]),
                       atol=1e-12)


def test_circumcenters_inside_triangles(mvd):
    p = mvd.mesh.nodes
    for (a, b, c), x in zip(mvd.mesh.triangles, mvd.dual.vertices[: mvd.mesh.num_triangles]):
        assert geometry.signed_area(p[a], p[b], x) > 0
        assert geometry.signed_area(p[b], p[c], x) > 0
        assert geometry.signed_area(p[c], p[a], x) > 0


def test_signs_match_outward_normals(mvd):
    assert set(np.unique(mvd.delta_D)) == {-1.0, 1.0}
    assert np.all(mvd.delta_D[:, 0] == 1) and np.all(mvd.delta_D[:, 1] == -1)
    inner = mvd.v_nodes < mvd.mesh.num_triangles
    assert np.all(np.abs(mvd.delta_V[inner]) == 1)
    assert np.all(mvd.delta_V[~inner] == 0)


@pytest.mark.parametrize("h", [0.2, 0.08])
def test_generated_tiling(h):
    mvd = build(generate_rectangle_mesh(target_h=h))
    assert max(tiling_errors(mvd)) <= 1e-10
    assert count_identities(mvd) == (True, True)


def test_nonacute_rejected_and_override():
    # square split by one diagonal: two right triangles
    mesh = make_mesh([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1, 2), (0, 2, 3)]).check()
    with pytest.raises(NonAcuteMesh):
        build_voronoi(mesh)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        dual = build_voronoi(mesh, allow_nonacute=True)
    assert w
    # both circumcenters sit on the shared diagonal
    with pytest.raises(ZeroLengthDiagonal):
        build_mvd(mesh, dual)


@pytest.mark.filterwarnings("ignore:building the dual")
def test_obtuse_override_warns_about_circumcenter():
    pts = [(0, 0), (1, 0), (0.5, 0.2), (0.5, 1)]
    mesh = make_mesh(pts, [(0, 1, 2), (0, 2, 3), (2, 1, 3)]).check()
    with pytest.warns(UserWarning, match="outside"):
        build_voronoi(mesh, allow_nonacute=True)


def test_dump_cells_lists_every_cell():
    mvd = equitri_mvd(2)
    text = dump_cells(mvd)
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert len(lines) == mvd.M
    assert text == dump_cells(mvd)


def test_cell_view():
    mvd = equitri_mvd(1)
    c = mvd.cell(0)
    assert c.len_D == mvd.len_D[0]
    assert c.frame.theta == mvd.theta[0]
    assert len(mvd.cells()) == 9
