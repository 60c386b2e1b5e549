import numpy as np
import pytest

from conftest import FIXTURE_FILES, fixture_mesh
from mvdfv.errors import (AcutenessNotAchieved, InvalidMesh, MalformedSection, MeshFormatError,
                          NonPlanarNode, NoTriangles, UnsupportedVersion)
from mvdfv.meshio import (equitri, format_msh, generate_rectangle_mesh, load_msh, make_mesh,
                          parse_msh, validate_acute)

MINIMAL = """$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
3
1 0 0 0
2 1 0 0
3 0.4 0.8 0
$EndNodes
$Elements
4
1 1 2 0 1 1 2
2 1 2 0 1 2 3
3 1 2 0 1 3 1
4 2 2 0 1 1 2 3
$EndElements
"""


def test_minimal_file():
    mesh = parse_msh(MINIMAL)
    assert mesh.num_nodes == 3
    assert mesh.num_triangles == 1
    assert sorted(mesh.boundary_nodes) == [0, 1, 2]
    assert mesh.domain_area() == pytest.approx(0.4)


def test_mesh01_counts():
    mesh = fixture_mesh("mesh01.msh")
    assert mesh.num_nodes == 16
    assert mesh.num_triangles == 20
    assert len(mesh.boundary_nodes) == 10
    q = validate_acute(mesh)
    assert round(q.min_angle, 1) == 42.7
    assert round(q.max_angle, 1) == 81.2


@pytest.mark.parametrize("path", FIXTURE_FILES, ids=lambda p: p.name)
def test_fixtures_parse_and_are_acute(path):
    mesh = load_msh(path)
    mesh.check()
    assert validate_acute(mesh).is_acute
    B = len(mesh.boundary_nodes)
    assert mesh.num_triangles == 2 * mesh.num_nodes - 2 - B
    assert mesh.domain_area() == pytest.approx(0.75, rel=1e-12)


@pytest.mark.parametrize("path", FIXTURE_FILES, ids=lambda p: p.name)
def test_format_round_trip(path):
    mesh = load_msh(path)
    back = parse_msh(format_msh(mesh))
    assert np.array_equal(back.nodes, mesh.nodes)
    assert np.array_equal(back.triangles, mesh.triangles)
    assert np.array_equal(np.sort(back.boundary_nodes), np.sort(mesh.boundary_nodes))


def test_boundary_from_topology_without_line_elements():
    text = "\n".join(l for l in MINIMAL.splitlines() if " 1 2 0 1 " not in l)
    text = text.replace("$Elements\n4", "$Elements\n1")
    mesh = parse_msh(text)
    assert sorted(mesh.boundary_nodes) == [0, 1, 2]


@pytest.mark.parametrize("text, error", [
    (MINIMAL.replace("2.2 0 8", "4.1 0 8"), UnsupportedVersion),
    (MINIMAL.replace("2.2 0 8", "2.2 1 8"), UnsupportedVersion),
    (MINIMAL.replace("3 0.4 0.8 0", "3 0.4 0.8 0.1"), NonPlanarNode),
    (MINIMAL.replace("3 0.4 0.8 0", "3 0.4 zz 0"), MalformedSection),
    (MINIMAL.replace("4 2 2 0 1 1 2 3", "4 3 2 0 1 1 2 3 3"), MalformedSection),
    (MINIMAL.replace("4 2 2 0 1 1 2 3", "4 2 2 0 1 1 2 9"), MalformedSection),
    (MINIMAL.replace("$Elements\n4", "$Elements\n5"), MalformedSection),
    (MINIMAL.replace("$EndNodes", "$EndNode"), MalformedSection),
    (MINIMAL.replace("4 2 2 0 1 1 2 3\n", "").replace("$Elements\n4", "$Elements\n3"), NoTriangles),
    (MINIMAL[MINIMAL.index("$Nodes"):], UnsupportedVersion),
    ("", UnsupportedVersion),
])
def test_parse_errors(text, error):
    with pytest.raises(error) as exc:
        parse_msh(text)
    assert isinstance(exc.value, MeshFormatError)
    assert exc.value.line is not None
    assert str(exc.value).startswith(f"line {exc.value.line}:")


def test_error_line_number_points_at_record():
    text = MINIMAL.replace("3 0.4 0.8 0", "3 0.4 0.8 0.5")
    with pytest.raises(NonPlanarNode) as exc:
        parse_msh(text)
    assert exc.value.line == 8


def test_unknown_sections_skipped():
    text = MINIMAL.replace("$Nodes", "$PhysicalNames\n1\n2 1 \"dom\"\n$EndPhysicalNames\n$Nodes", 1)
    assert parse_msh(text).num_triangles == 1


def test_validate_acute_examples():
    for k in (1, 2, 3):
        q = validate_acute(equitri(k))
        assert q.min_angle == pytest.approx(60)
        assert q.max_angle == pytest.approx(60)
        assert q.is_acute
    right = make_mesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    q = validate_acute(right)
    assert not q.is_acute
    assert q.num_obtuse_or_right == 1
    # within the tolerance band counts as non-acute
    near = make_mesh([(0, 0), (1, 0), (0.002, 1)], [(0, 1, 2)])
    assert validate_acute(near, angle_tol=0.5).num_obtuse_or_right == 1


def test_equitri_counts():
    assert (equitri(1).num_nodes, equitri(1).num_triangles) == (6, 4)
    assert (equitri(2).num_nodes, equitri(2).num_triangles) == (15, 16)


def test_check_rejects_overlap():
    mesh = make_mesh([(0, 0), (1, 0), (0, 1), (1, 1)], [(0, 1, 2), (0, 1, 3), (1, 3, 2)],
                     boundary_nodes=[0, 1, 2, 3], domain=[(0, 0), (1, 0), (1, 1), (0, 1)])
    with pytest.raises(InvalidMesh):
        mesh.check()


def test_generate_coarse():
    mesh = generate_rectangle_mesh(target_h=0.3)
    q = validate_acute(mesh)
    assert q.is_acute
    assert q.min_angle > 30
    assert mesh.domain_area() == pytest.approx(0.75, rel=1e-10)
    assert mesh.num_triangles == 2 * mesh.num_nodes - 2 - len(mesh.boundary_nodes)


@pytest.mark.parametrize("h", [0.2, 0.1, 0.05])
def test_generate_halving_quadruples_nodes(h):
    coarse = generate_rectangle_mesh(target_h=h)
    fine = generate_rectangle_mesh(target_h=h / 2)
    assert 3 <= fine.num_nodes / coarse.num_nodes <= 5.5
    assert validate_acute(fine).is_acute


def test_generate_deterministic():
    a = generate_rectangle_mesh(target_h=0.07, jitter=0.03, seed=3)
    b = generate_rectangle_mesh(target_h=0.07, jitter=0.03, seed=3)
    assert np.array_equal(a.nodes, b.nodes)
    assert np.array_equal(a.triangles, b.triangles)


@pytest.mark.parametrize("h", [0.0, -1.0, 0.75, 2.0])
def test_generate_bad_h(h):
    with pytest.raises(ValueError):
        generate_rectangle_mesh(target_h=h)


def test_generate_reports_failure():
    with pytest.raises(AcutenessNotAchieved) as exc:
        generate_rectangle_mesh(target_h=0.05, jitter=0.45, seed=1, max_smoothing_iters=0)
    assert not exc.value.report.is_acute
