import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mvdfv import geometry as g
from mvdfv.errors import (DegenerateTriangle, NegativeArea, NonIntersecting, NonOrthogonal,
                          TooFewVertices)
from mvdfv.geometry import Tensor2

coord = st.integers(-10000, 10000).map(lambda k: k / 1000)
K2 = Tensor2.diag(1, 100)


def test_circumcenter_examples():
    assert np.allclose(g.circumcenter((0, 0), (1, 0), (0, 1)), (0.5, 0.5))
    assert np.allclose(g.circumcenter((0, 0), (1, 0), (0.5, math.sqrt(3) / 2)),
                       (0.5, math.sqrt(3) / 6))
    c = g.circumcenter((0, 0), (2, 0), (1, 1))
    assert np.allclose(c, (1, 0))
    for p in [(0, 0), (2, 0), (1, 1)]:
        assert math.dist(c, p) == pytest.approx(1.0)


def test_circumcenter_degenerate():
    with pytest.raises(DegenerateTriangle):
        g.circumcenter((0, 0), (1, 1), (2, 2))


@given(st.tuples(coord, coord), st.tuples(coord, coord), st.tuples(coord, coord))
def test_circumcenter_equidistant(a, b, c):
    scale = g._scale(a, b, c)
    # keep well-shaped triangles so the radius stays bounded
    if scale == 0 or abs(g.signed_area(a, b, c)) < 1e-2 * scale * scale:
        return
    cc = g.circumcenter(a, b, c)
    d = [math.dist(cc, p) for p in (a, b, c)]
    assert max(d) - min(d) <= 1e-10 * max(d)


def test_triangle_angles_examples():
    assert np.allclose(g.triangle_angles((0, 0), (1, 0), (0.5, math.sqrt(3) / 2)), 60)
    assert np.allclose(g.triangle_angles((0, 0), (1, 0), (0, 1)), (90, 45, 45))
    a = sorted(g.triangle_angles((0, 0), (4, 0), (0, 3)), reverse=True)
    assert np.allclose(a, (90, 53.13010235415598, 36.86989764584402))


@given(st.floats(0, 2 * math.pi), st.tuples(coord, coord))
def test_triangle_angles_rigid_motion(phi, shift):
    tri = np.array([(0.0, 0.0), (1.3, 0.2), (0.4, 0.9)])
    R = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    moved = tri @ R.T + shift
    a0 = g.triangle_angles(*tri)
    a1 = g.triangle_angles(*moved)
    assert np.allclose(a0, a1, atol=1e-9)
    assert sum(a1) == pytest.approx(180, abs=1e-9)


def test_polygon_area():
    assert g.polygon_area([(0, 0), (1, 0), (1, 1), (0, 1)]) == pytest.approx(1.0)
    assert g.polygon_area([(0, 0), (1, 0), (0, 1)]) == pytest.approx(0.5)
    assert g.polygon_area([(1, 0), (0, 1), (-1, 0), (0, -1)]) == pytest.approx(2.0)
    with pytest.raises(TooFewVertices):
        g.polygon_area([(0, 0), (1, 0)])
    with pytest.raises(NegativeArea):
        g.polygon_area([(0, 0), (0, 1), (1, 0)])


@given(st.tuples(coord, coord))
def test_polygon_area_translation_and_split(shift):
    hexagon = [(math.cos(t), math.sin(t)) for t in np.linspace(0, 2 * math.pi, 7)[:-1]]
    moved = [(x + shift[0], y + shift[1]) for x, y in hexagon]
    total = g.polygon_area(hexagon)
    assert g.polygon_area(moved) == pytest.approx(total, rel=1e-12)
    # chord from vertex 0 to vertex 3
    left = g.polygon_area(hexagon[:4])
    right = g.polygon_area(hexagon[3:] + hexagon[:1])
    assert left + right == pytest.approx(total, rel=1e-12)


def test_rotate_tensor_examples():
    assert g.rotate_tensor(K2, 0.0) == K2
    assert np.allclose(g.rotate_tensor(K2, math.pi / 2).as_array(), np.diag([100, 1]), atol=1e-12)
    r = g.rotate_tensor(K2, math.pi / 4).as_array()
    assert np.allclose(r, [[50.5, 49.5], [49.5, 50.5]], rtol=0, atol=1e-12)


spd = st.tuples(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(-1, 1)).map(
    lambda t: Tensor2(t[0], t[2] * math.sqrt(t[0] * t[1]) * 0.99,
                      t[2] * math.sqrt(t[0] * t[1]) * 0.99, t[1]))


@given(spd, st.floats(-10, 10))
def test_rotate_tensor_invariants(K, theta):
    R = g.rotate_tensor(K, theta)
    assert R.is_symmetric()
    assert R.trace() == pytest.approx(K.trace(), rel=1e-12)
    assert np.allclose(np.linalg.eigvalsh(R.as_array()), np.linalg.eigvalsh(K.as_array()),
                       rtol=1e-12, atol=1e-12 * abs(K.trace()))
    back = g.rotate_tensor(R, -theta)
    assert np.allclose(back.as_array(), K.as_array(), rtol=0, atol=1e-12 * abs(K.trace()))


def test_local_frame():
    f = g.LocalFrame.from_angle(0.3)
    assert np.dot(f.e_D, f.e_V) == pytest.approx(0, abs=1e-15)
    assert np.allclose(f.e_V, (-math.sin(0.3), math.cos(0.3)))


def test_diagonal_intersection():
    assert np.allclose(g.diagonal_intersection((0, 0), (2, 0), (1, -1), (1, 1)), (1, 0))
    assert np.allclose(g.diagonal_intersection((0, 0), (2, 2), (0, 2), (2, 0)), (1, 1))
    # endpoint touching the other segment
    assert np.allclose(g.diagonal_intersection((0, 0), (2, 0), (1, 0), (1, 1)), (1, 0))
    with pytest.raises(NonOrthogonal) as exc:
        g.diagonal_intersection((0, 0), (2, 0), (0, -1), (1, 1))
    assert exc.value.cosine > 0.1
    with pytest.raises(NonIntersecting):
        g.diagonal_intersection((0, 0), (2, 0), (3, -1), (3, 1))


def test_clip_convex_square_by_triangle():
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    tri = [(0, 0), (2, 0), (0, 2)]
    assert g.polygon_area(g.clip_convex(square, tri)) == pytest.approx(1.0)
    half = [(0, 0), (1, 0), (0, 1)]
    assert g.polygon_area(g.clip_convex(square, half)) == pytest.approx(0.5)


def test_convex_hull_drops_collinear():
    pts = [(0, 0), (0.5, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    assert g.convex_hull(pts) == [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


@settings(max_examples=50)
@given(st.lists(st.tuples(coord, coord), min_size=3, max_size=30))
def test_polygon_centroid_of_hull_inside(points):
    hull = g.convex_hull(points)
    if len(hull) < 3 or g.polygon_area(hull) < 1e-6:
        return
    c = g.polygon_centroid(hull)
    inside = g.clip_convex([c, c + (1e-9, 0), c + (0, 1e-9)], hull)
    assert len(inside) > 0
