"""Regenerate the MSH fixtures in ``fixtures/``.

mesh01 is a hand-laid 16-node mesh of the unit-by-0.75 rectangle whose
interior points are tuned so the extreme angles are 42.7 and 81.2 degrees.
The finer levels come from :func:`mvdfv.meshio.generate_rectangle_mesh`
with a small seeded jitter, with the spacing chosen to land near the
target node counts below.

    python scripts/make_fixtures.py
"""
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from mvdfv import geometry
from mvdfv.delaunay import delaunay
from mvdfv.errors import AcutenessNotAchieved
from mvdfv.meshio import (
    _lattice_shape,
    _rectangle_points,
    format_msh,
    generate_rectangle_mesh,
    make_mesh,
    parse_msh,
    validate_acute,
)

OUT = Path(__file__).resolve().parent.parent / "fixtures"
W, H = 1.0, 0.75
TARGET_COUNTS = [36, 129, 427, 1266, 4432]
JITTER = 0.03


def _coarse_points(z):
    b = [(0, 0), (z[0], 0), (z[1], 0), (W, 0), (W, z[5]), (W, H),
         (z[3], H), (z[2], H), (0, H), (0, z[4])]
    return np.vstack([b, z[6:].reshape(6, 2)])


def _coarse_angles(z):
    p = _coarse_points(z)
    inner = p[10:]
    if np.any(inner <= 0.01) or np.any(inner[:, 0] >= W - 0.01) or np.any(inner[:, 1] >= H - 0.01):
        return None
    try:
        t = delaunay(p)
    except Exception:
        return None
    if len(t) != 20:
        return None
    a = geometry.triangle_angles_array(p, t)
    return a.min(), a.max()


def coarse_mesh(min_angle=42.7, max_angle=81.2):
    def objective(z):
        s = _coarse_angles(z)
        if s is None:
            return 1e6
        return (s[0] - min_angle) ** 2 + (s[1] - max_angle) ** 2

    z0 = np.array([1 / 3, 2 / 3, 1 / 3, 2 / 3, 0.375, 0.375,
                   0.2, 0.22, 0.5, 0.2, 0.8, 0.22, 0.2, 0.53, 0.5, 0.55, 0.8, 0.53])
    rng = np.random.default_rng(0)
    best = None
    for trial in range(40):
        z = z0 + rng.normal(0, 0.03, z0.shape) if trial else z0
        res = minimize(objective, z, method="Nelder-Mead",
                       options=dict(maxiter=20000, xatol=1e-9, fatol=1e-12))
        if best is None or res.fun < best.fun:
            best = res
        if best.fun < 1e-6:
            break
    p = np.round(_coarse_points(best.x), 6)
    t = delaunay(p)
    return make_mesh(p, t, np.arange(10), [(0, 0), (W, 0), (W, H), (0, H)]).check()


def level_mesh(target):
    """Generated mesh whose node count is closest to ``target``."""
    best = None
    for h in np.geomspace(0.5, 0.005, 400):
        if h >= H:
            continue
        try:
            _lattice_shape(W, H, h)
        except ValueError:
            continue
        b, i = _rectangle_points(0.0, 0.0, W, H, h)
        n = len(b) + len(i)
        if best is None or abs(n - target) < abs(best[1] - target):
            best = (h, n)
    h = best[0]
    for seed in range(50):
        try:
            return generate_rectangle_mesh(((0, 0), (W, H)), h, max_smoothing_iters=0,
                                           jitter=JITTER, seed=seed)
        except AcutenessNotAchieved:
            continue
    raise RuntimeError(f"no acute jittered mesh near {target} nodes")


def main():
    OUT.mkdir(exist_ok=True)
    meshes = [coarse_mesh()] + [level_mesh(n) for n in TARGET_COUNTS]
    for k, mesh in enumerate(meshes, start=1):
        text = format_msh(mesh)
        back = parse_msh(text)
        assert back.num_nodes == mesh.num_nodes
        path = OUT / f"mesh{k:02d}.msh"
        path.write_text(text)
        q = validate_acute(back)
        print(f"{path.name}: M_D={back.num_nodes} T={back.num_triangles} "
              f"angles {q.min_angle:.2f}/{q.max_angle:.2f}")


if __name__ == "__main__":
    main()
