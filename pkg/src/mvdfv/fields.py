"""Scalar fields on D- and V-nodes, vector fields on MVD cells, and their inner products."""
from dataclasses import dataclass

import numpy as np

from .errors import MeshMismatch


@dataclass(eq=False)
class ScalarField:
    """Values at every D-node (``values_D``) and every V-node (``values_V``).

    With ``dirichlet_zero`` set, boundary values are forced to zero and
    :func:`inner_D` sums over interior D-nodes only.
    """

    values_D: np.ndarray
    values_V: np.ndarray
    mvd: object
    dirichlet_zero: bool = False

    def __post_init__(self):
        self.values_D = np.asarray(self.values_D, dtype=float)
        self.values_V = np.asarray(self.values_V, dtype=float)
        if self.values_D.shape != (self.mvd.M_D,) or self.values_V.shape != (self.mvd.M_V,):
            raise MeshMismatch(
                f"scalar field of sizes {self.values_D.shape}, {self.values_V.shape} "
                f"does not fit a mesh with M_D={self.mvd.M_D}, M_V={self.mvd.M_V}"
            )
        if self.dirichlet_zero:
            self.values_D = self.values_D.copy()
            self.values_V = self.values_V.copy()
            self.values_D[self.mvd.mesh.boundary_nodes] = 0.0
            self.values_V[self.mvd.dual.boundary_vertices] = 0.0

    @classmethod
    def zeros(cls, mvd, dirichlet_zero=False):
        return cls(np.zeros(mvd.M_D), np.zeros(mvd.M_V), mvd, dirichlet_zero)

    def __sub__(self, other):
        _same_mesh(self, other)
        return ScalarField(self.values_D - other.values_D, self.values_V - other.values_V,
                           self.mvd, self.dirichlet_zero and other.dirichlet_zero)


@dataclass(eq=False)
class VectorField:
    """Local components ``comp_D`` (along ``e_D``) and ``comp_V`` per MVD cell."""

    comp_D: np.ndarray
    comp_V: np.ndarray
    mvd: object

    def __post_init__(self):
        self.comp_D = np.asarray(self.comp_D, dtype=float)
        self.comp_V = np.asarray(self.comp_V, dtype=float)
        if self.comp_D.shape != (self.mvd.M,) or self.comp_V.shape != (self.mvd.M,):
            raise MeshMismatch(f"vector field does not fit a mesh with M={self.mvd.M}")

    @classmethod
    def zeros(cls, mvd):
        return cls(np.zeros(mvd.M), np.zeros(mvd.M), mvd)

    def only_D(self):
        return VectorField(self.comp_D, np.zeros_like(self.comp_V), self.mvd)

    def only_V(self):
        return VectorField(np.zeros_like(self.comp_D), self.comp_V, self.mvd)

    def __sub__(self, other):
        _same_mesh(self, other)
        return VectorField(self.comp_D - other.comp_D, self.comp_V - other.comp_V, self.mvd)

    def cartesian(self):
        """Cartesian components ``(M, 2)``."""
        return self.comp_D[:, None] * self.mvd.e_D + self.comp_V[:, None] * self.mvd.e_V


def _same_mesh(a, b):
    if a.mvd is not b.mvd:
        raise MeshMismatch("fields live on different meshes")


def inner_D(y, v):
    _same_mesh(y, v)
    S = y.mvd.S_D
    if y.dirichlet_zero or v.dirichlet_zero:
        idx = y.mvd.interior_D
        return float(np.dot(y.values_D[idx] * v.values_D[idx], S[idx]))
    return float(np.dot(y.values_D * v.values_D, S))


def inner_V(y, v):
    _same_mesh(y, v)
    idx = y.mvd.interior_V
    return float(np.dot(y.values_V[idx] * v.values_V[idx], y.mvd.S_V[idx]))


def inner_star(v, w):
    _same_mesh(v, w)
    return float(np.dot(v.comp_D * w.comp_D + v.comp_V * w.comp_V, v.mvd.S_star))


def norm_D(y):
    return inner_D(y, y) ** 0.5


def norm_V(y):
    return inner_V(y, y) ** 0.5


def norm_star(v):
    return inner_star(v, v) ** 0.5


def _evaluate(f, pts):
    """Evaluate ``f`` at each row of ``pts``; vectorised callables get the whole array."""
    try:
        out = np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float)
        if out.shape == (len(pts),):
            return out
        if out.shape == ():
            return np.full(len(pts), float(out))
    except (TypeError, ValueError):
        pass
    return np.array([float(f(x, y)) for x, y in pts])


def sample_scalar(f, mvd, dirichlet_zero=False):
    """Sample ``f(x1, x2)`` at all D- and V-nodes."""
    return ScalarField(_evaluate(f, mvd.mesh.nodes), _evaluate(f, mvd.dual.vertices),
                       mvd, dirichlet_zero)


def sample_vector(w, mvd):
    """Project the Cartesian field ``w(x1, x2) -> (w1, w2)`` onto each cell frame at its center."""
    c = mvd.center
    try:
        w1, w2 = w(c[:, 0], c[:, 1])
        vec = np.column_stack([np.broadcast_to(np.asarray(w1, dtype=float), len(c)),
                               np.broadcast_to(np.asarray(w2, dtype=float), len(c))])
    except (TypeError, ValueError):
        vec = np.array([w(x, y) for x, y in c], dtype=float)
    return VectorField(np.einsum("ij,ij->i", vec, mvd.e_D), np.einsum("ij,ij->i", vec, mvd.e_V), mvd)
