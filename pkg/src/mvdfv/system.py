"""Assembly and solution of the coupled D/V diffusion-reaction system.

Row ``i`` of the matrix is the balance equation of control volume ``i``
multiplied by its measure, which makes the matrix symmetric:

    A = sum_m 2 S*_m B_m^T K~_m B_m + diag(S r),    b = S f,

where ``B_m`` maps nodal values to the two diagonal differences of cell
``m`` and ``K~_m`` is the tensor in that cell's frame.  Dividing a row by
its measure gives back ``-div(K grad y) + r y = f`` at that node.
"""
from dataclasses import dataclass
import logging

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import BreakdownNonSpd, MeshMismatch, NegativeReaction, NotConverged
from .fields import ScalarField, _evaluate, inner_D, inner_V, inner_star
from .operators import apply_flux, grad_h, local_tensors

log = logging.getLogger(__name__)


@dataclass(eq=False)
class Problem:
    """Diffusion-reaction data on an MVD mesh.

    ``tensor`` is a :class:`~mvdfv.geometry.Tensor2`, a callable returning one,
    or an ``(M, 2, 2)`` array.  ``reaction`` and ``rhs`` are constants,
    callables ``f(x1, x2)`` or :class:`ScalarField` instances.
    """

    mvd: object
    tensor: object
    reaction: object = 0.0
    rhs: object = 0.0

    def nodal(self, data):
        if isinstance(data, ScalarField):
            if data.mvd is not self.mvd:
                raise MeshMismatch("field lives on a different mesh")
            return data.values_D, data.values_V
        if callable(data):
            return _evaluate(data, self.mvd.mesh.nodes), _evaluate(data, self.mvd.dual.vertices)
        return np.full(self.mvd.M_D, float(data)), np.full(self.mvd.M_V, float(data))

    def reaction_values(self):
        rD, rV = self.nodal(self.reaction)
        if np.any(rD < 0) or np.any(rV < 0):
            raise NegativeReaction("reaction coefficient must be non-negative")
        return rD, rV

    def rhs_values(self):
        return self.nodal(self.rhs)


@dataclass(eq=False)
class LinearSystem:
    """Symmetric system over interior D-nodes followed by interior V-nodes."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    dofs_D: np.ndarray
    dofs_V: np.ndarray
    mvd: object

    @property
    def N(self):
        return self.matrix.shape[0]

    @property
    def n_D(self):
        return len(self.dofs_D)

    def coupling_block(self):
        """The D-rows / V-columns block of the matrix."""
        return self.matrix[: self.n_D, self.n_D:]

    def scatter(self, x):
        """Unknown vector -> :class:`ScalarField` with zero boundary values."""
        yD = np.zeros(self.mvd.M_D)
        yV = np.zeros(self.mvd.M_V)
        yD[self.dofs_D] = x[: self.n_D]
        yV[self.dofs_V] = x[self.n_D:]
        return ScalarField(yD, yV, self.mvd, dirichlet_zero=True)

    def gather(self, y):
        return np.concatenate([y.values_D[self.dofs_D], y.values_V[self.dofs_V]])


def assemble(problem):
    mvd = problem.mvd
    kDD, kDV, kVV = local_tensors(problem.tensor, mvd)
    rD, rV = problem.reaction_values()
    fD, fV = problem.rhs_values()

    dofs_D = mvd.interior_D
    dofs_V = mvd.interior_V
    n_D = len(dofs_D)
    N = n_D + len(dofs_V)
    num_D = np.full(mvd.M_D, -1, dtype=np.int64)
    num_D[dofs_D] = np.arange(n_D)
    num_V = np.full(mvd.M_V, -1, dtype=np.int64)
    num_V[dofs_V] = n_D + np.arange(len(dofs_V))

    # local dofs per cell: (i, i+, j, j+) with difference weights -1/l, +1/l
    dof = np.column_stack([num_D[mvd.d_nodes[:, 0]], num_D[mvd.d_nodes[:, 1]],
                           num_V[mvd.v_nodes[:, 0]], num_V[mvd.v_nodes[:, 1]]])
    M = mvd.M
    bD = np.zeros((M, 4))
    bV = np.zeros((M, 4))
    bD[:, 0], bD[:, 1] = -1.0 / mvd.len_D, 1.0 / mvd.len_D
    bV[:, 2], bV[:, 3] = -1.0 / mvd.len_V, 1.0 / mvd.len_V
    w = 2.0 * mvd.S_star
    local = (w * kDD)[:, None, None] * np.einsum("ma,mb->mab", bD, bD)
    local += (w * kVV)[:, None, None] * np.einsum("ma,mb->mab", bV, bV)
    cross = np.einsum("ma,mb->mab", bD, bV)
    local += (w * kDV)[:, None, None] * (cross + cross.transpose(0, 2, 1))

    rows = np.repeat(dof, 4, axis=1).reshape(-1)
    cols = np.tile(dof, (1, 4)).reshape(-1)
    vals = local.reshape(-1)
    keep = (rows >= 0) & (cols >= 0) & (vals != 0.0)
    diag = np.concatenate([mvd.S_D[dofs_D] * rD[dofs_D], mvd.S_V[dofs_V] * rV[dofs_V]])
    rows = np.concatenate([rows[keep], np.arange(N)])
    cols = np.concatenate([cols[keep], np.arange(N)])
    vals = np.concatenate([vals[keep], diag])
    A = sp.coo_matrix((vals, (rows, cols)), shape=(N, N)).tocsr()
    A.sum_duplicates()
    A.eliminate_zeros()
    b = np.concatenate([mvd.S_D[dofs_D] * fD[dofs_D], mvd.S_V[dofs_V] * fV[dofs_V]])
    return LinearSystem(A, b, dofs_D, dofs_V, mvd)


def pcg(A, b, rel_tol=1e-10, max_iter=None, x0=None):
    """Jacobi-preconditioned conjugate gradients.

    Returns ``(x, iterations, relative_residual)``.  Convergence is judged on
    the true residual ``|b - A x| / |b|``.
    """
    N = len(b)
    if max_iter is None:
        max_iter = 5 * N
    bnorm = float(np.linalg.norm(b))
    x = np.zeros(N) if x0 is None else np.array(x0, dtype=float)
    if bnorm == 0.0 and x0 is None:
        return x, 0, 0.0
    diag = A.diagonal()
    if np.any(diag <= 0):
        raise BreakdownNonSpd("matrix has a non-positive diagonal entry")
    inv_diag = 1.0 / diag
    r = b - A @ x
    ref = bnorm if bnorm > 0 else 1.0
    res = float(np.linalg.norm(r)) / ref
    if res <= rel_tol:
        return x, 0, res
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    for it in range(1, max_iter + 1):
        Ap = A @ p
        curv = float(p @ Ap)
        if curv <= 0:
            raise BreakdownNonSpd(f"non-positive curvature {curv:.3e} at iteration {it}")
        alpha = rz / curv
        x += alpha * p
        r -= alpha * Ap
        res = float(np.linalg.norm(r)) / ref
        if res <= rel_tol:
            # confirm on the true residual to rule out drift of the recurrence
            res = float(np.linalg.norm(b - A @ x)) / ref
            if res <= rel_tol:
                return x, it, res
            r = b - A @ x
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NotConverged(max_iter, res)


def solve_cg(system, rel_tol=1e-10, max_iter=None):
    """Solve ``system`` by :func:`pcg`; returns a Dirichlet-zero :class:`ScalarField`."""
    x, it, res = pcg(system.matrix, system.rhs, rel_tol, max_iter)
    log.debug("CG: N=%d, %d iterations, relative residual %.3e", system.N, it, res)
    return system.scatter(x)


def solve_dense(system):
    """Direct dense solve, for small systems and as an independent check of CG."""
    if system.N > 200:
        raise ValueError(f"dense fallback is limited to N <= 200, got N={system.N}")
    x = np.linalg.solve(system.matrix.toarray(), system.rhs)
    return system.scatter(x)


def energy_identity_residual(y, problem):
    """Relative mismatch of the discrete energy balance for a computed solution.

    Compares ``2 (K~ grad y, grad y)_* + (r y, y)_D + (r y, y)_V`` with
    ``(f, y)_D + (f, y)_V``.
    """
    mvd = problem.mvd
    g = grad_h(y, mvd)
    q = apply_flux(problem.tensor, g)
    # -(q, g)_* = (K~ g, g)_*
    diffusion = -2.0 * inner_star(q, g)
    rD, rV = problem.reaction_values()
    fD, fV = problem.rhs_values()
    ry = ScalarField(rD * y.values_D, rV * y.values_V, mvd)
    f = ScalarField(fD, fV, mvd)
    lhs = diffusion + inner_D(ry, y) + inner_V(ry, y)
    rhs = inner_D(f, y) + inner_V(f, y)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), np.finfo(float).tiny)


def export_matrix_market(system, path):
    """Write the matrix in Matrix Market coordinate format."""
    scipy.io.mmwrite(str(path), system.matrix, symmetry="symmetric")
