"""Mesh gradient, flux and divergence operators on an MVD mesh.

All operators work on whole arrays.  Per-node sums use ``np.bincount`` so
the accumulation order is fixed and repeated runs are bit-identical.
"""
import numpy as np

from .errors import MeshMismatch, NonSpdTensor
from .fields import VectorField
from .geometry import Tensor2


def grad_h(y, mvd):
    """Differences along the two diagonals of every cell.

    ``comp_D = (y(i+) - y(i)) / len_D`` and ``comp_V = (y(j+) - y(j)) / len_V``.
    """
    if y.mvd is not mvd:
        raise MeshMismatch("scalar field lives on a different mesh")
    d, v = mvd.d_nodes, mvd.v_nodes
    gD = (y.values_D[d[:, 1]] - y.values_D[d[:, 0]]) / mvd.len_D
    gV = (y.values_V[v[:, 1]] - y.values_V[v[:, 0]]) / mvd.len_V
    return VectorField(gD, gV, mvd)


def tensor_at_cells(K, mvd):
    """Cartesian tensors ``(M, 2, 2)`` from a constant, a callable or an array."""
    M = mvd.M
    if isinstance(K, Tensor2):
        return np.broadcast_to(K.as_array(), (M, 2, 2))
    if callable(K):
        out = []
        for x, y in mvd.center:
            k = K(x, y)
            out.append(k.as_array() if isinstance(k, Tensor2) else np.asarray(k, dtype=float))
        return np.array(out)
    arr = np.asarray(K, dtype=float)
    if arr.shape == (2, 2):
        return np.broadcast_to(arr, (M, 2, 2))
    if arr.shape != (M, 2, 2):
        raise MeshMismatch(f"tensor array of shape {arr.shape} does not fit {M} cells")
    return arr


def local_tensors(K, mvd):
    """Entries ``(k_DD, k_DV, k_VV)`` of ``Q K Q^T`` in every cell frame.

    Raises :class:`NonSpdTensor` naming the first cell whose tensor is not
    symmetric positive definite.
    """
    k = tensor_at_cells(K, mvd)
    k11, k12, k21, k22 = k[:, 0, 0], k[:, 0, 1], k[:, 1, 0], k[:, 1, 1]
    scale = np.max(np.abs(k), axis=(1, 2))
    bad = (np.abs(k12 - k21) > 1e-12 * scale) | (k11 <= 0) | (k11 * k22 - k12 * k21 <= 0)
    if np.any(bad):
        m = int(np.flatnonzero(bad)[0])
        raise NonSpdTensor(m, k[m])
    c, s = np.cos(mvd.theta), np.sin(mvd.theta)
    off = 0.5 * (k12 + k21)
    kDD = c * c * k11 + 2 * c * s * off + s * s * k22
    kDV = c * s * (k22 - k11) + (c * c - s * s) * off
    kVV = s * s * k11 - 2 * c * s * off + c * c * k22
    return kDD, kDV, kVV


def apply_flux(K, g):
    """Flux ``-K g`` evaluated in the local frame of each cell."""
    kDD, kDV, kVV = local_tensors(K, g.mvd)
    return VectorField(-(kDD * g.comp_D + kDV * g.comp_V),
                       -(kDV * g.comp_D + kVV * g.comp_V), g.mvd)


def div_D(v, mvd):
    """Divergence at D-nodes over their Voronoi control volumes.

    Returns an array over all D-nodes; boundary entries are 0 since no
    balance equation is written there.
    """
    if v.mvd is not mvd:
        raise MeshMismatch("vector field lives on a different mesh")
    flux = v.comp_D * mvd.len_V
    acc = np.zeros(mvd.M_D)
    for k in range(2):
        acc += np.bincount(mvd.d_nodes[:, k], weights=flux * mvd.delta_D[:, k], minlength=mvd.M_D)
    out = np.zeros(mvd.M_D)
    idx = mvd.interior_D
    out[idx] = acc[idx] / mvd.S_D[idx]
    return out


def div_V(v, mvd):
    """Divergence at interior V-nodes over their Delaunay-triangle control volumes."""
    if v.mvd is not mvd:
        raise MeshMismatch("vector field lives on a different mesh")
    flux = v.comp_V * mvd.len_D
    acc = np.zeros(mvd.M_V)
    for k in range(2):
        acc += np.bincount(mvd.v_nodes[:, k], weights=flux * mvd.delta_V[:, k], minlength=mvd.M_V)
    out = np.zeros(mvd.M_V)
    idx = mvd.interior_V
    out[idx] = acc[idx] / mvd.S_V[idx]
    return out
