"""Pointwise nonlinear graph operators and the summation-by-parts check.

States are plain float arrays of length ``net.n`` holding one value per
vertex.  The scalar kernel ``|t|**(p-2) * t`` is evaluated as
``sign(t) * |t|**(p-1)``, its continuous extension at ``t = 0``, which avoids
``0**negative`` for ``1 < p < 2``.  No operator matrix is materialized: the
operator is nonlinear in the state for ``p != 2``, so evaluation runs over
adjacency/edge lists each time.  All functions here are pure.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotBoundaryVertex
from .network import Network

__all__ = [
    "pflux",
    "pflux_scalar",
    "check_state",
    "p_laplacian",
    "p_laplacian_all",
    "p_normal_derivative",
    "green_identity_residual",
]


def _check_p(p: float) -> float:
    p = float(p)
    if not p > 1.0:
        raise ValueError(f"exponent p must exceed 1, got {p}")
    return p


def pflux(t, p: float):
    """Elementwise ``sign(t) * |t|**(p-1)`` for p > 1 (zero at t = 0)."""
    t = np.asarray(t, dtype=np.float64)
    return np.sign(t) * np.abs(t) ** (p - 1.0)


def pflux_scalar(t: float, p: float) -> float:
    """Scalar fast path of :func:`pflux` for tight loops."""
    if t == 0.0:
        return 0.0
    return math.copysign(abs(t) ** (p - 1.0), t)


def check_state(net: Network, u) -> np.ndarray:
    """Coerce to a float64 state on all vertices; rejects bad shapes/values."""
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (net.n,):
        raise ValueError(f"state must have shape ({net.n},), got {u.shape}")
    if not np.isfinite(u).all():
        raise ValueError("state contains non-finite values")
    return u


def p_laplacian(net: Network, u, p: float, x: int) -> float:
    """Weighted p-Laplacian at one vertex: sum of kernel(neighbor - value)."""
    p = _check_p(p)
    x = net.check_vertex(x)
    u = np.asarray(u, dtype=np.float64)
    ids, w = net.adjacency[x]
    return float(np.sum(pflux(u[ids] - u[x], p) * w))


def p_laplacian_all(net: Network, u, p: float) -> np.ndarray:
    """p-Laplacian at every vertex via one pass over the edge list.

    Each unordered edge contributes with exactly opposite signs to its two
    endpoints, so the result sums to zero up to rounding.
    """
    p = _check_p(p)
    u = np.asarray(u, dtype=np.float64)
    s = pflux(u[net.edge_j] - u[net.edge_i], p) * net.edge_w
    out = np.zeros(net.n)
    np.add.at(out, net.edge_i, s)
    np.subtract.at(out, net.edge_j, s)
    return out


def p_normal_derivative(net: Network, u, p: float, z: int) -> float:
    """Outward p-flux at a boundary vertex, summed over interior neighbors.

    Neighbors on the boundary are excluded by definition.
    """
    p = _check_p(p)
    z = net.check_vertex(z)
    if net.interior_mask[z]:
        raise NotBoundaryVertex(f"vertex {net.names[z]!r} is interior")
    u = np.asarray(u, dtype=np.float64)
    ids, w = net.interior_neighbors(z)
    return float(np.sum(pflux(u[z] - u[ids], p) * w))


def green_identity_residual(net: Network, f, g, p: float) -> float:
    """Absolute defect of the summation-by-parts identity.

    Compares ``2 * sum_x g(x) * (-lap_p f(x))`` over all vertices with the
    symmetric pair form ``sum_{x,y} kernel(f(y)-f(x)) (g(y)-g(x)) w(x,y)``.
    Mathematically zero for every pair of states; returned for assertions.
    """
    p = _check_p(p)
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    lap = p_laplacian_all(net, f, p)
    lhs = 2.0 * float(np.sum(g * (-lap)))
    df = f[net.edge_j] - f[net.edge_i]
    dg = g[net.edge_j] - g[net.edge_i]
    # Ordered pairs count every edge twice with equal contributions.
    rhs = 2.0 * float(np.sum(pflux(df, p) * dg * net.edge_w))
    return abs(lhs - rhs)
