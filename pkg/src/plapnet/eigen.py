"""First eigenvalue of the graph p-Laplacian under the mixed condition.

The eigenvalue is the minimum of the Rayleigh quotient

    [ sum_edges |u(x)-u(y)|^p w  +  sum_{z: mu>0} (sigma/mu) |u(z)|^p ]
    / sum_interior |u|^p

over states that vanish on the pinned (mu = 0) boundary part and are not
identically zero on the interior.  The minimizer is positive on the free
vertices, which allows restricting the search to the nonnegative cone:
projected gradient descent with p-norm renormalization, several random
restarts, then a polish phase of per-vertex monotone-root sweeps on the
eigen-equation followed by a boundary re-closure.  The whole run is
deterministic given the config seed; restarts are independent, and the
reported pair is the candidate with the smallest Rayleigh value (ties to the
lowest restart index), so results do not depend on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryCondition, close_boundary, boundary_residual, solve_boundary_equation
from .errors import ConvergenceFailure, NotAdmissible
from .network import Network
from .operators import check_state, p_laplacian_all, pflux, pflux_scalar

__all__ = ["RayleighConfig", "EigenPair", "rayleigh_quotient", "eigen_residual", "first_eigenpair"]


@dataclass(frozen=True)
class RayleighConfig:
    restarts: int = 8
    max_iters: int = 5000
    shrink: float = 0.5
    tolerance: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must lie in (0, 1)")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class EigenPair:
    """First eigenvalue with its normalized positive eigenfunction.

    ``phi`` is a full state, zero on the pinned boundary part and normalized
    so the interior p-norm is one.  ``residual`` is the max over interior
    vertices of the eigen-equation defect and over boundary vertices of the
    boundary-condition defect.
    """

    lam: float
    phi: np.ndarray
    residual: float
    rayleigh: float
    restarts_used: int


def rayleigh_quotient(net: Network, bc: BoundaryCondition, u, p: float) -> float:
    """Rayleigh quotient of an admissible state.

    Admissible: not identically zero on the interior, exactly zero on the
    pinned boundary part.  The boundary sum runs over mu > 0 vertices only
    and is empty (zero) when there are none.
    """
    u = check_state(net, u)
    if not np.any(u[net.interior]):
        raise NotAdmissible("state vanishes identically on the interior")
    if np.any(u[bc.dirichlet_set]):
        raise NotAdmissible("state must vanish on the pinned (mu = 0) boundary part")
    return _rayleigh_raw(net, bc, u, p)


def _rayleigh_raw(net: Network, bc: BoundaryCondition, u: np.ndarray, p: float) -> float:
    d = np.abs(u[net.edge_i] - u[net.edge_j])
    num = float(np.sum(d**p * net.edge_w))
    g = bc.gamma_set
    if len(g):
        num += float(np.sum(bc.sigma_over_mu * np.abs(u[g]) ** p))
    den = float(np.sum(np.abs(u[net.interior]) ** p))
    return num / den


def eigen_residual(net: Network, bc: BoundaryCondition, u, lam: float, p: float) -> float:
    """Max defect of the eigen-system: equation on the interior, condition on
    the boundary."""
    u = np.asarray(u, dtype=np.float64)
    lap = p_laplacian_all(net, u, p)
    interior = net.interior
    eq = np.abs(-lap[interior] - lam * pflux(u[interior], p))
    res = float(eq.max())
    bres = boundary_residual(net, bc, u, p)
    if len(bres):
        res = max(res, float(np.abs(bres).max()))
    return res


def _normalize(net: Network, u: np.ndarray, p: float) -> np.ndarray:
    s = float(np.sum(np.abs(u[net.interior]) ** p)) ** (1.0 / p)
    return u / s


def _gradient(net: Network, bc: BoundaryCondition, u: np.ndarray, lam: float, p: float) -> np.ndarray:
    """Euclidean gradient of the quotient at a state with unit interior p-norm."""
    g = np.zeros(net.n)
    d = u[net.edge_i] - u[net.edge_j]
    s = p * pflux(d, p) * net.edge_w
    np.add.at(g, net.edge_i, s)
    np.subtract.at(g, net.edge_j, s)
    gs = bc.gamma_set
    if len(gs):
        g[gs] += p * bc.sigma_over_mu * pflux(u[gs], p)
    g[net.interior] -= lam * p * pflux(u[net.interior], p)
    return g


def _descend(net, bc, u, p, cfg):
    lam = _rayleigh_raw(net, bc, u, p)
    free = np.concatenate([net.interior, bc.gamma_set])
    step = 1.0
    stalled = 0
    for _ in range(cfg.max_iters):
        grad = _gradient(net, bc, u, lam, p)
        gmax = float(np.abs(grad[free]).max())
        if gmax <= 1e-16 * (1.0 + lam):
            break
        accepted = False
        while step > 1e-18:
            v = u.copy()
            v[free] = np.clip(u[free] - step * grad[free], 0.0, None)
            if not np.any(v[net.interior]):
                step *= cfg.shrink
                continue
            v = _normalize(net, v, p)
            lv = _rayleigh_raw(net, bc, v, p)
            if lv < lam:
                stalled = stalled + 1 if lam - lv <= 1e-10 * (1.0 + lam) else 0
                u, lam = v, lv
                accepted = True
                step = min(step * 2.0, 1e9)
                break
            step *= cfg.shrink
        if not accepted or stalled >= 5:
            # The polish sweeps take over once progress per iteration dies.
            break
    return u, lam


def _polish(net, bc, u, p, tol, sweeps=50):
    """Per-vertex monotone-root sweeps of the eigen-equation.

    Each interior value is replaced by the unique root of
    sum_y kernel(s - u(y)) w = lam * kernel(u_old), then the boundary is
    re-closed and the state renormalized.  Keeps the best iterate by
    residual.
    """
    u = u.copy()
    best_u = u
    best_res = eigen_residual(net, bc, u, _rayleigh_raw(net, bc, u, p), p)
    for _ in range(sweeps):
        lam = _rayleigh_raw(net, bc, u, p)
        for x in net.interior:
            ids, w = net.adjacency[x]
            target = lam * pflux_scalar(float(u[x]), p)
            u[x] = solve_boundary_equation(
                u[ids], w, 0.0, p, target=target, tol=1e-15, hint=float(u[x])
            )
        u = close_boundary(net, bc, u, p, tol=1e-15, hint=u)
        u = _normalize(net, u, p)
        res = eigen_residual(net, bc, u, _rayleigh_raw(net, bc, u, p), p)
        if res < best_res:
            best_u, best_res = u.copy(), res
        if res <= 0.05 * tol:
            break
    return best_u


def first_eigenpair(
    net: Network, bc: BoundaryCondition, p: float, cfg: RayleighConfig | None = None
) -> EigenPair:
    """Minimize the Rayleigh quotient; return the smallest eigenpair found.

    With sigma identically zero the quotient has minimum zero at constants,
    so that case short-circuits to the exact pair without optimization.
    Raises :class:`ConvergenceFailure` (best candidate attached) when the
    residual tolerance is unmet after all restarts or the eigenfunction is
    not positive on the free vertices.
    """
    cfg = cfg or RayleighConfig()
    if bc.pure_neumann:
        phi = np.full(net.n, len(net.interior) ** (-1.0 / p))
        return EigenPair(lam=0.0, phi=phi, residual=0.0, rayleigh=0.0, restarts_used=0)

    rng = np.random.default_rng(cfg.seed)
    free = np.concatenate([net.interior, bc.gamma_set])
    best = None
    for restart in range(cfg.restarts):
        u = np.zeros(net.n)
        u[free] = rng.uniform(0.5, 1.5, size=len(free))
        u = _normalize(net, u, p)
        u, lam = _descend(net, bc, u, p, cfg)
        if best is None or lam < best[0]:
            best = (lam, restart, u)
    u = _polish(net, bc, best[2], p, cfg.tolerance)
    lam = _rayleigh_raw(net, bc, u, p)
    res = eigen_residual(net, bc, u, lam, p)
    positive = bool((u[free] > 0).all())
    pair = EigenPair(lam=lam, phi=u, residual=res, rayleigh=lam, restarts_used=cfg.restarts)
    if res > cfg.tolerance * (1.0 + lam):
        raise ConvergenceFailure(
            f"eigen residual {res:.3e} exceeds tolerance {cfg.tolerance:.1e}*(1+lam)", best=pair
        )
    if not positive:
        raise ConvergenceFailure("eigenfunction not strictly positive on free vertices", best=pair)
    return pair
