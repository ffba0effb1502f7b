"""Mixed boundary condition and the monotone closure of boundary values.

The condition at a boundary vertex z reads

    mu(z) * (outward p-flux) + sigma(z) * kernel(u(z)) = 0,

with mu, sigma >= 0 and mu + sigma > 0.  For fixed interior data the left
side, viewed as a function of the candidate value u(z), is continuous and
strictly increasing, so it has a unique root; the closure solves for it with
bracketing bisection after geometric bracket expansion.  Bisection is
unconditionally convergent here, and stays safe near the kernel's kinks for
p < 2 where Newton would not.

Vertices with mu = 0 are pinned to exactly zero.  Per the flux definition,
only interior neighbors of z enter the balance; boundary-boundary edges are
ignored even when present.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConvergenceFailure, DegenerateCoefficients, ValidationError
from .network import Network
from .operators import check_state, p_normal_derivative, pflux_scalar

__all__ = [
    "BoundaryCondition",
    "boundary_equation",
    "solve_boundary_equation",
    "close_boundary",
    "boundary_residual",
]

DEFAULT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BoundaryCondition:
    """Coefficients mu, sigma on the boundary and the derived set Gamma.

    ``gamma_set`` collects the boundary vertices with mu > 0 (the
    non-Dirichlet part).  Vertices outside it are pinned to zero.
    """

    mu: np.ndarray
    sigma: np.ndarray
    boundary: np.ndarray

    @classmethod
    def from_network(cls, net: Network) -> "BoundaryCondition":
        return cls(mu=net.mu, sigma=net.sigma, boundary=net.boundary)

    def __post_init__(self):
        mu_b = self.mu[self.boundary]
        sig_b = self.sigma[self.boundary]
        if (mu_b < 0).any() or (sig_b < 0).any():
            raise ValidationError("mu and sigma must be nonnegative")
        if not ((mu_b + sig_b) > 0).all():
            raise ValidationError("mu + sigma must be positive on every boundary vertex")

    @cached_property
    def gamma_set(self) -> np.ndarray:
        """Boundary vertices with mu > 0, sorted."""
        return self.boundary[self.mu[self.boundary] > 0]

    @cached_property
    def dirichlet_set(self) -> np.ndarray:
        """Boundary vertices with mu = 0 (pinned to zero), sorted."""
        return self.boundary[self.mu[self.boundary] == 0]

    @cached_property
    def sigma_over_mu(self) -> np.ndarray:
        """sigma/mu on ``gamma_set``, aligned with it."""
        g = self.gamma_set
        return self.sigma[g] / self.mu[g]

    @property
    def pure_neumann(self) -> bool:
        return bool((self.sigma[self.boundary] == 0).all())


def boundary_equation(gamma: float, neighbor_data, b: float, p: float) -> float:
    """Boundary balance at candidate value ``gamma``.

    ``neighbor_data`` is a sequence of ``(value, weight)`` pairs with
    nonnegative weights; ``b >= 0`` multiplies the zeroth-order kernel term.
    The result is strictly increasing in ``gamma`` whenever some coefficient
    is positive.
    """
    pairs = [(float(v), float(a)) for v, a in neighbor_data]
    if any(a < 0 for _, a in pairs) or b < 0:
        raise ValueError("weights and b must be nonnegative")
    if b == 0 and all(a == 0 for _, a in pairs):
        raise DegenerateCoefficients("all coefficients vanish; no unique root")
    total = b * pflux_scalar(gamma, p)
    for v, a in pairs:
        total += a * pflux_scalar(gamma - v, p)
    return total


def solve_boundary_equation(
    values,
    weights,
    b: float,
    p: float,
    target: float = 0.0,
    tol: float = DEFAULT_TOL,
    hint: float | None = None,
) -> float:
    """Unique root of the strictly increasing boundary balance minus target.

    Starts from a bracket spanning the data (plus the optional warm-start
    hint), expands it geometrically until the root is enclosed, then runs up
    to 100 bisection steps, stopping early once the bracket has collapsed to
    rounding width and the residual is below ``tol * scale``.
    """
    vals = [float(v) for v in values]
    ws = [float(a) for a in weights]
    b = float(b)
    if b == 0.0 and not any(ws):
        raise DegenerateCoefficients("all coefficients vanish; no unique root")
    q = p - 1.0

    def f(gamma: float) -> float:
        total = -target
        if b:
            total += b * pflux_scalar(gamma, p)
        for v, a in zip(vals, ws):
            total += a * pflux_scalar(gamma - v, p)
        return total

    scale = 1.0 + b + abs(target)
    for v, a in zip(vals, ws):
        scale += a * max(1.0, abs(v)) ** q

    pts = vals + ([hint] if hint is not None else []) or [0.0]
    lo = min(pts) - 1.0
    hi = max(pts) + 1.0
    flo, fhi = f(lo), f(hi)
    width = hi - lo
    for _ in range(200):
        if flo <= 0.0:
            break
        lo -= width
        width *= 2.0
        flo = f(lo)
    else:
        raise ConvergenceFailure("bracket expansion failed downward (bug: balance not increasing?)")
    for _ in range(200):
        if fhi >= 0.0:
            break
        hi += width
        width *= 2.0
        fhi = f(hi)
    else:
        raise ConvergenceFailure("bracket expansion failed upward (bug: balance not increasing?)")

    mid = 0.5 * (lo + hi)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * max(1.0, abs(mid)) and abs(fm) <= tol * scale:
            break
    return mid


def close_boundary(
    net: Network,
    bc: BoundaryCondition,
    u_interior,
    p: float,
    tol: float = DEFAULT_TOL,
    hint=None,
) -> np.ndarray:
    """State on all vertices whose boundary values satisfy the condition.

    ``u_interior`` may be a full-length state (interior entries are read,
    boundary entries ignored) or an array over ``net.interior`` in order.
    Vertices with mu = 0 get exactly zero.  For the rest, the returned value
    solves the balance to ``tol * scale(z)`` with
    ``scale(z) = 1 + sum a * max(1,|u|)**(p-1) + b``, i.e. relative to the
    data magnitude.  ``hint`` (a previous full state) only warms the initial
    bracket; it never changes the root.
    """
    u_interior = np.asarray(u_interior, dtype=np.float64)
    u = np.zeros(net.n)
    if u_interior.shape == (net.n,):
        u[net.interior] = u_interior[net.interior]
    elif u_interior.shape == (len(net.interior),):
        u[net.interior] = u_interior
    else:
        raise ValueError(
            f"u_interior must have shape ({net.n},) or ({len(net.interior)},)"
        )
    if not np.isfinite(u).all():
        raise ValueError("interior data contains non-finite values")

    for z in net.boundary:
        m = bc.mu[z]
        if m == 0.0:
            u[z] = 0.0
            continue
        ids, w = net.interior_neighbors(z)
        u[z] = solve_boundary_equation(
            u[ids],
            m * w,
            bc.sigma[z],
            p,
            tol=tol,
            hint=None if hint is None else float(hint[z]),
        )
    return u


def boundary_residual(net: Network, bc: BoundaryCondition, u, p: float) -> np.ndarray:
    """Pointwise boundary-condition defect, aligned with ``net.boundary``."""
    u = check_state(net, u)
    out = np.empty(len(net.boundary))
    for k, z in enumerate(net.boundary):
        out[k] = bc.mu[z] * p_normal_derivative(net, u, p, z) + bc.sigma[z] * pflux_scalar(
            float(u[z]), p
        )
    return out
