"""Energy functionals of the concavity argument and the blow-up time bound.

``functional_a`` is the squared mass over interior vertices.  ``functional_b``
balances the p-Dirichlet energy and the boundary penalty against the reaction
potential, offset by gamma; its positivity at t = 0 triggers finite-time
blow-up and yields the explicit upper bound on the blow-up time together with
a diverging lower envelope for the squared mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryCondition
from .errors import InvalidParams, NonpositiveB0, OutOfRange
from .network import Network
from .operators import check_state

__all__ = [
    "EnergySample",
    "functional_a",
    "functional_b",
    "blowup_time_bound",
    "lower_envelope",
]


@dataclass(frozen=True)
class EnergySample:
    """One recorded instant: time, both functionals, interior extrema, dt."""

    t: float
    A: float
    B: float
    u_min: float
    u_max: float
    dt: float


def functional_a(net: Network, u) -> float:
    """Squared mass over the interior: sum of u(x)**2."""
    u = check_state(net, u)
    return float(np.sum(u[net.interior] ** 2))


def functional_b(
    net: Network, bc: BoundaryCondition, spec, gamma: float, u, p: float
) -> float:
    """Energy balance functional at one state (closed w.r.t. the condition).

    -(1/p) sum_edges |u(x)-u(y)|^p w - (1/p) sum_{mu>0} (sigma/mu) |u(z)|^p
    + sum_interior [F(u) - gamma].
    """
    u = check_state(net, u)
    d = np.abs(u[net.edge_i] - u[net.edge_j])
    grad = float(np.sum(d**p * net.edge_w))
    g = bc.gamma_set
    pen = float(np.sum(bc.sigma_over_mu * np.abs(u[g]) ** p)) if len(g) else 0.0
    react = float(np.sum(np.asarray(spec.F(u[net.interior])) - gamma))
    return -grad / p - pen / p + react


def blowup_time_bound(A0: float, B0: float, alpha: float) -> float:
    """Upper bound on the blow-up time: A0 / ((alpha - 2) * alpha * B0)."""
    if not alpha > 2:
        raise InvalidParams("alpha must exceed 2")
    if not B0 > 0:
        raise NonpositiveB0(f"bound inapplicable: B(0) = {B0:g} <= 0")
    return A0 / ((alpha - 2.0) * alpha * B0)


def lower_envelope(t: float, A0: float, B0: float, alpha: float) -> float:
    """Diverging lower envelope of the squared mass for 0 <= t < bound.

    Integrating the differential inequality satisfied by A**(-(alpha-2)/2)
    gives

        A(t) >= [A0**((2-alpha)/2) - (alpha-2)*alpha*A0**(-alpha/2)*B0*t]
                ** (-2/(alpha-2)),

    which equals A0 at t = 0 and diverges as t approaches the bound.
    """
    if not alpha > 2:
        raise InvalidParams("alpha must exceed 2")
    if not B0 > 0:
        raise NonpositiveB0(f"envelope inapplicable: B(0) = {B0:g} <= 0")
    if t < 0:
        raise OutOfRange("t must be nonnegative")
    den = A0 ** ((2.0 - alpha) / 2.0) - (alpha - 2.0) * alpha * A0 ** (-alpha / 2.0) * B0 * t
    if den <= 0:
        raise OutOfRange(f"envelope diverged: t = {t:g} is at or past the bound")
    return den ** (-2.0 / (alpha - 2.0))
