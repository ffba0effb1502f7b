"""Reaction terms, their antiderivatives, and the blow-up growth conditions.

Three families are supported, parsed from compact CLI syntax:

    power:lambda=1,q=3        f(u) = lambda * u**q
    powerc:lambda=1,q=3,c=.5  f(u) = lambda * u**q + c for u > 0
    table:path.csv            piecewise-linear interpolant of (u, f) samples

Every family satisfies f(0) = 0 and f > 0 on (0, inf).  The power families
are extended oddly to negative arguments, which keeps them locally Lipschitz
there for q >= 1; the table family clamps below zero.  Antiderivatives are
closed-form for the power families and adaptive-Simpson quadrature for
tables.

The growth conditions compare alpha * F(u) against u f(u) plus optional
slack terms on a positive grid:

    plain      alpha F(u) <= u f(u)
    offset     alpha F(u) <= u f(u) + gamma
    weighted   alpha F(u) <= u f(u) + beta u**p + gamma

with alpha > 2, gamma > 0 and 0 <= beta <= (alpha - p) * lambda0 / p, where
lambda0 is the first eigenvalue of the graph operator.  A grid check is
reported as "holds on grid", never as a proof.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boundary import BoundaryCondition, close_boundary
from .errors import (
    ConfigError,
    HypothesisFailed,
    InvalidParams,
    NotFound,
    QuadratureFailure,
    ValidationError,
)
from .network import Network

__all__ = [
    "PowerLaw",
    "PowerPlusConst",
    "TableNonlinearity",
    "parse_nonlinearity",
    "default_grid",
    "ConditionParams",
    "ConditionReport",
    "check_plain_condition",
    "check_offset_condition",
    "check_weighted_condition",
    "TailProfile",
    "tail_profile",
    "GrowthWitness",
    "growth_witness",
    "InitialData",
    "find_initial",
]


def default_grid(lo: float = 1e-6, hi: float = 1e6, n: int = 2000) -> np.ndarray:
    """Log-spaced positive grid used by the condition checkers."""
    return np.geomspace(lo, hi, n)


# ---------------------------------------------------------------------------
# reaction families


@dataclass(frozen=True)
class PowerLaw:
    """f(u) = lam * u**q (odd extension below zero)."""

    lam: float
    q: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError("power law: lambda must be positive")
        if not self.q > 0:
            raise ValidationError("power law: q must be positive (f(0) = 0)")

    def f(self, u):
        u = np.asarray(u, dtype=np.float64)
        return self.lam * np.sign(u) * np.abs(u) ** self.q

    def F(self, u):
        u = np.asarray(u, dtype=np.float64)
        return self.lam * np.abs(u) ** (self.q + 1.0) / (self.q + 1.0)

    def leading_power(self) -> float:
        return self.q

    def lipschitz_at_zero(self) -> bool:
        return self.q >= 1.0

    def label(self) -> str:
        return f"power:lambda={self.lam:g},q={self.q:g}"


@dataclass(frozen=True)
class PowerPlusConst:
    """f(u) = lam * u**q + c for u > 0, zero at zero.

    With c > 0 the jump at zero makes f non-Lipschitz there: fine for the
    condition checkers, rejected for time integration.
    """

    lam: float
    q: float
    c: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError("power law: lambda must be positive")
        if not self.q > 0:
            raise ValidationError("power law: q must be positive (f(0) = 0)")
        if self.c < 0:
            raise ValidationError("additive constant must be nonnegative (f > 0 on (0, inf))")

    def f(self, u):
        u = np.asarray(u, dtype=np.float64)
        return self.lam * np.sign(u) * np.abs(u) ** self.q + self.c * np.sign(u)

    def F(self, u):
        u = np.asarray(u, dtype=np.float64)
        return self.lam * np.abs(u) ** (self.q + 1.0) / (self.q + 1.0) + self.c * np.abs(u)

    def leading_power(self) -> float:
        return self.q

    def lipschitz_at_zero(self) -> bool:
        return self.q >= 1.0 and self.c == 0.0

    def label(self) -> str:
        return f"powerc:lambda={self.lam:g},q={self.q:g},c={self.c:g}"


@dataclass(frozen=True)
class TableNonlinearity:
    """Piecewise-linear interpolant of (u, f) samples, u ascending from 0.

    Beyond the last knot the final segment is extended linearly; below zero
    the argument is clamped to zero.  The antiderivative uses adaptive
    Simpson quadrature at 1e-10 relative tolerance, cached at the knots.
    """

    u_knots: tuple[float, ...]
    f_knots: tuple[float, ...]
    _F_knots: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        u = np.asarray(self.u_knots, dtype=np.float64)
        f = np.asarray(self.f_knots, dtype=np.float64)
        if u.shape != f.shape or u.ndim != 1 or len(u) < 2:
            raise ValidationError("table: need two equal-length columns with >= 2 rows")
        if u[0] != 0.0 or f[0] != 0.0:
            raise ValidationError("table: first row must be u = 0, f = 0")
        if not (np.diff(u) > 0).all():
            raise ValidationError("table: u column must be strictly ascending")
        if not (f[1:] > 0).all():
            raise ValidationError("table: f must be positive for u > 0")
        # Antiderivative at the knots, accumulated segment by segment.
        acc = [0.0]
        for a, b in zip(u[:-1], u[1:]):
            acc.append(acc[-1] + _adaptive_simpson(self._f_scalar, float(a), float(b), 1e-10))
        object.__setattr__(self, "_F_knots", tuple(acc))

    def _f_scalar(self, x: float) -> float:
        u = self.u_knots
        f = self.f_knots
        if x <= 0.0:
            return 0.0
        if x >= u[-1]:
            slope = (f[-1] - f[-2]) / (u[-1] - u[-2])
            return f[-1] + slope * (x - u[-1])
        return float(np.interp(x, u, f))

    def f(self, u):
        u = np.asarray(u, dtype=np.float64)
        out = np.interp(np.clip(u, 0.0, None), self.u_knots, self.f_knots)
        big = u > self.u_knots[-1]
        if np.any(big):
            slope = (self.f_knots[-1] - self.f_knots[-2]) / (self.u_knots[-1] - self.u_knots[-2])
            out = np.where(big, self.f_knots[-1] + slope * (u - self.u_knots[-1]), out)
        return out

    def F(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=np.float64))
        out = np.empty_like(u)
        for k, x in enumerate(np.clip(u, 0.0, None)):
            i = int(np.searchsorted(self.u_knots, x, side="right")) - 1
            i = min(i, len(self.u_knots) - 1)
            base = self._F_knots[i]
            lo = self.u_knots[i]
            out[k] = base if x == lo else base + _adaptive_simpson(self._f_scalar, lo, float(x), 1e-10)
        return out if out.size > 1 else float(out[0])

    def leading_power(self) -> float | None:
        return None

    def lipschitz_at_zero(self) -> bool:
        return True

    def label(self) -> str:
        return f"table:{len(self.u_knots)} knots on [0, {self.u_knots[-1]:g}]"


def _adaptive_simpson(f, a: float, b: float, rel_tol: float) -> float:
    """Adaptive Simpson quadrature with relative-error control."""
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    scale = max(abs(whole), 1e-300)

    def recurse(a, b, fa, fm, fb, whole, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if abs(left + right - whole) <= 15.0 * rel_tol * max(scale, abs(left + right)):
            return left + right + (left + right - whole) / 15.0
        if depth >= 50:
            raise QuadratureFailure(f"adaptive Simpson stalled on [{a}, {b}]")
        return recurse(a, m, fa, flm, fm, left, depth + 1) + recurse(
            m, b, fm, frm, fb, right, depth + 1
        )

    if a == b:
        return 0.0
    return recurse(a, b, fa, fm, fb, whole, 0)


def parse_nonlinearity(text: str):
    """Parse the compact reaction syntax; table paths are read eagerly."""
    if ":" not in text:
        raise ConfigError(f"reaction spec {text!r} must look like family:key=value,...")
    family, _, rest = text.partition(":")
    if family == "table":
        return _load_table(rest)
    try:
        kv = dict(item.split("=", 1) for item in rest.split(",") if item)
        kv = {k.strip(): float(v) for k, v in kv.items()}
    except ValueError:
        raise ConfigError(f"cannot parse parameters in {text!r}") from None
    try:
        if family == "power":
            return PowerLaw(lam=kv.pop("lambda"), q=kv.pop("q"))
        if family == "powerc":
            return PowerPlusConst(lam=kv.pop("lambda"), q=kv.pop("q"), c=kv.pop("c"))
    except KeyError as exc:
        raise ConfigError(f"reaction spec {text!r} is missing {exc}") from None
    raise ConfigError(f"unknown reaction family {family!r}")


def _load_table(path: str) -> TableNonlinearity:
    rows = []
    try:
        with open(Path(path), newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() in ("u", "#"):
                    continue
                rows.append((float(row[0]), float(row[1])))
    except OSError as exc:
        raise ConfigError(f"cannot read table {path!r}: {exc}") from None
    except (ValueError, IndexError):
        raise ConfigError(f"table {path!r} must have two numeric columns u,f") from None
    return TableNonlinearity(tuple(r[0] for r in rows), tuple(r[1] for r in rows))


def lipschitz_estimate(spec, radius: float) -> float:
    """Sampled local Lipschitz constant: max slope over the range, doubled."""
    r = max(float(radius), 1e-12)
    xs = np.linspace(0.0, r, 513)
    fs = spec.f(xs)
    slopes = np.abs(np.diff(fs) / np.diff(xs))
    return 2.0 * float(slopes.max())


def require_simulatable(spec) -> None:
    """Reject reactions that are not locally Lipschitz at zero."""
    if not spec.lipschitz_at_zero():
        raise ConfigError(
            f"reaction {spec.label()} is not locally Lipschitz at zero; "
            "time integration needs q >= 1 and no additive jump"
        )


# ---------------------------------------------------------------------------
# growth conditions


@dataclass(frozen=True)
class ConditionParams:
    """Parameters of the growth conditions, validated on construction.

    beta must stay within [0, (alpha - p) * lambda0 / p]; with lambda0 > 0
    this forces alpha >= p, and with lambda0 = 0 it forces beta = 0.
    ``growth_lambda``, when given, is the coefficient of the pointwise lower
    bound f(u) >= growth_lambda * u**(p-1) required by the witness search and
    must exceed lambda0.
    """

    alpha: float
    beta: float
    gamma: float
    p: float
    lambda0: float
    growth_lambda: float | None = None

    def __post_init__(self):
        if not self.p > 1:
            raise InvalidParams("p must exceed 1")
        if not self.alpha > 2:
            raise InvalidParams("alpha must exceed 2")
        if not self.gamma > 0:
            raise InvalidParams("gamma must be positive")
        if self.lambda0 < 0:
            raise InvalidParams("lambda0 must be nonnegative")
        if self.beta < 0:
            raise InvalidParams("beta must be nonnegative")
        bound = (self.alpha - self.p) * self.lambda0 / self.p
        if self.beta > bound:
            raise InvalidParams(
                f"beta={self.beta:g} exceeds (alpha-p)*lambda0/p = {bound:g}"
            )
        if self.growth_lambda is not None and not self.growth_lambda > self.lambda0:
            raise InvalidParams("growth_lambda must exceed lambda0")


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    holds: bool
    worst_u: float
    worst_margin: float
    grid_note: str

    def as_dict(self) -> dict:
        return {
            "condition": self.condition,
            "holds": self.holds,
            "worst_u": self.worst_u,
            "worst_margin": self.worst_margin,
            "grid": self.grid_note,
        }


def _margin_report(spec, condition, alpha, beta, gamma, p, grid) -> ConditionReport:
    u = np.asarray(grid, dtype=np.float64)
    if u.ndim != 1 or len(u) == 0 or not (u > 0).all() or not (np.diff(u) > 0).all():
        raise InvalidParams("grid must be strictly positive and ascending")
    fu = np.asarray(spec.f(u))
    Fu = np.asarray(spec.F(u))
    margin = (u * fu - alpha * Fu) + beta * u**p + gamma
    # u f(u) and alpha F(u) cancel to rounding noise in the equality cases
    # (pure powers at matching alpha), so the verdict is taken relative to
    # the term scale rather than on the raw difference.
    scale = np.abs(u * fu) + alpha * np.abs(Fu) + beta * u**p + gamma + 1e-300
    normalized = margin / scale
    k = int(np.argmin(normalized))  # ties resolve to the lower u
    note = f"{len(u)} points on [{u[0]:g}, {u[-1]:g}]"
    return ConditionReport(
        condition=condition,
        holds=bool(normalized[k] >= -1e-12),
        worst_u=float(u[k]),
        worst_margin=float(margin[k]),
        grid_note=note,
    )


def check_plain_condition(spec, params: ConditionParams, grid=None) -> ConditionReport:
    """alpha F(u) <= u f(u) on the grid (no slack)."""
    grid = default_grid() if grid is None else grid
    return _margin_report(spec, "plain", params.alpha, 0.0, 0.0, params.p, grid)


def check_offset_condition(spec, params: ConditionParams, grid=None) -> ConditionReport:
    """alpha F(u) <= u f(u) + gamma on the grid."""
    grid = default_grid() if grid is None else grid
    return _margin_report(spec, "offset", params.alpha, 0.0, params.gamma, params.p, grid)


def check_weighted_condition(spec, params: ConditionParams, grid=None) -> ConditionReport:
    """alpha F(u) <= u f(u) + beta u**p + gamma on the grid."""
    grid = default_grid() if grid is None else grid
    return _margin_report(
        spec, "weighted", params.alpha, params.beta, params.gamma, params.p, grid
    )


# ---------------------------------------------------------------------------
# tail profile and witness search


@dataclass(frozen=True)
class TailProfile:
    """Scaled antiderivative remainder whose monotonicity encodes the
    weighted condition: values of (F(u) - a u**p - b) / u**(max(p,2)+eps)."""

    u: np.ndarray
    values: np.ndarray
    nondecreasing: bool
    eps: float
    a: float
    b: float


def tail_profile(
    spec, params: ConditionParams, grid=None, a: float | None = None, b: float | None = None
) -> TailProfile:
    """Sample the tail profile and report whether it is nondecreasing.

    ``eps = alpha - max(p, 2)`` must be nonnegative, strictly positive for
    p <= 2.  Defaults tie the remainder constants to the condition
    parameters (a = beta / (alpha - p), b = gamma / alpha), under which a
    nondecreasing profile on (0, inf) is equivalent to the weighted
    condition; both can be overridden.
    """
    u = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    if not (u > 0).all() or not (np.diff(u) > 0).all():
        raise InvalidParams("grid must be strictly positive and ascending")
    base = max(params.p, 2.0)
    eps = params.alpha - base
    if eps < 0:
        raise InvalidParams("alpha must be at least max(p, 2) for the tail profile")
    if eps == 0 and params.p <= 2:
        raise InvalidParams("eps = alpha - 2 must be positive when p <= 2")
    if a is None:
        a = 0.0 if params.beta == 0 else params.beta / (params.alpha - params.p)
    if b is None:
        b = params.gamma / params.alpha
    vals = (spec.F(u) - a * u**params.p - b) / u ** (base + eps)
    # Tolerance is local to each pair: the profile can span many orders of
    # magnitude, and a global scale would mask genuine decreases.
    local = np.maximum(np.abs(vals[:-1]), np.abs(vals[1:])) + 1e-300
    nondec = bool((np.diff(vals) >= -1e-12 * local).all())
    return TailProfile(u=u, values=vals, nondecreasing=nondec, eps=eps, a=float(a), b=float(b))


@dataclass(frozen=True)
class GrowthWitness:
    m: float
    zeta: float
    eps: float


def growth_witness(spec, params: ConditionParams, grid=None) -> GrowthWitness:
    """Threshold m with positive tail profile, and the power lower bound
    coefficient beyond it.

    Requires ``params.growth_lambda`` and verifies the pointwise hypothesis
    f(u) >= growth_lambda * u**(p-1) on the whole grid first
    (:class:`HypothesisFailed` otherwise).  Returns the smallest grid point m
    with positive profile and zeta = min over grid u >= m of
    f(u) / u**(max(p-1,1)+eps).  Raises :class:`NotFound` when the profile is
    nonpositive everywhere on the grid (inconclusive: grid too short).
    """
    if params.growth_lambda is None:
        raise InvalidParams("growth_witness needs params.growth_lambda")
    u = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    fu = spec.f(u)
    hyp = fu - params.growth_lambda * u ** (params.p - 1.0)
    if (hyp < 0).any():
        k = int(np.argmin(hyp))
        raise HypothesisFailed(
            f"f(u) >= {params.growth_lambda:g} * u**(p-1) fails at u = {u[k]:g} "
            f"(deficit {hyp[k]:g})"
        )
    prof = tail_profile(spec, params, grid=u)
    pos = np.flatnonzero(prof.values > 0)
    if len(pos) == 0:
        raise NotFound(
            "tail profile not positive anywhere on the grid (inconclusive)",
            best_margin=float(prof.values.max()),
        )
    m = float(u[pos[0]])
    expo = max(params.p - 1.0, 1.0) + prof.eps
    tail = u >= m
    zeta = float((fu[tail] / u[tail] ** expo).min())
    return GrowthWitness(m=m, zeta=zeta, eps=prof.eps)


# ---------------------------------------------------------------------------
# initial data with positive energy functional


@dataclass(frozen=True)
class InitialData:
    u0: np.ndarray
    v_star: float
    interval: tuple[float, float]
    b0: float


def find_initial(
    net: Network,
    bc: BoundaryCondition,
    spec,
    gamma1: float,
    p: float,
    scan=None,
    max_attempts: int = 50,
) -> InitialData:
    """Construct initial data whose energy functional starts positive.

    Scans v > 0 for ``F(v) > (omega0 / p) * v**p + gamma1`` with omega0 the
    maximum interior degree.  Each hit yields a candidate: constant v on the
    interior, boundary closed consistently (pinned part exactly zero).  The
    candidate is accepted only after the energy functional at gamma = gamma1
    is verified positive by direct evaluation, which also covers any smaller
    gamma.  Raises :class:`NotFound` with the best margin when the scan finds
    nothing.
    """
    from .functionals import functional_b

    if not gamma1 > 0:
        raise InvalidParams("gamma1 must be positive")
    v = default_grid() if scan is None else np.asarray(scan, dtype=np.float64)
    if not (v > 0).all():
        raise InvalidParams("scan grid must be positive")
    margin = np.asarray(spec.F(v)) - (net.omega0 / p) * v**p - gamma1
    ok = margin > 0
    if not ok.any():
        k = int(np.argmax(margin))
        raise NotFound(
            f"no v with F(v) > (omega0/p) v**p + gamma1; best margin {margin[k]:g} at v = {v[k]:g}",
            best_margin=float(margin[k]),
        )
    hits = np.flatnonzero(ok)
    # Contiguous run around a hit, reported as the working interval.
    runs: dict[int, tuple[float, float]] = {}
    start = hits[0]
    prev = hits[0]
    for idx in list(hits[1:]) + [None]:
        if idx is None or idx != prev + 1:
            for j in range(start, prev + 1):
                runs[j] = (float(v[start]), float(v[prev]))
            if idx is not None:
                start = idx
        if idx is not None:
            prev = idx

    best_b0 = -np.inf
    for idx in hits[:max_attempts]:
        vs = float(v[idx])
        u0 = np.zeros(net.n)
        u0[net.interior] = vs
        u0 = close_boundary(net, bc, u0, p)
        b0 = functional_b(net, bc, spec, gamma1, u0, p)
        best_b0 = max(best_b0, b0)
        if b0 > 0:
            return InitialData(u0=u0, v_star=vs, interval=runs[int(idx)], b0=float(b0))
    raise NotFound(
        f"scan hits found but none verified positive; best B(0) = {best_b0:g}",
        best_margin=float(best_b0),
    )
