"""Time integration with boundary closure, blow-up detection and checks.

The semi-discrete system advances interior values by the chosen scheme
applied to (p-Laplacian + reaction) and re-closes the boundary every stage.
Steps are adaptive on the per-step relative change of the interior state:
reject and halve above 10%, double below 1%.  Crossing the blow-threshold M
ends the run with verdict ``blow-up``; running out of steps (dt below dt_min
without reaching M) is its own verdict, never conflated with blow-up.

Explicit Euler is the default scheme; the classical fourth-order scheme
("rk4") is available for convergence studies and is what the sharp
blow-up-time comparisons use, since the first-order scheme carries an
O(step-cap) lag in the detected time.  The initial step, when not given,
comes from the local-existence scale |u0| / (w*(4|u0|)^(p-1) + 4 L |u0|)
with L the sampled Lipschitz estimate and w the maximum degree.

One simulation is strictly sequential; distinct simulations share no mutable
state and may run concurrently.  Reports are plain value objects.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryCondition, close_boundary
from .errors import ConfigError, NonFinite, NonpositiveB0, OutOfRange
from .functionals import EnergySample, blowup_time_bound, functional_a, functional_b, lower_envelope
from .network import Network, boundary_boundary_edges
from .nonlinearity import lipschitz_estimate, require_simulatable
from .operators import check_state, p_laplacian_all

__all__ = [
    "IntegratorConfig",
    "Diagnostics",
    "SimulationReport",
    "CompareReport",
    "default_dt",
    "step",
    "simulate",
    "compare",
]

REL_HALVE = 0.10
REL_DOUBLE = 0.01


@dataclass(frozen=True)
class IntegratorConfig:
    dt_init: float | None = None
    dt_min: float = 1e-30
    t_max: float = 1.0
    blow_threshold: float = 1e8
    safety: float = 0.9
    stride: int = 1
    method: str = "euler"

    def __post_init__(self):
        if self.dt_min <= 0:
            raise ConfigError("dt_min must be positive")
        if self.dt_init is not None and self.dt_init <= self.dt_min:
            raise ConfigError("dt_init must exceed dt_min")
        if self.t_max <= 0:
            raise ConfigError("t_max must be positive")
        if not 0 < self.safety < 1:
            raise ConfigError("safety must lie in (0, 1)")
        if self.stride < 1:
            raise ConfigError("stride must be a positive integer")
        if self.method not in ("euler", "rk4"):
            raise ConfigError("method must be 'euler' or 'rk4'")
        if self.blow_threshold <= 0:
            raise ConfigError("blow_threshold must be positive")


@dataclass(frozen=True)
class Diagnostics:
    """Post-run inequality checks along the sampled trajectory.

    These are diagnostics attached to reports, not hard failures.  Booleans
    are None when the corresponding check does not apply (no condition
    parameters, functional not positive initially, or boundary flux terms
    present for the mass identity).
    """

    nonneg_ok: bool
    min_value: float
    b_nondecreasing: bool
    b_worst_increment: float
    a_growth_ok: bool | None = None
    a_growth_worst: float | None = None
    envelope_ok: bool | None = None
    envelope_worst: float | None = None
    mass_identity_ok: bool | None = None
    mass_identity_worst: float | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass
class SimulationReport:
    samples: list[EnergySample]
    verdict: str
    T_detect: float | None
    T_star_estimate: float | None
    T_star_error: float | None
    bound_T: float | None
    diagnostics: Diagnostics
    final_state: np.ndarray
    steps_taken: int
    mass_trace: list[float] = field(default_factory=list)
    reaction_trace: list[float] = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "A", "B", "u_min", "u_max", "dt"])
            for s in self.samples:
                writer.writerow(
                    [format(v, ".17g") for v in (s.t, s.A, s.B, s.u_min, s.u_max, s.dt)]
                )

    def summary(self) -> dict:
        return {
            "verdict": self.verdict,
            "T_detect": self.T_detect,
            "T_star_estimate": self.T_star_estimate,
            "T_star_error": self.T_star_error,
            "bound_T": self.bound_T,
            "steps": self.steps_taken,
            "samples": len(self.samples),
            "t_final": self.samples[-1].t if self.samples else 0.0,
            "u_max_final": self.samples[-1].u_max if self.samples else None,
            "diagnostics": self.diagnostics.as_dict(),
        }


def default_dt(net: Network, spec, u0, p: float, safety: float = 0.9) -> float:
    """Initial step from the local-existence scale of the problem data."""
    norm = float(np.abs(np.asarray(u0)).max())
    if norm == 0.0:
        raise ConfigError("initial data must be nontrivial")
    lip = lipschitz_estimate(spec, 2.0 * norm)
    wbar = net.max_degree
    return safety * norm / (wbar * (4.0 * norm) ** (p - 1.0) + 4.0 * lip * norm)


def _rhs(net: Network, bc: BoundaryCondition, spec, u: np.ndarray, p: float) -> np.ndarray:
    """Interior time derivative of a closed state."""
    lap = p_laplacian_all(net, u, p)
    return lap[net.interior] + np.asarray(spec.f(u[net.interior]))


def _advance(net, bc, spec, u, p, dt, method):
    """One trial step from a closed state.

    Returns ``(new closed state, reaction integral increment)``; the
    increment is the step's own quadrature of sum_interior f(u), which makes
    the discrete mass identity exact under pure-Neumann conditions for
    either scheme.  A non-finite trial is signalled by a NaN state.
    """
    interior = net.interior
    bad = np.full_like(u, np.nan), 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        return _advance_raw(net, bc, spec, u, p, dt, method, interior, bad)


def _advance_raw(net, bc, spec, u, p, dt, method, interior, bad):
    if method == "euler":
        react = dt * float(np.sum(np.asarray(spec.f(u[interior]))))
        v = u[interior] + dt * _rhs(net, bc, spec, u, p)
    else:
        def stage(prev_k):
            s = u[interior] + prev_k
            if not np.isfinite(s).all():
                return None
            return close_boundary(net, bc, s, p, hint=u)

        k1 = _rhs(net, bc, spec, u, p)
        u2 = stage(0.5 * dt * k1)
        if u2 is None:
            return bad
        k2 = _rhs(net, bc, spec, u2, p)
        u3 = stage(0.5 * dt * k2)
        if u3 is None:
            return bad
        k3 = _rhs(net, bc, spec, u3, p)
        u4 = stage(dt * k3)
        if u4 is None:
            return bad
        k4 = _rhs(net, bc, spec, u4, p)
        v = u[interior] + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        react = (
            dt
            / 6.0
            * float(
                np.sum(np.asarray(spec.f(u[interior])))
                + 2.0 * np.sum(np.asarray(spec.f(u2[interior])))
                + 2.0 * np.sum(np.asarray(spec.f(u3[interior])))
                + np.sum(np.asarray(spec.f(u4[interior])))
            )
        )
    if not np.isfinite(v).all():
        return bad
    return close_boundary(net, bc, v, p, hint=u), react


def step(net, bc, spec, u, p, dt, method: str = "euler") -> np.ndarray:
    """Advance a closed state by one step of size dt; boundary re-closed.

    Raises :class:`NonFinite` on overflow, which callers treat as a blow-up
    signal.
    """
    if dt <= 0:
        raise ConfigError("dt must be positive")
    u = check_state(net, u)
    v, _ = _advance(net, bc, spec, u, p, dt, method)
    if not np.isfinite(v).all():
        raise NonFinite("state became non-finite during the step")
    return v


def _rel_change(net: Network, u_old: np.ndarray, u_new: np.ndarray) -> float:
    du = np.abs(u_new[net.interior] - u_old[net.interior]).max()
    scale = max(float(np.abs(u_old[net.interior]).max()), 1e-300)
    return float(du) / scale


def simulate(
    net: Network,
    bc: BoundaryCondition,
    spec,
    u0,
    p: float,
    cfg: IntegratorConfig | None = None,
    condition_params=None,
) -> SimulationReport:
    """Integrate until t_max, blow-up detection, or step underflow.

    The initial state must be nonnegative and nontrivial; it is re-closed on
    entry so the compatibility of the boundary values never depends on the
    caller.  Energy samples are recorded every ``stride`` accepted steps plus
    the final state.  When condition parameters are given, the blow-up time
    bound and the trajectory inequality diagnostics are attached.
    """
    cfg = cfg or IntegratorConfig()
    require_simulatable(spec)
    u0 = np.asarray(u0, dtype=np.float64)
    u = close_boundary(net, bc, u0, p)
    if (u[net.interior] < 0).any():
        raise ConfigError("initial data must be nonnegative on the interior")
    if not np.any(u[net.interior]):
        raise ConfigError("initial data must be nontrivial")
    M = cfg.blow_threshold
    if M <= float(np.abs(u).max()):
        raise ConfigError("blow_threshold must exceed the initial max |u|")

    gamma = condition_params.gamma if condition_params is not None else 0.0
    q_lead = spec.leading_power()
    extend_to = None if (q_lead is not None and q_lead > 1.0) else 10.0 * M

    dt = cfg.dt_init if cfg.dt_init is not None else default_dt(net, spec, u, p, cfg.safety)
    dt = min(max(dt, cfg.dt_min), cfg.t_max)

    samples: list[EnergySample] = []
    mass_trace: list[float] = []
    reaction_trace: list[float] = []
    react_integral_trace: list[float] = []
    react_integral = 0.0

    def record(t, state, used_dt):
        sample = EnergySample(
            t=t,
            A=functional_a(net, state),
            B=functional_b(net, bc, spec, gamma, state, p),
            u_min=float(state[net.interior].min()),
            u_max=float(state[net.interior].max()),
            dt=used_dt,
        )
        if samples and not t > samples[-1].t:
            # Steps near blow-up can underflow the resolution of t; keep the
            # newest state for that instant so times stay strictly increasing.
            samples[-1] = sample
            mass_trace[-1] = float(state[net.interior].sum())
            reaction_trace[-1] = float(np.sum(np.asarray(spec.f(state[net.interior]))))
            react_integral_trace[-1] = react_integral
            return
        samples.append(sample)
        mass_trace.append(float(state[net.interior].sum()))
        reaction_trace.append(float(np.sum(np.asarray(spec.f(state[net.interior])))))
        react_integral_trace.append(react_integral)

    t = 0.0
    record(t, u, dt)
    steps = 0
    verdict = "completed"
    T_detect = None
    T_detect_high = None
    last_recorded = 0

    while t < cfg.t_max:
        dt_try = min(dt, cfg.t_max - t)
        v, react_inc = _advance(net, bc, spec, u, p, dt_try, cfg.method)
        finite = bool(np.isfinite(v).all())
        rel = _rel_change(net, u, v) if finite else np.inf
        if not finite or rel > REL_HALVE:
            if dt_try <= cfg.dt_min * (1.0 + 1e-12):
                verdict = "blow-up" if not finite else "dt-underflow"
                if not finite and T_detect is None:
                    T_detect = t
                break
            dt = max(0.5 * dt_try, cfg.dt_min)
            continue
        t += dt_try
        u = v
        react_integral += react_inc
        steps += 1
        if steps % cfg.stride == 0:
            record(t, u, dt_try)
            last_recorded = steps
        umax = float(np.abs(u).max())
        if T_detect is None and umax >= M:
            T_detect = t
            verdict = "blow-up"
            if extend_to is None:
                break
        if T_detect is not None and extend_to is not None and umax >= extend_to:
            T_detect_high = t
            break
        if rel < REL_DOUBLE:
            dt = 2.0 * dt_try
        else:
            dt = dt_try
    if last_recorded != steps:
        record(t, u, dt)

    T_star = None
    T_err = None
    if verdict == "blow-up":
        T_star, T_err = _estimate_blowup_time(
            samples, q_lead, T_detect, T_detect_high, cfg.method
        )

    bound = None
    if condition_params is not None and samples:
        try:
            bound = blowup_time_bound(samples[0].A, samples[0].B, condition_params.alpha)
        except NonpositiveB0:
            bound = None

    diag = _diagnostics(
        samples, mass_trace, react_integral_trace, condition_params, bound, net, bc
    )
    return SimulationReport(
        samples=samples,
        verdict=verdict,
        T_detect=T_detect,
        T_star_estimate=T_star,
        T_star_error=T_err,
        bound_T=bound,
        diagnostics=diag,
        final_state=u,
        steps_taken=steps,
        mass_trace=mass_trace,
        reaction_trace=reaction_trace,
    )


def _estimate_blowup_time(samples, q_lead, T_detect, T_detect_high, method):
    """Extrapolated blow-up time.

    For a reaction with leading power q > 1 the quantity u_max**(1-q) decays
    linearly in time near blow-up; a least-squares line through the last 20
    samples is extrapolated to zero.  Without a known power, the detection
    times at thresholds M and 10M are Richardson-combined assuming
    first-order threshold convergence.  The error field is a sensitivity
    bar: tail extent, fit scatter and the scheme's step-cap accuracy (first
    order for Euler, fourth for rk4), not an exact-time guarantee.
    """

    def scheme_err(t_star):
        order = 1 if method == "euler" else 4
        return REL_HALVE**order * t_star

    if q_lead is not None and q_lead > 1.0:
        pos = [s for s in samples if s.u_max > 0]
        # Keep one sample per resolvable time: increments can underflow the
        # time variable near blow-up, and duplicate abscissae break the fit.
        tail = []
        for s in reversed(pos):
            if not tail or s.t < tail[-1].t:
                tail.append(s)
            if len(tail) == 20:
                break
        tail.reverse()
        if len(tail) >= 2:
            t_ref = tail[-1].t
            ts = np.array([s.t - t_ref for s in tail])  # centered for conditioning
            ws = np.array([s.u_max for s in tail]) ** (1.0 - q_lead)
            slope, intercept = np.polyfit(ts, ws, 1)
            if slope < 0:
                root = t_ref - intercept / slope
                t_star = max(float(root), T_detect if T_detect is not None else float(root))
                rms = float(np.sqrt(np.mean((slope * ts + intercept - ws) ** 2)))
                err = (
                    (t_star - tail[-1].t)
                    + rms / abs(float(slope))
                    + float(tail[-1].dt)
                    + scheme_err(t_star)
                )
                return t_star, err
        return T_detect, samples[-1].dt if samples else None
    if T_detect is not None and T_detect_high is not None and T_detect_high > T_detect:
        t_star = T_detect_high + (T_detect_high - T_detect) / 9.0
        err = (T_detect_high - T_detect) / 9.0 + samples[-1].dt + scheme_err(t_star)
        return t_star, err
    return T_detect, samples[-1].dt if samples else None


def _diagnostics(samples, mass, react_integral, params, bound, net, bc):
    tol = 1e-6

    min_val = min((s.u_min for s in samples), default=0.0)
    nonneg = all(s.u_min >= -1e-9 * max(1.0, abs(s.u_max)) for s in samples)

    b_incs = [
        samples[k + 1].B - samples[k].B + tol * (1.0 + abs(samples[k].B))
        for k in range(len(samples) - 1)
    ]
    b_ok = all(v >= 0 for v in b_incs)
    b_worst = min(b_incs, default=0.0)

    a_ok = a_worst = None
    env_ok = env_worst = None
    if params is not None and len(samples) >= 3:
        gaps = []
        for k in range(1, len(samples) - 1):
            span = samples[k + 1].t - samples[k - 1].t
            # Near blow-up the steps shrink below the resolution of the time
            # variable itself; spans there are roundoff, not measurements.
            if span <= 1e-14 * max(1.0, samples[k + 1].t):
                continue
            da = (samples[k + 1].A - samples[k - 1].A) / span
            # The secant slope dominates 2*alpha*B at the span's start: it
            # averages one-step slopes, each bounded below by its own left
            # value, and B is nondecreasing.  Comparing at the midpoint would
            # false-negative on uneven adaptive spacing.
            rhs = 2.0 * params.alpha * samples[k - 1].B
            gaps.append(da - rhs + tol * (1.0 + abs(rhs)))
        a_ok = all(g >= 0 for g in gaps)
        a_worst = min(gaps, default=0.0)
    if params is not None and bound is not None and samples:
        A0, B0 = samples[0].A, samples[0].B
        gaps = []
        for s in samples:
            if s.t >= bound * (1.0 - 1e-12):
                continue
            try:
                env = lower_envelope(s.t, A0, B0, params.alpha)
            except OutOfRange:
                continue
            gaps.append(s.A - env + tol * (1.0 + env))
        env_ok = all(g >= 0 for g in gaps)
        env_worst = min(gaps, default=0.0)

    mass_ok = mass_worst = None
    if bc.pure_neumann and not boundary_boundary_edges(net):
        errs = []
        for k in range(len(samples) - 1):
            dt = samples[k + 1].t - samples[k].t
            if dt <= 1e-14 * max(1.0, samples[k + 1].t):
                continue
            rate = (react_integral[k + 1] - react_integral[k]) / dt
            err = abs((mass[k + 1] - mass[k]) / dt - rate) - 1e-4 * (1.0 + abs(rate))
            errs.append(err)
        mass_ok = all(e <= 0 for e in errs)
        mass_worst = max(errs, default=0.0)

    return Diagnostics(
        nonneg_ok=nonneg,
        min_value=min_val,
        b_nondecreasing=b_ok,
        b_worst_increment=b_worst,
        a_growth_ok=a_ok,
        a_growth_worst=a_worst,
        envelope_ok=env_ok,
        envelope_worst=env_worst,
        mass_identity_ok=mass_ok,
        mass_identity_worst=mass_worst,
    )


@dataclass(frozen=True)
class CompareReport:
    """Ordering of two trajectories advanced with identical step sequences."""

    min_gap: float
    ordering_ok: bool
    strict_min: float | None
    first_sample_t: float | None
    sample_times: tuple[float, ...]
    tol: float


def compare(
    net: Network,
    bc: BoundaryCondition,
    spec,
    u0_high,
    u0_low,
    p: float,
    cfg: IntegratorConfig | None = None,
    tol: float = 1e-9,
) -> CompareReport:
    """Integrate an ordered pair in lockstep and report the worst gap.

    Both states see the same accepted step sequence (the adaptivity rule is
    driven by the worse of the two relative changes).  ``min_gap`` is the
    minimum of high - low over all vertices at every sample including t = 0;
    ``strict_min`` is the minimum over interior plus mu > 0 boundary vertices
    at samples with t > 0 only.
    """
    cfg = cfg or IntegratorConfig()
    require_simulatable(spec)
    uh = close_boundary(net, bc, np.asarray(u0_high, dtype=np.float64), p)
    ul = close_boundary(net, bc, np.asarray(u0_low, dtype=np.float64), p)
    if ((uh - ul) < 0).any():
        raise ConfigError("initial data must satisfy u0_high >= u0_low everywhere")

    strict_ids = np.concatenate([net.interior, bc.gamma_set])
    dt = cfg.dt_init if cfg.dt_init is not None else min(
        default_dt(net, spec, uh, p, cfg.safety), default_dt(net, spec, ul, p, cfg.safety)
    )
    dt = min(max(dt, cfg.dt_min), cfg.t_max)

    times = [0.0]
    min_gap = float((uh - ul).min())
    strict_min = None
    first_sample_t = None

    t = 0.0
    steps = 0
    while t < cfg.t_max:
        dt_try = min(dt, cfg.t_max - t)
        vh, _ = _advance(net, bc, spec, uh, p, dt_try, cfg.method)
        vl, _ = _advance(net, bc, spec, ul, p, dt_try, cfg.method)
        finite = bool(np.isfinite(vh).all() and np.isfinite(vl).all())
        rel = max(_rel_change(net, uh, vh), _rel_change(net, ul, vl)) if finite else np.inf
        if not finite or rel > REL_HALVE:
            if dt_try <= cfg.dt_min * (1.0 + 1e-12):
                break
            dt = max(0.5 * dt_try, cfg.dt_min)
            continue
        t += dt_try
        uh, ul = vh, vl
        steps += 1
        if steps % cfg.stride == 0:
            times.append(t)
            gap = uh - ul
            min_gap = min(min_gap, float(gap.min()))
            s = float(gap[strict_ids].min())
            strict_min = s if strict_min is None else min(strict_min, s)
            if first_sample_t is None:
                first_sample_t = t
        if max(float(np.abs(uh).max()), float(np.abs(ul).max())) >= cfg.blow_threshold:
            break
        if rel < REL_DOUBLE:
            dt = 2.0 * dt_try
        else:
            dt = dt_try

    return CompareReport(
        min_gap=min_gap,
        ordering_ok=bool(min_gap >= -tol),
        strict_min=strict_min,
        first_sample_t=first_sample_t,
        sample_times=tuple(times),
        tol=tol,
    )
