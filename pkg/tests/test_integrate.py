import numpy as np
import pytest

from plapnet import (
    ConditionParams,
    ConfigError,
    IntegratorConfig,
    PowerLaw,
    close_boundary,
    compare,
    default_dt,
    simulate,
    step,
)

from conftest import load_problem, path_doc, random_problem_doc

CUBE = PowerLaw(lam=1.0, q=3.0)


def neumann_path():
    return load_problem(path_doc(mu1=1.0, sigma1=0.0))


def test_step_zero_state_is_equilibrium():
    net, bc = load_problem(path_doc())
    u = np.zeros(net.n)
    for method in ("euler", "rk4"):
        v = step(net, bc, CUBE, u, 2.0, 0.01, method)
        assert np.array_equal(v, u)


def test_step_neumann_constant_euler():
    net, bc = neumann_path()
    c, dt = 1.3, 0.01
    u = close_boundary(net, bc, np.array([c]), 2.0)
    v = step(net, bc, CUBE, u, 2.0, dt)
    assert v[net.index("x")] == pytest.approx(c + dt * c**3, rel=1e-12)


def test_step_dirichlet_hand_value():
    net, bc = load_problem(path_doc())
    u = close_boundary(net, bc, np.array([1.0]), 2.0)
    v = step(net, bc, CUBE, u, 2.0, 0.01)
    # Euler: 1 + 0.01 * (-2 + 1) = 0.99.
    assert v[net.index("x")] == pytest.approx(0.99, rel=1e-14)


def test_default_dt_positive_and_small():
    net, _ = neumann_path()
    u = np.ones(net.n)
    dt = default_dt(net, CUBE, u, 2.0)
    assert 0.0 < dt < 0.1


def test_step_raises_on_overflow():
    from plapnet import NonFinite

    net, bc = neumann_path()
    u = np.full(net.n, 1e200)
    with pytest.raises(NonFinite):
        step(net, bc, CUBE, u, 2.0, 1.0)


def test_scalar_blowup_oracle():
    net, bc = neumann_path()
    for q, t_star in ((2.0, 1.0), (3.0, 0.5)):
        spec = PowerLaw(lam=1.0, q=q)
        u0 = np.zeros(net.n)
        u0[net.interior] = 1.0
        rep = simulate(net, bc, spec, u0, 2.0, IntegratorConfig(t_max=3.0, method="rk4"))
        assert rep.verdict == "blow-up"
        assert abs(rep.T_star_estimate - t_star) <= 0.02 * t_star
        assert rep.T_detect <= rep.T_star_estimate


def test_linear_reaction_completes_with_exponential_growth():
    net, bc = neumann_path()
    spec = PowerLaw(lam=1.0, q=1.0)
    u0 = np.zeros(net.n)
    u0[net.interior] = 0.7
    rep = simulate(net, bc, spec, u0, 2.0, IntegratorConfig(t_max=1.0, method="rk4"))
    assert rep.verdict == "completed"
    assert rep.samples[-1].t == pytest.approx(1.0)
    expected = 0.7 * np.exp(1.0)
    assert abs(rep.samples[-1].u_max - expected) <= 0.01 * expected


def test_dt_underflow_verdict():
    net, bc = neumann_path()
    u0 = np.zeros(net.n)
    u0[net.interior] = 100.0
    cfg = IntegratorConfig(dt_init=1e-2, dt_min=1e-3, t_max=1.0, blow_threshold=150.0)
    rep = simulate(net, bc, CUBE, u0, 2.0, cfg)
    assert rep.verdict == "dt-underflow"


def test_simulate_validation():
    net, bc = neumann_path()
    u0 = np.zeros(net.n)
    with pytest.raises(ConfigError):
        simulate(net, bc, CUBE, u0, 2.0)  # trivial initial data
    u0[net.interior] = -1.0
    with pytest.raises(ConfigError):
        simulate(net, bc, CUBE, u0, 2.0)  # negative initial data
    u0[net.interior] = 10.0
    with pytest.raises(ConfigError):
        simulate(net, bc, CUBE, u0, 2.0, IntegratorConfig(blow_threshold=5.0))
    with pytest.raises(ConfigError):
        IntegratorConfig(method="leapfrog")
    with pytest.raises(ConfigError):
        IntegratorConfig(dt_init=1e-12, dt_min=1e-9)
    with pytest.raises(ConfigError):
        simulate(net, bc, PowerLaw(lam=1.0, q=0.5), u0, 2.0)  # not Lipschitz at 0


def test_nonnegativity_preserved():
    rng = np.random.default_rng(0)
    for _ in range(10):
        net, bc = load_problem(random_problem_doc(rng, n_interior=(1, 6)))
        p = float(rng.choice([1.5, 2.0, 3.0]))
        u0 = np.zeros(net.n)
        u0[net.interior] = rng.uniform(0.0, 1.5, size=len(net.interior))
        if not u0[net.interior].any():
            u0[net.interior][0] = 1.0
        spec = PowerLaw(lam=float(rng.uniform(0.5, 2.0)), q=2.0)
        rep = simulate(net, bc, spec, u0, p, IntegratorConfig(t_max=0.2, blow_threshold=1e6))
        assert rep.diagnostics.nonneg_ok
        assert (rep.final_state >= -1e-9).all()


def test_mass_identity_neumann():
    rng = np.random.default_rng(1)
    for _ in range(6):
        net, bc = load_problem(
            random_problem_doc(rng, n_interior=(2, 6), bc_mode="neumann", allow_bb=False)
        )
        u0 = np.zeros(net.n)
        u0[net.interior] = rng.uniform(0.2, 1.0, size=len(net.interior))
        spec = PowerLaw(lam=1.0, q=2.0)
        rep = simulate(net, bc, spec, u0, 2.0, IntegratorConfig(t_max=0.3, stride=1))
        assert rep.diagnostics.mass_identity_ok
        # Literal per-pair check from the recorded traces (Euler quadrature):
        ts = [s.t for s in rep.samples]
        for k in range(len(ts) - 1):
            dt = ts[k + 1] - ts[k]
            if dt <= 1e-14:
                continue
            lhs = (rep.mass_trace[k + 1] - rep.mass_trace[k]) / dt
            rhs = rep.reaction_trace[k]
            assert abs(lhs - rhs) <= 1e-4 * (1.0 + abs(rhs))


def test_mass_identity_not_reported_with_absorption():
    net, bc = load_problem(path_doc())  # Dirichlet: boundary flux active
    u0 = np.zeros(net.n)
    u0[net.interior] = 1.0
    rep = simulate(net, bc, CUBE, u0, 2.0, IntegratorConfig(t_max=0.05))
    assert rep.diagnostics.mass_identity_ok is None


def test_blowup_diagnostics_with_condition_params():
    net, bc = neumann_path()
    u0 = np.zeros(net.n)
    u0[net.interior] = 1.0
    params = ConditionParams(alpha=3.5, beta=0.0, gamma=0.05, p=2.0, lambda0=0.0)
    rep = simulate(
        net, bc, CUBE, u0, 2.0, IntegratorConfig(t_max=3.0, method="rk4"), params
    )
    d = rep.diagnostics
    assert rep.verdict == "blow-up"
    assert rep.bound_T is not None
    assert rep.T_detect <= rep.bound_T * 1.05
    assert d.b_nondecreasing and d.a_growth_ok and d.envelope_ok


def test_blowup_estimate_insensitive_to_dt_init():
    net, bc = neumann_path()
    u0 = np.zeros(net.n)
    u0[net.interior] = 1.0
    base = simulate(
        net, bc, CUBE, u0, 2.0, IntegratorConfig(dt_init=1e-3, t_max=3.0, method="rk4")
    )
    halved = simulate(
        net, bc, CUBE, u0, 2.0, IntegratorConfig(dt_init=5e-4, t_max=3.0, method="rk4")
    )
    assert abs(base.T_star_estimate - halved.T_star_estimate) <= base.T_star_error


def test_table_reaction_blowup_uses_threshold_extrapolation():
    # Piecewise-linear reaction growing to a steep final segment: no known
    # leading power, so the estimate comes from the two-threshold fallback.
    from plapnet import TableNonlinearity

    net, bc = neumann_path()
    spec = TableNonlinearity((0.0, 1.0, 2.0, 5.0), (0.0, 1.0, 8.0, 125.0))
    u0 = np.zeros(net.n)
    u0[net.interior] = 1.0
    rep = simulate(net, bc, spec, u0, 2.0, IntegratorConfig(t_max=50.0, blow_threshold=1e6))
    assert rep.verdict == "blow-up"
    assert rep.T_star_estimate >= rep.T_detect


def test_compare_identical_initial_data():
    net, bc = load_problem(path_doc())
    u = close_boundary(net, bc, np.array([1.0]), 2.0)
    rep = compare(net, bc, CUBE, u, u, 2.0, IntegratorConfig(t_max=0.05))
    assert rep.min_gap == 0.0
    assert rep.ordering_ok


def test_compare_ordered_initial_data():
    rng = np.random.default_rng(2)
    spec = PowerLaw(lam=1.0, q=2.0)
    for _ in range(8):
        net, bc = load_problem(random_problem_doc(rng, n_interior=(1, 6)))
        p = float(rng.choice([1.5, 2.0, 3.0]))
        low = rng.uniform(0.1, 1.0, size=len(net.interior))
        rep = compare(
            net,
            bc,
            spec,
            close_boundary(net, bc, low + 0.1, p),
            close_boundary(net, bc, low, p),
            p,
            IntegratorConfig(t_max=0.05),
        )
        assert rep.ordering_ok
        assert rep.min_gap >= -1e-9


def test_compare_strict_gap_propagates():
    rng = np.random.default_rng(3)
    spec = PowerLaw(lam=1.0, q=2.0)
    for _ in range(5):
        net, bc = load_problem(random_problem_doc(rng, n_interior=(2, 6)))
        p = float(rng.choice([2.0, 3.0]))
        low = rng.uniform(0.1, 1.0, size=len(net.interior))
        high = low.copy()
        high[int(rng.integers(0, len(low)))] += 0.5
        # First sample after >= 8 steps, beyond the interior diameter, so the
        # strict gap has reached every free vertex by then.
        rep = compare(
            net,
            bc,
            spec,
            close_boundary(net, bc, high, p),
            close_boundary(net, bc, low, p),
            p,
            IntegratorConfig(dt_init=1e-4, t_max=0.1, stride=8),
        )
        assert rep.ordering_ok
        assert len(rep.sample_times) > 1
        assert rep.first_sample_t is not None and rep.first_sample_t > 0
        assert rep.strict_min is not None and rep.strict_min > 0


def test_compare_rejects_unordered():
    net, bc = load_problem(path_doc())
    hi = close_boundary(net, bc, np.array([1.0]), 2.0)
    lo = close_boundary(net, bc, np.array([2.0]), 2.0)
    with pytest.raises(ConfigError):
        compare(net, bc, CUBE, hi, lo, 2.0)
