import math

import numpy as np
import pytest

from plapfd import (
    BlowUpError,
    ConfigurationError,
    GridField,
    HolderData,
    SchemeConfig,
    apply_dp,
    barenblatt_data,
    cfl_report,
    cfl_tau_max,
    constant_data,
    couple_h_to_r,
    explicit_step,
    iter_levels,
    ktilde,
    oscillatory_data,
    plan_config,
    sample_on_grid,
    solve,
    sqrt_cusp_data,
    stencil_1d,
    stencil_for,
    tent_data,
    time_interpolate,
)


def zero_data():
    return constant_data(0.0, 0.0)


def test_holder_data_validation():
    with pytest.raises(ConfigurationError):
        HolderData(u0=lambda x: x, f=lambda x: x, a=0.0, L_u0=1, L_f=0, sup_u0=1, sup_f=0)
    with pytest.raises(ConfigurationError):
        HolderData(u0=lambda x: x, f=lambda x: x, a=1.5, L_u0=1, L_f=0, sup_u0=1, sup_f=0)
    with pytest.raises(ConfigurationError):
        HolderData(u0=lambda x: x, f=lambda x: x, a=1.0, L_u0=-1, L_f=0, sup_u0=1, sup_f=0)
    with pytest.raises(ConfigurationError):
        HolderData(u0=3.0, f=lambda x: x, a=1.0, L_u0=1, L_f=0, sup_u0=1, sup_f=0)
    with pytest.raises(ConfigurationError):
        HolderData(
            u0=lambda x: x, f=lambda x: x, a=1.0, L_u0=1, L_f=0, sup_u0=1, sup_f=0,
            support_radius=-2.0,
        )


def test_ktilde_reference_values():
    # at a = 1, p = 2 the exponents collapse: Ktilde = 2 L sqrt(K2 M)
    assert ktilde(1.0, 2.0, 1.0, 123.456, 2.0, 2.0) == 4.0
    assert ktilde(0.7, 5.0, 0.0, 1.0, 1.0, 1.0) == 0.0
    val = ktilde(1.0, 4.0, 0.5, 1.657, 10.83, 2.0)
    assert val == pytest.approx(
        2.0 * 0.25 * math.sqrt(3.0 * 1.657**2 * 10.83 * 2.0), rel=1e-12
    )
    assert val == pytest.approx(6.678552837628823, rel=1e-12)


def test_ktilde_validation():
    with pytest.raises(ValueError):
        ktilde(0.0, 3.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ktilde(0.5, 1.5, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ktilde(0.5, 3.0, -1.0, 1.0, 1.0, 1.0)


def test_cfl_tau_max_p2_is_half_r_squared():
    for r in (0.5, 0.1, 0.02):
        assert cfl_tau_max(r, 1.0, 2.0, 7.0, 3.0, 10.0, 5.0, 2.0) == 0.5 * r**2


def test_cfl_tau_max_exponents():
    # a = 1: quadratic in r for every p
    t1 = cfl_tau_max(0.1, 1.0, 7.0, 1.0, 0.0, 1.0, 2.0, 2.0)
    t2 = cfl_tau_max(0.2, 1.0, 7.0, 1.0, 0.0, 1.0, 2.0, 2.0)
    assert t2 / t1 == pytest.approx(4.0, rel=1e-12)
    # a = 1/2, p = 4: cubic in r
    t1 = cfl_tau_max(0.1, 0.5, 4.0, 1.0, 0.0, 1.0, 2.0, 2.0)
    t2 = cfl_tau_max(0.2, 0.5, 4.0, 1.0, 0.0, 1.0, 2.0, 2.0)
    assert t2 / t1 == pytest.approx(8.0, rel=1e-12)


def test_cfl_tau_max_validation():
    with pytest.raises(ValueError):
        cfl_tau_max(-0.1, 1.0, 2.0, 1.0, 0.0, 1.0, 0.0, 2.0)
    with pytest.raises(ValueError):
        cfl_tau_max(0.1, 1.0, 2.0, -1.0, 0.0, 1.0, 0.0, 2.0)


def test_scheme_config_step_count_consistency():
    SchemeConfig(p=3.0, d=1, T=1.0, r=0.1, h=0.1, tau=0.01, N=100, half_width=2.0)
    with pytest.raises(ConfigurationError):
        SchemeConfig(p=3.0, d=1, T=1.0, r=0.1, h=0.1, tau=0.01, N=90, half_width=2.0)
    with pytest.raises(ConfigurationError):
        SchemeConfig(
            p=3.0, d=1, T=1.0, r=0.1, h=0.1, tau=0.01, N=100, half_width=2.0,
            cfl_mode="adaptive",
        )
    with pytest.raises(ConfigurationError):
        SchemeConfig(
            p=3.0, d=1, T=1.0, r=0.1, h=0.1, tau=0.01, N=100, half_width=2.0,
            extension="mirror",
        )


def test_scheme_config_times():
    cfg = SchemeConfig(p=3.0, d=1, T=1.0, r=0.25, h=0.25, tau=0.25, N=4, half_width=1.0)
    np.testing.assert_array_equal(cfg.times(), [0.0, 0.25, 0.5, 0.75, 1.0])


def test_stencil_for_dimension_rules():
    cfg = SchemeConfig(p=3.0, d=1, T=1.0, r=0.2, h=0.1, tau=0.1, N=10, half_width=1.0)
    with pytest.raises(ConfigurationError):
        stencil_for(cfg)
    cfg2 = SchemeConfig(p=2.0, d=2, T=1.0, r=1.0, h=0.5, tau=0.1, N=10, half_width=2.0)
    st = stencil_for(cfg2)
    assert len(st) == 8


def test_plan_config_geometry():
    data = zero_data()
    cfg = plan_config(3.0, 1, 1.0, 2.0, data, r=0.05)
    assert cfg.h == 0.05 and cfg.r == 0.05
    with pytest.raises(ConfigurationError):
        plan_config(3.0, 1, 1.0, 2.0, data)
    with pytest.raises(ConfigurationError):
        plan_config(3.0, 2, 1.0, 2.0, data)
    cfg2 = plan_config(3.0, 2, 1.0, 2.0, data, r=0.4)
    assert cfg2.h == couple_h_to_r(0.4, 3.0, 2)


def test_plan_config_explicit_tau_is_kept_verbatim():
    data = tent_data()
    tau = 0.1 * 0.1 / 2
    cfg = plan_config(2.0, 1, 0.2, 3.0, data, h=0.1, tau=tau)
    assert cfg.tau == tau
    assert cfg.N == 40
    cfg2 = plan_config(2.0, 1, 0.2, 3.0, data, h=0.1, num_steps=25)
    assert cfg2.N == 25
    assert cfg2.tau == 0.2 / 25


def test_plan_config_practical_step_target():
    data = tent_data()
    cfg = plan_config(4.0, 1, 1.0, 2.0, data, h=0.1, c_practical=0.2)
    # a = 1 data: target 0.2 * 0.01 = 0.002, so exactly 500 steps
    assert cfg.N == 500
    assert cfg.tau == pytest.approx(0.002, rel=1e-12)


def test_plan_config_theoretical_step_respects_bound():
    data = sqrt_cusp_data()
    cfg = plan_config(3.0, 1, 0.1, 2.0, data, h=0.1, cfl_mode="theoretical")
    rep = cfl_report(cfg, data)
    assert cfg.tau <= rep["tau_max_theoretical"] * (1.0 + 1e-12)
    assert rep["M_bound"] == 2.0
    assert rep["stencil_size"] == 2
    assert math.isfinite(rep["Ktilde"]) and rep["Ktilde"] > 0.0
    assert 0.0 < rep["C"] <= 1.0


def test_plan_config_theoretical_needs_tabulated_constants():
    with pytest.raises(ConfigurationError):
        plan_config(3.0, 4, 1.0, 2.0, zero_data(), r=0.5, cfl_mode="theoretical")


def test_explicit_step_heat_by_hand():
    field = GridField(
        d=1, h=1.0, half_width=2.0, values=np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    )
    f = field.with_values(np.zeros(5))
    st = stencil_1d(1.0, 2.0)
    out = explicit_step(field, st, f, 0.25)
    np.testing.assert_array_equal(out.values, [0.0, 0.25, 0.5, 0.25, 0.0])


def test_explicit_step_tau_zero_is_identity():
    rng = np.random.default_rng(11)
    field = GridField(d=1, h=0.5, half_width=2.0, values=rng.normal(size=9))
    f = field.with_values(rng.normal(size=9))
    out = explicit_step(field, stencil_1d(0.5, 3.0), f, 0.0)
    np.testing.assert_array_equal(out.values, field.values)


def test_explicit_step_constant_field_stays_constant():
    field = GridField(d=1, h=0.5, half_width=2.0, values=np.full(9, 3.25), extension="boundary")
    f = field.with_values(np.zeros(9))
    out = explicit_step(field, stencil_1d(0.5, 4.0), f, 0.01)
    np.testing.assert_array_equal(out.values, np.full(9, 3.25))


def test_explicit_step_geometry_mismatch():
    field = GridField(d=1, h=0.5, half_width=2.0, values=np.zeros(9))
    f_other = GridField(d=1, h=0.25, half_width=2.0, values=np.zeros(17))
    with pytest.raises(ConfigurationError):
        explicit_step(field, stencil_1d(0.5, 3.0), f_other, 0.01)
    with pytest.raises(ConfigurationError):
        explicit_step(field, stencil_1d(0.5, 3.0), field.with_values(np.zeros(9)), -0.1)


def test_blow_up_names_node_and_step():
    data = oscillatory_data(0.1)
    cfg = plan_config(4.0, 1, 1.0, 1.0, data, h=0.1, num_steps=10)
    with pytest.raises(BlowUpError) as exc:
        solve(cfg, data)
    err = exc.value
    assert err.step is not None and 1 <= err.step <= 10
    assert isinstance(err.node, tuple) and len(err.node) == 1
    assert "CFL" in str(err)


def test_solve_zero_data_stays_zero():
    cfg = plan_config(3.0, 1, 0.5, 1.0, zero_data(), h=0.25, num_steps=8)
    traj = solve(cfg, zero_data())
    assert len(traj.levels) == 9
    for lev in traj.levels:
        assert np.all(lev.values == 0.0)


def test_solve_affine_in_time_is_exact():
    # u0 = 0, f = 1: the operator vanishes on constants, so U^j = t_j at
    # every node; the constant-trace extension keeps the edges honest
    data = constant_data(0.0, 1.0)
    for d in (1, 2):
        cfg = plan_config(
            3.0, d, 1.0, 1.0, data, h=0.25, r=0.25 if d == 1 else 0.5,
            num_steps=16, extension="boundary",
        )
        traj = solve(cfg, data)
        for j, lev in enumerate(traj.levels):
            expect = traj.times[j]
            assert np.max(np.abs(lev.values - expect)) <= 1e-12 * max(1, j)


def test_solve_level_zero_samples_u0():
    data = tent_data()
    cfg = plan_config(3.0, 1, 0.02, 2.0, data, h=0.1, num_steps=20)
    traj = solve(cfg, data)
    direct = sample_on_grid(data.u0, 1, 0.1, 2.0)
    np.testing.assert_array_equal(traj.levels[0].values, direct.values)


def test_solve_is_deterministic():
    data = sqrt_cusp_data()
    cfg = plan_config(3.0, 1, 0.05, 1.5, data, h=0.1, num_steps=50)
    t1 = solve(cfg, data)
    t2 = solve(cfg, data)
    for a, b in zip(t1.levels, t2.levels):
        np.testing.assert_array_equal(a.values, b.values)


def test_iter_levels_matches_solve():
    data = tent_data()
    cfg = plan_config(4.0, 1, 0.1, 2.0, data, h=0.2, num_steps=25)
    streamed = list(iter_levels(cfg, data))
    traj = solve(cfg, data)
    assert len(streamed) == len(traj.levels)
    for a, b in zip(streamed, traj.levels):
        np.testing.assert_array_equal(a.values, b.values)


def test_theoretical_mode_rejects_oversized_tau():
    data = tent_data()
    cfg = plan_config(3.0, 1, 1.0, 2.0, data, h=0.1, num_steps=10, cfl_mode="theoretical")
    with pytest.raises(ConfigurationError, match="theoretical bound"):
        solve(cfg, data)


def test_zero_extension_margin_is_asserted():
    data = barenblatt_data(4.0, horizon=1.0)
    # support radius 2^(1/6) ~ 1.12; half_width 1.0 leaves no room
    cfg = plan_config(4.0, 1, 1.0, 1.0, data, h=0.1, num_steps=10)
    with pytest.raises(ConfigurationError, match="support radius"):
        solve(cfg, data)
    # boundary extension skips the margin requirement
    cfg2 = plan_config(4.0, 1, 1.0, 1.0, data, h=0.1, num_steps=4000, extension="boundary")
    solve(cfg2, data)


def test_time_interpolate_domain_and_exactness():
    data = tent_data()
    cfg = plan_config(2.0, 1, 0.2, 2.0, data, h=0.2, tau=0.02)
    traj = solve(cfg, data)
    with pytest.raises(ValueError):
        time_interpolate(traj, 0, -0.001)
    with pytest.raises(ValueError):
        time_interpolate(traj, 0, 0.2 + 1e-9)
    for j in (0, 3, cfg.N):
        assert time_interpolate(traj, 0, traj.times[j]) == traj.levels[j].value_at(0)
    mid = 0.5 * (traj.times[4] + traj.times[5])
    lo = traj.levels[4].value_at((2,))
    hi = traj.levels[5].value_at((2,))
    assert time_interpolate(traj, (2,), mid) == pytest.approx(0.5 * (lo + hi), rel=1e-15)


def test_time_interpolate_satisfies_slab_identity():
    # between levels, U(x,t) = U(x,t_j) + (t - t_j) * (D U^j(x) + f(x))
    data = tent_data()
    cfg = plan_config(3.0, 1, 0.1, 1.5, data, h=0.2, num_steps=100)
    traj = solve(cfg, data)
    st = stencil_for(cfg)
    rng = np.random.default_rng(9)
    n = traj.levels[0].n
    for _ in range(50):
        alpha = int(rng.integers(-n, n + 1))
        t = float(rng.uniform(0.0, cfg.T))
        j = min(int(t / cfg.tau), cfg.N - 1)
        tj = traj.times[j]
        lhs = time_interpolate(traj, alpha, t)
        rhs = traj.levels[j].value_at(alpha) + (t - tj) * apply_dp(st, traj.levels[j], alpha)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)


def test_tent_and_cusp_data_certificates():
    tent = tent_data(2.0)
    x = np.linspace(-2, 2, 801)
    vals = tent.u0(x)
    assert vals.max() == tent.sup_u0 == 2.0
    slopes = np.abs(np.diff(vals)) / np.diff(x)
    assert slopes.max() <= tent.L_u0 * (1 + 1e-12)

    cusp = sqrt_cusp_data()
    vals = cusp.u0(x)
    assert vals.max() <= cusp.sup_u0
    # the maximum sits at |x| = 1/3 exactly
    assert cusp.u0(np.array([1.0 / 3.0]))[0] == pytest.approx(cusp.sup_u0, rel=1e-15)
    assert cusp.a == 0.5
    holder = np.abs(np.diff(vals)) / np.sqrt(np.diff(x))
    assert holder.max() <= cusp.L_u0 * (1 + 1e-6)


def test_oscillatory_data_alternates_on_grid():
    data = oscillatory_data(0.25, amplitude=3.0)
    x = np.arange(-4, 5) * 0.25
    vals = data.u0(x)
    np.testing.assert_allclose(np.abs(vals), 3.0, rtol=1e-12)
    assert np.all(vals[1:] * vals[:-1] < 0.0)
