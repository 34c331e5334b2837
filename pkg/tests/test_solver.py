from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degenflow.errors import ConfigurationError, StepRejected
from degenflow.model import Coefficients, State, energy, grid_state, heat_content, kinetic_energy, momentum
from degenflow.solver import (PiecewiseLaw, SolverConfig, cfl_dt, coefficient_piecewise_44, regularize, run,
                              step_energy, step_primitive)

unit = Coefficients()


def two_caps(n=128, half=10.0):
    return grid_state(0.0, -half, half, n, lambda x: np.maximum(0.0, 10 - 10 * (x + 2) ** 2),
                      lambda x: np.maximum(0.0, 15 - 15 * (x - 2) ** 2))


def test_piecewise_coefficient_values():
    assert coefficient_piecewise_44(0.0, 1.7) == 0.0
    B = 2.0
    seam = 3 * B**2 / 8
    lower = B - math.sqrt(B**2 - 2 * seam)
    upper = 2 * seam / B - B / 4
    assert lower == pytest.approx(1.0) and upper == pytest.approx(1.0)
    assert coefficient_piecewise_44(seam, B) == pytest.approx(1.0)
    d = 1e-7
    left = (coefficient_piecewise_44(seam, B) - coefficient_piecewise_44(seam - d, B)) / d
    right = (coefficient_piecewise_44(seam + d, B) - coefficient_piecewise_44(seam, B)) / d
    assert left == pytest.approx(right, rel=1e-5)


@given(st.floats(0.1, 5), st.floats(0, 0.5))
def test_piecewise_coefficient_on_manifold(B, frac):
    v = frac * B
    assert coefficient_piecewise_44(B * v - v * v / 2, B) == pytest.approx(v, rel=1e-9, abs=1e-12)


@given(st.floats(0.2, 4))
def test_piecewise_pressure_derivative(B):
    law = PiecewiseLaw(B)
    w = np.linspace(0.01, B**2, 60)
    d = 1e-6
    fd = (law.pressure(w + d) - law.pressure(w - d)) / (2 * d)
    assert np.allclose(fd, law.eta(w), rtol=1e-5, atol=1e-7)
    assert abs(law.pressure(0.0)) <= 1e-14 * B**3


def test_cfl_dt_formula():
    s = grid_state(0.0, 0.0, 1.0, 10, lambda x: 0 * x, lambda x: 1 + 0 * x)
    cfg = SolverConfig(t_end=1.0, law=unit)
    assert cfl_dt(s, cfg) == pytest.approx(2.25e-3, rel=1e-14)
    wide = grid_state(0.0, 0.0, 2.0, 10, lambda x: 0 * x, lambda x: 1 + 0 * x)
    assert cfl_dt(wide, cfg) == pytest.approx(4 * cfl_dt(s, cfg), rel=1e-14)


def test_cfl_dt_dry_state_jumps_to_next_target():
    s = grid_state(0.0, 0.0, 1.0, 16, lambda x: np.sin(x), lambda x: 0 * x)
    cfg = SolverConfig(t_end=1.0, snapshot_times=(0.0, 0.3, 1.0), law=unit)
    assert cfl_dt(s, cfg) == pytest.approx(0.3)


def test_cfl_dt_sink_cap():
    s = grid_state(0.0, 0.0, 1.0, 4, lambda x: 0 * x, lambda x: 4 + 0 * x)
    law = Coefficients(sink_a=100.0)
    dt = cfl_dt(s, SolverConfig(law=law))
    assert dt * 100.0 * math.sqrt(4.0) <= 0.45 * (1 + 1e-12)


def test_energy_form_cfl_uses_gap():
    s = grid_state(0.0, 0.0, 1.0, 10, lambda x: 0 * x, lambda x: 1 + 0 * x)
    law = Coefficients(eta0=1.0, kappa0=3.0)
    dt = cfl_dt(s, SolverConfig(form="energy", law=law))
    assert dt == pytest.approx(0.45 * 0.01 / (2 * (2.0 + 1.0)))


@pytest.mark.parametrize("step", [step_primitive, step_energy])
def test_constant_state_is_fixed(step):
    s = grid_state(0.0, 0.0, 1.0, 20, lambda x: 0.7 + 0 * x, lambda x: 2 + 0 * x)
    new, rep = step(s, 1e-4, unit)
    assert np.array_equal(new.v, s.v) and np.array_equal(new.w, s.w)
    assert rep.clamped_mass == 0.0 and new.t == pytest.approx(1e-4)


@pytest.mark.parametrize("step", [step_primitive, step_energy])
def test_step_rejects_cfl_violation(step):
    s = grid_state(0.0, 0.0, 1.0, 20, lambda x: 0 * x, lambda x: 1 + x)
    with pytest.raises(StepRejected):
        step(s, 1.0, unit)
    with pytest.raises(StepRejected):
        step(s, -1e-6, unit)


def test_regularize():
    w0 = np.array([0.0, 0.5, 2e-4, 3.0])
    assert np.array_equal(regularize(w0, 0.0), w0)
    assert np.array_equal(regularize(np.zeros(5), 1e-3), np.full(5, 1e-3))
    h = 0.1
    added = h * np.sum(regularize(w0, 1e-3) - w0)
    assert added == pytest.approx(h * np.sum(np.maximum(0.0, 1e-3 - w0)), rel=1e-15)
    with pytest.raises(ConfigurationError):
        regularize(w0, -1.0)


def test_config_validation():
    for kw in (dict(form="implicit"), dict(cfl=0.6), dict(cfl=0.0), dict(snapshot_times=(0.5, 0.1)),
               dict(t_end=1.0, snapshot_times=(2.0,)), dict(w_clamp_tol=-1.0), dict(dissipation_ps=(0.5,))):
        with pytest.raises(ConfigurationError):
            SolverConfig(**kw)


def test_run_zero_horizon():
    s = two_caps(32)
    ser = run(s, SolverConfig(t_end=0.0, snapshot_times=(0.0,), law=unit))
    assert len(ser.states) == 1 and ser.states[0] is s and ser.n_steps == 0


def test_run_trivial_steady_state():
    s = grid_state(0.0, -1.0, 1.0, 32, lambda x: np.cos(3 * x), lambda x: 0 * x)
    ser = run(s, SolverConfig(t_end=1.0, snapshot_times=(0.0, 0.5, 1.0), law=unit))
    assert [x.t for x in ser.states] == [0.0, 0.5, 1.0]
    for x in ser.states:
        assert np.array_equal(x.v, s.v) and np.array_equal(x.w, s.w)


def test_run_lands_on_snapshot_times():
    times = (0.0, 0.01, 0.0123, 0.05)
    ser = run(two_caps(64), SolverConfig(t_end=0.05, snapshot_times=times, law=unit))
    assert tuple(ser.times) == times
    assert ser.at(0.0123).t == 0.0123
    with pytest.raises(KeyError):
        ser.at(0.02)


@pytest.mark.parametrize("form", ["primitive", "energy"])
def test_two_cap_run_conserves_and_dissipates(form):
    law = Coefficients(eta0=2.0, alpha=1.0, kappa0=0.5, beta=1.0)
    ser = run(two_caps(128), SolverConfig(form=form, t_end=1.2, snapshot_times=(0.0, 0.6, 1.2), law=law))
    d = ser.diag
    assert np.max(np.abs(d["momentum"] - d["momentum"][0])) <= 1e-12 * abs(d["momentum"][0])
    if form == "energy":
        assert np.max(np.abs(d["energy"] - d["energy"][0])) <= 1e-12 * d["energy"][0]
    k = [kinetic_energy(s) for s in ser.states]
    assert k[0] > k[1] > k[2]
    assert np.all(np.diff(d["kinetic"]) <= 1e-12 * d["kinetic"][:-1])


def test_piecewise_law_keeps_energy_proportional():
    B = 1.0
    law = PiecewiseLaw(B)
    v0 = lambda x: 0.4 * np.maximum(0.0, 1 - x * x)  # noqa: E731
    s = grid_state(0.0, -3.0, 3.0, 96, v0, lambda x: B * v0(x) - v0(x) ** 2 / 2)
    ser = run(s.replace(e=B * s.v), SolverConfig(form="energy", t_end=0.2, snapshot_times=(0.0, 0.1, 0.2), law=law))
    for x in ser.states:
        assert np.max(np.abs(x.e - B * x.v)) <= 1e-12


def test_sink_removes_energy():
    law = Coefficients(sink_a=0.5)
    s = grid_state(0.0, 0.0, 1.0, 32, lambda x: 0.2 * np.cos(np.pi * x), lambda x: 1 + 0.3 * np.cos(np.pi * x))
    ser = run(s, SolverConfig(form="energy", t_end=0.05, law=law))
    e = ser.diag["energy"]
    assert np.all(np.diff(e) < 0)
    assert np.allclose(-np.diff(e), ser.diag["sink_loss"][1:], rtol=1e-9)


def test_parabolic_scaling_is_exact_at_fixed_resolution():
    # (v, w)(t, x) -> (v, w)(4t, 2x): same N on half the domain and a quarter of the time
    v0 = lambda x: np.sin(2 * x)  # noqa: E731
    w0 = lambda x: 1 + 0.5 * np.cos(x)  # noqa: E731
    cfg = SolverConfig(t_end=0.2, snapshot_times=(0.2,), law=unit)
    big = run(grid_state(0.0, 0.0, 4.0, 64, v0, w0), cfg).states[-1]
    small = run(grid_state(0.0, 0.0, 2.0, 64, lambda y: v0(2 * y), lambda y: w0(2 * y)),
                SolverConfig(t_end=0.05, snapshot_times=(0.05,), law=unit)).states[-1]
    assert np.allclose(small.v, big.v, rtol=0, atol=1e-12)
    assert np.allclose(small.w, big.w, rtol=0, atol=1e-12)


@st.composite
def initial_states(draw):
    n = draw(st.integers(16, 48))
    k = draw(st.integers(1, 3))
    av = draw(st.lists(st.floats(-2, 2), min_size=k, max_size=k))
    aw = draw(st.lists(st.floats(-1, 1), min_size=k, max_size=k))
    base = draw(st.floats(-0.5, 1.5))
    x = (np.arange(n) + 0.5) / n
    v = sum(a * np.cos((j + 1) * np.pi * x) for j, a in enumerate(av))
    w = np.clip(base + sum(a * np.sin((j + 1) * np.pi * x) for j, a in enumerate(aw)), 0.0, None)
    if not np.any(w > 0):
        w[n // 2] = 1.0
    return State(t=0.0, x0=0.0, h=1.0 / n, v=v, w=w)


laws = st.builds(Coefficients, eta0=st.floats(0.3, 3), alpha=st.sampled_from([0.5, 1.0, 2.0]),
                 kappa0=st.floats(0.3, 3), beta=st.sampled_from([0.5, 1.0, 2.0]))


@settings(max_examples=25)
@given(initial_states(), laws, st.sampled_from(["primitive", "energy"]))
def test_run_invariants(s0, law, form):
    ser = run(s0, SolverConfig(form=form, t_end=0.02, snapshot_times=(0.0, 0.01, 0.02), law=law))
    d = ser.diag
    scale = max(abs(d["momentum"][0]), s0.h * np.sum(np.abs(s0.v)), 1e-300)
    assert np.max(np.abs(d["momentum"] - d["momentum"][0])) <= 1e-12 * scale + 1e-15
    if form == "energy":
        assert np.max(np.abs(d["energy"] - d["energy"][0])) <= 1e-12 * d["energy"][0]
    else:
        assert np.all(np.diff(d["heat"]) >= -1e-12 * d["heat"][:-1])
    for s in ser.states:
        assert np.all(s.w >= 0)
        assert s.v.min() >= s0.v.min() - 1e-12 and s.v.max() <= s0.v.max() + 1e-12
    assert ser.clamped_mass <= 1e-10 * energy(s0)


@settings(max_examples=15)
@given(initial_states())
def test_energy_primitive_forms_agree_to_first_order(s0):
    cfg = dict(t_end=0.01, snapshot_times=(0.01,), law=unit)
    a = run(s0, SolverConfig(form="primitive", **cfg)).states[-1]
    b = run(s0, SolverConfig(form="energy", **cfg)).states[-1]
    assert np.max(np.abs(a.v - b.v)) < 0.5
    assert abs(heat_content(a) - heat_content(b)) < 0.1 * max(energy(s0), 1.0)
    assert momentum(a) == pytest.approx(momentum(b), abs=1e-12 * max(1.0, s0.h * np.abs(s0.v).sum()))
