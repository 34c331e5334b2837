from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from degenflow.errors import ConfigurationError, FitError
from degenflow.exact import BarenblattParams, barenblatt
from degenflow.model import State, energy, grid_state, momentum
from degenflow.selfsim import (ScalingSpec, linear_edge, profile_distance, rescale_snapshot, rescaled_energy,
                               rescaled_exponent_fit, rescaled_momentum, shifted_cap_l1, unrescale)

cap = lambda x: np.maximum(0.0, 1 - x * x)  # noqa: E731


def snap(t, v, w, a=-8.0, b=8.0, n=1600):
    return grid_state(t, a, b, n, v, w)


def test_identity_at_time_zero():
    s = snap(0.0, lambda x: np.sin(x) * cap(x / 3), lambda x: cap(x / 2))
    spec = ScalingSpec(y_min=-7.9, y_max=7.9, n_y=301)
    r = rescale_snapshot(s, spec)
    assert np.allclose(r.v, np.interp(r.y, s.x, s.v), atol=1e-15)
    assert np.allclose(r.w, np.interp(r.y, s.x, s.w), atol=1e-15)


def test_barenblatt_is_fixed_point():
    bp = BarenblattParams(E0=1.5, t_star=1.0)
    spec = ScalingSpec(theta=0.5, y_min=-4, y_max=4, n_y=401)
    profiles = []
    for t in (0.0, 3.0, 15.0):
        s = snap(t, lambda x: 0 * x, lambda x, t=t: barenblatt(t, x, bp), a=-30, b=30, n=6000)
        profiles.append(rescale_snapshot(s, spec).w)
    # interpolation of the cap tip costs O(h^2)
    for p in profiles[1:]:
        assert np.max(np.abs(p - profiles[0])) < 1e-4


def test_rescaled_bookkeeping():
    v = lambda x: 0.4 * cap(x / 2) + 0.1 * cap(x - 1)  # noqa: E731
    w = lambda x: 0.5 + 0 * x  # noqa: E731
    for t in (0.0, 2.0, 9.0):
        s = snap(t, v, w, a=-3, b=3, n=3000)
        wide = dict(y_min=-3.1, y_max=3.1, n_y=20001)
        r1 = rescale_snapshot(s, ScalingSpec(theta=1.0, **wide))
        assert rescaled_momentum(r1) == pytest.approx(momentum(s), rel=1e-5)
        r2 = rescale_snapshot(s, ScalingSpec(theta=0.5, **wide))
        assert rescaled_energy(r2) == pytest.approx(energy(s), rel=1e-3)


def test_rescaled_energy_weights():
    # theta = 1 weights the kinetic part by (t+1)^{-delta}
    s = snap(3.0, lambda x: 1 + 0 * x, lambda x: 0 * x, a=-2, b=2, n=400)
    spec = ScalingSpec(theta=1.0, y_min=-1, y_max=1, n_y=11)
    r = rescale_snapshot(s, spec)
    g = 4.0
    assert np.allclose(r.v, g ** (1 / 3))
    assert rescaled_energy(r) == pytest.approx(0.5 * g ** (-1 / 3) * g ** (2 / 3) * 2)


@given(st.floats(0.0, 10.0), st.sampled_from([0.5, 1.0]))
def test_unrescale_round_trip(t, th):
    s = snap(t, lambda x: np.cos(x) * cap(x / 4), lambda x: cap(x / 3), a=-5, b=5, n=200)
    spec = ScalingSpec(theta=th, y_min=-6, y_max=6, n_y=4001)
    back = unrescale(rescale_snapshot(s, spec), s)
    assert np.max(np.abs(back.v - s.v)) < 2e-3
    assert np.max(np.abs(back.w - s.w)) < 2e-3


def test_profile_distance():
    y = np.linspace(-3, 3, 6001)
    assert profile_distance(cap(y), cap, y) == (0.0, 0.0)
    for s in (0.25, 0.7, 1.5):
        l1, l2 = profile_distance(cap(y), cap(y - s), y)
        assert l1 == pytest.approx(shifted_cap_l1(s), abs=1e-5)
        assert 0 < l2
    assert shifted_cap_l1(0.0) == 0.0
    with pytest.raises(ConfigurationError):
        shifted_cap_l1(2.0)


def test_shifted_cap_closed_form_by_quadrature():
    from scipy.integrate import quad

    s = 0.6
    val, _ = quad(lambda u: abs(max(0, 1 - u * u) - max(0, 1 - (u - s) ** 2)), -1, 1 + s, points=[s / 2, 1], limit=200)
    assert shifted_cap_l1(s) == pytest.approx(val, rel=1e-10)


@pytest.mark.parametrize("sigma", [0.25, 1.0, 2.0])
@pytest.mark.parametrize("side", ["right", "left"])
def test_exponent_fit_closed_forms(sigma, side):
    y = np.linspace(-2, 2, 801)
    f = np.maximum(0.0, 1 - y * y) ** sigma * (1 + 0.3 * y)
    assert rescaled_exponent_fit(y, f, side=side) == pytest.approx(sigma, abs=0.02)


def test_exponent_fit_barenblatt_profile():
    bp = BarenblattParams(E0=1.0, beta=1.0)
    y = np.linspace(-3, 3, 1201)
    f = barenblatt(0.0, y, bp)
    assert rescaled_exponent_fit(y, f) == pytest.approx(1.0, abs=0.02)


def test_exponent_fit_with_known_edge():
    y = np.linspace(0, 2, 2001)
    f = np.maximum(0.0, 1.5 - y) ** 0.25
    assert rescaled_exponent_fit(y, f, edge=1.5) == pytest.approx(0.25, abs=1e-9)
    assert rescaled_exponent_fit(y, f, edge=1.5, guard=0.01) == pytest.approx(0.25, abs=1e-9)


def test_exponent_fit_rejections():
    y = np.linspace(-2, 2, 101)
    with pytest.raises(FitError):
        rescaled_exponent_fit(y, np.ones_like(y))
    with pytest.raises(FitError):
        rescaled_exponent_fit(y, np.zeros_like(y))
    flat = np.where(np.abs(y) < 1, 1.0, 0.0)
    with pytest.raises(FitError):
        rescaled_exponent_fit(y, flat)


def test_linear_edge():
    y = np.linspace(-3, 3, 601)
    f = np.maximum(0.0, 1 - y * y)
    assert linear_edge(y, f) == pytest.approx(1.0, abs=0.02)
    assert linear_edge(y, f, side="left") == pytest.approx(-1.0, abs=0.02)
    tent = np.maximum(0.0, 2.0 - np.abs(y - 0.3))
    assert linear_edge(y, tent) == pytest.approx(2.3, abs=1e-10)
    with pytest.raises(FitError):
        linear_edge(y, np.ones_like(y))


def test_scaling_spec():
    spec = ScalingSpec(beta=2.0)
    assert spec.delta == 0.25 and spec.tau(math.e - 1) == pytest.approx(1.0)
    assert spec.y.size == 801 and spec.h_y == pytest.approx(0.025)
    with pytest.raises(ConfigurationError):
        ScalingSpec(theta=0.7)
    with pytest.raises(ConfigurationError):
        ScalingSpec(d=2)
    with pytest.raises(ConfigurationError):
        ScalingSpec(y_min=1, y_max=0)
    bad = State(t=-1.0, x0=0.0, h=0.1, v=np.zeros(4), w=np.zeros(4))
    with pytest.raises(ConfigurationError):
        rescale_snapshot(bad, spec)
