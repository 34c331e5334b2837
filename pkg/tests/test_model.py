from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.integrate import quad

from degenflow.errors import ConfigurationError, DomainError
from degenflow.exact import CompactSolutionParams, compact_solution
from degenflow.model import (Coefficients, EntropySpec, State, energy, entropy, entropy_production, eta,
                             grid_state, heat_content, kappa, kinetic_energy, momentum, pressure)

unit = Coefficients()


def const_state(v, w, n=10, length=1.0):
    return grid_state(0.0, 0.0, length, n, lambda x: v + 0 * x, lambda x: w + 0 * x)


def test_coefficient_values():
    assert eta(0.0, unit) == 0.0
    assert eta(4.0, Coefficients(eta0=1.0, alpha=0.5)) == 2.0
    assert eta(1.0, Coefficients(eta0=2.0, alpha=1.0)) == 2.0
    assert kappa(0.0, unit) == 0.0
    assert kappa(4.0, Coefficients(kappa0=1.0, beta=0.5)) == 2.0
    assert kappa(1.0, Coefficients(kappa0=2.0, beta=1.0)) == 2.0


def test_pressure_values():
    assert pressure(0.0, unit) == 0.0
    assert pressure(1.0, unit) == 0.5
    c = Coefficients(kappa0=3.0, beta=2.0)
    assert pressure(2.0, c) == pytest.approx(8.0, rel=1e-15)
    # independent check by quadrature of kappa
    assert quad(lambda s: c.kappa0 * s**c.beta, 0, 2)[0] == pytest.approx(8.0, rel=1e-12)


def test_negative_w_rejected():
    for fn in (eta, kappa, pressure):
        with pytest.raises(DomainError):
            fn(-1e-3, unit)
    with pytest.raises(DomainError):
        State(t=0.0, x0=0.0, h=0.1, v=np.zeros(3), w=np.array([1.0, -1.0, 0.0]))


@pytest.mark.parametrize("kw", [dict(eta0=0.0), dict(alpha=-1.0), dict(kappa0=-2.0), dict(beta=0.0),
                                dict(sink_a=-1.0), dict(eps_floor=-1e-3)])
def test_invalid_coefficients(kw):
    with pytest.raises(ConfigurationError):
        Coefficients(**kw)


def test_state_shape_checks():
    with pytest.raises(ConfigurationError):
        State(t=0.0, x0=0.0, h=0.1, v=np.zeros(3), w=np.zeros(4))
    with pytest.raises(ConfigurationError):
        State(t=0.0, x0=0.0, h=0.1, v=np.zeros(1), w=np.zeros(1))
    with pytest.raises(ConfigurationError):
        State(t=0.0, x0=0.0, h=0.0, v=np.zeros(3), w=np.zeros(3))


def test_state_is_immutable():
    s = const_state(1.0, 1.0)
    with pytest.raises(ValueError):
        s.v[0] = 2.0


def test_momentum_and_energy_trivial():
    assert momentum(const_state(0.0, 0.0)) == 0.0
    assert momentum(const_state(1.0, 0.0, n=10)) == pytest.approx(1.0, rel=1e-15)
    assert energy(const_state(0.0, 0.0)) == 0.0
    assert energy(const_state(2.0, 1.0)) == pytest.approx(3.0, rel=1e-15)
    s = const_state(2.0, 1.0)
    assert kinetic_energy(s) + heat_content(s) == pytest.approx(energy(s), rel=1e-15)


@pytest.mark.parametrize("t", [0.0, 0.3, 0.7])
def test_compact_solution_integrals(t):
    p = CompactSolutionParams(B=1.0, x_star=2.0, t_star=0.25)
    s = grid_state(t, -6.0, 6.0, 12000, lambda x: compact_solution(t, x, p)[0],
                   lambda x: compact_solution(t, x, p)[1])
    assert momentum(s) == pytest.approx(8 * math.sqrt(2.0), rel=1e-6)
    assert energy(s) == pytest.approx(16.0, rel=1e-6)


def test_entropy_trivial():
    assert entropy(const_state(0.0, 1.0), EntropySpec("sqrt")) == pytest.approx(1.0)
    assert entropy(const_state(0.0, 4.0), EntropySpec("sqrt")) == pytest.approx(2.0)
    assert entropy(const_state(0.0, 1.0), EntropySpec("log")) == 0.0
    assert entropy(const_state(0.0, 0.0), EntropySpec("power", 0.3)) == 0.0
    with pytest.raises(DomainError):
        entropy(const_state(0.0, 0.0), EntropySpec("log"))


def test_entropy_spec_validation():
    with pytest.raises(ConfigurationError):
        EntropySpec("cubic")
    with pytest.raises(ConfigurationError):
        EntropySpec("power", 1.5)


def test_production_constant_fields():
    assert entropy_production(const_state(3.0, 2.0), EntropySpec("sqrt"), unit) == 0.0


def test_production_thermal_part():
    # v = 0, w = 1 + x: integrand 1 / (4 sqrt(w)), integral (sqrt2 - 1)/2
    exact = (math.sqrt(2.0) - 1) / 2
    assert quad(lambda x: 0.25 / math.sqrt(1 + x), 0, 1)[0] == pytest.approx(exact, rel=1e-12)
    errs, inner = [], []
    for n in (100, 200, 400):
        s = grid_state(0.0, 0.0, 1.0, n, lambda x: 0 * x, lambda x: 1 + x)
        got = entropy_production(s, EntropySpec("sqrt"), unit)
        errs.append(abs(got - exact))
        # the faces cover (h/2, 1 - h/2); against that interval the quadrature is second order
        a, b = 1 + s.h / 2, 2 - s.h / 2
        inner.append(abs(got - (math.sqrt(b) - math.sqrt(a)) / 2))
    assert errs[-1] < 1e-3
    assert errs[0] / errs[1] > 1.8
    assert inner[0] / inner[1] > 3.5


def test_production_shear_part():
    for n in (40, 400):
        s = grid_state(0.0, 0.0, 1.0, n, lambda x: x, lambda x: 1 + 0 * x)
        got = entropy_production(s, EntropySpec("sqrt"), unit)
        # faces span (h/2, 1 - h/2), so the sum is (N - 1) h / 2
        assert got == pytest.approx(0.5 * (1 - s.h), rel=1e-12)


def test_production_skips_dry_faces():
    w = np.array([0.0, 0.0, 1.0, 2.0])
    s = State(t=0.0, x0=0.0, h=0.25, v=np.zeros(4), w=w)
    assert math.isfinite(entropy_production(s, EntropySpec("log"), unit))


ladder = st.lists(st.floats(0.0, 50.0), min_size=2, max_size=30).map(sorted)
laws = st.builds(Coefficients, eta0=st.floats(0.1, 5), alpha=st.floats(0.1, 3),
                 kappa0=st.floats(0.1, 5), beta=st.floats(0.1, 3))


@given(ladder, laws)
def test_coefficients_monotone(ws, c):
    ws = np.array(ws)
    for fn in (eta, kappa, pressure):
        assert np.all(np.diff(fn(ws, c)) >= 0)


@given(laws)
def test_pressure_derivative_is_kappa(c):
    w = np.linspace(0.1, 10, 50)
    d = 1e-6 * w
    fd = (pressure(w + d, c) - pressure(w - d, c)) / (2 * d)
    assert np.allclose(fd, kappa(w, c), rtol=1e-6)


fields = arrays(np.float64, st.integers(3, 40), elements=st.floats(-5, 5))
specs = st.one_of(st.just(EntropySpec("sqrt")), st.just(EntropySpec("log")),
                  st.floats(0.05, 0.95).map(lambda g: EntropySpec("power", g)))


@given(fields, st.data(), specs, laws)
def test_production_nonnegative(v, data, spec, c):
    n = v.size
    w = data.draw(arrays(np.float64, n, elements=st.floats(0.0, 5.0)))
    if spec.kind == "log":
        w = w + 0.1
    s = State(t=0.0, x0=0.0, h=1.0 / n, v=v, w=w)
    assert entropy_production(s, spec, c) >= 0.0


@given(fields, st.data(), st.floats(-4, 4))
def test_functional_scaling(v, data, a):
    w = data.draw(arrays(np.float64, v.size, elements=st.floats(0.0, 5.0)))
    s = State(t=0.0, x0=0.0, h=0.1, v=v, w=w)
    scaled = State(t=0.0, x0=0.0, h=0.1, v=a * v, w=a * a * w)
    assert momentum(scaled) == pytest.approx(a * momentum(s), rel=1e-12, abs=1e-12)
    assert energy(scaled) == pytest.approx(a * a * energy(s), rel=1e-12, abs=1e-12)
