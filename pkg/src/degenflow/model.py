"""Coefficient laws, grid states and the integral functionals evaluated on them.

All functionals use the midpoint rule on cell averages; gradients live on
cell faces, ``(q[i+1] - q[i]) / h``, with coefficients evaluated at the
arithmetic face mean of ``w``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigurationError, DomainError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class Coefficients:
    """Power laws ``eta(w) = eta0 w**alpha`` and ``kappa(w) = kappa0 w**beta``.

    ``sink_a`` switches on the Prandtl sink ``-sink_a * w**sink_exp`` in the
    energy equation; ``eps_floor`` is the regularization level used for the
    initial data and as the degeneracy threshold in entropy production.
    """

    eta0: float = 1.0
    alpha: float = 1.0
    kappa0: float = 1.0
    beta: float = 1.0
    sink_a: float = 0.0
    sink_exp: float = 1.5
    eps_floor: float = 0.0

    def __post_init__(self):
        for name in ("eta0", "alpha", "kappa0", "beta"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.sink_a < 0:
            raise ConfigurationError("sink_a must be nonnegative")
        if self.eps_floor < 0:
            raise ConfigurationError("eps_floor must be nonnegative")

    # unchecked vectorized evaluators used in the inner loops
    def eta(self, w):
        return self.eta0 * np.power(w, self.alpha)

    def kappa(self, w):
        return self.kappa0 * np.power(w, self.beta)

    def pressure(self, w):
        return self.kappa0 * np.power(w, self.beta + 1.0) / (self.beta + 1.0)

    @property
    def eta_equals_kappa(self) -> bool:
        return self.alpha == self.beta and self.eta0 == self.kappa0


@dataclass(frozen=True)
class State:
    """Cell-centred fields on the uniform grid ``x0 + (i + 1/2) h``.

    ``e`` is carried only by the total-energy integrator; when present it is
    the authoritative energy density and ``w = e - v**2 / 2``.
    """

    t: float
    x0: float
    h: float
    v: np.ndarray
    w: np.ndarray
    e: np.ndarray | None = None

    def __post_init__(self):
        v = np.array(self.v, dtype=float)
        w = np.array(self.w, dtype=float)
        if v.ndim != 1 or v.shape != w.shape or v.size < 2:
            raise ConfigurationError("v and w must be 1-D arrays of equal length N >= 2")
        if not self.h > 0:
            raise ConfigurationError("cell width h must be positive")
        if np.any(w < 0):
            raise DomainError("w must be nonnegative")
        v.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)
        if self.e is not None:
            e = np.array(self.e, dtype=float)
            if e.shape != v.shape:
                raise ConfigurationError("e must match v in shape")
            e.setflags(write=False)
            object.__setattr__(self, "e", e)

    @property
    def n(self) -> int:
        return self.v.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + (np.arange(self.n) + 0.5) * self.h

    @property
    def length(self) -> float:
        return self.n * self.h

    @property
    def energy_density(self) -> np.ndarray:
        if self.e is not None:
            return self.e
        return 0.5 * self.v**2 + self.w

    def replace(self, **changes) -> "State":
        fields = dict(t=self.t, x0=self.x0, h=self.h, v=self.v, w=self.w, e=self.e)
        fields.update(changes)
        return State(**fields)


def grid_state(t: float, x_left: float, x_right: float, n: int, v, w) -> State:
    """Build a State by sampling callables (or arrays) at the cell centres."""
    h = (x_right - x_left) / n
    x = x_left + (np.arange(n) + 0.5) * h
    vv = v(x) if callable(v) else np.asarray(v, dtype=float)
    ww = w(x) if callable(w) else np.asarray(w, dtype=float)
    return State(t=t, x0=x_left, h=h, v=np.broadcast_to(vv, x.shape), w=np.broadcast_to(ww, x.shape))


@dataclass(frozen=True)
class EntropySpec:
    """Concave nondecreasing entropy density: ``sqrt``, ``power`` (w**gamma) or ``log``."""

    kind: str = "sqrt"
    gamma: float = 0.5

    def __post_init__(self):
        if self.kind not in ("sqrt", "power", "log"):
            raise ConfigurationError(f"unknown entropy kind {self.kind!r}")
        if self.kind == "power" and not 0 < self.gamma < 1:
            raise ConfigurationError("power entropy needs gamma in (0, 1)")

    @property
    def label(self) -> str:
        return f"power{self.gamma:g}" if self.kind == "power" else self.kind

    def sigma(self, w):
        if self.kind == "sqrt":
            return np.sqrt(w)
        if self.kind == "power":
            return np.power(w, self.gamma)
        return np.log(w)

    def dsigma(self, w):
        if self.kind == "sqrt":
            return 0.5 / np.sqrt(w)
        if self.kind == "power":
            return self.gamma * np.power(w, self.gamma - 1.0)
        return 1.0 / w

    def d2sigma(self, w):
        if self.kind == "sqrt":
            return -0.25 * np.power(w, -1.5)
        if self.kind == "power":
            return self.gamma * (self.gamma - 1.0) * np.power(w, self.gamma - 2.0)
        return -1.0 / w**2


def _check_nonneg(w):
    if np.any(np.asarray(w) < 0):
        raise DomainError("w must be nonnegative")


def eta(w: ArrayLike, c) -> ArrayLike:
    _check_nonneg(w)
    return c.eta(w)


def kappa(w: ArrayLike, c) -> ArrayLike:
    _check_nonneg(w)
    return c.kappa(w)


def pressure(w: ArrayLike, c) -> ArrayLike:
    """Flux potential ``int_0^w kappa(s) ds``."""
    _check_nonneg(w)
    return c.pressure(w)


def momentum(s: State) -> float:
    return float(s.h * np.sum(s.v))


def energy(s: State) -> float:
    return float(s.h * np.sum(s.energy_density))


def kinetic_energy(s: State) -> float:
    return float(0.5 * s.h * np.sum(s.v**2))


def heat_content(s: State) -> float:
    return float(s.h * np.sum(s.w))


def entropy(s: State, spec: EntropySpec = EntropySpec()) -> float:
    if spec.kind == "log" and np.any(s.w <= 0):
        raise DomainError("log entropy requires w > 0 in every cell")
    return float(s.h * np.sum(spec.sigma(s.w)))


def face_values(s: State):
    """Face means of w and face gradients of v, w (N-1 interior faces)."""
    wf = 0.5 * (s.w[:-1] + s.w[1:])
    dv = np.diff(s.v) / s.h
    dw = np.diff(s.w) / s.h
    return wf, dv, dw


def entropy_production(s: State, spec: EntropySpec, c) -> float:
    """Face quadrature of ``-sigma''(w) kappa(w) |w'|^2 + sigma'(w) eta(w) |v'|^2``."""
    wf, dv, dw = face_values(s)
    floor = getattr(c, "eps_floor", 0.0)
    wet = np.maximum(s.w[:-1], s.w[1:]) > floor
    wet &= wf > 0
    wf = wf[wet]
    thermal = -spec.d2sigma(wf) * c.kappa(wf) * dw[wet] ** 2
    shear = spec.dsigma(wf) * c.eta(wf) * dv[wet] ** 2
    return float(s.h * np.sum(thermal + shear))


def dissipation_rate(s: State, c) -> float:
    """Face quadrature of ``eta(w) |v'|^2``."""
    wf, dv, _ = face_values(s)
    return float(s.h * np.sum(c.eta(wf) * dv**2))
