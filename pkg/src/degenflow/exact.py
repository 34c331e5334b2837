"""Closed-form reference solutions and profiles.

Everything here is a pure evaluator. The compact solution and the delayed
family assume ``eta(w) = kappa(w) = w``; the Barenblatt and steady profiles
are written for general dimension ``d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigurationError, DomainError, NumericError

SQRT2 = math.sqrt(2.0)

OUTSIDE, LEFT_RAMP, PLATEAU, RIGHT_RAMP = 0, 1, 2, 3


def theta(sigma: float, d: int) -> float:
    """Mass of the shape function, ``pi**(d/2) G(1+sigma) / G(1+sigma+d/2)``."""
    if sigma < 0 or d < 1:
        raise ConfigurationError("theta needs sigma >= 0 and d >= 1")
    return math.pi ** (d / 2) * math.exp(math.lgamma(1 + sigma) - math.lgamma(1 + sigma + d / 2))


@dataclass(frozen=True)
class ShapeParams:
    sigma: float
    b: float = 1.0
    c: float = 1.0
    d: int = 1

    def __post_init__(self):
        if not (self.sigma > 0 and self.b > 0 and self.c > 0 and self.d >= 1):
            raise ConfigurationError("shape parameters need sigma, b, c > 0 and d >= 1")


def _radius(y, d):
    y = np.asarray(y, dtype=float)
    if d == 1:
        return np.abs(y)
    return np.linalg.norm(y, axis=-1)


def shape_w(y, p: ShapeParams):
    """``c (1 - |b y|^2)_+ ** sigma``; for d > 1 the last axis of ``y`` holds coordinates."""
    r = _radius(y, p.d)
    base = np.clip(1.0 - (p.b * r) ** 2, 0.0, None)
    return p.c * np.power(base, p.sigma)


@dataclass(frozen=True)
class BarenblattParams:
    """PME similarity solution; ``b`` and ``c`` follow from ``E0`` unless given.

    If ``b`` and ``c`` are passed explicitly they must satisfy both
    constraints, otherwise ConfigurationError.
    """

    E0: float
    beta: float = 1.0
    kappa0: float = 1.0
    d: int = 1
    t_star: float = 1.0
    b: float | None = None
    c: float | None = None

    def __post_init__(self):
        if not (self.E0 > 0 and self.beta > 0 and self.kappa0 > 0 and self.d >= 1):
            raise ConfigurationError("Barenblatt needs E0, beta, kappa0 > 0 and d >= 1")
        if self.t_star <= 0:
            raise ConfigurationError("t_star must be positive")
        c_amp = amplitude_from_mass(self.E0, self.beta, self.kappa0, self.d)
        b = inverse_width(c_amp, self.beta, self.kappa0, self.d)
        if self.b is not None or self.c is not None:
            if self.b is None or self.c is None:
                raise ConfigurationError("give both b and c or neither")
            if not (math.isclose(self.b, b, rel_tol=1e-9) and math.isclose(self.c, c_amp, rel_tol=1e-9)):
                raise ConfigurationError(
                    f"inconsistent Barenblatt parameters: E0={self.E0} needs b={b:.12g}, c={c_amp:.12g}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c_amp)

    @classmethod
    def from_amplitude(cls, c: float, beta=1.0, kappa0=1.0, d=1, t_star=1.0) -> "BarenblattParams":
        b = inverse_width(c, beta, kappa0, d)
        E0 = c / b**d * theta(1.0 / beta, d)
        return cls(E0=E0, beta=beta, kappa0=kappa0, d=d, t_star=t_star)

    @property
    def delta(self) -> float:
        return 1.0 / (2.0 + self.d * self.beta)

    @property
    def sigma(self) -> float:
        return 1.0 / self.beta

    def radius(self, t: float) -> float:
        return (t + self.t_star) ** self.delta / self.b


def inverse_width(c: float, beta: float, kappa0: float, d: int) -> float:
    """``b`` from ``2 kappa0 b^2 c^beta = delta beta``."""
    delta = 1.0 / (2.0 + d * beta)
    return math.sqrt(delta * beta / (2.0 * kappa0 * c**beta))


def amplitude_from_mass(E0: float, beta: float, kappa0: float, d: int) -> float:
    # E0 = c b^-d Theta with b ~ c^(-beta/2): E0 = K c^(1 + d beta / 2)
    delta = 1.0 / (2.0 + d * beta)
    K = (delta * beta / (2.0 * kappa0)) ** (-d / 2) * theta(1.0 / beta, d)
    return (E0 / K) ** (1.0 / (1.0 + d * beta / 2))


def barenblatt(t, x, p: BarenblattParams):
    s = np.asarray(t, dtype=float) + p.t_star
    if np.any(s <= 0):
        raise DomainError("Barenblatt evaluated before its singular time")
    r = _radius(x, p.d)
    base = np.clip(1.0 - (p.b * s ** (-p.delta) * r) ** 2, 0.0, None)
    return p.c * s ** (-p.d * p.delta) * np.power(base, p.sigma)


def barenblatt_labels(t, x, p: BarenblattParams):
    s = np.asarray(t, dtype=float) + p.t_star
    return (_radius(x, p.d) < s**p.delta / p.b).astype(int)


@dataclass(frozen=True)
class CompactSolutionParams:
    """Parameters of the compactly supported coupled solution (eta = kappa = w)."""

    B: float = 1.0
    x_star: float = 2.0
    t_star: float = 0.25

    def __post_init__(self):
        if not (self.B > 0 and self.x_star > 0):
            raise ConfigurationError("B and x_star must be positive")
        if self.t_star < 0:
            raise ConfigurationError("t_star must be nonnegative")
        if not self.t_star < self.x_star**2 / (4 * self.B**2):
            raise ConfigurationError(
                f"lifespan condition t_star < x_star^2/(4B^2) = {self.x_star**2 / (4 * self.B**2):g} violated")

    @property
    def lifespan(self) -> float:
        return self.x_star**2 / (4 * self.B**2) - self.t_star

    @property
    def plateau(self) -> float:
        return 2 * SQRT2 * self.B

    def momentum(self) -> float:
        return math.sqrt(32.0) * self.B * self.x_star

    def energy(self) -> float:
        return 8 * self.B**2 * self.x_star

    def heat(self, t: float) -> float:
        return 16.0 / 3.0 * self.B**3 * math.sqrt(t + self.t_star)

    def kinetic(self, t: float) -> float:
        return self.energy() - self.heat(t)

    def support_edge(self, t: float) -> float:
        return self.x_star + 2 * self.B * math.sqrt(t + self.t_star)

    def dissipated(self, t: float) -> float:
        """Time integral of ``int eta |v_x|^2`` from 0 to t."""
        return self.heat(t) - self.heat(0.0)


def _compact_core(s, x, B, x_star):
    """Branch values of the compact solution at shifted time ``s > 0``."""
    s, x = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(x, dtype=float))
    rs = np.sqrt(s)
    r = 2 * B * rs
    v = np.zeros(x.shape)
    w = np.zeros(x.shape)
    lab = np.full(x.shape, OUTSIDE)
    plateau = np.abs(x) <= x_star - r
    left = np.abs(x + x_star) <= r
    right = np.abs(x - x_star) <= r
    v[plateau] = 2 * SQRT2 * B
    lab[plateau] = PLATEAU
    xl = x[left] + x_star
    v[left] = (xl + r[left]) / (SQRT2 * rs[left])
    w[left] = B**2 - xl**2 / (4 * s[left])
    lab[left] = LEFT_RAMP
    xr = x[right] - x_star
    v[right] = (r[right] - xr) / (SQRT2 * rs[right])
    w[right] = B**2 - xr**2 / (4 * s[right])
    lab[right] = RIGHT_RAMP
    return v, np.clip(w, 0.0, None), lab


def _check_lifespan(t, p: CompactSolutionParams):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > p.lifespan):
        raise DomainError(f"t outside the lifespan [0, {p.lifespan:g}]")


def compact_solution(t, x, p: CompactSolutionParams):
    """Return ``(v, w)`` of the compactly supported solution at time(s) ``t``."""
    _check_lifespan(t, p)
    if p.t_star == 0 and np.any(np.asarray(t) == 0):
        raise DomainError("t_star = 0 is singular at t = 0; use delayed_family")
    v, w, _ = _compact_core(np.asarray(t, dtype=float) + p.t_star, x, p.B, p.x_star)
    return v, w


def compact_labels(t, x, p: CompactSolutionParams):
    _check_lifespan(t, p)
    return _compact_core(np.asarray(t, dtype=float) + p.t_star, x, p.B, p.x_star)[2]


def similarity_ex22(y, B: float = 1.0):
    """Explicit similarity profile with ``W + V^2/2 = B^2`` inside ``|y| <= 2B``."""
    y = np.asarray(y, dtype=float)
    inside = np.abs(y) <= 2 * B
    V = np.where(inside, y / SQRT2, np.sign(y) * SQRT2 * B)
    W = np.where(inside, B**2 - y**2 / 4, 0.0)
    return V, W


def _delayed(t, x, p: CompactSolutionParams, t_plus: float, t_minus: float):
    T = p.x_star**2 / (4 * p.B**2)
    for name, val in (("t_plus", t_plus), ("t_minus", t_minus)):
        if not 0 <= val <= T:
            raise DomainError(f"{name}={val} outside [0, {T:g}]")
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    if np.any(t < 0) or np.any(t > T + min(t_plus, t_minus)):
        raise DomainError("t outside the range where both halves are defined")
    delay = np.where(x < 0, t_minus, t_plus)
    s = t - delay
    active = s > 0
    v = np.where(np.abs(x) <= p.x_star, p.plateau, 0.0)
    w = np.zeros(x.shape)
    lab = np.where(np.abs(x) <= p.x_star, PLATEAU, OUTSIDE)
    if np.any(active):
        va, wa, la = _compact_core(s[active], x[active], p.B, p.x_star)
        v[active], w[active], lab[active] = va, wa, la
    return v, w, lab


def delayed_family(t, x, p: CompactSolutionParams, t_plus: float = 0.0, t_minus: float = 0.0):
    """Solutions from the step data ``(2 sqrt2 B 1_[-x*, x*], 0)``, each half released at its delay.

    ``p.t_star`` is ignored: the family starts from the ``t_star -> 0`` limit
    of the compact solution, and ``x > 0`` (``x < 0``) starts moving at
    ``t_plus`` (``t_minus``).
    """
    v, w, _ = _delayed(t, x, p, t_plus, t_minus)
    return v, w


def delayed_labels(t, x, p: CompactSolutionParams, t_plus: float = 0.0, t_minus: float = 0.0):
    return _delayed(t, x, p, t_plus, t_minus)[2]


@dataclass(frozen=True)
class SteadyProfile:
    """Steady profiles ``(a W_sigma(b y), c W_(1/beta)(b y))`` of the rescaled system."""

    a: float
    b: float
    c: float
    sigma: float
    delta: float
    beta: float
    d: int
    theta_v: float
    theta_w: float

    def v(self, y):
        if self.a == 0:
            return np.zeros_like(np.asarray(y, dtype=float) if self.d == 1 else _radius(y, self.d))
        return shape_w(y, ShapeParams(self.sigma, self.b, abs(self.a), self.d)) * math.copysign(1.0, self.a)

    def w(self, y):
        return shape_w(y, ShapeParams(1.0 / self.beta, self.b, self.c, self.d))

    @property
    def edge(self) -> float:
        return 1.0 / self.b


def steady_profile(V0: float, E0: float, c, d: int = 1) -> SteadyProfile:
    """Solve the mass and width constraints for ``c_amp`` by bracketed root finding."""
    if not E0 > 0:
        raise DomainError("E0 must be positive")
    beta, kappa0, eta0 = c.beta, c.kappa0, c.eta0
    delta = 1.0 / (2.0 + d * beta)
    th_w = theta(1.0 / beta, d)

    def mass_gap(c_amp):
        return c_amp / inverse_width(c_amp, beta, kappa0, d) ** d * th_w - E0

    lo, hi = 1.0, 1.0
    for _ in range(400):
        if mass_gap(lo) <= 0:
            break
        lo /= 2.0
    for _ in range(400):
        if mass_gap(hi) >= 0:
            break
        hi *= 2.0
    if not (mass_gap(lo) <= 0 <= mass_gap(hi)):
        raise NumericError(f"no sign change of the mass constraint on [{lo:g}, {hi:g}]")
    c_amp = lo if mass_gap(lo) == 0 else brentq(mass_gap, lo, hi, xtol=1e-300, rtol=1e-14, maxiter=500)
    b = inverse_width(c_amp, beta, kappa0, d)
    sigma = kappa0 / (eta0 * beta)
    th_v = theta(sigma, d)
    a = V0 * b**d / th_v
    return SteadyProfile(a=a, b=b, c=c_amp, sigma=sigma, delta=delta, beta=beta, d=d,
                         theta_v=th_v, theta_w=th_w)


def front_exact(z, case: str, alpha: float = 1.0, kappa0: float = 0.25, c_F: float = 1.0):
    """Explicit fronts in the travelling variable ``z = x + c_F t`` (``eta0 = 1``, ``v* = w* = 0``).

    ``pme``: ``V = 0``, ``W = (alpha c_F z / kappa0)^(1/alpha)``, alpha being the
    diffusivity exponent. ``coupled``: the front on the invariant parabola,
    which needs equal exponents and ``kappa0 < 1/2``.
    """
    zp = np.clip(np.asarray(z, dtype=float), 0.0, None) * c_F
    if case == "pme":
        return np.zeros_like(zp), np.power(alpha * zp / kappa0, 1.0 / alpha)
    if case in ("coupled", "coupled_parabola"):
        if kappa0 >= 0.5:
            raise DomainError("coupled front requires kappa0 < 1/2")
        base = 2 * alpha * zp
        return math.sqrt(2 - 4 * kappa0) * np.power(base, 1 / (2 * alpha)), np.power(base, 1 / alpha)
    raise ConfigurationError(f"unknown front case {case!r}")


def front_exact_derivative(z, case: str, alpha: float = 1.0, kappa0: float = 0.25, c_F: float = 1.0):
    """``(dV/dz, dW/dz)`` of :func:`front_exact` for ``z > 0``."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("derivatives only for z > 0")
    V, W = front_exact(z, case, alpha, kappa0, c_F)
    if case == "pme":
        return np.zeros_like(z), W / (alpha * z)
    return V / (2 * alpha * z), W / (alpha * z)


@dataclass
class ResidualResult:
    r_v: np.ndarray
    r_w: np.ndarray
    valid: np.ndarray
    n_flagged: int = 0
    max_v: float = 0.0
    max_w: float = 0.0

    @property
    def max_residual(self) -> float:
        return max(self.max_v, self.max_w)


def residual_check(field, c, t, x, h: float, k: float, labels=None, t_bounds=None,
                   reach: int = 3) -> ResidualResult:
    """Finite-difference residuals of both equations for a callable ``field(t, x) -> (v, w)``.

    Space uses half-point conservative differences, time a centred
    difference with step ``k``. A sample is flagged (and excluded from the
    maxima) if ``labels(t, x)`` changes anywhere on the stencil enlarged
    to ``reach`` steps, or if that stencil leaves ``t_bounds``.
    """
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    t = t.ravel()
    x = x.ravel()
    valid = np.ones(t.shape, dtype=bool)
    if t_bounds is not None:
        valid &= (t - reach * k >= t_bounds[0]) & (t + reach * k <= t_bounds[1])
    if labels is not None:
        tt = t[valid]
        xx = x[valid]
        ref = labels(tt, xx)
        same = np.ones(tt.shape, dtype=bool)
        for i in range(-reach, reach + 1):
            for j in range(-reach, reach + 1):
                if i == 0 and j == 0:
                    continue
                same &= labels(tt + i * k, xx + j * h) == ref
        idx = np.flatnonzero(valid)
        valid[idx[~same]] = False
    r_v = np.full(t.shape, np.nan)
    r_w = np.full(t.shape, np.nan)
    if np.any(valid):
        tt, xx = t[valid], x[valid]
        v0, w0 = field(tt, xx)
        vp, wp = field(tt, xx + h)
        vm, wm = field(tt, xx - h)
        vf, wf = field(tt + k, xx)
        vb, wb = field(tt - k, xx)
        e_p = c.eta(0.5 * (w0 + wp))
        e_m = c.eta(0.5 * (w0 + wm))
        k_p = c.kappa(0.5 * (w0 + wp))
        k_m = c.kappa(0.5 * (w0 + wm))
        lap_v = (e_p * (vp - v0) - e_m * (v0 - vm)) / h**2
        lap_w = (k_p * (wp - w0) - k_m * (w0 - wm)) / h**2
        source = c.eta(w0) * ((vp - vm) / (2 * h)) ** 2
        r_v[valid] = (vf - vb) / (2 * k) - lap_v
        r_w[valid] = (wf - wb) / (2 * k) - lap_w - source
    res = ResidualResult(r_v=r_v, r_w=r_w, valid=valid, n_flagged=int(np.sum(~valid)))
    if np.any(valid):
        res.max_v = float(np.max(np.abs(r_v[valid])))
        res.max_w = float(np.max(np.abs(r_w[valid])))
    return res


def residual_convergence(field, c, t, x, steps, labels=None, t_bounds=None):
    """Residual maxima at each stencil size in ``steps`` (h = k), on the samples valid at every level.

    Returns ``(maxima, ratios)``; ``ratios[i] = maxima[i] / maxima[i + 1]``.
    """
    results = [residual_check(field, c, t, x, s, s, labels=labels, t_bounds=t_bounds) for s in steps]
    common = np.logical_and.reduce([r.valid for r in results])
    if not np.any(common):
        raise DomainError("no sample is valid at every stencil size")
    maxima = [float(max(np.max(np.abs(r.r_v[common])), np.max(np.abs(r.r_w[common])))) for r in results]
    ratios = [maxima[i] / maxima[i + 1] if maxima[i + 1] > 0 else math.inf for i in range(len(maxima) - 1)]
    return maxima, ratios
