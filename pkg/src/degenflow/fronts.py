"""Travelling-front and similarity-profile ODEs, their classification and shooting."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853, RK45, OdeSolution, solve_ivp
from scipy.optimize import brentq

from .errors import ConfigurationError, DomainError, FitError, NumericError

RTOL = 1e-10
ATOL = 1e-13


@dataclass(frozen=True)
class FrontParams:
    alpha: float = 1.0
    beta: float = 1.0
    eta0: float = 1.0
    kappa0: float = 0.25
    v_star: float = 0.0
    w_star: float = 0.0
    c_F: float = 1.0

    def __post_init__(self):
        if not self.c_F > 0:
            raise ConfigurationError("front speed c_F must be positive")
        if self.w_star < 0:
            raise ConfigurationError("w_star must be nonnegative")
        for name in ("alpha", "beta", "eta0", "kappa0"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")

    def eta(self, w):
        return self.eta0 * np.power(w, self.alpha)

    def kappa(self, w):
        return self.kappa0 * np.power(w, self.beta)

    @property
    def has_parabola(self) -> bool:
        return self.alpha == self.beta and self.kappa0 < 0.5

    def parabola(self, V):
        """Invariant curve ``W = w* + (V - v*)^2 / (2 (1 - 2 kappa0))``."""
        if not self.kappa0 < 0.5:
            raise DomainError("the invariant parabola needs kappa0 < 1/2")
        return self.w_star + (np.asarray(V) - self.v_star) ** 2 / (2 * (1 - 2 * self.kappa0))


@dataclass
class FrontTrajectory:
    """Samples ordered by increasing ``z``; ``termination`` describes the end reached by integration."""

    z: np.ndarray
    V: np.ndarray
    W: np.ndarray
    termination: str
    z_end: float
    V_end: float
    W_end: float
    trailing_WVp: float
    direction: int = 1
    sol: object = field(default=None, repr=False)
    extra: dict = field(default_factory=dict)

    @property
    def samples(self):
        return list(zip(self.z, self.V, self.W))

    def resample(self, n: int = 400, geometric_to_end: bool = True):
        """Dense-output samples, clustered near the termination point if requested."""
        z0 = self.z[0] if self.direction > 0 else self.z[-1]
        z1 = self.z_end
        if geometric_to_end:
            span = abs(z1 - z0)
            offs = np.geomspace(span * 1e-9, span, n)
            zz = z1 - np.sign(z1 - z0) * offs
        else:
            zz = np.linspace(z0, z1, n)
        y = self.sol(zz)
        order = np.argsort(zz)
        return zz[order], y[0][order], y[2 if y.shape[0] == 4 else 1][order]


def front_rhs(V, W, p: FrontParams):
    if np.any(np.asarray(W) <= 0):
        raise DomainError("front ODE is singular at W <= 0")
    dV = p.c_F * (V - p.v_star) / p.eta(W)
    dW = p.c_F * (W - p.w_star - 0.5 * (V - p.v_star) ** 2) / p.kappa(W)
    return dV, dW


@dataclass
class _Run:
    t: np.ndarray
    y: np.ndarray
    status: str
    sol: object
    floor_resolved: bool = True


def _solve(fun, span, y0, floor_index, floor, method="RK45", max_steps=50_000):
    """Step an embedded RK pair until the end of ``span``, the floor event, or failure.

    Step-size collapse while the floor component is falling steeply is
    reported as reaching the floor (``floor_resolved = False``): W then
    behaves like a root of the distance to the singular point and the
    floor itself lies below the resolution of z.
    """
    solver_cls = {"RK45": RK45, "DOP853": DOP853}[method]
    atol = min(ATOL, 1e-6 * floor)
    solver = solver_cls(fun, span[0], np.asarray(y0, dtype=float), span[1], rtol=RTOL, atol=atol)
    ts = [solver.t]
    ys = [solver.y.copy()]
    interps = []
    status = "reached_end"
    resolved = True
    for _ in range(max_steps):
        solver.step()
        if solver.status == "failed":
            y_last = ys[-1]
            falling = fun(ts[-1], y_last)[floor_index] * np.sign(span[1] - span[0]) < 0
            if falling and y_last[floor_index] < 1e-3 * ys[0][floor_index]:
                status, resolved = "floor", False
            else:
                status = "failed"
            break
        dense = solver.dense_output()
        g0 = ys[-1][floor_index] - floor
        g1 = solver.y[floor_index] - floor
        if g0 > 0 >= g1:
            tc = brentq(lambda t: dense(t)[floor_index] - floor, ts[-1], solver.t, xtol=1e-15, rtol=1e-15)
            if tc == ts[-1]:
                # crossing indistinguishable from the previous node
                ys[-1] = dense(tc)
            else:
                ts.append(tc)
                ys.append(dense(tc))
                interps.append(dense)
            status = "floor"
            break
        ts.append(solver.t)
        ys.append(solver.y.copy())
        interps.append(dense)
        if solver.status == "finished":
            break
    else:
        status = "failed"
    t = np.array(ts)
    sol = OdeSolution(t, interps) if interps else None
    return _Run(t=t, y=np.array(ys).T, status=status, sol=sol, floor_resolved=resolved)


_TERMINATION = {"floor": "hit_W_floor", "reached_end": "reached_z_max", "failed": "blow_up"}


def integrate_front(init, p: FrontParams, z_max: float, W_floor: float | None = None,
                    method: str = "RK45") -> FrontTrajectory:
    """Integrate the first-order front system from ``init = (z0, V0, W0)`` toward ``z_max``.

    ``z_max < z0`` integrates backward. Terminates at ``z_max``, or when W
    falls to ``W_floor`` (default ``1e-12 W0``), or on solver failure.
    """
    z0, V0, W0 = (float(a) for a in init)
    if W_floor is None:
        W_floor = 1e-12 * W0
    if not W0 > W_floor > 0:
        raise ConfigurationError("need W0 > W_floor > 0")

    def fun(z, y):
        W = max(y[1], W_floor * 1e-3)
        dV, dW = front_rhs(y[0], W, p)
        return [dV, dW]

    sol = _solve(fun, (z0, z_max), [V0, W0], 1, W_floor, method)
    z, V, W = sol.t, sol.y[0], sol.y[1]
    term = _TERMINATION[sol.status]
    Wend = max(W[-1], W_floor)
    trailing = float(Wend * front_rhs(V[-1], Wend, p)[0])
    direction = 1 if z_max >= z0 else -1
    traj = FrontTrajectory(z=z, V=V, W=W, termination=term, z_end=float(z[-1]), V_end=float(V[-1]),
                           W_end=float(W[-1]), trailing_WVp=trailing, direction=direction, sol=sol.sol,
                           extra={"floor_resolved": sol.floor_resolved})
    if direction < 0:
        traj.z, traj.V, traj.W = z[::-1], V[::-1], W[::-1]
    return traj


@dataclass
class FrontClass:
    label: str
    W_slope: float = math.nan
    c_F_estimate: float = math.nan
    parabola_gap: float = math.nan


def classify_front(traj: FrontTrajectory, p: FrontParams) -> FrontClass:
    """Label a trajectory by its side of the parabola, its endpoint and the trailing ``W V'``.

    For trajectories ending on the W floor the slope ``W'(0+)`` is fitted
    against the distance to the floor point and converted into a speed
    estimate ``max(kappa0, 1/2) W'(0+)``.
    """
    dv = traj.V - p.v_star
    dw = traj.W - p.w_star
    scale = max(float(np.max(np.abs(traj.W))), float(np.max(np.abs(traj.V))), 1e-300)
    if np.max(np.abs(dv)) <= 1e-12 * scale and np.max(np.abs(dw)) <= 1e-12 * scale:
        return FrontClass("extinct")
    gap = math.nan
    if p.has_parabola:
        g = traj.W - p.parabola(traj.V)
        gap = float(g[-1] if traj.direction > 0 else g[0])
    on_axis = np.max(np.abs(dv)) <= 1e-9 * scale
    if traj.termination == "hit_W_floor":
        near = abs(traj.V_end - p.v_star) <= 1e-4 * scale
        if not near:
            return FrontClass("non_extendable", parabola_gap=gap)
        zz, _, WW = traj.resample(600)
        dist = np.abs(zz - traj.z_end)
        order = np.argsort(dist)
        dist, WW = dist[order], WW[order]
        win = dist <= 0.05 * dist.max()
        if win.sum() < 8:
            win = np.zeros_like(win)
            win[:8] = True
        slope = float(np.polyfit(dist[win], WW[win], 1)[0])
        c_est = max(p.kappa0, 0.5) * slope
        # tip type from V^2 / (2 W) at the floor: 0 for PME tips, 1 - 2 kappa0 on the parabola
        ratio = (traj.V_end - p.v_star) ** 2 / (2 * max(traj.W_end - p.w_star, 1e-300))
        coupled = p.kappa0 < 0.5 and not on_axis and ratio > 0.5 * (1 - 2 * p.kappa0)
        label = "coupled_front" if coupled else "pme_front"
        return FrontClass(label, W_slope=slope, c_F_estimate=c_est, parabola_gap=gap)
    if traj.termination == "blow_up":
        return FrontClass("non_extendable", parabola_gap=gap)
    if on_axis:
        return FrontClass("pme_front", parabola_gap=gap)
    if p.has_parabola:
        rel = gap / max(abs(traj.W[-1]), 1e-300)
        if abs(rel) <= 1e-6:
            return FrontClass("coupled_front", parabola_gap=gap)
        if gap > 0:
            return FrontClass("above_parabola", parabola_gap=gap)
    return FrontClass("non_extendable", parabola_gap=gap)


def similarity_rhs(y, V, P, W, Q, c):
    """Right-hand side of the self-similar profile system in ``(V, P = eta V', W, Q = kappa W')``."""
    if np.any(np.asarray(W) <= 0):
        raise DomainError("similarity ODE is singular at W <= 0")
    eta = c.eta(W)
    kap = c.kappa(W)
    return P / eta, -0.5 * y * P / eta, Q / kap, -0.5 * y * Q / kap - P**2 / eta


def integrate_similarity(V0: float, dV0: float, W0: float, c, y_max: float = 10.0,
                         dW0: float = 0.0, y0: float = 0.0, W_floor: float | None = None,
                         method: str = "RK45") -> FrontTrajectory:
    """Integrate the profile system from ``y0`` with slopes ``V'(y0) = dV0`` and ``W'(y0) = dW0``."""
    if W_floor is None:
        W_floor = 1e-12 * W0
    if not W0 > W_floor > 0:
        raise ConfigurationError("need W0 > W_floor > 0")
    P0 = float(c.eta(W0)) * dV0
    Q0 = float(c.kappa(W0)) * dW0

    def fun(y, s):
        W = max(s[2], W_floor * 1e-3)
        return list(similarity_rhs(y, s[0], s[1], W, s[3], c))

    sol = _solve(fun, (y0, y_max), [V0, P0, W0, Q0], 2, W_floor, method)
    yy, st = sol.t, sol.y
    term = _TERMINATION[sol.status]
    Wend = max(st[2, -1], W_floor)
    trailing = float(Wend * st[1, -1] / c.eta(Wend))
    direction = 1 if y_max >= y0 else -1
    traj = FrontTrajectory(z=yy, V=st[0], W=st[2], termination=term, z_end=float(yy[-1]),
                           V_end=float(st[0, -1]), W_end=float(st[2, -1]), trailing_WVp=trailing,
                           direction=direction, sol=sol.sol,
                           extra={"P": st[1], "Q": st[3], "floor_resolved": sol.floor_resolved})
    if direction < 0:
        traj.z, traj.V, traj.W = yy[::-1], st[0][::-1], st[2][::-1]
        traj.extra.update(P=st[1][::-1], Q=st[3][::-1])
    return traj


@dataclass
class ShootingProfile:
    y: np.ndarray
    V: np.ndarray
    W: np.ndarray
    V0: float
    P0: float
    E0: float


def _energy_branch(m, p, E0, c, y_max, floor):
    """Integrate ``(eta(E0 - V^2/2) V')' = -(y/2) V'`` from y = 0 to ``y_max`` (sign of y_max sets direction).

    Returns the end value of V, or +-inf if V runs into the dry limit.
    """
    def fun(y, s):
        W = max(E0 - 0.5 * s[0] ** 2, floor * 1e-3)
        eta = c.eta(W)
        return [s[1] / eta, -0.5 * y * s[1] / eta]

    def dry(y, s):
        return E0 - 0.5 * s[0] ** 2 - floor

    dry.terminal = True
    dry.direction = -1
    sol = solve_ivp(fun, (0.0, y_max), [m, p], rtol=RTOL, atol=ATOL, events=dry, dense_output=True)
    if sol.status == 1:
        return math.copysign(math.inf, sol.y[0, -1]), sol
    if sol.status < 0:
        if E0 - 0.5 * sol.y[0, -1] ** 2 < 1e-3 * E0:
            return math.copysign(math.inf, sol.y[0, -1]), sol
        raise NumericError(f"similarity integration failed: {sol.message}")
    return float(sol.y[0, -1]), sol


def _bracketed_root(f, target, lo, hi, tol):
    """Root of ``f(q) = target`` on ``[lo, hi]`` for nondecreasing ``f`` (may be discontinuous)."""
    flo, fhi = f(lo) - target, f(hi) - target
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if not flo < 0 < fhi:
        raise NumericError(f"target {target} not bracketed on [{lo}, {hi}]: residuals {flo}, {fhi}")
    return brentq(lambda q: f(q) - target, lo, hi, xtol=tol * max(1.0, abs(hi)), rtol=1e-15, maxiter=500)


def similarity_shoot(V_minus: float, V_plus: float, E0: float, c, y_max: float | None = None,
                     floor_frac: float = 1e-9, tol: float = 1e-10, n_out: int = 801) -> ShootingProfile:
    """Monotone profile joining ``V_minus`` at ``-inf`` to ``V_plus`` at ``+inf`` with ``W + V^2/2 = E0``.

    Needs equal viscosity and diffusivity. The inner root search finds the
    slope at 0 for a given ``V(0)``; an outer root search on ``V(0)`` matches
    the left limit (skipped when ``V_minus = -V_plus``, where ``V(0) = 0``).
    """
    if not getattr(c, "eta_equals_kappa", False):
        raise ConfigurationError("shooting requires eta == kappa")
    if not E0 > 0.5 * max(V_minus**2, V_plus**2):
        raise DomainError("E0 must exceed max(V_minus^2, V_plus^2) / 2")
    if y_max is None:
        y_max = 12.0 * math.sqrt(max(float(c.eta(E0)), 1e-3))
    floor = floor_frac * E0

    cap = 4 * math.sqrt(2 * E0)

    def right_end(m, p):
        return float(np.clip(_energy_branch(m, p, E0, c, y_max, floor)[0], -cap, cap))

    def left_end(m, p):
        return float(np.clip(_energy_branch(m, p, E0, c, -y_max, floor)[0], -cap, cap))

    def slope_for(m):
        if m == V_plus:
            return 0.0
        sgn = 1.0 if V_plus > m else -1.0
        f = lambda q: sgn * right_end(m, sgn * q)
        hi = 1e-3
        for _ in range(200):
            if f(hi) >= sgn * V_plus:
                break
            hi *= 2.0
        return sgn * _bracketed_root(f, sgn * V_plus, 0.0, hi, tol)

    if V_minus == -V_plus:
        m = 0.5 * (V_minus + V_plus)
    elif V_minus == V_plus:
        m = V_plus
    else:
        # the left limit grows with V(0) once the right limit is pinned
        g = lambda m_: left_end(m_, slope_for(m_))
        m = _bracketed_root(g, V_minus, min(V_minus, V_plus), max(V_minus, V_plus), tol)
    p0 = slope_for(m)
    _, sr = _energy_branch(m, p0, E0, c, y_max, floor)
    _, sl = _energy_branch(m, p0, E0, c, -y_max, floor)
    half = n_out // 2
    yr = np.linspace(0.0, sr.t[-1], half + 1)
    yl = np.linspace(sl.t[-1], 0.0, half + 1)[:-1]
    V = np.concatenate([sl.sol(yl)[0], sr.sol(yr)[0]])
    y = np.concatenate([yl, yr])
    return ShootingProfile(y=y, V=V, W=E0 - 0.5 * V**2, V0=m, P0=p0, E0=E0)


def boundary_exponent_fit(z, W, origin: float = 0.0, frac: float = 0.05, min_points: int = 8) -> float:
    """Log-log slope of W against ``z - origin`` over the first ``frac`` of the wetted range."""
    z = np.asarray(z, dtype=float) - origin
    W = np.asarray(W, dtype=float)
    wet = (z > 0) & (W > 0)
    if wet.sum() < min_points:
        raise FitError(f"only {int(wet.sum())} wet samples, need {min_points}")
    zz, ww = z[wet], W[wet]
    order = np.argsort(zz)
    zz, ww = zz[order], ww[order]
    win = zz <= zz[0] + frac * (zz[-1] - zz[0])
    if win.sum() < min_points:
        win = np.zeros(zz.size, dtype=bool)
        win[:min_points] = True
    lz, lw = np.log(zz[win]), np.log(ww[win])
    if np.ptp(lz) == 0:
        raise FitError("degenerate fit window")
    slope = float(np.polyfit(lz, lw, 1)[0])
    if abs(slope) < 1e-8 or np.ptp(lw) <= 1e-12 * max(1.0, float(np.max(np.abs(lw)))):
        raise FitError("zero slope: profile is flat near the boundary")
    return slope
