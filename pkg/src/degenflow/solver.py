"""Explicit conservative finite-volume integrator on a 1-D interval with no-flux ends.

Two representations: primitive ``(v, w)`` with the w-diffusion written through
the pressure ``Pi(w)``, and total energy ``(v, e)`` where the e-update is a pure
flux difference. Both use forward Euler under a CFL restriction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, StepRejected
from .model import Coefficients, EntropySpec, State

CFL_LIMIT = 0.5


def coefficient_piecewise_44(w, B: float):
    """Two-branch coefficient that is C1 at ``w = 3B^2/8``."""
    w = np.asarray(w, dtype=float)
    seam = 0.375 * B**2
    lower = B - np.sqrt(np.clip(B**2 - 2 * np.minimum(w, seam), 0.0, None))
    upper = 2 * w / B - B / 4
    return np.where(w <= seam, lower, upper)


@dataclass(frozen=True)
class PiecewiseLaw:
    """``eta = kappa = coefficient_piecewise_44(w, B)``."""

    B: float
    sink_a: float = 0.0
    sink_exp: float = 1.5
    eps_floor: float = 0.0

    def __post_init__(self):
        if not self.B > 0:
            raise ConfigurationError("piecewise law needs B > 0")

    def eta(self, w):
        return coefficient_piecewise_44(w, self.B)

    kappa = eta

    def pressure(self, w):
        B = self.B
        w = np.asarray(w, dtype=float)
        seam = 0.375 * B**2
        wl = np.minimum(w, seam)
        low = B * wl + ((B**2 - 2 * wl) ** 1.5 - B**3) / 3
        wu = np.maximum(w, seam)
        high = B**3 / 12 + (wu**2 - seam**2) / B - B / 4 * (wu - seam)
        return np.where(w <= seam, low, high)

    @property
    def eta_equals_kappa(self) -> bool:
        return True


@dataclass(frozen=True)
class SolverConfig:
    form: str = "primitive"
    cfl: float = 0.45
    w_clamp_tol: float = 0.0
    snapshot_times: tuple = (0.0,)
    t_end: float = 1.0
    law: object = field(default_factory=Coefficients)
    entropies: tuple = (EntropySpec("sqrt"),)
    lp_ps: tuple = (1.0, 2.0, math.inf)
    dissipation_ps: tuple = (2.0,)
    track_production: bool = False

    def __post_init__(self):
        if self.form not in ("primitive", "energy"):
            raise ConfigurationError(f"form must be primitive or energy, got {self.form!r}")
        if not 0 < self.cfl <= CFL_LIMIT:
            raise ConfigurationError(f"cfl must lie in (0, {CFL_LIMIT}]")
        if self.w_clamp_tol < 0:
            raise ConfigurationError("w_clamp_tol must be nonnegative")
        if self.t_end < 0:
            raise ConfigurationError("t_end must be nonnegative")
        times = tuple(float(t) for t in self.snapshot_times)
        if list(times) != sorted(times):
            raise ConfigurationError("snapshot_times must be sorted")
        if times and (times[0] < 0 or times[-1] > self.t_end):
            raise ConfigurationError("snapshot_times must lie in [0, t_end]")
        for p in self.dissipation_ps:
            if not p >= 1:
                raise ConfigurationError("dissipation exponents must be >= 1")
        object.__setattr__(self, "snapshot_times", times)

    def targets(self) -> list:
        ts = sorted(set(self.snapshot_times) | {float(self.t_end)})
        return ts


@dataclass
class StepReport:
    dt_used: float
    max_coeff: float
    clamped_cells: int = 0
    clamped_mass: float = 0.0


@dataclass
class SnapshotSeries:
    """Snapshots at the requested times plus per-step scalar diagnostics.

    ``diag`` maps names to arrays with one entry per step, entry 0 being
    the initial state.
    """

    states: list
    diag: dict
    config: SolverConfig | None = None
    law: object = None
    initial: State | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def n_steps(self) -> int:
        return len(self.diag.get("t", [0.0])) - 1

    def at(self, t: float) -> State:
        for s in self.states:
            if s.t == t:
                return s
        raise KeyError(f"no snapshot at t={t}")

    @property
    def clamped_mass(self) -> float:
        return float(np.sum(self.diag.get("clamped_mass", 0.0)))


def regularize(w0, eps: float):
    """Pointwise ``max(w0, eps)``."""
    if eps < 0:
        raise ConfigurationError("eps must be nonnegative")
    w0 = np.asarray(w0, dtype=float)
    return w0.copy() if eps == 0 else np.maximum(w0, eps)


def _max_coeff(w, law, form):
    eta = law.eta(w)
    kap = law.kappa(w)
    if form == "energy":
        return float(np.max(np.maximum(eta, np.abs(kap - eta)) + eta))
    return float(np.max(np.maximum(eta, kap)))


def _stable_dt(s: State, law, cfl: float, form: str) -> float:
    w = s.w
    dmax = _max_coeff(w, law, form)
    dt = math.inf if dmax <= 0 else cfl * s.h**2 / (2 * dmax)
    a = getattr(law, "sink_a", 0.0)
    if a > 0:
        wmax = float(np.max(w))
        if wmax > 0:
            dt = min(dt, cfl / (a * wmax ** (law.sink_exp - 1.0)))
    return dt


def cfl_dt(s: State, cfg: SolverConfig) -> float:
    """Largest stable step; a fully dry state may jump to the next target."""
    dt = _stable_dt(s, cfg.law, cfg.cfl, cfg.form)
    if math.isinf(dt):
        later = [t for t in cfg.targets() if t > s.t]
        dt = (later[0] - s.t) if later else 0.0
    return dt


def _check_dt(s: State, dt: float, law, form: str):
    if dt < 0:
        raise StepRejected(f"negative time step {dt}")
    limit = _stable_dt(s, law, CFL_LIMIT, form)
    if dt > limit * (1 + 1e-12):
        raise StepRejected(f"dt={dt:.6g} exceeds the stability limit {limit:.6g}")


def _centered_gradient(v, h):
    g = np.empty_like(v)
    g[1:-1] = (v[2:] - v[:-2]) / (2 * h)
    g[0] = (v[1] - v[0]) / h
    g[-1] = (v[-1] - v[-2]) / h
    return g


def _divergence(flux_faces, h):
    """Cell divergence of interior face fluxes with zero boundary flux."""
    div = np.zeros(flux_faces.size + 1)
    div[:-1] += flux_faces
    div[1:] -= flux_faces
    return div / h


def _sink(w, law):
    a = getattr(law, "sink_a", 0.0)
    if a <= 0:
        return 0.0
    return a * np.power(w, law.sink_exp)


def _clamp(w, tol):
    bad = (w < tol) & (w != 0)
    if not np.any(bad):
        return w, 0, 0.0
    removed = float(np.sum(np.abs(w[bad])))
    w = w.copy()
    w[bad] = 0.0
    return w, int(np.sum(bad)), removed


def step_primitive(s: State, dt: float, c, w_clamp_tol: float = 0.0):
    """One forward Euler step of the primitive form."""
    _check_dt(s, dt, c, "primitive")
    v, w, h = s.v, s.w, s.h
    wf = 0.5 * (w[:-1] + w[1:])
    eta_f = c.eta(wf)
    dv = np.diff(v) / h
    pi = c.pressure(w)
    v_new = v + dt * _divergence(eta_f * dv, h)
    grad = _centered_gradient(v, h)
    w_new = w + dt * (_divergence(np.diff(pi) / h, h) + c.eta(w) * grad**2 - _sink(w, c))
    w_new, ncl, mass = _clamp(w_new, w_clamp_tol)
    rep = StepReport(dt_used=dt, max_coeff=_max_coeff(w, c, "primitive"),
                     clamped_cells=ncl, clamped_mass=mass * h)
    return State(t=s.t + dt, x0=s.x0, h=h, v=v_new, w=w_new), rep


def step_energy(s: State, dt: float, c, w_clamp_tol: float = 0.0):
    """One forward Euler step of the total-energy form; ``s.e`` defaults to ``v^2/2 + w``."""
    _check_dt(s, dt, c, "energy")
    v, w, h = s.v, s.w, s.h
    e = s.energy_density
    wf = 0.5 * (w[:-1] + w[1:])
    eta_f = c.eta(wf)
    gap_f = c.kappa(wf) - eta_f
    dv = np.diff(v) / h
    flux_e = eta_f * np.diff(e) / h + gap_f * np.diff(w) / h
    v_new = v + dt * _divergence(eta_f * dv, h)
    e_new = e + dt * (_divergence(flux_e, h) - _sink(w, c))
    w_new = e_new - 0.5 * v_new**2
    bad = (w_new < w_clamp_tol) & (w_new != 0)
    ncl, mass = 0, 0.0
    if np.any(bad):
        ncl = int(np.sum(bad))
        mass = float(np.sum(np.abs(w_new[bad]))) * h
        w_new = np.where(bad, 0.0, w_new)
        e_new = np.where(bad, 0.5 * v_new**2, e_new)
    rep = StepReport(dt_used=dt, max_coeff=_max_coeff(w, c, "energy"),
                     clamped_cells=ncl, clamped_mass=mass)
    return State(t=s.t + dt, x0=s.x0, h=h, v=v_new, w=w_new, e=e_new), rep


def _lp(a, p, h):
    if math.isinf(p):
        return float(np.max(np.abs(a)))
    return float((h * np.sum(np.abs(a) ** p)) ** (1.0 / p))


def _dissipation_density(s: State, law, p: float) -> float:
    """Face quadrature of ``eta(w) (p-1)|v|^(p-2) |v'|^2`` in the discrete chain-rule form.

    The weight uses the divided difference of ``|v|^(p-2) v`` so it stays
    finite across sign changes and reduces to ``eta |v'|^2`` at p = 2.
    """
    h = s.h
    wf = 0.5 * (s.w[:-1] + s.w[1:])
    dv = np.diff(s.v) / h
    if p == 2:
        return float(h * np.sum(law.eta(wf) * dv**2))
    phi1 = np.sign(s.v) * np.abs(s.v) ** (p - 1)
    return float(h * np.sum(law.eta(wf) * np.diff(phi1) / h * dv))


class _Recorder:
    def __init__(self, cfg: SolverConfig, law):
        self.cfg = cfg
        self.law = law
        self.data = {k: [] for k in ("t", "dt", "momentum", "energy", "heat", "kinetic",
                                     "clamped_mass", "clamped_cells", "sink_loss", "max_coeff")}
        for spec in cfg.entropies:
            self.data[f"entropy_{spec.label}"] = []
            if cfg.track_production:
                self.data[f"production_{spec.label}"] = []
        for p in cfg.lp_ps:
            self.data[f"lp_v_{p:g}"] = []
            self.data[f"lp_e_{p:g}"] = []
        for p in cfg.dissipation_ps:
            self.data[f"dissipation_{p:g}"] = []

    def record(self, s: State, rep: StepReport | None, prev: State | None):
        from .model import entropy_production

        d = self.data
        h = s.h
        e = s.energy_density
        d["t"].append(s.t)
        d["dt"].append(rep.dt_used if rep else 0.0)
        d["momentum"].append(float(h * np.sum(s.v)))
        d["energy"].append(float(h * np.sum(e)))
        d["heat"].append(float(h * np.sum(s.w)))
        d["kinetic"].append(float(0.5 * h * np.sum(s.v**2)))
        d["clamped_mass"].append(rep.clamped_mass if rep else 0.0)
        d["clamped_cells"].append(rep.clamped_cells if rep else 0)
        d["max_coeff"].append(rep.max_coeff if rep else _max_coeff(s.w, self.law, self.cfg.form))
        a = getattr(self.law, "sink_a", 0.0)
        loss = 0.0
        if rep and prev is not None and a > 0:
            loss = float(rep.dt_used * h * np.sum(_sink(prev.w, self.law)))
        d["sink_loss"].append(loss)
        for spec in self.cfg.entropies:
            if spec.kind == "log" and np.any(s.w <= 0):
                d[f"entropy_{spec.label}"].append(math.nan)
            else:
                d[f"entropy_{spec.label}"].append(float(h * np.sum(spec.sigma(s.w))))
            if self.cfg.track_production:
                d[f"production_{spec.label}"].append(entropy_production(s, spec, self.law))
        for p in self.cfg.lp_ps:
            d[f"lp_v_{p:g}"].append(_lp(s.v, p, h))
            d[f"lp_e_{p:g}"].append(_lp(e, p, h))
        # dissipation over the step just taken, left-point rule
        for p in self.cfg.dissipation_ps:
            inc = 0.0
            if rep and prev is not None:
                inc = rep.dt_used * _dissipation_density(prev, self.law, p)
            d[f"dissipation_{p:g}"].append(inc)

    def arrays(self) -> dict:
        return {k: np.asarray(v) for k, v in self.data.items()}


def run(initial: State, cfg: SolverConfig) -> SnapshotSeries:
    """Integrate from ``initial.t`` and land exactly on every snapshot time."""
    law = cfg.law
    step = step_energy if cfg.form == "energy" else step_primitive
    s = initial
    if cfg.form == "energy" and s.e is None:
        s = s.replace(e=0.5 * s.v**2 + s.w)
    s0 = s
    targets = [t for t in cfg.targets() if t >= s.t]
    snaps = set(cfg.snapshot_times) | {float(cfg.t_end)}
    rec = _Recorder(cfg, law)
    rec.record(s, None, None)
    states = []
    if s.t in snaps:
        states.append(s)
    for target in targets:
        while s.t < target:
            dt = _stable_dt(s, law, cfg.cfl, cfg.form)
            remaining = target - s.t
            if dt >= remaining * (1 - 1e-12):
                dt = remaining
            new, rep = step(s, dt, law, cfg.w_clamp_tol)
            if dt == remaining:
                new = new.replace(t=target)
            rec.record(new, rep, s)
            s = new
        if target > initial.t and target in snaps:
            states.append(s)
    return SnapshotSeries(states=states, diag=rec.arrays(), config=cfg, law=law, initial=s0)
