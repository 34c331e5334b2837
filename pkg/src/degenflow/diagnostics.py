"""Verification of conservation laws, monotone functionals and decay estimates.

Every check reads a SnapshotSeries. Per-step scalars recorded by the
solver are used when present, snapshots otherwise.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError
from .model import EntropySpec, State, entropy
from .solver import SnapshotSeries, _dissipation_density

MONO_TOL = 1e-10


def _nonincreasing(x, tol=MONO_TOL):
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return True, 0.0
    # allowed growth per step is relative; exact zeros stay exact
    jump = np.diff(x) - tol * np.abs(x[:-1])
    worst = float(np.max(jump))
    return worst <= 0.0, worst


def _nondecreasing(x, tol=MONO_TOL):
    return _nonincreasing(-np.asarray(x, dtype=float), tol)


# ---- functionals phi(v, w) --------------------------------------------------


@dataclass(frozen=True)
class Functional:
    """Density ``phi(v, w)`` with the second derivatives needed for its rate."""

    name: str
    f: Callable
    fw: Callable
    fvv: Callable
    fvw: Callable
    fww: Callable


def _zero(v, w):
    return np.zeros_like(np.asarray(v, dtype=float) + np.asarray(w, dtype=float))


def _one(v, w):
    return np.ones_like(np.asarray(v, dtype=float) + np.asarray(w, dtype=float))


MOMENTUM = Functional("momentum", lambda v, w: v + 0 * w, _zero, _zero, _zero, _zero)
ENERGY = Functional("energy", lambda v, w: 0.5 * v**2 + w, _one, _one, _zero, _zero)
KINETIC = Functional("kinetic", lambda v, w: 0.5 * v**2 + 0 * w, _zero, _one, _zero, _zero)


def entropy_functional(spec: EntropySpec) -> Functional:
    return Functional(f"entropy_{spec.label}", lambda v, w: spec.sigma(w) + 0 * v,
                      lambda v, w: spec.dsigma(w), _zero, _zero, lambda v, w: spec.d2sigma(w))


def rate_density(s: State, phi: Functional, c) -> float:
    """Face quadrature of ``eta (phi_w - phi_vv)|v'|^2 - (eta + kappa) phi_vw v'w' - kappa phi_ww |w'|^2``."""
    h = s.h
    vf = 0.5 * (s.v[:-1] + s.v[1:])
    wf = 0.5 * (s.w[:-1] + s.w[1:])
    dv = np.diff(s.v) / h
    dw = np.diff(s.w) / h
    wet = wf > 0
    eta, kap = c.eta(wf[wet]), c.kappa(wf[wet])
    vf, wf, dv, dw = vf[wet], wf[wet], dv[wet], dw[wet]
    r = (eta * (phi.fw(vf, wf) - phi.fvv(vf, wf)) * dv**2
         - (eta + kap) * phi.fvw(vf, wf) * dv * dw
         - kap * phi.fww(vf, wf) * dw**2)
    return float(h * np.sum(r))


def functional_value(s: State, phi: Functional) -> float:
    if phi.name == "energy":
        return float(s.h * np.sum(s.energy_density))
    return float(s.h * np.sum(phi.f(s.v, s.w)))


@dataclass
class RateCheck:
    times: np.ndarray
    rate: np.ndarray
    predicted: np.ndarray
    max_mismatch: float
    scale: float

    @property
    def normalized(self) -> float:
        return self.max_mismatch / self.scale if self.scale > 0 else 0.0


def functional_rate_check(series: SnapshotSeries, phi: Functional, c) -> RateCheck:
    """Finite-difference rate of ``h sum phi`` between snapshots against the trapezoid of its predicted rate.

    ``scale`` is ``max |R_phi|``; when the predicted rate vanishes
    identically it falls back to ``max |Phi| / duration`` so that round-off
    results stay round-off.
    """
    st = series.states
    if len(st) < 2:
        raise ConfigurationError("rate check needs at least two snapshots")
    t = np.array([s.t for s in st])
    val = np.array([functional_value(s, phi) for s in st])
    R = np.array([rate_density(s, phi, c) for s in st])
    rate = np.diff(val) / np.diff(t)
    pred = 0.5 * (R[:-1] + R[1:])
    mismatch = float(np.max(np.abs(rate - pred)))
    scale = float(np.max(np.abs(R)))
    if scale == 0:
        scale = float(np.max(np.abs(val))) / max(t[-1] - t[0], 1e-300)
    return RateCheck(times=0.5 * (t[:-1] + t[1:]), rate=rate, predicted=pred,
                     max_mismatch=mismatch, scale=scale)


# ---- monotone quantities ----------------------------------------------------


@dataclass
class Verdict:
    name: str
    passed: bool
    value: float = 0.0
    detail: str = ""


def _lp(a, p, h):
    if math.isinf(p):
        return float(np.max(np.abs(a)))
    return float((h * np.sum(np.abs(a) ** p)) ** (1.0 / p))


@dataclass
class LpResult:
    p: float
    times: np.ndarray
    v_norms: np.ndarray
    e_norms: np.ndarray | None
    passed: bool
    worst_increase: float


def lp_monitor(series: SnapshotSeries, p: float, tol: float = MONO_TOL) -> LpResult:
    """``||v||_p`` nonincreasing per step; for energy-form runs with eta = kappa also ``||e||_p``."""
    key = f"lp_v_{p:g}"
    if key in series.diag:
        t = series.diag["t"]
        vn = series.diag[key]
        en = series.diag[f"lp_e_{p:g}"]
    else:
        t = series.times
        vn = np.array([_lp(s.v, p, s.h) for s in series.states])
        en = np.array([_lp(s.energy_density, p, s.h) for s in series.states])
    ok, worst = _nonincreasing(vn, tol)
    check_e = (series.config is not None and series.config.form == "energy"
               and getattr(series.law, "eta_equals_kappa", False))
    if check_e:
        ok_e, worst_e = _nonincreasing(en, tol)
        ok = ok and ok_e
        worst = max(worst, worst_e)
    return LpResult(p=p, times=np.asarray(t), v_norms=np.asarray(vn),
                    e_norms=np.asarray(en) if check_e else None, passed=bool(ok), worst_increase=worst)


def entropy_monitor(series: SnapshotSeries, spec: EntropySpec = EntropySpec("sqrt"),
                    tol: float = MONO_TOL) -> Verdict:
    key = f"entropy_{spec.label}"
    if key in series.diag:
        vals = series.diag[key]
    else:
        vals = np.array([entropy(s, spec) for s in series.states])
    ok, worst = _nondecreasing(vals, tol)
    return Verdict(key, bool(ok), worst)


def heat_content_monitor(series: SnapshotSeries, tol: float = MONO_TOL) -> Verdict:
    """``int w`` nondecreasing and bounded by the energy; with a sink, energy nonincreasing instead."""
    d = series.diag
    heat = d["heat"] if "heat" in d else np.array([s.h * s.w.sum() for s in series.states])
    energy = d["energy"] if "energy" in d else np.array([s.h * s.energy_density.sum() for s in series.states])
    sink = getattr(series.law, "sink_a", 0.0) or 0.0
    if sink > 0:
        ok, worst = _nonincreasing(energy, tol)
        return Verdict("energy_nonincreasing", bool(ok), worst)
    ok, worst = _nondecreasing(heat, tol)
    bounded = bool(np.all(heat <= energy[0] * (1 + tol) + 1e-300))
    return Verdict("heat_nondecreasing", bool(ok and bounded), worst,
                   "" if bounded else "heat exceeds the initial energy")


def sink_balance(series: SnapshotSeries) -> float:
    """Max per-step mismatch between the energy loss and ``dt a h sum w^q``, relative to the loss."""
    d = series.diag
    dE = -np.diff(d["energy"])
    loss = d["sink_loss"][1:]
    scale = max(float(np.max(np.abs(loss))), 1e-300)
    return float(np.max(np.abs(dE - loss))) / scale


def momentum_drift(series: SnapshotSeries) -> float:
    """Max change of ``h sum v``, relative to ``max(|M0|, ||v0||_1)`` so zero-mean data stay meaningful."""
    m = series.diag["momentum"]
    first = series.initial if series.initial is not None else series.states[0]
    scale = max(abs(m[0]), float(first.h * np.sum(np.abs(first.v))), 1e-300)
    return float(np.max(np.abs(m - m[0])) / scale)


def energy_drift(series: SnapshotSeries) -> float:
    e = series.diag["energy"]
    return float(np.max(np.abs(e - e[0])) / max(abs(e[0]), 1e-300))


def production_mismatch(series: SnapshotSeries, spec: EntropySpec = EntropySpec("sqrt")) -> float:
    """Max over steps of ``|dS/dt - P|`` normalised by ``max P``; needs ``track_production``."""
    d = series.diag
    key = f"production_{spec.label}"
    if key not in d:
        raise ConfigurationError("run with track_production=True to compare dS/dt with the production")
    S = d[f"entropy_{spec.label}"]
    P = d[key]
    dt = d["dt"][1:]
    rate = np.diff(S) / dt
    scale = max(float(np.max(np.abs(P))), 1e-300)
    return float(np.max(np.abs(rate - P[:-1]))) / scale


# ---- budgets and comparison -------------------------------------------------


@dataclass
class BudgetResult:
    p: float
    accumulated: float
    bound: float
    passed: bool


def dissipation_budget(series: SnapshotSeries, c=None, p: float = 2.0, from_snapshots: bool = False) -> BudgetResult:
    """Accumulated ``int int eta (p-1)|v|^(p-2)|v'|^2`` against ``int |v0|^p / p``.

    Uses the solver's per-step left-point sums unless ``from_snapshots`` (or
    they are missing), in which case the trapezoid rule over snapshots.
    """
    c = c if c is not None else series.law
    key = f"dissipation_{p:g}"
    first = series.initial if series.initial is not None else series.states[0]
    bound = float(first.h * np.sum(np.abs(first.v) ** p) / p)
    if key in series.diag and not from_snapshots:
        acc = float(np.sum(series.diag[key]))
    else:
        t = series.times
        rates = np.array([_dissipation_density(s, c, p) for s in series.states])
        acc = float(np.trapezoid(rates, t)) if t.size > 1 else 0.0
    return BudgetResult(p=p, accumulated=acc, bound=bound, passed=bool(acc <= bound * (1 + 1e-6) + 1e-300))


def comparison_check(series: SnapshotSeries, M_star: float, tol: float = 1e-12) -> float:
    """Max over snapshots of ``(|v| - M* w)_+``; the initial data must satisfy the bound."""
    law = series.law
    if law is not None and not getattr(law, "eta_equals_kappa", False):
        raise ConfigurationError("comparison principle needs eta == kappa")
    first = series.initial if series.initial is not None else series.states[0]
    scale = max(float(np.max(np.abs(first.v))), 1.0)
    if np.any(np.abs(first.v) - M_star * first.w > tol * scale):
        raise ConfigurationError("initial data violate |v0| <= M* w0")
    return float(max(np.max(np.clip(np.abs(s.v) - M_star * s.w, 0.0, None)) for s in series.states))


# ---- support tracking -------------------------------------------------------


@dataclass
class SupportResult:
    times: np.ndarray
    left: np.ndarray
    right: np.ndarray
    fit: str
    speed: float = math.nan
    delta: float = math.nan
    intercept: float = math.nan

    @property
    def half_width(self) -> np.ndarray:
        return 0.5 * (self.right - self.left)


def support_edges(s: State, w_tol: float):
    """Outer faces of the outermost cells with ``w > w_tol`` (nan if dry)."""
    idx = np.flatnonzero(s.w > w_tol)
    if idx.size == 0:
        return math.nan, math.nan
    return s.x0 + idx[0] * s.h, s.x0 + (idx[-1] + 1) * s.h


def support_tracker(series: SnapshotSeries, w_tol: float | None = None, fit: str = "front",
                    t_star: float = 0.0, edge: str = "right") -> SupportResult:
    """Track support edges per snapshot and fit the last half of the window.

    ``front`` fits ``a + s t`` to the chosen edge; ``selfsimilar`` fits
    ``a (t + t*)^delta`` to the half-width in log-log form.
    """
    first = series.initial if series.initial is not None else series.states[0]
    if w_tol is None:
        w_tol = 1e-10 * float(np.max(first.w))
    if not w_tol > 0:
        raise ConfigurationError("support threshold must be positive")
    t = series.times
    lr = np.array([support_edges(s, w_tol) for s in series.states]).reshape(-1, 2)
    res = SupportResult(times=t, left=lr[:, 0], right=lr[:, 1], fit=fit)
    ok = np.isfinite(lr[:, 1])
    half = ok & (t >= t[0] + 0.5 * (t[-1] - t[0]))
    if half.sum() >= 2:
        if fit == "front":
            y = res.right if edge == "right" else -res.left
            s_, a_ = np.polyfit(t[half], y[half], 1)
            res.speed, res.intercept = float(s_), float(a_)
        elif fit == "selfsimilar":
            d_, a_ = np.polyfit(np.log(t[half] + t_star), np.log(res.half_width[half]), 1)
            res.delta, res.intercept = float(d_), float(math.exp(a_))
        else:
            raise ConfigurationError(f"unknown support fit {fit!r}")
    return res


# ---- exponential decay ------------------------------------------------------


@dataclass(frozen=True)
class DecayParams:
    V0: float
    E0: float
    domain_length: float
    c_eta: float
    c_kappa: float

    def __post_init__(self):
        if not self.domain_length > 0:
            raise ConfigurationError("domain length must be positive")
        if self.w_hat < 0:
            raise ConfigurationError("energy too small for the momentum: w_hat < 0")

    @classmethod
    def from_state(cls, s: State, c) -> "DecayParams":
        if not (getattr(c, "alpha", None) == 0.5 and getattr(c, "beta", None) == 0.5):
            raise ConfigurationError("decay estimate needs alpha = beta = 1/2 coefficients")
        return cls(V0=float(s.h * s.v.sum()), E0=float(s.h * s.energy_density.sum()),
                   domain_length=s.length, c_eta=c.eta0, c_kappa=c.kappa0)

    @property
    def v_hat(self) -> float:
        return self.V0 / self.domain_length

    @property
    def w_hat(self) -> float:
        L = self.domain_length
        return (self.E0 - self.V0**2 / (2 * L)) / L

    @property
    def lambda_N(self) -> float:
        return (math.pi / self.domain_length) ** 2

    @property
    def Lambda(self) -> float:
        return math.sqrt(self.w_hat) * min(self.c_eta, self.c_kappa) * self.lambda_N


@dataclass
class DecayResult:
    times: np.ndarray
    H: np.ndarray
    bound: np.ndarray
    passed: bool
    Lambda: float
    fitted_rate: float
    ceiling: float
    first_violation: float = math.nan


def relative_entropy(s: State, dp: DecayParams) -> float:
    return float(s.h * np.sum(0.5 * (s.v - dp.v_hat) ** 2 + (np.sqrt(s.w) - math.sqrt(dp.w_hat)) ** 2))


def decay_check(series: SnapshotSeries, dp: DecayParams, c=None, require_positive: bool = True,
                slack: float = 1e-3) -> DecayResult:
    """Compare ``H(t)`` with ``H(0) exp(-Lambda t)`` and fit the observed exponential rate.

    The ceiling is the linearised rate ``2 min(eta(w_hat), kappa(w_hat)) lambda_N``.
    """
    c = c if c is not None else series.law
    first = series.initial if series.initial is not None else series.states[0]
    if require_positive and not np.min(first.w) > 0:
        raise ConfigurationError("decay estimate needs w0 bounded away from zero")
    t = series.times - first.t
    H = np.array([relative_entropy(s, dp) for s in series.states])
    H0 = relative_entropy(first, dp)
    bound = H0 * np.exp(-dp.Lambda * t) * (1 + slack)
    viol = H > bound
    ceiling = 2 * min(float(c.eta(dp.w_hat)), float(c.kappa(dp.w_hat))) * dp.lambda_N
    pos = H > 1e-14 * max(H0, 1e-300)
    rate = math.nan
    if pos.sum() >= 2:
        rate = float(-np.polyfit(t[pos], np.log(H[pos]), 1)[0])
    first_bad = float(t[np.argmax(viol)]) if np.any(viol) else math.nan
    return DecayResult(times=t, H=H, bound=bound, passed=not bool(np.any(viol)), Lambda=dp.Lambda,
                       fitted_rate=rate, ceiling=ceiling, first_violation=first_bad)


# ---- report -----------------------------------------------------------------


@dataclass
class DiagnosticsReport:
    momentum_drift: float = 0.0
    energy_drift: float = 0.0
    heat_content_series: list = field(default_factory=list)
    entropy_series: dict = field(default_factory=dict)
    lp_series: dict = field(default_factory=dict)
    dissipation_sum: float = 0.0
    dissipation_bound: float = 0.0
    comparison_violation: float | None = None
    support_series: list = field(default_factory=list)
    decay_series: list = field(default_factory=list)
    exponent_fits: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    clamped_mass: float = 0.0

    def to_json(self) -> str:
        return json.dumps(_jsonable(asdict(self)), indent=2, allow_nan=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return None if not math.isfinite(float(obj)) else float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def build_report(series: SnapshotSeries, M_star: float | None = None, support_fit: str = "front",
                 t_star: float = 0.0, decay: DecayParams | None = None) -> DiagnosticsReport:
    """Snapshot-level summary of a run, suitable for JSON output."""
    rep = DiagnosticsReport()
    rep.momentum_drift = momentum_drift(series)
    rep.energy_drift = energy_drift(series)
    rep.clamped_mass = series.clamped_mass
    snaps = series.states
    rep.heat_content_series = [[s.t, float(s.h * s.w.sum())] for s in snaps]
    cfg = series.config
    specs = cfg.entropies if cfg is not None else (EntropySpec("sqrt"),)
    for spec in specs:
        if spec.kind == "log" and any(np.any(s.w <= 0) for s in snaps):
            continue
        rep.entropy_series[spec.label] = [[s.t, entropy(s, spec)] for s in snaps]
        rep.verdicts[f"entropy_{spec.label}_nondecreasing"] = entropy_monitor(series, spec).passed
    for p in (cfg.lp_ps if cfg is not None else (1.0, 2.0, math.inf)):
        res = lp_monitor(series, p)
        rep.lp_series[f"{p:g}"] = [[s.t, _lp(s.v, p, s.h)] for s in snaps]
        rep.verdicts[f"lp_{p:g}_nonincreasing"] = res.passed
    budget = dissipation_budget(series, p=2.0)
    rep.dissipation_sum, rep.dissipation_bound = budget.accumulated, budget.bound
    rep.verdicts["dissipation_budget"] = budget.passed
    rep.verdicts["heat_content"] = heat_content_monitor(series).passed
    if M_star is not None:
        rep.comparison_violation = comparison_check(series, M_star)
    sup = support_tracker(series, fit=support_fit, t_star=t_star)
    rep.support_series = [[float(t), float(a), float(b)] for t, a, b in zip(sup.times, sup.left, sup.right)]
    if support_fit == "front":
        rep.exponent_fits["front_speed"] = sup.speed
    else:
        rep.exponent_fits["support_delta"] = sup.delta
    if decay is not None:
        dec = decay_check(series, decay, require_positive=False)
        rep.decay_series = [[float(t), float(h)] for t, h in zip(dec.times, dec.H)]
        rep.exponent_fits["decay_rate"] = dec.fitted_rate
        rep.verdicts["decay_bound"] = dec.passed
    return rep
