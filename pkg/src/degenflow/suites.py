"""Acceptance suites: the reference runs and the verdicts computed from them.

Every run is cached, so criteria sharing a run (the identity suite reads
all of them) pay for it once per process.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import diagnostics as dg
from .exact import (BarenblattParams, CompactSolutionParams, ShapeParams, barenblatt, compact_solution,
                    delayed_family, delayed_labels, front_exact, front_exact_derivative,
                    residual_check, residual_convergence, shape_w, similarity_ex22, steady_profile,
                    theta)
from .fronts import FrontParams, classify_front, front_rhs, integrate_front, integrate_similarity
from .model import Coefficients, EntropySpec, energy, grid_state, momentum
from .selfsim import ScalingSpec, linear_edge, profile_distance, rescale_snapshot, rescaled_exponent_fit
from .solver import PiecewiseLaw, SolverConfig, run

# frozen oracle: minimum of W on [0, 10] for the V'(0) = 1/2 similarity trajectory,
# from solve_ivp DOP853 at rtol 1e-13, atol 1e-15, minimised on the dense output
W_MIN_HALF_SLOPE = 0.5693360324067211


@dataclass
class Check:
    name: str
    passed: bool
    value: float = math.nan
    limit: float = math.nan
    detail: str = ""


@dataclass
class Criterion:
    number: int
    title: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, passed, value=math.nan, limit=math.nan, detail=""):
        self.checks.append(Check(name, bool(passed), float(value), float(limit), detail))

    def line(self) -> str:
        bad = [c.name for c in self.checks if not c.passed]
        status = "PASS" if self.passed else "FAIL"
        tail = f" (failed: {', '.join(bad)})" if bad else ""
        return f"criterion {self.number} [{status}] {self.title}{tail}"

    def as_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "value": _finite(c.value),
                            "limit": _finite(c.limit), "detail": c.detail} for c in self.checks]}


def _finite(x):
    return x if math.isfinite(x) else None


# ---- reference runs ---------------------------------------------------------

COMPACT = CompactSolutionParams(B=1.0, x_star=2.0, t_star=0.25)
COMPACT_LEVELS = (128, 256, 512)
COMPACT_T = 0.5


@lru_cache(maxsize=None)
def compact_run(n: int, form: str = "primitive"):
    s0 = grid_state(0.0, -5.0, 5.0, n, lambda x: compact_solution(0.0, x, COMPACT)[0],
                    lambda x: compact_solution(0.0, x, COMPACT)[1])
    cfg = SolverConfig(form=form, t_end=COMPACT_T, snapshot_times=(0.0, 0.25), law=Coefficients())
    return run(s0, cfg)


BARENBLATT = BarenblattParams.from_amplitude(1.0, beta=1.0, kappa0=1.0, t_star=1.0)
BARENBLATT_T = 7.0


@lru_cache(maxsize=None)
def barenblatt_run(n: int = 512):
    s0 = grid_state(0.0, -6.0, 6.0, n, lambda x: 0 * x, lambda x: barenblatt(0.0, x, BARENBLATT))
    cfg = SolverConfig(t_end=BARENBLATT_T, snapshot_times=tuple(np.linspace(0, BARENBLATT_T, 57)),
                       law=Coefficients(kappa0=BARENBLATT.kappa0, beta=BARENBLATT.beta))
    return run(s0, cfg)


DECAY_LAW = Coefficients(eta0=1.0, alpha=0.5, kappa0=1.0, beta=0.5)


@lru_cache(maxsize=None)
def decay_run(n: int = 256):
    s0 = grid_state(0.0, 0.0, 1.0, n, lambda x: 0 * x, lambda x: 1 + 0.1 * np.cos(np.pi * x))
    cfg = SolverConfig(t_end=0.5, snapshot_times=tuple(np.linspace(0, 0.5, 51)), law=DECAY_LAW)
    return run(s0, cfg)


DISJOINT_LAW = Coefficients(eta0=1.5, alpha=0.5, kappa0=1.5, beta=0.5)
DISJOINT_ELL = 8.0


@lru_cache(maxsize=None)
def disjoint_run(n: int = 256):
    ell = DISJOINT_ELL
    s0 = grid_state(0.0, -ell, ell, n, lambda x: np.sign(x) * np.maximum(0.0, 2 * np.abs(x) - ell),
                    lambda x: (np.maximum(1 - x**2, 0.0) / 15) ** 2)
    cfg = SolverConfig(t_end=10.0, snapshot_times=tuple(np.linspace(0, 10, 41)), law=DISJOINT_LAW)
    return run(s0, cfg)


TWO_CAP_LAW = Coefficients(eta0=2.0, alpha=1.0, kappa0=0.5, beta=1.0)
TWO_CAP_SNAPS = tuple(float(t) for t in np.round(np.concatenate(
    [np.linspace(0, 0.1, 11), np.linspace(0.2, 1.5, 14), np.arange(2.0, 10.5, 1.0)]), 10))


@lru_cache(maxsize=None)
def two_cap_run(n: int = 512, half_width: float = 20.0):
    s0 = grid_state(0.0, -half_width, half_width, n,
                    lambda x: np.maximum(0.0, 10 - 10 * (x + 2) ** 2),
                    lambda x: np.maximum(0.0, 15 - 15 * (x - 2) ** 2))
    cfg = SolverConfig(form="energy", t_end=10.0, snapshot_times=TWO_CAP_SNAPS, law=TWO_CAP_LAW)
    return run(s0, cfg)


PIECEWISE_B = 1.0


@lru_cache(maxsize=None)
def piecewise_run(n: int = 256):
    B = PIECEWISE_B

    def vfun(x):
        return 1.8 * B * np.maximum(0.0, 1 - x**2)

    s0 = grid_state(0.0, -3.0, 3.0, n, vfun, lambda x: B * vfun(x) - 0.5 * vfun(x) ** 2)
    s0 = s0.replace(e=B * s0.v)
    cfg = SolverConfig(form="energy", t_end=0.5, snapshot_times=(0.0, 0.1, 0.25), law=PiecewiseLaw(B))
    return run(s0, cfg)


PRODUCTION_LEVELS = (32, 64, 128, 256)


@lru_cache(maxsize=None)
def production_run(n: int, form: str = "primitive"):
    s0 = grid_state(0.0, 0.0, 1.0, n, lambda x: 0.5 * np.cos(np.pi * x),
                    lambda x: 1 + 0.5 * np.cos(2 * np.pi * x))
    cfg = SolverConfig(form=form, t_end=0.05, law=Coefficients(), track_production=True)
    return run(s0, cfg)


def acceptance_runs():
    """Name -> series for every run the identity suite inspects."""
    runs = {f"compact_{n}_{f}": compact_run(n, f) for n in COMPACT_LEVELS for f in ("primitive", "energy")}
    runs["barenblatt"] = barenblatt_run()
    runs["decay"] = decay_run()
    runs["disjoint"] = disjoint_run()
    runs["two_cap"] = two_cap_run()
    runs["piecewise"] = piecewise_run()
    return runs


def _l1(s, ref_v, ref_w):
    return float(s.h * (np.sum(np.abs(s.v - ref_v)) + np.sum(np.abs(s.w - ref_w))))


# ---- criteria ---------------------------------------------------------------

def criterion_1() -> Criterion:
    cr = Criterion(1, "explicit compact solution: convergence and conserved integrals")
    errs, drift_m, drift_e_energy, gap_m, gap_e = [], [], [], [], []
    for n in COMPACT_LEVELS:
        ser = compact_run(n)
        s = ser.states[-1]
        v, w = compact_solution(COMPACT_T, s.x, COMPACT)
        errs.append(_l1(s, v, w))
        drift_m.append(dg.momentum_drift(ser))
        drift_e_energy.append(dg.energy_drift(compact_run(n, "energy")))
        gap_m.append(abs(momentum(ser.initial) - 8 * math.sqrt(2)))
        gap_e.append(abs(energy(ser.initial) - 16.0))
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    cr.add("L1 error ratio per doubling", min(ratios) >= 1.5, min(ratios), 1.5,
           "errors " + ", ".join(f"{e:.3e}" for e in errs))
    cr.add("exact integrals", math.isclose(COMPACT.momentum(), 8 * math.sqrt(2), rel_tol=1e-15)
           and math.isclose(COMPACT.energy(), 16.0, rel_tol=1e-15), COMPACT.energy(), 16.0)
    cr.add("momentum round-off per step", max(drift_m) <= 1e-12, max(drift_m), 1e-12)
    cr.add("energy round-off per step (energy form)", max(drift_e_energy) <= 1e-12, max(drift_e_energy), 1e-12)
    # quadrature of the sampled data against the closed-form integrals: O(h^2)
    rm = [gap_m[i] / gap_m[i + 1] for i in range(2)]
    re = [gap_e[i] / gap_e[i + 1] for i in range(2)]
    order = min(min(rm), min(re))
    cr.add("discrete integrals O(h^2) vs closed form", order >= 3.0, order, 3.0,
           f"momentum gaps {gap_m}, energy gaps {gap_e}")
    return cr


def criterion_2() -> Criterion:
    cr = Criterion(2, "Barenblatt support radius and spreading exponent")
    ser = barenblatt_run()
    sup = dg.support_tracker(ser, w_tol=1e-10 * float(np.max(ser.initial.w)), fit="selfsimilar",
                             t_star=BARENBLATT.t_star)
    radius = BARENBLATT.radius(BARENBLATT_T)
    got = float(sup.half_width[-1])
    rel = abs(got - radius) / radius
    cr.add("support radius at t_end", rel <= 0.02, rel, 0.02, f"measured {got:.5f}, exact {radius:.5f}")
    cr.add("fitted delta", abs(sup.delta - 1 / 3) <= 0.01, sup.delta, 1 / 3)
    return cr


def _parabola_deviation(kappa0: float) -> float:
    p = FrontParams(kappa0=kappa0)
    V0 = 1.0
    tr = integrate_front((0.0, V0, float(p.parabola(V0))), p, -20.0)
    return float(np.max(np.abs(tr.W - p.parabola(tr.V)) / tr.W))


def _front_residual(case: str, kappa0: float, c_F: float) -> float:
    z = np.geomspace(1e-3, 5.0, 200)
    p = FrontParams(kappa0=kappa0, c_F=c_F)
    V, W = front_exact(z, case, 1.0, kappa0, c_F)
    dV, dW = front_exact_derivative(z, case, 1.0, kappa0, c_F)
    rV, rW = front_rhs(V, W, p)
    return float(max(np.max(np.abs(dV - rV) / (1 + np.abs(dV))), np.max(np.abs(dW - rW) / (1 + np.abs(dW)))))


def criterion_3() -> Criterion:
    cr = Criterion(3, "front ODE battery")
    for k in (0.1, 0.25, 0.4):
        dev = _parabola_deviation(k)
        cr.add(f"parabola invariance kappa0={k:g}", dev <= 1e-8, dev, 1e-8)
    for case, k in (("pme", 2.0), ("pme", 0.25), ("coupled", 0.25), ("coupled_parabola", 0.1)):
        for c_F in (1.0, 1.7):
            r = _front_residual(case, k, c_F)
            cr.add(f"closed-form {case} kappa0={k:g} c_F={c_F:g} residual", r <= 1e-10, r, 1e-10)
    for case, k in (("coupled", 0.25), ("pme", 2.0)):
        c_F = 1.7
        p = FrontParams(kappa0=k, c_F=c_F)
        V, W = front_exact(1.0, case, 1.0, k, c_F)
        tr = integrate_front((1.0, float(V), float(W)), p, -5.0)
        cl = classify_front(tr, p)
        rel = abs(cl.c_F_estimate / c_F - 1)
        expected = "coupled_front" if case == "coupled" else "pme_front"
        cr.add(f"classifier c_F recovery kappa0={k:g}", rel <= 0.02 and cl.label == expected, rel, 0.02,
               f"label {cl.label}")
    return cr


def criterion_4() -> Criterion:
    cr = Criterion(4, "similarity ODE regimes (eta = kappa = w, W(0) = 1)")
    c = Coefficients()
    tr = integrate_similarity(0.0, 1 / math.sqrt(2), 1.0, c, y_max=10.0)
    yy = np.linspace(0.0, 1.9, 400)
    sol = tr.sol(yy)
    V, W = similarity_ex22(yy)
    err = float(max(np.max(np.abs(sol[0] - V)), np.max(np.abs(sol[2] - W))))
    cr.add("explicit profile match on [0, 1.9]", err <= 1e-6, err, 1e-6)
    tr = integrate_similarity(0.0, 0.5, 1.0, c, y_max=10.0)
    wmin = float(np.min(tr.W))
    reached = tr.termination == "reached_z_max" and tr.z_end == 10.0
    cr.add("V'(0)=1/2 reaches y=10 above the floor", reached and wmin > 0, wmin, 0.0)
    gap = abs(wmin - W_MIN_HALF_SLOPE) / W_MIN_HALF_SLOPE
    cr.add("V'(0)=1/2 floor vs frozen rerun", gap <= 1e-8, gap, 1e-8)
    tr = integrate_similarity(0.0, 1.0, 1.0, c, y_max=10.0)
    ok = tr.termination == "hit_W_floor" and 0 < tr.z_end < 2 and tr.trailing_WVp > 0
    cr.add("V'(0)=1 terminates in (0, 2) with W V' > 0", ok, tr.z_end, 2.0,
           f"trailing W V' = {tr.trailing_WVp:.4g}")
    return cr


def criterion_5() -> Criterion:
    cr = Criterion(5, "exponential decay and its counterexample")
    ser = decay_run()
    dp = dg.DecayParams.from_state(ser.initial, DECAY_LAW)
    res = dg.decay_check(ser, dp)
    cr.add("Lambda equals pi^2", math.isclose(res.Lambda, math.pi**2, rel_tol=1e-12), res.Lambda, math.pi**2)
    worst = float(np.max(res.H / (res.bound / (1 + 1e-3))))
    cr.add("H(t) <= H(0) exp(-Lambda t)(1 + 1e-3)", res.passed, worst, 1 + 1e-3)
    ceil = res.ceiling * 1.05
    cr.add("fitted rate below the linearised ceiling", res.fitted_rate <= ceil, res.fitted_rate, ceil)
    ser = disjoint_run()
    s0 = ser.initial
    dp = dg.DecayParams.from_state(s0, DISJOINT_LAW)
    res = dg.decay_check(ser, dp, require_positive=False)
    T_ell = (DISJOINT_ELL / 2) ** 2.5 - 1
    viol = (not res.passed) and res.first_violation < T_ell
    cr.add("disjoint supports violate the bound before T_ell (expected fail)", viol,
           res.first_violation, T_ell)
    return cr


def _identity_checks(cr, name, ser, primitive_C=None):
    cfg = ser.config
    E0 = abs(ser.diag["energy"][0])
    m = dg.momentum_drift(ser)
    cr.add(f"{name}: momentum drift", m <= 1e-12, m, 1e-12)
    e = dg.energy_drift(ser)
    if cfg.form == "energy" or primitive_C is None:
        cr.add(f"{name}: energy drift", e <= 1e-12, e, 1e-12)
    else:
        lim = primitive_C * ser.initial.h
        cr.add(f"{name}: energy drift <= C h", e <= lim, e, lim)
    hv = dg.heat_content_monitor(ser)
    cr.add(f"{name}: heat content nondecreasing", hv.passed, hv.value, 0.0)
    for p in cfg.lp_ps:
        lp = dg.lp_monitor(ser, p)
        cr.add(f"{name}: ||v||_{p:g} nonincreasing", lp.passed, lp.worst_increase, 0.0)
    ent = dg.entropy_monitor(ser, EntropySpec("sqrt"))
    cr.add(f"{name}: sqrt entropy nondecreasing", ent.passed, ent.value, 0.0)
    b = dg.dissipation_budget(ser, p=2.0)
    cr.add(f"{name}: dissipation budget", b.passed, b.accumulated, b.bound)
    cm = ser.clamped_mass
    cr.add(f"{name}: clamped mass", cm <= 1e-10 * E0, cm, 1e-10 * E0)


def primitive_energy_constant():
    """``C`` in ``drift <= C h`` for the primitive form, certified on the compact refinement."""
    drifts = [dg.energy_drift(compact_run(n)) for n in COMPACT_LEVELS]
    hs = [compact_run(n).initial.h for n in COMPACT_LEVELS]
    ratios = [drifts[i] / drifts[i + 1] for i in range(len(drifts) - 1)]
    return max(d / h for d, h in zip(drifts, hs)), ratios


def production_slopes(form: str = "primitive"):
    mis = np.array([dg.production_mismatch(production_run(n, form)) for n in PRODUCTION_LEVELS])
    hs = np.array([production_run(n, form).initial.h for n in PRODUCTION_LEVELS])
    slope = float(np.polyfit(np.log(hs), np.log(mis), 1)[0])
    return mis, slope


def criterion_6() -> Criterion:
    cr = Criterion(6, "identity suite on every acceptance run")
    C, ratios = primitive_energy_constant()
    # drift <= C h holds at every level only if the drift shrinks at least linearly
    cr.add("primitive energy drift certified O(h)", min(ratios) >= 1.8, min(ratios), 1.8, f"C = {C:.4g}")
    for name, ser in acceptance_runs().items():
        _identity_checks(cr, name, ser, primitive_C=C)
    for form in ("primitive", "energy"):
        mis, slope = production_slopes(form)
        cr.add(f"dS/dt vs production mismatch slope ({form})", slope >= 0.9 and bool(np.all(np.diff(mis) < 0)),
               slope, 0.9, "mismatch " + ", ".join(f"{m:.3e}" for m in mis))
    return cr


KINETIC_RESOLUTION = 1e-15
TWO_CAP_SPEC = ScalingSpec(theta=1.0, beta=1.0, y_min=-10.0, y_max=10.0, n_y=2001)


def two_cap_barenblatt(E0: float) -> BarenblattParams:
    return BarenblattParams(E0=E0, beta=TWO_CAP_LAW.beta, kappa0=TWO_CAP_LAW.kappa0, t_star=1.0)


def two_cap_measurements():
    ser = two_cap_run()
    E0 = energy(ser.initial)
    bp = two_cap_barenblatt(E0)
    out = {"E0": E0, "V0": momentum(ser.initial), "distance": {}, "sigma": {}}
    for s in ser.states:
        r = rescale_snapshot(s, TWO_CAP_SPEC)
        target = bp.c * shape_w(r.y, ShapeParams(1.0, bp.b, 1.0))
        out["distance"][s.t] = profile_distance(r.w, target, r.y)
        if s.t >= 1.0:
            guard = 2 * s.h / (s.t + 1.0) ** TWO_CAP_SPEC.delta
            sig = []
            for side in ("right", "left"):
                edge = linear_edge(r.y, r.w, side)
                sig.append(rescaled_exponent_fit(r.y, r.v, side=side, edge=edge, guard=guard))
            out["sigma"][s.t] = tuple(sig)
    k = ser.diag["kinetic"]
    moving = np.flatnonzero(np.diff(k) != 0)
    out["contact_time"] = float(ser.diag["t"][moving[0]]) if moving.size else math.nan
    out["kinetic"] = k
    return out


def criterion_7() -> Criterion:
    cr = Criterion(7, "rescaled convergence of the two-cap experiment")
    ser = two_cap_run()
    m = two_cap_measurements()
    k = m["kinetic"]
    dk = np.diff(k)
    s0 = ser.initial
    # v sits where w = 0, so nothing dissipates until the heat front arrives
    disjoint = not np.any((s0.w > 0) & (np.abs(np.gradient(s0.v)) > 0))
    i0 = int(np.flatnonzero(dk != 0)[0])
    cr.add("kinetic energy constant during the waiting phase", disjoint and bool(np.all(k[: i0 + 1] == k[0])),
           m["contact_time"], math.nan, "initial supports are disjoint")
    # the first contact is made by the vanishingly small discrete foot of w; strict
    # decrease is asserted once the per-step loss is resolvable in double precision
    i1 = int(np.flatnonzero(dk < -KINETIC_RESOLUTION * k[:-1])[0])
    t1 = float(ser.diag["t"][i1])
    cr.add("kinetic energy nonincreasing on every step", bool(np.all(dk <= 0)), float(np.max(dk)), 0.0)
    cr.add("kinetic energy strictly decreasing once resolvable", bool(np.all(dk[i1:] < 0)),
           float(np.max(dk[i1:])), 0.0, f"from t = {t1:.4f}")
    snaps_k = np.array([0.5 * s.h * np.sum(s.v**2) for s in ser.states if s.t >= t1])
    cr.add("kinetic energy strictly decreasing across snapshots",
           bool(np.all(np.diff(snaps_k) < 0)), float(np.max(np.diff(snaps_k))), 0.0)
    d1, d10 = m["distance"][1.0][0], m["distance"][10.0][0]
    cr.add("L1 distance to the Barenblatt cap: t=10 below t=1", d10 < d1, d10, d1)
    sig = m["sigma"][10.0]
    worst = max(abs(s - 0.25) for s in sig)
    cr.add("rescaled v boundary exponent at t=10", worst <= 0.1, max(sig, key=lambda s: abs(s - 0.25)), 0.25,
           f"right {sig[0]:.4f}, left {sig[1]:.4f}")
    return cr


DELAYS = ((0.0, 0.0), (0.2, 0.4))


def delayed_grid():
    T, X = np.meshgrid(np.linspace(0.05, 0.9, 35), np.linspace(-4.9, 4.9, 99))
    return T, X


def criterion_8() -> Criterion:
    cr = Criterion(8, "two exact solutions from the same initial data")
    c = Coefficients()
    T, X = delayed_grid()
    x0 = np.linspace(-4.9, 4.9, 999)
    same = np.subtract(delayed_family(0.0, x0, COMPACT, *DELAYS[0]), delayed_family(0.0, x0, COMPACT, *DELAYS[1]))
    cr.add("identical initial data", float(np.max(np.abs(same))) == 0.0, float(np.max(np.abs(same))), 0.0)
    apart = np.subtract(delayed_family(0.5, x0, COMPACT, *DELAYS[0]), delayed_family(0.5, x0, COMPACT, *DELAYS[1]))
    cr.add("distinct at t=0.5", float(np.max(np.abs(apart))) > 0.1, float(np.max(np.abs(apart))), 0.1)
    for tp, tm in DELAYS:
        def f(t, x, tp=tp, tm=tm):
            return delayed_family(t, x, COMPACT, tp, tm)

        def lab(t, x, tp=tp, tm=tm):
            return delayed_labels(t, x, COMPACT, tp, tm)

        maxima, ratios = residual_convergence(f, c, T, X, [4e-3, 2e-3, 1e-3], lab, (0.0, 0.95))
        fine = residual_check(f, c, T, X, 1e-3, 1e-3, lab, (0.0, 0.95))
        cr.add(f"delays {tp:g},{tm:g}: second-order residual decay", min(ratios) >= 3.5, min(ratios), 3.5,
               f"maxima {', '.join(f'{m:.3e}' for m in maxima)}; {int(fine.valid.sum())} valid samples")
    return cr


def _theta_quad(sigma: float, d: int) -> float:
    if d == 1:
        return 2 * quad(lambda y: (1 - y * y) ** sigma, 0, 1, epsabs=1e-14, epsrel=1e-13)[0]
    # surface area of the unit sphere times the radial integral
    area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    return area * quad(lambda r: (1 - r * r) ** sigma * r ** (d - 1), 0, 1, epsabs=1e-14, epsrel=1e-13)[0]


# the listed value for (1/2, 2) is pi^(3/2)/4; the Gamma-function formula and
# quadrature both give 2 pi/3, so that entry is expected to fail
THETA_LISTED = ((0.0, 1, 2.0), (1.0, 1, 4 / 3), (0.5, 2, math.pi**1.5 / 4))


def criterion_9() -> Criterion:
    cr = Criterion(9, "closed-form battery")
    for sigma, d, listed in THETA_LISTED:
        got = theta(sigma, d)
        q = _theta_quad(sigma, d)
        cr.add(f"Theta({sigma:g},{d}) vs quadrature", abs(got - q) <= 1e-8, abs(got - q), 1e-8)
        cr.add(f"Theta({sigma:g},{d}) vs listed value", abs(got - listed) <= 1e-8, abs(got - listed), 1e-8,
               f"computed {got:.15g}, quadrature {q:.15g}, listed {listed:.15g}")
    worst = 0.0
    for V0, E0, law in ((1.0, 2.0, Coefficients()), (-0.3, 5.0, Coefficients(eta0=2.0, kappa0=0.5)),
                        (40 / 3, 220 / 3, TWO_CAP_LAW), (0.5, 1.0, Coefficients(beta=2.0, alpha=2.0, kappa0=0.7))):
        for d in (1, 2):
            sp = steady_profile(V0, E0, law, d)
            mass_v = sp.a * sp.theta_v / sp.b**d
            mass_w = sp.c * sp.theta_w / sp.b**d
            width = 2 * law.kappa0 * sp.b**2 * sp.c**law.beta
            err = max(abs(mass_v - V0) / max(abs(V0), 1.0), abs(mass_w - E0) / E0,
                      abs(width - sp.delta * law.beta) / (sp.delta * law.beta))
            worst = max(worst, err)
    cr.add("steady profile round-trips its constraints", worst <= 1e-10, worst, 1e-10)
    ser = piecewise_run()
    dev = max(float(np.max(np.abs(s.e - PIECEWISE_B * s.v))) for s in ser.states)
    cr.add("piecewise law keeps e = B v (energy form)", dev <= 1e-10, dev, 1e-10)
    return cr


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}


# ---- named suites for the command line ---------------------------------------

def suite_conservation() -> Criterion:
    """Quick preset battery: conservation and monotonicity on short runs."""
    cr = Criterion(0, "conservation battery")
    for form in ("primitive", "energy"):
        _identity_checks(cr, f"compact_128_{form}", compact_run(128, form), primitive_C=1.0)
    cos = grid_state(0.0, 0.0, 1.0, 64, lambda x: 0.3 * np.cos(np.pi * x),
                     lambda x: 1 + 0.5 * np.cos(np.pi * x))
    for form in ("primitive", "energy"):
        ser = run(cos, SolverConfig(form=form, t_end=0.05, law=Coefficients()))
        _identity_checks(cr, f"cosine_{form}", ser, primitive_C=1.0)
    bar = grid_state(0.0, -6.0, 6.0, 128, lambda x: 0 * x, lambda x: barenblatt(0.0, x, BARENBLATT))
    _identity_checks(cr, "barenblatt_128", run(bar, SolverConfig(t_end=0.5, law=Coefficients())))
    return cr


def suite_compact45_convergence() -> Criterion:
    cr = Criterion(1, "compact solution convergence")
    errs = []
    for n in COMPACT_LEVELS:
        s = compact_run(n).states[-1]
        v, w = compact_solution(COMPACT_T, s.x, COMPACT)
        errs.append(_l1(s, v, w))
        cr.add(f"L1 error N={n}", True, errs[-1])
    for i in range(len(errs) - 1):
        r = errs[i] / errs[i + 1]
        cr.add(f"ratio {COMPACT_LEVELS[i]}->{COMPACT_LEVELS[i + 1]}", r >= 1.5, r, 1.5)
    return cr


def suite_decay_counterexample() -> Criterion:
    cr = Criterion(5, "decay-bound counterexample (expected fail)")
    ser = disjoint_run()
    dp = dg.DecayParams.from_state(ser.initial, DISJOINT_LAW)
    res = dg.decay_check(ser, dp, require_positive=False)
    cr.add("decay bound violated", not res.passed, res.first_violation, (DISJOINT_ELL / 2) ** 2.5 - 1,
           "expected-fail marker: the bound is supposed to break here")
    return cr


SUITES = {
    "conservation": lambda: [suite_conservation()],
    "compact45_convergence": lambda: [suite_compact45_convergence()],
    "example24": lambda: [suite_decay_counterexample()],
    "acceptance": lambda: [CRITERIA[i]() for i in sorted(CRITERIA)],
}
SUITES.update({f"criterion{i}": (lambda i=i: [CRITERIA[i]()]) for i in CRITERIA})
