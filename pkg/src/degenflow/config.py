"""Strict JSON run configurations and named initial-data presets."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigurationError, DomainError
from .exact import BarenblattParams, CompactSolutionParams, barenblatt, compact_solution
from .fronts import FrontParams
from .model import Coefficients, EntropySpec, State, grid_state
from .selfsim import ScalingSpec
from .solver import PiecewiseLaw, SolverConfig, regularize

MIN_CELLS = 16


def _check_keys(obj, allowed, path):
    if not isinstance(obj, dict):
        raise ConfigurationError(f"{path or '<root>'}: expected an object")
    bad = sorted(set(obj) - set(allowed))
    if bad:
        where = path or "<root>"
        raise ConfigurationError(f"{where}: unknown key(s) {', '.join(repr(b) for b in bad)}")


def _number(obj, key, path, default=None):
    val = obj.get(key, default)
    if val is None:
        return None
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigurationError(f"{path}.{key}: expected a number")
    return float(val)


# ---- presets ----------------------------------------------------------------

def _two_cap_v(x):
    return np.maximum(0.0, 10 - 10 * (x + 2) ** 2)


def _two_cap_w(x):
    return np.maximum(0.0, 15 - 15 * (x - 2) ** 2)


def _poly(coeffs, x):
    # ascending powers
    return np.polynomial.polynomial.polyval(x, np.asarray(coeffs, dtype=float)) if len(coeffs) else 0 * x


PRESETS = {
    "compact_45": {"B": 1.0, "x_star": 2.0, "t_star": 0.25},
    "barenblatt": {"E0": None, "c": 1.0, "beta": 1.0, "kappa0": 1.0, "t_star": 1.0},
    "sec723": {},
    "example24": {"ell": 8.0},
    "custom_polynomial": {"v_coeffs": [], "w_coeffs": [], "clip": True},
    "cosine": {"v_amp": 0.0, "w_mean": 1.0, "w_amp": 0.1, "mode": 1},
}

# coefficient laws each preset belongs to, used when the config gives none
DEFAULT_LAWS = {
    "compact_45": {"eta0": 1.0, "alpha": 1.0, "kappa0": 1.0, "beta": 1.0},
    "barenblatt": None,
    "sec723": {"eta0": 2.0, "alpha": 1.0, "kappa0": 0.5, "beta": 1.0},
    "example24": {"eta0": 1.5, "alpha": 0.5, "kappa0": 1.5, "beta": 0.5},
    "custom_polynomial": {},
    "cosine": {},
}

DEFAULT_DOMAINS = {
    "compact_45": (-5.0, 5.0),
    "barenblatt": (-6.0, 6.0),
    "sec723": (-20.0, 20.0),
    "example24": None,
    "custom_polynomial": (-1.0, 1.0),
    "cosine": (0.0, 1.0),
}


@dataclass(frozen=True)
class InitialData:
    formula: str
    params: dict
    domain: tuple
    N: int
    eps: float = 0.0

    def __post_init__(self):
        if self.formula not in PRESETS:
            raise ConfigurationError(f"initial.formula: unknown preset {self.formula!r}; "
                                     f"choose from {', '.join(sorted(PRESETS))}")
        if not isinstance(self.N, int) or self.N < MIN_CELLS:
            raise ConfigurationError(f"initial.N: need an integer >= {MIN_CELLS}, got {self.N!r}")
        a, b = self.domain
        if not (math.isfinite(a) and math.isfinite(b) and b > a):
            raise ConfigurationError("initial.domain: need x_left < x_right")
        if self.eps < 0:
            raise ConfigurationError("initial.eps must be nonnegative")
        _check_keys(self.params, PRESETS[self.formula], f"initial.params[{self.formula}]")
        p = self.resolved_params
        if self.formula == "compact_45":
            CompactSolutionParams(p["B"], p["x_star"], p["t_star"])
        elif self.formula == "barenblatt":
            self.barenblatt_params()
        elif self.formula == "example24" and not p["ell"] > 2:
            raise ConfigurationError("example24: ell must exceed 2 so the supports start disjoint")
        elif self.formula == "cosine":
            if not p["w_mean"] > abs(p["w_amp"]) or int(p["mode"]) != p["mode"]:
                raise ConfigurationError("cosine: need w_mean > |w_amp| and an integer mode")

    @property
    def resolved_params(self) -> dict:
        p = dict(PRESETS[self.formula])
        p.update(self.params)
        return p

    def barenblatt_params(self) -> BarenblattParams:
        p = self.resolved_params
        if p["E0"] is not None:
            return BarenblattParams(E0=p["E0"], beta=p["beta"], kappa0=p["kappa0"], t_star=p["t_star"])
        return BarenblattParams.from_amplitude(p["c"], beta=p["beta"], kappa0=p["kappa0"], t_star=p["t_star"])

    def state(self) -> State:
        a, b = self.domain
        p = self.resolved_params
        f = self.formula
        if f == "compact_45":
            cp = CompactSolutionParams(p["B"], p["x_star"], p["t_star"])

            def both(x):
                return compact_solution(0.0, x, cp)
            vfun, wfun = (lambda x: both(x)[0]), (lambda x: both(x)[1])
        elif f == "barenblatt":
            bp = self.barenblatt_params()
            vfun, wfun = (lambda x: 0 * x), (lambda x: barenblatt(0.0, x, bp))
        elif f == "sec723":
            vfun, wfun = _two_cap_v, _two_cap_w
        elif f == "example24":
            ell = p["ell"]
            vfun = lambda x: np.sign(x) * np.maximum(0.0, 2 * np.abs(x) - ell)  # noqa: E731
            wfun = lambda x: (np.maximum(1 - x**2, 0.0) / 15) ** 2  # noqa: E731
        elif f == "custom_polynomial":
            vfun = lambda x: _poly(p["v_coeffs"], x)  # noqa: E731
            if p["clip"]:
                wfun = lambda x: np.maximum(_poly(p["w_coeffs"], x), 0.0)  # noqa: E731
            else:
                wfun = lambda x: _poly(p["w_coeffs"], x)  # noqa: E731
        else:
            k = np.pi * int(p["mode"]) / (b - a)
            vfun = lambda x: p["v_amp"] * np.cos(k * (x - a))  # noqa: E731
            wfun = lambda x: p["w_mean"] + p["w_amp"] * np.cos(k * (x - a))  # noqa: E731
        try:
            s = grid_state(0.0, a, b, self.N, vfun, wfun)
        except DomainError as exc:
            raise ConfigurationError(f"initial data: {exc}") from exc
        if self.eps > 0:
            s = s.replace(w=regularize(s.w, self.eps))
        return s


_INITIAL_KEYS = ("formula", "params", "domain", "N", "eps")
_LAW_KEYS = tuple(f.name for f in fields(Coefficients)) + ("piecewise_B",)
_SOLVER_KEYS = ("form", "cfl", "w_clamp_tol", "snapshot_times", "t_end", "entropies", "lp_ps",
                "dissipation_ps", "track_production")
_FRONT_KEYS = tuple(f.name for f in fields(FrontParams)) + ("init", "z_max", "W_floor", "method")
_SCALING_KEYS = tuple(f.name for f in fields(ScalingSpec)) + ("snapshot_dir",)
_EXACT_KEYS = ("kind", "params", "times", "domain", "N")
_STEADY_KEYS = ("V0", "E0")
_DIAG_KEYS = ("M_star", "support_fit", "t_star", "decay")
_TOP_KEYS = ("initial", "law", "solver", "front", "scaling", "exact", "steady", "diagnostics")


@dataclass(frozen=True)
class RunConfig:
    initial: InitialData | None = None
    law: object = field(default_factory=Coefficients)
    solver: SolverConfig = field(default_factory=SolverConfig)
    front: dict | None = None
    scaling: ScalingSpec | None = None
    snapshot_dir: str | None = None
    exact: dict | None = None
    steady: dict | None = None
    diagnostics: dict = field(default_factory=dict)


def _parse_law(obj, formula):
    if obj is None:
        base = DEFAULT_LAWS.get(formula) if formula else {}
        if base is None:
            base = {}
        obj = dict(base)
    else:
        _check_keys(obj, _LAW_KEYS, "law")
    if "piecewise_B" in obj:
        extra = sorted(set(obj) - {"piecewise_B", "sink_a", "sink_exp", "eps_floor"})
        if extra:
            raise ConfigurationError(f"law: piecewise_B cannot be combined with {', '.join(extra)}")
        kw = {k: _number(obj, k, "law") for k in obj if k != "piecewise_B"}
        return PiecewiseLaw(_number(obj, "piecewise_B", "law"), **kw)
    return Coefficients(**{k: _number(obj, k, "law") for k in obj})


def _parse_entropies(items):
    if not isinstance(items, list):
        raise ConfigurationError("solver.entropies: expected a list")
    out = []
    for i, it in enumerate(items):
        _check_keys(it, ("kind", "gamma"), f"solver.entropies[{i}]")
        out.append(EntropySpec(**it))
    return tuple(out)


def _parse_ps(items, path):
    if not isinstance(items, list):
        raise ConfigurationError(f"{path}: expected a list")
    out = []
    for v in items:
        if v in ("inf", "Infinity"):
            out.append(math.inf)
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(float(v))
        else:
            raise ConfigurationError(f"{path}: entries must be numbers or 'inf'")
    return tuple(out)


def _parse_solver(obj, law):
    obj = obj or {}
    _check_keys(obj, _SOLVER_KEYS, "solver")
    kw = {}
    for k in ("cfl", "w_clamp_tol", "t_end"):
        if k in obj:
            kw[k] = _number(obj, k, "solver")
    if "form" in obj:
        kw["form"] = obj["form"]
    if "snapshot_times" in obj:
        st = obj["snapshot_times"]
        if not isinstance(st, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in st):
            raise ConfigurationError("solver.snapshot_times: expected a list of numbers")
        kw["snapshot_times"] = tuple(float(v) for v in st)
    if "entropies" in obj:
        kw["entropies"] = _parse_entropies(obj["entropies"])
    if "lp_ps" in obj:
        kw["lp_ps"] = _parse_ps(obj["lp_ps"], "solver.lp_ps")
    if "dissipation_ps" in obj:
        kw["dissipation_ps"] = _parse_ps(obj["dissipation_ps"], "solver.dissipation_ps")
    if "track_production" in obj:
        if not isinstance(obj["track_production"], bool):
            raise ConfigurationError("solver.track_production: expected true/false")
        kw["track_production"] = obj["track_production"]
    return SolverConfig(law=law, **kw)


def _parse_initial(obj):
    _check_keys(obj, _INITIAL_KEYS, "initial")
    if "formula" not in obj:
        raise ConfigurationError("initial.formula is required")
    formula = obj["formula"]
    params = obj.get("params", {})
    if formula == "example24" and "domain" not in obj:
        ell = float(params.get("ell", PRESETS["example24"]["ell"]))
        domain = (-ell, ell)
    else:
        domain = obj.get("domain", DEFAULT_DOMAINS.get(formula) or (-1.0, 1.0))
    if not (isinstance(domain, (list, tuple)) and len(domain) == 2):
        raise ConfigurationError("initial.domain: expected [x_left, x_right]")
    N = obj.get("N", 256)
    return InitialData(formula=formula, params=params, domain=(float(domain[0]), float(domain[1])),
                       N=N, eps=_number(obj, "eps", "initial", 0.0))


def _parse_front(obj):
    _check_keys(obj, _FRONT_KEYS, "front")
    pkw = {k: _number(obj, k, "front") for k in obj if k in {f.name for f in fields(FrontParams)}}
    params = FrontParams(**pkw)
    init = obj.get("init", [0.0, 1.0, 1.0])
    if not (isinstance(init, list) and len(init) == 3):
        raise ConfigurationError("front.init: expected [z0, V0, W0]")
    method = obj.get("method", "RK45")
    if method not in ("RK45", "DOP853"):
        raise ConfigurationError("front.method: RK45 or DOP853")
    return {"params": params, "init": tuple(float(v) for v in init),
            "z_max": _number(obj, "z_max", "front", 20.0),
            "W_floor": _number(obj, "W_floor", "front"), "method": method}


def _parse_scaling(obj):
    _check_keys(obj, _SCALING_KEYS, "scaling")
    kw = {}
    for k in ("theta", "beta", "y_min", "y_max"):
        if k in obj:
            kw[k] = _number(obj, k, "scaling")
    for k in ("d", "n_y"):
        if k in obj:
            if not isinstance(obj[k], int):
                raise ConfigurationError(f"scaling.{k}: expected an integer")
            kw[k] = obj[k]
    return ScalingSpec(**kw), obj.get("snapshot_dir")


EXACT_KINDS = ("compact", "barenblatt", "delayed", "front", "similarity_ex22", "steady")


def _parse_exact(obj):
    _check_keys(obj, _EXACT_KEYS, "exact")
    kind = obj.get("kind")
    if kind not in EXACT_KINDS:
        raise ConfigurationError(f"exact.kind: choose from {', '.join(EXACT_KINDS)}")
    times = obj.get("times", [0.0])
    if not isinstance(times, list):
        raise ConfigurationError("exact.times: expected a list")
    domain = obj.get("domain", [-5.0, 5.0])
    N = obj.get("N", 512)
    if not isinstance(N, int) or N < MIN_CELLS:
        raise ConfigurationError(f"exact.N: need an integer >= {MIN_CELLS}")
    if not float(domain[1]) > float(domain[0]):
        raise ConfigurationError("exact.domain: need x_left < x_right")
    return {"kind": kind, "params": dict(obj.get("params", {})), "times": [float(t) for t in times],
            "domain": (float(domain[0]), float(domain[1])), "N": N}


def parse_config(text: str) -> RunConfig:
    """Parse a strict JSON document; unknown keys are rejected by name."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"malformed JSON: {exc}") from exc
    _check_keys(doc, _TOP_KEYS, "")
    try:
        initial = _parse_initial(doc["initial"]) if "initial" in doc else None
        law = _parse_law(doc.get("law"), initial.formula if initial else None)
        if initial is not None and initial.formula == "barenblatt" and "law" not in doc:
            p = initial.resolved_params
            law = Coefficients(kappa0=p["kappa0"], beta=p["beta"])
        solver = _parse_solver(doc.get("solver"), law)
        front = _parse_front(doc["front"]) if "front" in doc else None
        scaling, snap_dir = _parse_scaling(doc["scaling"]) if "scaling" in doc else (None, None)
        exact = _parse_exact(doc["exact"]) if "exact" in doc else None
        steady = None
        if "steady" in doc:
            _check_keys(doc["steady"], _STEADY_KEYS, "steady")
            steady = {k: _number(doc["steady"], k, "steady") for k in _STEADY_KEYS}
            if steady["V0"] is None or steady["E0"] is None:
                raise ConfigurationError("steady: V0 and E0 are required")
        diag = doc.get("diagnostics", {})
        _check_keys(diag, _DIAG_KEYS, "diagnostics")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(str(exc)) from exc
    return RunConfig(initial=initial, law=law, solver=solver, front=front, scaling=scaling,
                     snapshot_dir=snap_dir, exact=exact, steady=steady, diagnostics=dict(diag))


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())
