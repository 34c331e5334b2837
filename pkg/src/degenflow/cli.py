"""Command-line front end: ``degenflow <command> --config run.json --out dir``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from . import io
from .config import RunConfig, load_config
from .errors import ConfigurationError, DomainError, FitError, NumericError
from .exact import (BarenblattParams, CompactSolutionParams, ShapeParams, barenblatt, compact_solution,
                    delayed_family, front_exact, shape_w, similarity_ex22, steady_profile)
from .fronts import classify_front, integrate_front
from .model import State, energy, momentum
from .selfsim import linear_edge, profile_distance, rescale_snapshot, rescaled_exponent_fit
from .solver import run

EXIT_OK, EXIT_VERDICT, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _require(cfg: RunConfig, attr: str, command: str):
    if getattr(cfg, attr) is None:
        raise ConfigurationError(f"{command}: the config needs a '{attr}' section")
    return getattr(cfg, attr)


def cmd_simulate(cfg: RunConfig, out: Path, svg: bool = False) -> int:
    init = _require(cfg, "initial", "simulate")
    s0 = init.state()
    series = run(s0, cfg.solver)
    io.write_series(out, series.states, svg=svg)
    opts = cfg.diagnostics
    decay = None
    if opts.get("decay"):
        decay = dg.DecayParams.from_state(series.initial, cfg.law)
    report = dg.build_report(series, M_star=opts.get("M_star"), support_fit=opts.get("support_fit", "front"),
                             t_star=float(opts.get("t_star", 0.0)), decay=decay)
    (out / "diagnostics.json").write_text(report.to_json() + "\n")
    return EXIT_OK if all(report.verdicts.values()) else EXIT_VERDICT


def cmd_front(cfg: RunConfig, out: Path, svg: bool = False) -> int:
    fr = _require(cfg, "front", "front")
    p = fr["params"]
    traj = integrate_front(fr["init"], p, fr["z_max"], W_floor=fr["W_floor"], method=fr["method"])
    out.mkdir(parents=True, exist_ok=True)
    io.write_columns(out / "front.csv", {"z": traj.z, "V": traj.V, "W": traj.W})
    summary = {"termination": traj.termination, "z_end": traj.z_end, "V_end": traj.V_end,
               "W_end": traj.W_end, "trailing_WVp": traj.trailing_WVp,
               "floor_resolved": traj.extra.get("floor_resolved", True)}
    try:
        cl = classify_front(traj, p)
        summary.update(label=cl.label, W_slope=cl.W_slope, c_F_estimate=cl.c_F_estimate,
                       parabola_gap=cl.parabola_gap)
    except (FitError, DomainError) as exc:
        summary.update(label=None, classification_error=str(exc))
    io.write_json(out / "front.json", dg._jsonable(summary))
    if svg:
        curves, xs = {"trajectory": traj.W}, {"trajectory": traj.V}
        if p.has_parabola:
            vv = np.linspace(float(np.min(traj.V)), float(np.max(traj.V)), 200)
            curves["parabola"] = p.parabola(vv)
            xs["parabola"] = vv
        io.write_svg(out / "phase.svg", traj.V, curves, title="front phase portrait (V, W)", xs=xs)
    return EXIT_OK


def _exact_fields(kind, params, t, x):
    if kind == "compact":
        return compact_solution(t, x, CompactSolutionParams(**params))
    if kind == "delayed":
        extra = {k: params.pop(k) for k in ("t_plus", "t_minus") if k in params}
        return delayed_family(t, x, CompactSolutionParams(**params), **extra)
    if kind == "barenblatt":
        if "E0" in params:
            bp = BarenblattParams(**params)
        else:
            bp = BarenblattParams.from_amplitude(params.pop("c", 1.0), **params)
        return np.zeros_like(x), barenblatt(t, x, bp)
    raise ConfigurationError(f"exact: {kind} is not a space-time field")


def cmd_exact(cfg: RunConfig, out: Path, svg: bool = False) -> int:
    ex = _require(cfg, "exact", "exact")
    kind, params = ex["kind"], ex["params"]
    out.mkdir(parents=True, exist_ok=True)
    a, b = ex["domain"]
    n = ex["N"]
    h = (b - a) / n
    x = a + (np.arange(n) + 0.5) * h
    try:
        if kind in ("compact", "delayed", "barenblatt"):
            states = []
            for t in ex["times"]:
                v, w = _exact_fields(kind, dict(params), t, x)
                states.append(State(t=t, x0=a, h=h, v=v, w=w))
            io.write_series(out, states, svg=svg)
        elif kind == "front":
            z = np.linspace(a, b, n)
            V, W = front_exact(z, **params)
            io.write_columns(out / "front_exact.csv", {"z": z, "V": V, "W": W})
        elif kind == "similarity_ex22":
            y = np.linspace(max(a, 0.0), b, n)
            V, W = similarity_ex22(y, **params)
            io.write_columns(out / "similarity_ex22.csv", {"y": y, "V": V, "W": W})
        else:
            sp = steady_profile(float(params["V0"]), float(params["E0"]), cfg.law, int(params.get("d", 1)))
            y = np.linspace(a, b, n)
            io.write_columns(out / "steady.csv", {"y": y, "v": sp.v(y), "w": sp.w(y)})
    except (TypeError, KeyError) as exc:
        raise ConfigurationError(f"exact.params: {exc}") from exc
    return EXIT_OK


def cmd_steady(cfg: RunConfig, out: Path, svg: bool = False) -> int:
    st = _require(cfg, "steady", "steady")
    d = cfg.scaling.d if cfg.scaling is not None else 1
    sp = steady_profile(st["V0"], st["E0"], cfg.law, d)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"a": sp.a, "b": sp.b, "c": sp.c, "sigma": sp.sigma, "delta": sp.delta, "beta": sp.beta,
               "d": sp.d, "theta_v": sp.theta_v, "theta_w": sp.theta_w, "edge": sp.edge,
               "V0": st["V0"], "E0": st["E0"]}
    io.write_json(out / "steady.json", payload)
    if svg:
        y = np.linspace(-1.2 * sp.edge, 1.2 * sp.edge, 401)
        io.write_svg(out / "steady.svg", y, {"v": sp.v(y), "w": sp.w(y)}, title="steady profiles")
    return EXIT_OK


def cmd_rescale(cfg: RunConfig, out: Path, svg: bool = False, snapshots: str | None = None) -> int:
    spec = _require(cfg, "scaling", "rescale")
    src = snapshots or cfg.snapshot_dir
    if not src:
        raise ConfigurationError("rescale: give scaling.snapshot_dir or --snapshots")
    states = io.read_series(src)
    out.mkdir(parents=True, exist_ok=True)
    E0, V0 = energy(states[0]), momentum(states[0])
    bp = BarenblattParams(E0=E0, beta=cfg.law.beta, kappa0=cfg.law.kappa0, t_star=1.0)
    try:
        sp = steady_profile(V0, E0, cfg.law, spec.d)
    except NumericError:
        sp = None
    rows = []
    for i, s in enumerate(states):
        r = rescale_snapshot(s, spec)
        io.write_columns(out / f"rescaled_{i:04d}_t{s.t:.6f}.csv", {"y": r.y, "v": r.v, "w": r.w})
        row = {"t": s.t}
        row["distance_w_barenblatt"] = profile_distance(r.w, bp.c * shape_w(r.y, ShapeParams(1.0, bp.b, 1.0)), r.y)
        if sp is not None:
            row["distance_w_steady"] = profile_distance(r.w, sp.w, r.y)
            row["distance_v_steady"] = profile_distance(r.v, sp.v, r.y)
        guard = 2 * s.h / (s.t + 1.0) ** spec.delta
        for side in ("right", "left"):
            try:
                row[f"sigma_v_{side}"] = rescaled_exponent_fit(r.y, r.v, side=side, edge=linear_edge(r.y, r.w, side),
                                                               guard=guard)
            except FitError:
                row[f"sigma_v_{side}"] = None
            try:
                row[f"sigma_w_{side}"] = rescaled_exponent_fit(r.y, r.w, side=side)
            except FitError:
                row[f"sigma_w_{side}"] = None
        rows.append(row)
        if svg:
            io.write_svg(out / f"rescaled_{i:04d}.svg", r.y, {"v": r.v, "w": r.w}, title=f"rescaled, t = {s.t:.6f}")
    io.write_json(out / "rescale.json", dg._jsonable({"E0": E0, "V0": V0, "snapshots": rows}))
    return EXIT_OK


def cmd_verify(suite: str, out: Path | None = None) -> int:
    from .suites import SUITES

    if suite not in SUITES:
        raise ConfigurationError(f"unknown suite {suite!r}; choose from {', '.join(sorted(SUITES))}")
    results = SUITES[suite]()
    for cr in results:
        print(cr.line())
        for c in cr.checks:
            print(f"    {'ok  ' if c.passed else 'FAIL'} {c.name}: {c.value:.6g}"
                  + ("" if math.isnan(c.limit) else f" (limit {c.limit:.6g})"))
    table = {"suite": suite, "passed": all(c.passed for c in results), "criteria": [c.as_dict() for c in results]}
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(out / "verdicts.json", table)
    return EXIT_OK if table["passed"] else EXIT_VERDICT


COMMANDS = ("simulate", "front", "exact", "steady", "rescale", "verify")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="degenflow", description="Degenerate coupled diffusion toolkit.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--svg", action="store_true", help="also write SVG plots")
    ap.add_argument("--suite", default="conservation", help="suite name for verify")
    ap.add_argument("--snapshots", help="snapshot directory for rescale")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.suite, Path(args.out) if args.out else None)
        if not args.config or not args.out:
            raise ConfigurationError(f"{args.command} needs --config and --out")
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "rescale":
            return cmd_rescale(cfg, out, args.svg, args.snapshots)
        handler = {"simulate": cmd_simulate, "front": cmd_front, "exact": cmd_exact, "steady": cmd_steady}
        return handler[args.command](cfg, out, args.svg)
    except (ConfigurationError, DomainError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
