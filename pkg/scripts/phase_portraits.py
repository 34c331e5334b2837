"""Front trajectories in the (V, W) plane for a fan of initial slopes.

Each trajectory is classified and written to CSV, with one SVG per
parameter set that overlays the invariant parabola when it exists.
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from degenflow import io
from degenflow.errors import DomainError, FitError
from degenflow.fronts import FrontParams, classify_front, integrate_front

CASES = {
    "equal_exponents": FrontParams(alpha=1.0, beta=1.0, kappa0=0.25, c_F=1.0),
    "pme_like": FrontParams(alpha=1.0, beta=1.0, kappa0=1.0, c_F=1.0),
    "mixed": FrontParams(alpha=1.0, beta=2.0, kappa0=0.25, c_F=1.0),
}


def portrait(name, p, out, n_traj, z_back):
    curves, xs, labels = {}, {}, {}
    for i, V0 in enumerate(np.linspace(-1.5, 1.5, n_traj)):
        W0 = 1.0
        traj = integrate_front((0.0, float(V0), W0), p, -z_back)
        key = f"V0={V0:+.2f}"
        io.write_columns(out / f"{name}_{i:02d}.csv", {"z": traj.z, "V": traj.V, "W": traj.W})
        curves[key], xs[key] = traj.W, traj.V
        try:
            labels[key] = classify_front(traj, p).label
        except (FitError, DomainError) as exc:
            labels[key] = f"unclassified ({exc})"
    if p.has_parabola:
        vv = np.linspace(-1.5, 1.5, 300)
        curves["parabola"], xs["parabola"] = p.parabola(vv), vv
    io.write_svg(out / f"{name}.svg", xs[next(iter(xs))], curves, title=f"{name}: W against V", xs=xs)
    return labels


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/phase_portraits")
    ap.add_argument("--trajectories", type=int, default=9)
    ap.add_argument("--z-back", type=float, default=20.0, help="backward integration length")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name, p in CASES.items():
        summary[name] = portrait(name, p, out, args.trajectories, args.z_back)
        for k, lab in summary[name].items():
            print(f"{name:16s} {k}: {lab}")
    io.write_json(out / "labels.json", summary)
    print(f"wrote {out}")
    return json.dumps(summary)


if __name__ == "__main__":
    main()
