"""CSV/JSON/SVG artifacts. Outputs are deterministic byte for byte."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import ConfigurationError
from .model import State

FMT = "%.17g"


def snapshot_name(index: int, t: float) -> str:
    return f"snap_{index:04d}_t{t:.6f}.csv"


def _csv_text(columns: dict) -> str:
    names = list(columns)
    arrs = [np.asarray(columns[k], dtype=float) for k in names]
    buf = io.StringIO()
    buf.write(",".join(names) + "\n")
    for row in zip(*arrs):
        buf.write(",".join(FMT % val for val in row) + "\n")
    return buf.getvalue()


def write_columns(path, columns: dict) -> Path:
    path = Path(path)
    path.write_text(_csv_text(columns))
    return path


def read_columns(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigurationError(f"{path}: empty CSV")
    head = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(head))
    return {k: data[:, i] for i, k in enumerate(head)}


def state_columns(s: State) -> dict:
    return {"x": s.x, "v": s.v, "w": s.w, "e": s.energy_density}


def write_series(out_dir, states, svg: bool = False) -> list:
    """Snapshot CSVs plus ``series.json`` holding exact t, x0, h for reloading."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for i, s in enumerate(states):
        name = snapshot_name(i, s.t)
        write_columns(out / name, state_columns(s))
        manifest.append({"file": name, "t": s.t, "x0": s.x0, "h": s.h, "n": s.n,
                         "has_e": s.e is not None})
        if svg:
            write_svg(out / f"plot_{i:04d}.svg", s.x, {"v": s.v, "w": s.w}, title=f"t = {s.t:.6f}")
    (out / "series.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def read_snapshot(path, t: float, x0: float, h: float, has_e: bool = False) -> State:
    cols = read_columns(path)
    return State(t=t, x0=x0, h=h, v=cols["v"], w=cols["w"], e=cols["e"] if has_e else None)


def read_series(out_dir) -> list:
    out = Path(out_dir)
    manifest_path = out / "series.json"
    if not manifest_path.exists():
        raise ConfigurationError(f"{out}: no series.json manifest")
    manifest = json.loads(manifest_path.read_text())
    return [read_snapshot(out / m["file"], m["t"], m["x0"], m["h"], m.get("has_e", False)) for m in manifest]


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


# ---- SVG --------------------------------------------------------------------

_W, _H, _PAD = 800, 500, 50
_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _finite_range(arrs):
    vals = np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrs])
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return 0.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo <= 1e-300:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def svg_text(x, curves: dict, title: str = "", xs: dict | None = None) -> str:
    """Polyline plot of ``curves`` against ``x`` (or per-curve abscissae in ``xs``)."""
    xs = xs or {}
    xa = {k: np.asarray(xs.get(k, x), dtype=float) for k in curves}
    x_lo, x_hi = _finite_range(list(xa.values()))
    y_lo, y_hi = _finite_range(list(curves.values()))

    def px(u):
        return _PAD + (u - x_lo) / (x_hi - x_lo) * (_W - 2 * _PAD)

    def py(u):
        return _H - _PAD - (u - y_lo) / (y_hi - y_lo) * (_H - 2 * _PAD)

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_W} {_H}" width="{_W}" height="{_H}">',
             f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
             f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
             'fill="none" stroke="black" stroke-width="1"/>']
    if title:
        lines.append(f'<text x="{_W // 2}" y="30" text-anchor="middle" font-size="16">{escape(title)}</text>')
    lines.append(f'<text x="{_PAD}" y="{_H - 20}" font-size="12">{x_lo:.4g}</text>')
    lines.append(f'<text x="{_W - _PAD}" y="{_H - 20}" text-anchor="end" font-size="12">{x_hi:.4g}</text>')
    lines.append(f'<text x="5" y="{_H - _PAD}" font-size="12">{y_lo:.4g}</text>')
    lines.append(f'<text x="5" y="{_PAD + 10}" font-size="12">{y_hi:.4g}</text>')
    for i, (name, y) in enumerate(curves.items()):
        colour = _COLOURS[i % len(_COLOURS)]
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(y) & np.isfinite(xa[name])
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xa[name][ok], y[ok]))
        lines.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
        lines.append(f'<text x="{_W - _PAD - 5}" y="{_PAD + 18 * (i + 1)}" text-anchor="end" '
                     f'font-size="13" fill="{colour}">{escape(name)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(path, x, curves: dict, title: str = "", xs: dict | None = None) -> Path:
    path = Path(path)
    path.write_text(svg_text(x, curves, title, xs))
    return path

