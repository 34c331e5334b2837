from __future__ import annotations

import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from degenflow import cli, io
from degenflow.config import parse_config
from degenflow.errors import ConfigurationError
from degenflow.model import State, grid_state

finite = st.floats(-1e300, 1e300, allow_nan=False, allow_infinity=False)


@given(arrays(np.float64, st.integers(1, 30), elements=finite))
def test_csv_round_trip_is_exact(a):
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as d:
        p = io.write_columns(Path(d) / "c.csv", {"a": a, "b": -a})
        back = io.read_columns(p)
    assert np.array_equal(back["a"], a) and np.array_equal(back["b"], -a)


def test_snapshot_name():
    assert io.snapshot_name(3, 0.5) == "snap_0003_t0.500000.csv"
    assert io.snapshot_name(12, 10.0) == "snap_0012_t10.000000.csv"


def test_series_round_trip(tmp_path):
    s = grid_state(0.1, -1.0, 1.0, 20, lambda x: np.sin(3 * x) / 7, lambda x: 1 + x * x / 3)
    e = State(t=0.3, x0=s.x0, h=s.h, v=s.v, w=s.w, e=s.w + s.v**2 / 2)
    io.write_series(tmp_path, [s, e])
    back = io.read_series(tmp_path)
    assert back[0].t == 0.1 and back[0].h == s.h and back[0].e is None
    assert np.array_equal(back[0].v, s.v) and np.array_equal(back[1].e, e.e)
    with pytest.raises(ConfigurationError):
        io.read_series(tmp_path / "missing")


def test_svg_is_valid_xml(tmp_path):
    x = np.linspace(0, 1, 50)
    p = io.write_svg(tmp_path / "p.svg", x, {"a": x**2, "b": np.where(x > 0.5, np.nan, x)}, title="t < 1 & more")
    root = ET.parse(p).getroot()
    assert root.get("viewBox") == "0 0 800 500"
    text = io.svg_text(x, {"flat": np.zeros_like(x)})
    assert ET.fromstring(text) is not None


def test_json_is_sorted_and_stable(tmp_path):
    p = io.write_json(tmp_path / "a.json", {"b": 1, "a": [1.5, None]})
    assert p.read_text() == '{\n  "a": [\n    1.5,\n    null\n  ],\n  "b": 1\n}\n'


def test_config_defaults():
    cfg = parse_config('{"initial": {"formula": "cosine"}}')
    assert cfg.solver.cfl == 0.45 and cfg.solver.form == "primitive"
    assert cfg.initial.domain == (0.0, 1.0) and cfg.initial.N == 256
    s = cfg.initial.state()
    assert s.n == 256 and np.all(s.w > 0)


def test_config_presets():
    cfg = parse_config('{"initial": {"formula": "compact_45", "N": 64}}')
    assert cfg.initial.domain == (-5.0, 5.0)
    cfg = parse_config('{"initial": {"formula": "sec723", "N": 64}}')
    assert cfg.law.eta0 == 2.0 and cfg.law.kappa0 == 0.5 and cfg.initial.domain == (-20.0, 20.0)
    cfg = parse_config('{"initial": {"formula": "example24", "params": {"ell": 4}, "N": 64}}')
    assert cfg.initial.domain == (-4.0, 4.0) and cfg.law.alpha == 0.5
    cfg = parse_config('{"initial": {"formula": "barenblatt", "params": {"c": 2.0, "beta": 2.0}, "N": 64}}')
    assert cfg.law.beta == 2.0
    cfg = parse_config('{"initial": {"formula": "custom_polynomial", "params": '
                       '{"v_coeffs": [0, 1], "w_coeffs": [1, 0, -1]}, "N": 32}}')
    s = cfg.initial.state()
    assert np.allclose(s.w, np.clip(1 - s.x**2, 0, None)) and np.allclose(s.v, s.x)


@pytest.mark.parametrize("doc, needle", [
    ('{"initial": {"formula": "compact_45", "params": {"t_star": 2.0}}}', "t_star"),
    ('{"initial": {"formula": "cosine"}, "law": {"viscocity": 1}}', "viscocity"),
    ('{"initial": {"formula": "cosine"}, "solver": {"viscocity": 1}}', "viscocity"),
    ('{"initial": {"formula": "nope"}}', "nope"),
    ('{"initial": {"formula": "cosine", "N": 4}}', "N"),
    ('{"initial": {"formula": "example24", "params": {"ell": 1}}}', "ell"),
    ('{"initial": {"formula": "cosine"}', "JSON"),
    ('{"solver": {"form": "weird"}}', "form"),
    ('{"solver": {"cfl": 0.6}}', "cfl"),
    ('{"front": {"method": "Euler"}}', "method"),
    ('{"scaling": {"theta": 0.3}}', "theta"),
    ('{"exact": {"kind": "other"}}', "kind"),
    ('{"steady": {"V0": 1.0}}', "E0"),
])
def test_config_rejections(doc, needle):
    with pytest.raises(ConfigurationError, match=needle):
        parse_config(doc)


def write_cfg(tmp_path, doc, name="run.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


COSINE = {"initial": {"formula": "cosine", "params": {"v_amp": 0.3, "w_amp": 0.2}, "N": 32},
          "solver": {"t_end": 0.01, "snapshot_times": [0.0, 0.005, 0.01]}}


def test_simulate_is_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, COSINE)
    for d in ("a", "b"):
        assert cli.main(["simulate", "--config", cfg, "--out", str(tmp_path / d), "--svg"]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "diagnostics.json" in names and "series.json" in names and len(names) == 3 + 3 + 2
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
    rep = json.loads((tmp_path / "a" / "diagnostics.json").read_text())
    assert all(rep["verdicts"].values())


def test_comparison_hypothesis_violation_is_a_config_error(tmp_path, capsys):
    # |v0| <= M* w0 fails at t = 0 when M* is too small
    doc = dict(COSINE, diagnostics={"M_star": 0.01})
    assert cli.main(["simulate", "--config", write_cfg(tmp_path, doc), "--out", str(tmp_path / "o")]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_verify_failure_exit(monkeypatch, tmp_path):
    from degenflow import suites

    bad = suites.Criterion(number=99, title="always fails", checks=[suites.Check("x", False, 1.0, 0.0)])
    monkeypatch.setitem(suites.SUITES, "broken", lambda: [bad])
    assert cli.main(["verify", "--suite", "broken", "--out", str(tmp_path)]) == 1
    assert json.loads((tmp_path / "verdicts.json").read_text())["passed"] is False


def test_cli_configuration_errors(tmp_path, capsys):
    assert cli.main(["simulate", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 2
    bad = write_cfg(tmp_path, {"initial": {"formula": "cosine"}, "bogus": 1})
    assert cli.main(["simulate", "--config", bad, "--out", str(tmp_path / "o")]) == 2
    assert "bogus" in capsys.readouterr().err
    assert cli.main(["front", "--config", write_cfg(tmp_path, COSINE), "--out", str(tmp_path / "f")]) == 2
    assert cli.main(["simulate"]) == 2
    assert cli.main(["verify", "--suite", "nonexistent"]) == 2


def test_cli_numeric_error_exit(tmp_path):
    # no parabola for kappa0 = 1 and alpha = beta: the steady profile cannot be built
    doc = {"law": {"alpha": 1.0, "beta": 1.0, "kappa0": 1.0}, "steady": {"V0": 1.0, "E0": -1.0}}
    rc = cli.main(["steady", "--config", write_cfg(tmp_path, doc), "--out", str(tmp_path / "s")])
    assert rc in (2, 3)


def test_front_command(tmp_path):
    doc = {"front": {"alpha": 1.0, "beta": 2.0, "kappa0": 2.0, "c_F": 1.0, "init": [0.0, 1.0, 0.9],
                     "z_max": 5.0}}
    out = tmp_path / "f"
    assert cli.main(["front", "--config", write_cfg(tmp_path, doc), "--out", str(out), "--svg"]) == 0
    summary = json.loads((out / "front.json").read_text())
    assert summary["termination"] and "label" in summary
    cols = io.read_columns(out / "front.csv")
    assert cols["z"].size == cols["W"].size > 2
    ET.parse(out / "phase.svg")


def test_exact_and_rescale_commands(tmp_path):
    doc = {"exact": {"kind": "barenblatt", "params": {"E0": 1.0}, "times": [0.0, 1.0, 3.0],
                     "domain": [-8, 8], "N": 800},
           "scaling": {"theta": 0.5, "y_min": -4, "y_max": 4, "n_y": 401}}
    cfg = write_cfg(tmp_path, doc)
    ex = tmp_path / "ex"
    assert cli.main(["exact", "--config", cfg, "--out", str(ex)]) == 0
    assert len(io.read_series(ex)) == 3
    rs = tmp_path / "rs"
    assert cli.main(["rescale", "--config", cfg, "--out", str(rs), "--snapshots", str(ex)]) == 0
    res = json.loads((rs / "rescale.json").read_text())
    for row in res["snapshots"]:
        assert row["distance_w_barenblatt"][0] < 1e-3
        assert row["sigma_w_right"] == pytest.approx(1.0, abs=0.05)
    assert cli.main(["rescale", "--config", cfg, "--out", str(rs)]) == 2


@pytest.mark.parametrize("kind, params, fname", [
    ("compact", {"B": 1.0, "x_star": 2.0, "t_star": 0.25}, "series.json"),
    ("delayed", {"B": 1.0, "x_star": 2.0, "t_star": 0.25, "t_plus": 0.1}, "series.json"),
    ("front", {"case": "coupled", "c_F": 1.0}, "front_exact.csv"),
    ("similarity_ex22", {}, "similarity_ex22.csv"),
    ("steady", {"V0": 0.5, "E0": 1.0}, "steady.csv"),
])
def test_exact_kinds(tmp_path, kind, params, fname):
    doc = {"exact": {"kind": kind, "params": params, "times": [0.0, 0.5], "domain": [-1, 1], "N": 64}}
    out = tmp_path / "o"
    assert cli.main(["exact", "--config", write_cfg(tmp_path, doc), "--out", str(out)]) == 0
    assert (out / fname).exists()


def test_steady_command(tmp_path):
    doc = {"law": {"eta0": 1.0, "kappa0": 0.5, "alpha": 1.0, "beta": 2.0}, "steady": {"V0": 0.5, "E0": 1.0}}
    out = tmp_path / "s"
    assert cli.main(["steady", "--config", write_cfg(tmp_path, doc), "--out", str(out), "--svg"]) == 0
    got = json.loads((out / "steady.json").read_text())
    assert got["sigma"] == pytest.approx(0.25) and got["delta"] == pytest.approx(0.25)


def test_verify_conservation_subprocess(tmp_path):
    r = subprocess.run([sys.executable, "-m", "degenflow.cli", "verify", "--out", str(tmp_path)],
                       capture_output=True, text=True, timeout=300)
    assert r.returncode == 0, r.stdout + r.stderr
    assert "[PASS]" in r.stdout
    table = json.loads((tmp_path / "verdicts.json").read_text())
    assert table["suite"] == "conservation" and table["passed"]
