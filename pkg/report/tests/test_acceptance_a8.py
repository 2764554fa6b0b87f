"""Secondary acceptance: render the real rate-study CSV.

Drives the solver suite through its CLI (the only interface this
package consumes besides the CSV contract), renders the resulting
sweep, and checks that the printed slope matches the slope the primary
pipeline recorded in its JSON report to 1e-9.
"""

import json
import os
import re
import subprocess
import sys

from fjmgt_report import FigureSpec, render
from fjmgt_report.render import main

A1_CONFIG = """
# Westervelt fractional rate study (Abel 0.75)
n_modes = 64
dt = 1e-3
T = 1.0
kernel = abel
alpha = 0.75
k1 = 0.5
tau = 0.2
amplitude = 1e-2
family = westervelt
noise_check = false
sweep_id = a1-alpha075
"""


def check(tag, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}  {tag}: {detail}")
    assert ok, f"{tag}: {detail}"


def test_a8_render_matches_primary_fit(tmp_path):
    cfg = tmp_path / "a1.cfg"
    cfg.write_text(A1_CONFIG)
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "fjmgt.cli", "sweep",
         "--config", str(cfg), "--out", str(out)],
        capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0, proc.stderr

    csv_path = out / "sweep_a1-alpha075.csv"
    json_path = out / "sweep_a1-alpha075.json"
    primary_slope = json.loads(json_path.read_text())["slope"]

    text = render(FigureSpec(csv_paths=[csv_path],
                             output_path=str(tmp_path / "a1.png")))
    rendered_slope = float(
        re.search(r"fitted slope = (-?\d+\.\d+)", text).group(1))

    ok = (abs(rendered_slope - primary_slope) <= 1e-9
          and (tmp_path / "a1.png").stat().st_size > 0)
    check("A8[slope match]", ok,
          f"rendered slope {rendered_slope:.9f} vs primary "
          f"{primary_slope:.9f} (|diff| <= 1e-9); figure written")


def test_a8_empty_csv_fails_gracefully(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    code = main([str(empty), "--out", str(tmp_path / "fig.png")])
    err = capsys.readouterr().err
    ok = code == 2 and "empty" in err and not (tmp_path / "fig.png").exists()
    check("A8[empty csv]", ok,
          f"exit code {code} with clean message, no figure written")
