"""Turn rate-sweep CSVs into log-log figures and a summary table."""

from __future__ import annotations

import argparse
import csv
import math
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

EXPECTED_COLUMNS = ("tau", "error", "norm_kind", "family",
                    "alpha_or_delta0", "dt", "n_modes", "status")


class SchemaError(Exception):
    """The CSV does not satisfy the sweep-report contract."""


@dataclass
class FigureSpec:
    """What to render: input sweeps, reference slope, output paths."""

    csv_paths: list
    output_path: str = "rate_report.png"
    reference_slope: float | None = None  # None: derive from the kernel label
    title: str = "relaxation-time rate study: {family}/{kind} [{kernel}]"
    summary_path: str | None = None  # default: output path with .txt suffix


@dataclass
class SweepSeries:
    """One CSV worth of sweep rows."""

    path: str
    family: str
    kind: str
    kernel: str
    taus: np.ndarray
    errors: np.ndarray
    statuses: list
    slope: float = math.nan
    intercept: float = math.nan
    residual: float = math.nan
    reference_slope: float | None = None
    threshold: float | None = None
    notes: list = field(default_factory=list)

    @property
    def ok_mask(self) -> np.ndarray:
        return np.array([s == "ok" for s in self.statuses])


def read_sweep_csv(path) -> SweepSeries:
    """Parse one sweep CSV, validating the column contract."""
    try:
        with open(path, "r", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}")
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise SchemaError(f"{path}: empty file, expected header "
                          f"{','.join(EXPECTED_COLUMNS)}")
    header = [c.strip() for c in rows[0]]
    for col in EXPECTED_COLUMNS:
        if col not in header:
            raise SchemaError(f"{path}: missing column '{col}'")
    idx = {c: header.index(c) for c in EXPECTED_COLUMNS}
    taus, errors, statuses = [], [], []
    family = kind = kernel = None
    for r in rows[1:]:
        taus.append(float(r[idx["tau"]]))
        errors.append(float(r[idx["error"]]))
        statuses.append(r[idx["status"]].strip())
        family = r[idx["family"]].strip()
        kind = r[idx["norm_kind"]].strip()
        kernel = r[idx["alpha_or_delta0"]].strip()
    if not taus:
        raise SchemaError(f"{path}: no data rows")
    return SweepSeries(path=os.fspath(path), family=family, kind=kind,
                       kernel=kernel, taus=np.asarray(taus),
                       errors=np.asarray(errors), statuses=statuses)


def fit_loglog(taus, errors):
    """Least squares through (log tau, log E): (slope, intercept, residual).

    Same estimator as the solver suite's rate fit: exact-zero errors are
    dropped, at least three positive pairs are required, and the
    residual is the maximum absolute log-deviation.
    """
    taus = np.asarray(taus, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = errors > 0.0
    taus, errors = taus[keep], errors[keep]
    if taus.size < 3:
        raise SchemaError(f"insufficient data: {taus.size} positive pairs, need 3")
    slope, intercept = np.polyfit(np.log(taus), np.log(errors), 1)
    residual = float(np.max(np.abs(np.log(errors)
                                   - (slope * np.log(taus) + intercept))))
    return float(slope), float(intercept), residual


def reference_slope_from_kernel(kernel_label: str) -> float | None:
    """Exponent a implied by the kernel column: alpha for Abel, 1 for Dirac."""
    if kernel_label == "delta0":
        return 1.0
    m = re.fullmatch(r"abel\(([0-9.eE+-]+)\)", kernel_label)
    if m:
        return float(m.group(1))
    return None


def theorem_threshold(family: str, kind: str, a: float | None) -> float | None:
    """Slope threshold a - 0.1 where a rate theorem backs the pairing."""
    if a is None:
        return None
    if family == "westervelt" and kind == "west_rate":
        return a - 0.1
    if family == "kuznetsov-blackstock" and kind == "blackstock_rate":
        return a - 0.1
    return None


def _analyze(series: SweepSeries, reference: float | None) -> None:
    ok = series.ok_mask
    n_failed = int((~ok).sum())
    if n_failed:
        series.notes.append(f"{n_failed} failed run(s) excluded from the fit")
    series.slope, series.intercept, series.residual = fit_loglog(
        series.taus[ok], series.errors[ok])
    series.reference_slope = (reference if reference is not None
                              else reference_slope_from_kernel(series.kernel))
    series.threshold = theorem_threshold(series.family, series.kind,
                                         series.reference_slope)


def _summary(series_list) -> str:
    lines = []
    for s in series_list:
        ok = s.ok_mask
        lines.append(f"sweep {os.path.basename(s.path)}: {s.family}/{s.kind} "
                     f"kernel {s.kernel}")
        lines.append(f"  rows: {int(ok.sum())} ok, {int((~ok).sum())} failed")
        lines.append(f"  fitted slope = {s.slope:.9f}")
        lines.append(f"  intercept    = {s.intercept:.9f}")
        lines.append(f"  residual (max |log deviation|) = {s.residual:.3e}")
        if s.reference_slope is not None:
            lines.append(f"  reference slope a = {s.reference_slope:g}")
        if s.threshold is None:
            lines.append("  verdict: no theorem threshold (observation only)")
        else:
            verdict = "PASS" if s.slope >= s.threshold else "FAIL"
            lines.append(f"  verdict: {verdict} (slope vs threshold "
                         f"{s.threshold:.3f})")
        for note in s.notes:
            lines.append(f"  note: {note}")
        lines.append("")
    return "\n".join(lines)


def _atomic_write(path: str, writer) -> None:
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render(spec: FigureSpec) -> str:
    """Render the figure and summary; returns the summary text."""
    if not spec.csv_paths:
        raise SchemaError("no input CSV given")
    series_list = [read_sweep_csv(p) for p in spec.csv_paths]
    for s in series_list:
        _analyze(s, spec.reference_slope)

    fig, ax = plt.subplots(figsize=(6.5, 5.0))
    for s in series_list:
        ok = s.ok_mask
        taus, errors = s.taus[ok], s.errors[ok]
        pts = ax.loglog(taus, errors, "o",
                        label=f"{s.kernel} (slope {s.slope:.3f})")
        color = pts[0].get_color()
        tt = np.array([taus.max(), taus.min()])
        ax.loglog(tt, np.exp(s.intercept + s.slope * np.log(tt)),
                  "-", color=color, alpha=0.8)
        if s.reference_slope is not None:
            anchor = np.exp(s.intercept + s.slope * np.log(taus.max()))
            ax.loglog(tt, anchor * (tt / taus.max()) ** s.reference_slope,
                      "--", color=color, alpha=0.5,
                      label=f"reference slope {s.reference_slope:g}")
    first = series_list[0]
    ax.set_title(spec.title.format(family=first.family, kind=first.kind,
                                   kernel=first.kernel))
    ax.set_xlabel(r"relaxation time $\tau$")
    ax.set_ylabel(r"error $E(\tau)$")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    _atomic_write(spec.output_path, lambda tmp: fig.savefig(tmp, dpi=150,
                                                            format="png"))
    plt.close(fig)

    text = _summary(series_list)
    summary_path = spec.summary_path or os.path.splitext(spec.output_path)[0] + ".txt"
    _atomic_write(summary_path, lambda tmp: open(tmp, "w").write(text))
    return text


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fjmgt-report",
        description="Render log-log rate figures from sweep CSVs")
    parser.add_argument("csv", nargs="+", help="sweep CSV file(s)")
    parser.add_argument("--out", default="rate_report.png",
                        help="output figure path (PNG or SVG)")
    parser.add_argument("--reference-slope", type=float, default=None,
                        help="override the reference slope a")
    parser.add_argument("--title", default=None, help="title template")
    args = parser.parse_args(argv)
    spec = FigureSpec(csv_paths=args.csv, output_path=args.out,
                      reference_slope=args.reference_slope)
    if args.title:
        spec.title = args.title
    try:
        text = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(text, end="")
    print(f"figure written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
