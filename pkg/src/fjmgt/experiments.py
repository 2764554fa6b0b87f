"""Relaxation-time sweep harness and rate reporting.

Runs the limit solver once and the nonlocal solver per tau on a shared
grid, reduces the trajectory differences with the theorem-specific
norms, fits the log-log slope, and emits machine-readable CSV/JSON
reports. Individual tau failures (degeneracy, Picard breakdown) are
recorded in the report instead of aborting the sweep.
"""

from __future__ import annotations

import hashlib
import json
import os
import platform
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy

from .errors import (
    ConfigError,
    Degenerate,
    GridMismatch,
    NonpositiveError,
    SolverError,
)
from .limits import solve_limit
from .solver import InitialData, MediumParams, Trajectory, _atomic_write_text, solve
from .spectral import SpectralSpace

__all__ = [
    "NORM_KINDS",
    "RateFit",
    "RateReport",
    "error_norm",
    "fit_rate",
    "tau_sweep",
]

NORM_KINDS = ("west_rate", "blackstock_rate", "energy")

CSV_COLUMNS = ("tau", "error", "norm_kind", "family", "alpha_or_delta0",
               "dt", "n_modes", "status")


def error_norm(traj_a: Trajectory, traj_b: Trajectory, kind: str,
               space: SpectralSpace) -> float:
    """Theorem-specific norm of the difference of two trajectories.

    west_rate:       max-in-time L2  +  L2-in-time of the H1 seminorm,
    blackstock_rate: max-in-time H1 seminorm + L2-in-time of the H2 norm,
    energy:          max-in-time L2 of the velocity + max-in-time H1.
    Space norms are exact via Parseval; time integrals use the trapezoid
    rule on the shared grid.
    """
    if kind not in NORM_KINDS:
        raise ConfigError(f"unknown norm kind {kind!r}; pick one of {NORM_KINDS}")
    if traj_a.t.shape != traj_b.t.shape or not np.allclose(traj_a.t, traj_b.t):
        raise GridMismatch("trajectories do not share a time grid")
    if traj_a.n_modes != traj_b.n_modes or traj_a.n_modes != space.n_modes:
        raise GridMismatch("trajectories do not share the mode count")
    d = traj_a.xi - traj_b.xi
    t = traj_a.t
    if kind == "west_rate":
        sup = float(np.max(space.sobolev_norm(d, 0)))
        l2t = float(np.sqrt(np.trapezoid(space.sobolev_norm(d, 1) ** 2, t)))
        return sup + l2t
    if kind == "blackstock_rate":
        sup = float(np.max(space.sobolev_norm(d, 1)))
        l2t = float(np.sqrt(np.trapezoid(space.sobolev_norm(d, 2) ** 2, t)))
        return sup + l2t
    dv = traj_a.xi_t - traj_b.xi_t
    return float(np.max(space.sobolev_norm(dv, 0))) + float(np.max(space.sobolev_norm(d, 1)))


@dataclass(frozen=True)
class RateFit:
    """Least-squares line through (log tau, log E)."""

    slope: float
    intercept: float
    residual: float  # max absolute log-deviation from the fit


def fit_rate(taus, errors) -> RateFit:
    """Fit the observed convergence order from positive (tau, E) pairs.

    Exact-zero errors (identical trajectories) are dropped with a
    warning; negative errors and fewer than three usable pairs raise.
    """
    taus = np.asarray(taus, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if taus.shape != errors.shape or taus.ndim != 1:
        raise ConfigError("fit_rate needs matching 1-d tau and error arrays")
    if np.any(errors < 0.0) or np.any(~np.isfinite(errors)):
        raise NonpositiveError("error values must be finite and nonnegative")
    keep = errors > 0.0
    if not np.all(keep):
        warnings.warn("dropping exact-zero error pairs from the rate fit",
                      stacklevel=2)
    taus, errors = taus[keep], errors[keep]
    if taus.size < 3:
        raise NonpositiveError(
            f"need at least 3 positive (tau, E) pairs to fit a rate, have {taus.size}"
        )
    slope, intercept = np.polyfit(np.log(taus), np.log(errors), 1)
    residual = float(np.max(np.abs(np.log(errors) - (slope * np.log(taus) + intercept))))
    return RateFit(slope=float(slope), intercept=float(intercept), residual=residual)


@dataclass(eq=False)
class RateReport:
    """Outcome of one tau sweep: raw errors, fit, and theorem context."""

    sweep_id: str
    family: str
    kind: str
    kernel_label: str
    power_a: float
    dt: float
    T: float
    n_modes: int
    taus: list
    errors: list          # nan for failed runs
    statuses: list        # "ok" | "degenerate" | "picard_diverged"
    slope: float | None = None
    intercept: float | None = None
    residual: float | None = None
    expected_slope: float | None = None
    threshold: float | None = None
    threshold_passed: bool | None = None
    no_theorem_threshold: bool = False
    inversions: int = 0
    noise_estimate: float | None = None
    notes: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    environment: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        lines = [",".join(CSV_COLUMNS)]
        alpha = self.kernel_label
        for tau, err, status in zip(self.taus, self.errors, self.statuses):
            err_txt = f"{err:.17g}" if np.isfinite(err) else "nan"
            lines.append(
                f"{tau:.17g},{err_txt},{self.kind},{self.family},{alpha},"
                f"{self.dt:.17g},{self.n_modes},{status}"
            )
        _atomic_write_text(path, "\n".join(lines) + "\n")

    def to_json(self, path) -> None:
        _atomic_write_text(path, json.dumps(self.__dict__, indent=2, default=_jsonable) + "\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return str(obj)


def _environment() -> dict:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def _theorem_threshold(medium: MediumParams, kind: str) -> tuple[float | None, bool]:
    """Slope threshold a - 0.1 where a theorem backs the (family, kind) pair."""
    a = medium.power_a
    if medium.family == "westervelt" and kind == "west_rate":
        return a - 0.1, False
    if medium.family == "kuznetsov-blackstock" and medium.k1 == 0.0 \
            and kind == "blackstock_rate":
        return a - 0.1, False
    return None, True


def _subsample(traj: Trajectory, stride: int) -> Trajectory:
    return Trajectory(t=traj.t[::stride], xi=traj.xi[::stride],
                      xi_t=traj.xi_t[::stride], xi_tt=traj.xi_tt[::stride],
                      dt=traj.dt * stride, n_modes=traj.n_modes, meta=traj.meta)


def tau_sweep(medium: MediumParams, data: InitialData, space: SpectralSpace,
              T: float, dt: float, taus, kind: str, *,
              forcing=None, out_dir=None, sweep_id: str | None = None,
              threads: int = 1, noise_check: bool = True,
              solver_options: dict | None = None) -> RateReport:
    """Run the limit reference once and the nonlocal solver per tau.

    Initial data (u0, u1) are shared by every run; failures of single
    tau points are recorded with their status and excluded from the
    fit. When `out_dir` is given the CSV and JSON reports are written
    there under names embedding the sweep id.
    """
    taus = sorted(float(t) for t in np.atleast_1d(taus))[::-1]  # descending
    if len(taus) < 1:
        raise ConfigError("tau sweep needs at least one tau value")
    threshold, no_threshold = _theorem_threshold(medium, kind)
    opts = dict(solver_options or {})

    ref = solve_limit(medium, data, space, T, dt, forcing=forcing)

    def run_one(tau: float):
        try:
            traj = solve(medium.with_tau(tau), data, space, T, dt,
                         forcing=forcing, **opts)
            return error_norm(traj, ref, kind, space), "ok"
        except SolverError as exc:
            return float("nan"), ("degenerate" if isinstance(exc, Degenerate)
                                  else "picard_diverged")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, taus))
    else:
        results = [run_one(tau) for tau in taus]
    errors = [r[0] for r in results]
    statuses = [r[1] for r in results]

    notes = []
    ok = [(tau, err) for tau, err, st in zip(taus, errors, statuses) if st == "ok"]
    slope = intercept = residual = None
    if len(ok) >= 3:
        try:
            fit = fit_rate([t for t, _ in ok], [e for _, e in ok])
            slope, intercept, residual = fit.slope, fit.intercept, fit.residual
        except NonpositiveError as exc:
            notes.append(f"rate fit skipped: {exc}")
    else:
        notes.append(f"rate fit skipped: only {len(ok)} successful runs")

    ok_errors = [e for _, e in ok]
    inversions = int(np.sum(np.diff(ok_errors) > 0.0)) if len(ok_errors) > 1 else 0

    noise_estimate = None
    if noise_check and ok:
        tau_min = ok[-1][0]
        try:
            coarse = solve(medium.with_tau(tau_min), data, space, T, dt,
                           forcing=forcing, **opts)
            fine = solve(medium.with_tau(tau_min), data, space, T, dt / 2.0,
                         forcing=forcing, **opts)
            noise_estimate = error_norm(coarse, _subsample(fine, 2), kind, space)
            if ok[-1][1] < 20.0 * noise_estimate:
                msg = (f"smallest error {ok[-1][1]:.3e} is below 20x the "
                       f"self-convergence estimate {noise_estimate:.3e}; "
                       f"reduce dt or raise tau_min")
                warnings.warn(msg, stacklevel=2)
                notes.append(msg)
        except SolverError as exc:
            notes.append(f"noise check failed to run: {exc}")

    config = {
        **medium.describe(),
        "T": T, "dt": dt, "n_modes": space.n_modes, "L": space.length,
        "kind": kind, "taus": list(taus), "u2_policy": data.u2_policy,
        "solver_options": {k: str(v) for k, v in opts.items()},
    }
    if sweep_id is None:
        digest = hashlib.sha1(json.dumps(config, sort_keys=True,
                                         default=str).encode()).hexdigest()[:10]
        sweep_id = f"{medium.family[:4]}-{kind}-{digest}"

    report = RateReport(
        sweep_id=sweep_id, family=medium.family, kind=kind,
        kernel_label=medium.kernel.label, power_a=medium.power_a,
        dt=dt, T=T, n_modes=space.n_modes,
        taus=list(taus), errors=errors, statuses=statuses,
        slope=slope, intercept=intercept, residual=residual,
        expected_slope=medium.power_a,
        threshold=threshold,
        threshold_passed=(None if (threshold is None or slope is None)
                          else bool(slope >= threshold)),
        no_theorem_threshold=no_threshold,
        inversions=inversions,
        noise_estimate=noise_estimate,
        notes=notes,
        config=config,
        environment=_environment(),
    )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        report.to_csv(os.path.join(out_dir, f"sweep_{sweep_id}.csv"))
        report.to_json(os.path.join(out_dir, f"sweep_{sweep_id}.json"))
    return report
