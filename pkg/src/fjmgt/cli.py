"""Batch entry point.

Commands: solve (one nonlocal run), limit (one reference run), sweep
(relaxation-time rate study), kernel-check (kernel diagnostics),
selftest (quick built-in verification). Configuration comes from a flat
``key = value`` file with ``#`` comments; any JSON manifest emitted by a
run is also accepted as a config and reproduces the run bit-identically.

Exit codes: 0 success, 2 configuration error (the message names the
offending key), 3 solver failure (degeneracy or Picard breakdown) with
the run manifest still written.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import convolution, experiments, kernels, limits, solver
from .errors import ConfigError, FjmgtError, SolverError
from .spectral import SpectralSpace

__all__ = ["main", "run"]

# key -> (default, parser)
_BOOL = {"true": True, "false": False, "1": True, "0": False,
         "yes": True, "no": False}


def _as_bool(s: str) -> bool:
    try:
        return _BOOL[s.strip().lower()]
    except KeyError:
        raise ValueError(f"expected a boolean, got {s!r}")


CONFIG_SCHEMA: dict[str, tuple] = {
    "L": (1.0, float),
    "n_modes": (64, int),
    "n_quad": (0, int),  # 0 = automatic (2 n_modes + 1)
    "dt": (1e-3, float),
    "T": (1.0, float),
    "c": (1.0, float),
    "delta": (0.1, float),
    "k1": (0.5, float),
    "k2": (0.0, float),
    "k3": (0.0, float),
    "family": ("westervelt", str),
    "kernel": ("abel", str),  # abel | delta0 | tabulated
    "alpha": (0.75, float),
    "kernel_csv": ("", str),
    "power_a": (1.0, float),  # tabulated kernels only
    "tau": (0.1, float),
    "tau_cap": (1.0, float),
    "amplitude": (1e-2, float),
    "u2_policy": ("compatible", str),
    "tau_list": ("0.2,0.1,0.05,0.025,0.0125,0.00625", str),
    "norm_kind": ("", str),  # empty = family default
    "memory_term": ("simplified", str),
    "a_floor": (0.1, float),
    "picard_tol": (1e-10, float),
    "picard_max": (50, int),
    "add_pressure_source": (False, _as_bool),
    "pressure_source_override": (False, _as_bool),
    "noise_check": (True, _as_bool),
    "threads": (1, int),
    "seed": (0, int),
    "out_dir": ("out", str),
    "sweep_id": ("", str),
}


def load_config(path: str | None) -> dict:
    """Resolve the full configuration from defaults plus a config file.

    Plain files are flat ``key = value`` lines; JSON files (as written
    in run manifests) contribute their ``config`` object. Unknown keys
    are rejected.
    """
    cfg = {k: v for k, (v, _) in CONFIG_SCHEMA.items()}
    if path is None:
        return cfg
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        payload = json.loads(text)
        entries = payload.get("config", payload)
        if isinstance(entries, dict) and isinstance(entries.get("cli"), dict):
            entries = entries["cli"]  # sweep reports nest the CLI keys here
        if not isinstance(entries, dict):
            raise ConfigError(f"JSON config {path} holds no config object")
        items = entries.items()
    else:
        items = []
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{ln}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            items.append((key, value))
    for key, value in items:
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"unknown config key '{key}'")
        _, parse = CONFIG_SCHEMA[key]
        try:
            cfg[key] = parse(value) if isinstance(value, str) else parse(str(value))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for config key '{key}': {exc}")
    return cfg


def _parse_tau_list(text: str) -> list[float]:
    try:
        taus = [float(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad tau list: {exc}")
    if not taus or any(t <= 0.0 for t in taus):
        raise ConfigError("tau list must hold positive values")
    return taus


def build_kernel(cfg: dict) -> kernels.KernelSpec:
    kind = cfg["kernel"].lower()
    if kind in ("delta", "delta0", "dirac"):
        return kernels.KernelSpec.delta()
    if kind == "abel":
        if not 0.5 < cfg["alpha"] < 1.0:
            raise ConfigError(
                f"config key 'alpha': Abel kernels need alpha in (1/2, 1) for a "
                f"square-integrable resolvent; got {cfg['alpha']}"
            )
        return kernels.KernelSpec.abel(cfg["alpha"])
    if kind == "tabulated":
        if not cfg["kernel_csv"]:
            raise ConfigError("config key 'kernel_csv' is required for tabulated kernels")
        return kernels.KernelSpec.from_csv(cfg["kernel_csv"], power_a=cfg["power_a"])
    raise ConfigError(f"config key 'kernel': unknown kernel '{cfg['kernel']}'")


def build_problem(cfg: dict):
    """Space, medium, and initial data resolved from a config dict."""
    space = SpectralSpace(length=cfg["L"], n_modes=cfg["n_modes"],
                          n_quad=cfg["n_quad"] or None)
    try:
        medium = solver.MediumParams(
            c=cfg["c"], delta=cfg["delta"],
            k1=cfg["k1"], k2=cfg["k2"], k3=cfg["k3"],
            tau=cfg["tau"], kernel=build_kernel(cfg), family=cfg["family"],
            tau_cap=cfg["tau_cap"],
        )
    except ConfigError:
        raise
    if cfg["u2_policy"] != "compatible":
        raise ConfigError("config key 'u2_policy': only 'compatible' is available "
                          "from config files; explicit accelerations go through the API")
    data = solver.default_initial_data(space, amplitude=cfg["amplitude"])
    return space, medium, data


def _norm_kind(cfg: dict, medium) -> str:
    if cfg["norm_kind"]:
        if cfg["norm_kind"] not in experiments.NORM_KINDS:
            raise ConfigError(f"config key 'norm_kind': unknown kind '{cfg['norm_kind']}'")
        return cfg["norm_kind"]
    if medium.family == "westervelt":
        return "west_rate"
    if medium.k1 == 0.0:
        return "blackstock_rate"
    return "west_rate"


def _solver_options(cfg: dict) -> dict:
    return {
        "memory_term": cfg["memory_term"],
        "a_floor": cfg["a_floor"],
        "picard_tol": cfg["picard_tol"],
        "picard_max": cfg["picard_max"],
        "pressure_source": cfg["add_pressure_source"],
        "pressure_source_override": cfg["pressure_source_override"],
    }


def _portable(cfg: dict) -> dict:
    """Config without execution-site details (identity of the run proper)."""
    return {k: v for k, v in cfg.items() if k not in ("out_dir", "threads")}


def _config_id(cfg: dict, command: str) -> str:
    payload = json.dumps({"command": command, **_portable(cfg)}, sort_keys=True)
    return hashlib.sha1(payload.encode()).hexdigest()[:12]


def _write_failure_manifest(out_dir: str, run_id: str, cfg: dict,
                            command: str, exc: SolverError) -> str:
    path = os.path.join(out_dir, f"run_{run_id}.json")
    solver._atomic_write_text(path, json.dumps({
        "run_id": run_id,
        "command": command,
        "status": type(exc).__name__.lower(),
        "error": {"type": type(exc).__name__, "message": str(exc), "t": exc.t},
        "config": _portable(cfg),
    }, indent=2) + "\n")
    return path


def cmd_solve(cfg: dict, limit_run: bool) -> int:
    command = "limit" if limit_run else "solve"
    space, medium, data = build_problem(cfg)
    run_id = _config_id(cfg, command)
    out_dir = cfg["out_dir"]
    try:
        if limit_run:
            traj = limits.solve_limit(medium, data, space, cfg["T"], cfg["dt"],
                                      a_floor=cfg["a_floor"],
                                      picard_tol=cfg["picard_tol"],
                                      picard_max=cfg["picard_max"],
                                      meta={"command": command, "config": _portable(cfg)})
        else:
            traj = solver.solve(medium, data, space, cfg["T"], cfg["dt"],
                                meta={"command": command, "config": _portable(cfg)},
                                **_solver_options(cfg))
    except SolverError as exc:
        path = _write_failure_manifest(out_dir, run_id, cfg, command, exc)
        print(f"{command}: {exc}", file=sys.stderr)
        print(f"manifest written to {path}", file=sys.stderr)
        return 3
    csv_path = os.path.join(out_dir, f"run_{run_id}.csv")
    man_path = os.path.join(out_dir, f"run_{run_id}.json")
    traj.write_csv(csv_path)
    traj.meta["status"] = "ok"
    traj.meta["artifacts"] = {"trajectory_csv": os.path.basename(csv_path)}
    traj.write_manifest(man_path)
    print(f"{command}: wrote {csv_path} and {man_path}")
    return 0


def cmd_sweep(cfg: dict) -> int:
    space, medium, data = build_problem(cfg)
    kind = _norm_kind(cfg, medium)
    taus = _parse_tau_list(cfg["tau_list"])
    run_id = cfg["sweep_id"] or _config_id(cfg, "sweep")
    try:
        report = experiments.tau_sweep(
            medium, data, space, cfg["T"], cfg["dt"], taus, kind,
            sweep_id=run_id, threads=cfg["threads"],
            noise_check=cfg["noise_check"], solver_options=_solver_options(cfg),
        )
    except SolverError as exc:
        path = _write_failure_manifest(cfg["out_dir"], run_id, cfg, "sweep", exc)
        print(f"sweep: reference run failed: {exc}", file=sys.stderr)
        print(f"manifest written to {path}", file=sys.stderr)
        return 3
    report.config["cli"] = _portable(cfg)  # feed this JSON back as --config to reproduce
    os.makedirs(cfg["out_dir"], exist_ok=True)
    report.to_csv(os.path.join(cfg["out_dir"], f"sweep_{run_id}.csv"))
    report.to_json(os.path.join(cfg["out_dir"], f"sweep_{run_id}.json"))
    slope_txt = "n/a" if report.slope is None else f"{report.slope:.4f}"
    flag = " [no theorem threshold]" if report.no_theorem_threshold else ""
    print(f"sweep {run_id}: kind={kind} slope={slope_txt} "
          f"expected~{report.expected_slope:.3g}{flag}")
    for tau, err, st in zip(report.taus, report.errors, report.statuses):
        print(f"  tau={tau:<10.6g} E={err:<12.6g} {st}")
    print(f"artifacts in {cfg['out_dir']}/sweep_{run_id}.(csv|json)")
    return 0


def cmd_kernel_check(cfg: dict) -> int:
    kern = build_kernel(cfg)
    dt, T = cfg["dt"], cfg["T"]
    n = int(round(T / dt))
    grid = dt * np.arange(1, n + 1)
    adm = kernels.kernel_admissible(kern, grid)
    dev = kernels.resolvent_identity_deviation(kern, dt, n)
    payload = {
        "kernel": kern.label,
        "power_a": kern.power_a,
        "admissible": adm.passed,
        "admissibility_reason": adm.reason,
        "first_violation_time": adm.first_violation_time,
        "resolvent_identity_deviation": dev,
        "moment_k0_at_T": kernels.kernel_moment(kern, 0, T),
        "moment_k1_at_T": kernels.kernel_moment(kern, 1, T),
        "dt": dt, "T": T,
        "config": cfg,
    }
    out = os.path.join(cfg["out_dir"], f"kernel_check_{_config_id(cfg, 'kernel-check')}.json")
    solver._atomic_write_text(out, json.dumps(payload, indent=2, default=str) + "\n")
    verdict = "pass" if adm.passed else f"FAIL ({adm.reason} at t={adm.first_violation_time})"
    print(f"kernel {kern.label}: admissibility {verdict}; "
          f"resolvent identity deviation {dev:.3e}")
    print(f"report written to {out}")
    return 0


def cmd_selftest(cfg: dict) -> int:
    rng = np.random.default_rng(cfg["seed"])
    failures = []

    def check(name: str, ok: bool, detail: str = ""):
        print(f"  [{'ok' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
        if not ok:
            failures.append(name)

    print("selftest:")
    dev = kernels.resolvent_identity_deviation(kernels.KernelSpec.abel(0.75), 1e-2, 100)
    check("resolvent identity (abel 0.75)", dev <= 0.01, f"dev={dev:.2e}")

    t = np.linspace(0.0, 1.0, 101)
    l1 = convolution.caputo_l1(0.75, t, 0.01)
    from scipy.special import gamma as _g
    check("caputo L1 of f=t", abs(l1[-1] - 1.0 / _g(1.25)) < 2e-2 / _g(1.25))

    ok_coercive = True
    kern = kernels.KernelSpec.abel(0.6)
    for _ in range(10):
        cpoly = rng.standard_normal(3)
        y = cpoly[0] * t + cpoly[1] * t**2 + cpoly[2] * t**3
        val = kernels.coercivity_functional(kern, y, 0.01)
        ok_coercive &= val >= -1e-8 * float(np.sum(y**2) * 0.01)
    check("coercivity on random cubics", ok_coercive)

    fit = experiments.fit_rate([0.1, 0.05, 0.025], [3 * 0.1**0.75, 3 * 0.05**0.75, 3 * 0.025**0.75])
    check("rate fit on exact power law", abs(fit.slope - 0.75) < 1e-12)

    space = SpectralSpace(length=1.0, n_modes=4)
    medium = solver.MediumParams(c=1.0, delta=0.1, tau=0.1,
                                 kernel=kernels.KernelSpec.delta(), family="westervelt")
    data = solver.default_initial_data(space, amplitude=1e-2)
    traj = solver.solve(medium, data, space, T=0.5, dt=1e-2)
    again = solver.solve(medium, data, space, T=0.5, dt=1e-2)
    check("deterministic rerun", bool(np.array_equal(traj.xi, again.xi)))

    if failures:
        print(f"selftest failed: {', '.join(failures)}")
        return 1
    print("selftest passed")
    return 0


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fjmgt",
        description="Solvers and rate studies for nonlocal JMGT-type acoustic equations",
    )
    parser.add_argument("command",
                        choices=["solve", "limit", "sweep", "kernel-check", "selftest"])
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="flat key=value config file or a run-manifest JSON")
    parser.add_argument("--out", metavar="DIR", default=None, help="output directory")
    parser.add_argument("--tau-list", metavar="LIST", default=None,
                        help="comma-separated tau overrides for sweep")
    parser.add_argument("--seed", metavar="N", type=int, default=None,
                        help="seed for randomized self-checks")
    parser.add_argument("--threads", metavar="N", type=int, default=None,
                        help="parallel tau fan-out for sweep")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg["out_dir"] = args.out
        if args.tau_list is not None:
            cfg["tau_list"] = args.tau_list
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.threads is not None:
            cfg["threads"] = args.threads

        if args.command == "solve":
            return cmd_solve(cfg, limit_run=False)
        if args.command == "limit":
            return cmd_solve(cfg, limit_run=True)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "kernel-check":
            return cmd_kernel_check(cfg)
        return cmd_selftest(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FjmgtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
