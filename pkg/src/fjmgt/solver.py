"""Time integration of the semi-discrete nonlocal JMGT-type system.

The third-order-in-time equation with memory is marched in the auxiliary
unknown mu = (kernel * xi''') per mode, the second-kind Volterra form in
which the lag-0 part of every convolution is invertible mode-by-mode.
The state is recovered from mu by the resolvent application

    xi''_n = (resolvent-weights . mu)_n + xi2,

followed by nested backward-Euler integration for xi' and xi. Nesting
(rather than composite exact-moment weights for 1*resolvent and
1*1*resolvent) makes the tau -> 0 algebraic limit of this march coincide
exactly with the limit solver's march on the same grid, so differences
between the two trajectories measure relaxation-time effects only.

Nonlinear terms are handled by Picard iteration inside each step, with
the non-degeneracy of the leading coefficient checked on every iterate.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field, replace

import numpy as np

from .convolution import (
    HistoryBuffer,
    compose_weights,
    pi_weights,
    power_weights,
)
from .errors import ConfigError, Degenerate, PicardDiverged
from .kernels import KernelSpec, kernel_eval, kernel_moment, resolvent
from .spectral import SpectralSpace, nonlinear_galerkin

__all__ = [
    "MediumParams",
    "InitialData",
    "ModalState",
    "Trajectory",
    "assemble_rhs_tilde",
    "degeneracy_check",
    "resolve_initial_data",
    "default_initial_data",
    "grid_forcing",
    "solve",
]

FAMILIES = ("westervelt", "kuznetsov-blackstock")

PICARD_TOL = 1e-10
PICARD_MAX = 50
A_FLOOR = 0.1


@dataclass(frozen=True, eq=False)
class MediumParams:
    """Physical constants, nonlinearity family, and the memory kernel.

    family "westervelt" carries the pressure-form nonlinearity through
    k1 alone (k2 = k3 = 0 required); "kuznetsov-blackstock" uses all
    three, with Kuznetsov (k2 = 0) and Blackstock (k1 = 0) as the named
    sub-configurations.
    """

    c: float = 1.0
    delta: float = 0.1
    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0
    tau: float = 0.0
    kernel: KernelSpec = field(default_factory=KernelSpec.delta)
    family: str = "westervelt"
    tau_cap: float = 1.0

    def __post_init__(self):
        if self.c <= 0.0 or self.delta <= 0.0:
            raise ConfigError("sound speed and diffusivity must be positive")
        if self.tau < 0.0 or self.tau > self.tau_cap:
            raise ConfigError(
                f"relaxation time {self.tau} outside [0, {self.tau_cap}]"
            )
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if self.family == "westervelt" and (self.k2 != 0.0 or self.k3 != 0.0):
            raise ConfigError("the Westervelt family uses k1 only (k2 = k3 = 0)")

    @property
    def power_a(self) -> float:
        return self.kernel.power_a

    @property
    def is_linear(self) -> bool:
        return self.k1 == 0.0 and self.k2 == 0.0 and self.k3 == 0.0

    def with_tau(self, tau: float) -> "MediumParams":
        return replace(self, tau=tau)

    def describe(self) -> dict:
        return {
            "c": self.c, "delta": self.delta,
            "k1": self.k1, "k2": self.k2, "k3": self.k3,
            "tau": self.tau, "kernel": self.kernel.label,
            "power_a": self.power_a, "family": self.family,
        }


@dataclass(frozen=True, eq=False)
class InitialData:
    """Modal initial data (u, u_t, u_tt at t = 0).

    With policy "compatible" (the default) the acceleration is computed
    from the limiting equation at t = 0, which keeps it independent of
    tau and of the kernel and minimizes the memory-source transient.
    There is no hard smallness gate: the amplitude is the caller's knob
    and the runtime degeneracy guard enforces non-degeneracy.
    """

    xi0: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray | None = None
    u2_policy: str = "compatible"  # "compatible" | "explicit"

    def __post_init__(self):
        if self.u2_policy not in ("compatible", "explicit"):
            raise ConfigError(f"unknown u2 policy {self.u2_policy!r}")
        if self.u2_policy == "explicit" and self.xi2 is None:
            raise ConfigError("explicit u2 policy requires xi2")
        object.__setattr__(self, "xi0", np.asarray(self.xi0, dtype=float))
        object.__setattr__(self, "xi1", np.asarray(self.xi1, dtype=float))
        if self.xi2 is not None:
            object.__setattr__(self, "xi2", np.asarray(self.xi2, dtype=float))


@dataclass(eq=False)
class ModalState:
    """Marching state: current modal derivatives plus the mu history.

    The recovery invariant xi'' = (resolvent-weights . mu-history) + xi2
    is re-derivable from the stored history at any step; velocities and
    positions are the nested backward-Euler integrals of the recovered
    acceleration sequence.
    """

    xi: np.ndarray
    xi_t: np.ndarray
    xi_tt: np.ndarray
    mu_hist: HistoryBuffer
    step: int = 0


@dataclass(eq=False)
class Trajectory:
    """Uniform-grid snapshots of one run plus its metadata."""

    t: np.ndarray
    xi: np.ndarray
    xi_t: np.ndarray
    xi_tt: np.ndarray
    dt: float
    n_modes: int
    meta: dict
    state: "ModalState | None" = None  # final march state; carries the mu history

    @property
    def run_id(self) -> str:
        payload = json.dumps(self.meta, sort_keys=True, default=str)
        return hashlib.sha1(payload.encode()).hexdigest()[:12]

    def write_csv(self, path) -> None:
        """Columnar CSV: t, then xi_1..xi_N, then xi'_1..xi'_N."""
        n = self.n_modes
        header = ",".join(
            ["t"]
            + [f"xi_{j}" for j in range(1, n + 1)]
            + [f"xi_t_{j}" for j in range(1, n + 1)]
        )
        table = np.column_stack([self.t, self.xi, self.xi_t])
        _atomic_write_text(
            path,
            header + "\n" + "\n".join(",".join(f"{v:.17g}" for v in row) for row in table) + "\n",
        )

    def manifest(self) -> dict:
        return {
            "run_id": self.run_id,
            "dt": self.dt,
            "n_steps": int(self.t.size - 1),
            "n_modes": self.n_modes,
            "t_final": float(self.t[-1]),
            **self.meta,
        }

    def write_manifest(self, path) -> None:
        _atomic_write_text(path, json.dumps(self.manifest(), indent=2, default=str) + "\n")


def _atomic_write_text(path, text: str) -> None:
    """Write-then-rename so no artifact is ever half-written."""
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- initial data ---------------------------------------------------------


def default_initial_data(space: SpectralSpace, amplitude: float = 1e-2) -> InitialData:
    """Smooth polynomial bump 4 x (L - x) / L^2 scaled to peak `amplitude`.

    u_t(0) = 0; the acceleration follows the compatible policy.
    """
    profile = 4.0 * space.x * (space.length - space.x) / space.length**2
    xi0 = space.project(amplitude * profile)
    return InitialData(xi0=xi0, xi1=np.zeros(space.n_modes))


def grid_forcing(space: SpectralSpace, fn) -> callable:
    """Wrap a physical-space forcing f(x, t) as a modal forcing f_j(t)."""

    def modal(t: float) -> np.ndarray:
        return space.project(fn(space.x, t))

    return modal


def resolve_initial_data(space: SpectralSpace, medium: MediumParams,
                         data: InitialData, forcing=None):
    """Return (xi0, xi1, xi2) with the compatible acceleration filled in.

    Compatible policy: u_tt(0) solves the limiting equation at t = 0,
    a(.) u_tt = c^2 b(.) Lap u0 + delta Lap u1 - N(0) + f(0), evaluated
    pseudospectrally and projected back onto the modes.
    """
    xi0, xi1 = data.xi0, data.xi1
    if xi0.shape != (space.n_modes,) or xi1.shape != (space.n_modes,):
        raise ConfigError("initial data must match the space's mode count")
    if data.u2_policy == "explicit":
        xi2 = data.xi2
        if xi2.shape != (space.n_modes,):
            raise ConfigError("xi2 must match the space's mode count")
        return xi0, xi1, xi2

    lam = space.eigenvalues
    lap_u0 = space.synthesize(-lam * xi0)
    lap_u1 = space.synthesize(-lam * xi1)
    f0 = space.synthesize(forcing(0.0)) if forcing is not None else 0.0
    c2 = medium.c**2
    if medium.family == "westervelt":
        u0 = space.synthesize(xi0)
        u1 = space.synthesize(xi1)
        a_grid = 1.0 + 2.0 * medium.k1 * u0
        rhs = c2 * lap_u0 + medium.delta * lap_u1 - 2.0 * medium.k1 * u1**2 + f0
    else:
        u1 = space.synthesize(xi1)
        u0x = space.synthesize_gradient(xi0)
        u1x = space.synthesize_gradient(xi1)
        a_grid = 1.0 + 2.0 * medium.k1 * u1
        b_grid = 1.0 + 2.0 * medium.k2 * u1
        rhs = c2 * b_grid * lap_u0 + medium.delta * lap_u1 - 2.0 * medium.k3 * u0x * u1x + f0
    if np.min(a_grid) <= 0.0:
        raise Degenerate(0.0, float(np.min(a_grid)), 0.0)
    return xi0, xi1, space.project(rhs / a_grid)


# -- assembled right-hand side (Volterra form) ---------------------------


def assemble_rhs_tilde(medium: MediumParams, space: SpectralSpace,
                       xi0, xi1, xi2, t, forcing=None) -> np.ndarray:
    """Linear part of the Volterra right-hand side f-tilde at time t.

    Collects the forcing and the initial-data terms
    -xi2 - c^2 lam (xi2 t^2/2 + xi1 t + xi0)
    - tau^a c^2 lam (kernel * (xi2 s + xi1))(t) - delta lam (xi2 t + xi1),
    with the kernel convolution evaluated analytically through the
    first two kernel moments. Contributions of the nonlinear variable
    coefficients stay in the Picard loop and are excluded here.
    """
    lam = space.eigenvalues
    tau_a = medium.tau**medium.power_a
    c2 = medium.c**2
    m0 = kernel_moment(medium.kernel, 0, t)
    m1 = kernel_moment(medium.kernel, 1, t)
    f = forcing(t) if forcing is not None else 0.0
    return (
        f
        - xi2
        - c2 * lam * (0.5 * xi2 * t**2 + xi1 * t + xi0)
        - tau_a * c2 * lam * (xi2 * m1 + xi1 * m0)
        - medium.delta * lam * (xi2 * t + xi1)
    )


# -- degeneracy guard -----------------------------------------------------


def leading_coefficient_min(space: SpectralSpace, medium: MediumParams,
                            xi, xi_t) -> float:
    """Grid minimum of the leading coefficient a of the wave operator."""
    if medium.k1 == 0.0:
        return 1.0
    if medium.family == "westervelt":
        grid = space.synthesize(xi)
    else:
        grid = space.synthesize(xi_t)
    return float(np.min(1.0 + 2.0 * medium.k1 * grid))


def degeneracy_check(space: SpectralSpace, medium: MediumParams,
                     xi, xi_t, t: float, floor: float = A_FLOOR) -> float:
    """Raise Degenerate unless min a >= floor; returns the minimum."""
    m = leading_coefficient_min(space, medium, xi, xi_t)
    if m < floor:
        raise Degenerate(t, m, floor)
    return m


# -- the march ------------------------------------------------------------


def _march(space: SpectralSpace, medium: MediumParams, xi0, xi1, xi2,
           forcing, T: float, dt: float, fractional: bool,
           memory_term: str = "simplified",
           a_floor: float = A_FLOOR,
           picard_tol: float = PICARD_TOL,
           picard_max: int = PICARD_MAX,
           source_coeff: np.ndarray | None = None,
           meta: dict | None = None) -> Trajectory:
    n_steps = int(round(T / dt))
    if n_steps < 1 or abs(n_steps * dt - T) > 1e-9 * max(T, 1.0):
        raise ConfigError(f"T={T} is not an integer multiple of dt={dt}")
    N = space.n_modes
    lam = space.eigenvalues
    c2 = medium.c**2
    delta = medium.delta
    k1, k2, k3 = medium.k1, medium.k2, medium.k3
    family = medium.family
    westervelt = family == "westervelt"

    if fractional:
        tau_a = medium.tau**medium.power_a
        res = resolvent(medium.kernel, dt=dt, n_steps=n_steps)
        w_res = pi_weights(res, dt, n_steps)
        if memory_term == "simplified":
            w_mem = power_weights(2.0, dt, n_steps)  # kernel*1*resolvent = t
        elif memory_term == "composed":
            w_mem = compose_weights(
                compose_weights(pi_weights(medium.kernel, dt, n_steps),
                                power_weights(1.0, dt, n_steps)),
                pi_weights(res, dt, n_steps),
            )
        else:
            raise ConfigError(f"unknown memory_term {memory_term!r}")
        wr = w_res.lag_weights
        wm = w_mem.lag_weights
        a0 = wr[0]
        t_nodes = dt * np.arange(1, n_steps + 1)
        mom0 = np.atleast_1d(kernel_moment(medium.kernel, 0, t_nodes))
        mom1 = np.atleast_1d(kernel_moment(medium.kernel, 1, t_nodes))
        mu_hist = HistoryBuffer(n_steps, N)
        if source_coeff is not None and np.any(source_coeff != 0.0):
            source_vals = -tau_a * kernel_eval(medium.kernel, t_nodes)
        else:
            source_vals = None
    else:
        tau_a = 0.0
        a0 = 1.0
        wr = wm = None
        mu_hist = HistoryBuffer(0, N)
        source_vals = None

    # lag-0 coefficient of the mode-wise linear solve
    A = tau_a + a0 * (1.0 + delta * lam * dt + c2 * lam * dt**2)
    if fractional:
        A = A + tau_a * c2 * lam * wm[0]

    t_grid = dt * np.arange(n_steps + 1)
    xi_out = np.zeros((n_steps + 1, N))
    xit_out = np.zeros((n_steps + 1, N))
    xitt_out = np.zeros((n_steps + 1, N))
    xi_out[0], xit_out[0], xitt_out[0] = xi0, xi1, xi2

    degeneracy_check(space, medium, xi0, xi1, 0.0, a_floor)

    xi_p, xit_p = xi0.copy(), xi1.copy()
    z = np.zeros(N)
    needs_grad = (not westervelt) and (k3 != 0.0)
    needs_lap = (not westervelt) and (k2 != 0.0)

    for n in range(1, n_steps + 1):
        tn = n * dt
        if fractional:
            hist = mu_hist.view()
            base = xi2 + (np.tensordot(wr[1:n][::-1], hist, axes=(0, 0)) if n > 1 else 0.0)
            mem = xi2 * mom1[n - 1] + xi1 * mom0[n - 1]
            if n > 1:
                mem = mem + np.tensordot(wm[1:n][::-1], hist, axes=(0, 0))
        else:
            base = np.zeros(N)
            mem = None

        f_n = forcing(tn) if forcing is not None else 0.0
        if source_vals is not None:
            f_n = f_n + source_vals[n - 1] * source_coeff

        const = (
            base * (1.0 + delta * lam * dt + c2 * lam * dt**2)
            + delta * lam * xit_p
            + c2 * lam * (xi_p + dt * xit_p)
            - f_n
        )
        if fractional:
            const = const + tau_a * c2 * lam * mem

        if medium.is_linear:
            z = -const / A
            xitt_n = a0 * z + base
            xit_n = xit_p + dt * xitt_n
            xi_n = xi_p + dt * xit_n
        else:
            converged = False
            delta_z = np.inf
            for _ in range(picard_max):
                xitt_n = a0 * z + base
                xit_n = xit_p + dt * xitt_n
                xi_n = xi_p + dt * xit_n
                degeneracy_check(space, medium, xi_n, xit_n, tn, a_floor)
                if westervelt:
                    nl = nonlinear_galerkin(
                        space, family, k1, k2, k3, medium.c,
                        u=space.synthesize(xi_n),
                        u_t=space.synthesize(xit_n),
                        u_tt=space.synthesize(xitt_n),
                    )
                else:
                    nl = nonlinear_galerkin(
                        space, family, k1, k2, k3, medium.c,
                        u_t=space.synthesize(xit_n),
                        u_tt=space.synthesize(xitt_n),
                        u_x=space.synthesize_gradient(xi_n) if needs_grad else None,
                        u_xt=space.synthesize_gradient(xit_n) if needs_grad else None,
                        neg_lap_u=space.synthesize(lam * xi_n) if needs_lap else None,
                    )
                z_new = -(const + nl) / A
                delta_z = float(np.linalg.norm(z_new - z))
                z = z_new
                if delta_z <= picard_tol * (1.0 + float(np.linalg.norm(z))):
                    converged = True
                    break
            if not converged:
                raise PicardDiverged(tn, picard_max, delta_z)
            xitt_n = a0 * z + base
            xit_n = xit_p + dt * xitt_n
            xi_n = xi_p + dt * xit_n
            degeneracy_check(space, medium, xi_n, xit_n, tn, a_floor)

        if fractional:
            mu_hist.append(z)
        xi_out[n], xit_out[n], xitt_out[n] = xi_n, xit_n, xitt_n
        xi_p, xit_p = xi_n, xit_n

    run_meta = dict(meta or {})
    run_meta.setdefault("solver", "fjmgt" if fractional else "limit")
    run_meta.update(medium.describe())
    run_meta.update({"T": T, "dt": dt, "n_modes": N, "L": space.length,
                     "n_quad": space.n_quad, "memory_term": memory_term if fractional else None,
                     "a_floor": a_floor})
    state = ModalState(xi=xi_p, xi_t=xit_p, xi_tt=xitt_out[-1],
                       mu_hist=mu_hist, step=n_steps)
    return Trajectory(t=t_grid, xi=xi_out, xi_t=xit_out, xi_tt=xitt_out,
                      dt=dt, n_modes=N, meta=run_meta, state=state)


def solve(medium: MediumParams, data: InitialData, space: SpectralSpace,
          T: float, dt: float, forcing=None, *,
          memory_term: str = "simplified",
          a_floor: float = A_FLOOR,
          picard_tol: float = PICARD_TOL,
          picard_max: int = PICARD_MAX,
          pressure_source: bool = False,
          pressure_source_override: bool = False,
          meta: dict | None = None) -> Trajectory:
    """March the nonlocal (tau > 0) problem and return its trajectory.

    ``pressure_source`` adds the pressure-form memory forcing
    -tau^a kernel(t) (u2 - c^2 Lap u0); it is off by default and, unless
    overridden, requires the data to make it vanish identically (general
    data would lose square-integrable-in-time forcing).
    """
    if medium.tau <= 0.0:
        raise ConfigError("the nonlocal solver needs tau > 0; use the limit solver at tau = 0")
    xi0, xi1, xi2 = resolve_initial_data(space, medium, data, forcing)

    source_coeff = None
    if pressure_source:
        rho = xi2 + medium.c**2 * space.eigenvalues * xi0  # modal (u2 - c^2 Lap u0)
        if np.allclose(rho, 0.0, atol=1e-14):
            source_coeff = None  # source vanishes identically
        elif medium.kernel.variant == "delta":
            raise ConfigError("the Dirac kernel admits no pointwise memory source; "
                              "use data with u2 = c^2 Lap u0")
        elif not pressure_source_override:
            raise ConfigError("pressure-form memory source needs u2 = c^2 Lap u0 "
                              "mode-wise (set pressure_source_override to force it)")
        else:
            source_coeff = rho

    return _march(space, medium, xi0, xi1, xi2, forcing, T, dt,
                  fractional=True, memory_term=memory_term, a_floor=a_floor,
                  picard_tol=picard_tol, picard_max=picard_max,
                  source_coeff=source_coeff, meta=meta)
