#!/usr/bin/env python3
"""One nonlocal run against an exact solution.

With the Dirac kernel the modal system is a third-order constant-
coefficient ODE per mode, so the march can be compared against the
exact exponential-sum solution built from the roots of the cubic
characteristic polynomial tau s^3 + s^2 + (delta + tau c^2) lam s
+ c^2 lam = 0. Writes a comparison figure when matplotlib is available.
"""

import numpy as np

from fjmgt import InitialData, KernelSpec, MediumParams, SpectralSpace, solve

tau, c, delta, amp, dt = 0.2, 1.0, 0.1, 1e-2, 1e-3

space = SpectralSpace(length=1.0, n_modes=1)
lam = space.eigenvalues[0]
medium = MediumParams(c=c, delta=delta, tau=tau, kernel=KernelSpec.delta())
data = InitialData(xi0=np.array([amp]), xi1=np.array([0.0]))

traj = solve(medium, data, space, T=1.0, dt=dt)

roots = np.roots([tau, 1.0, (delta + tau * c**2) * lam, c**2 * lam])
xi2 = traj.xi_tt[0, 0]  # compatible acceleration chosen by the solver
amps = np.linalg.solve(np.array([roots**0, roots, roots**2]),
                       np.array([amp, 0.0, xi2], dtype=complex))
exact = np.real(np.exp(np.outer(traj.t, roots)) @ amps)

err = np.abs(traj.xi[:, 0] - exact)
print(f"characteristic roots: {np.sort_complex(roots)}")
print(f"Linf error vs exact solution: {err.max():.3e} at dt = {dt}")
print(f"final state: xi(T) = {traj.xi[-1, 0]:+.6e}, exact {exact[-1]:+.6e}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(traj.t, traj.xi[:, 0], label="march")
    ax1.plot(traj.t, exact, "--", label="exact (cubic roots)")
    ax1.set_ylabel("first modal coefficient")
    ax1.legend()
    ax2.semilogy(traj.t, np.maximum(err, 1e-18))
    ax2.set_xlabel("t")
    ax2.set_ylabel("absolute error")
    fig.tight_layout()
    fig.savefig("demo_single_run.png", dpi=150)
    print("figure written to demo_single_run.png")
except ImportError:
    print("matplotlib not installed; skipping the figure")
