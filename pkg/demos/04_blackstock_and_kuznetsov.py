#!/usr/bin/env python3
"""Kuznetsov-Blackstock nonlinearities in the vanishing-tau limit.

The Blackstock sub-configuration (k1 = 0) comes with a proven rate in
the gradient/Laplacian norm; the Kuznetsov sub-configuration (k2 = 0,
k1 != 0) has no proven rate, so its sweep is reported as an observation
with the no-theorem-threshold flag.
"""

from fjmgt import (
    KernelSpec,
    MediumParams,
    SpectralSpace,
    default_initial_data,
    tau_sweep,
)

space = SpectralSpace(length=1.0, n_modes=64)
data = default_initial_data(space, amplitude=1e-2)
taus = [0.2 * 2.0**-k for k in range(6)]
kernel = KernelSpec.abel(0.75)

blackstock = MediumParams(c=1.0, delta=0.1, k1=0.0, k2=0.1, k3=0.1,
                          tau=taus[0], kernel=kernel,
                          family="kuznetsov-blackstock")
rep_b = tau_sweep(blackstock, data, space, T=1.0, dt=1e-3, taus=taus,
                  kind="blackstock_rate", noise_check=False)
print("Blackstock (k1 = 0): rate theorem applies in the gradient/Laplacian norm")
print(f"  fitted slope {rep_b.slope:.4f}, threshold {rep_b.threshold:.2f}, "
      f"passed = {rep_b.threshold_passed}")

kuznetsov = MediumParams(c=1.0, delta=0.1, k1=0.5, k2=0.0, k3=0.1,
                         tau=taus[0], kernel=kernel,
                         family="kuznetsov-blackstock")
rep_k = tau_sweep(kuznetsov, data, space, T=1.0, dt=1e-3, taus=taus,
                  kind="west_rate", noise_check=False)
print("Kuznetsov (k2 = 0, k1 != 0): no strong-rate theorem; observation only")
print(f"  observed slope {rep_k.slope:.4f}, "
      f"no_theorem_threshold = {rep_k.no_theorem_threshold}")

print("\nerror ladders:")
print(f"{'tau':>10s} {'E_blackstock':>14s} {'E_kuznetsov':>14s}")
for tau, eb, ek in zip(rep_b.taus, rep_b.errors, rep_k.errors):
    print(f"{tau:>10.5g} {eb:>14.4e} {ek:>14.4e}")
