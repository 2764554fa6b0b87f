#!/usr/bin/env python3
"""Tour of the memory kernels and their diagnostics.

Walks through the three kernel families, evaluates moments and
resolvents, checks the admissibility conditions and the resolvent
identity, and demonstrates the L1 Caputo-derivative evaluator against
analytic fractional derivatives.
"""

import numpy as np
from scipy.special import gamma

from fjmgt import (
    KernelSpec,
    caputo_l1,
    coercivity_functional,
    kernel_admissible,
    kernel_eval,
    kernel_moment,
    resolvent,
    resolvent_identity_deviation,
)

print("=== kernel gallery ===\n")

abel = KernelSpec.abel(0.75)
delta = KernelSpec.delta()
t_tab = np.linspace(0.01, 2.0, 200)
tabulated = KernelSpec.tabulated(t_tab, np.exp(-t_tab), power_a=1.0)

for spec in (abel, delta, tabulated):
    print(f"kernel {spec.label}: relaxation-time exponent a = {spec.power_a}")

print("\npointwise values (the Dirac kernel has none):")
for t in (0.25, 1.0, 2.0):
    print(f"  abel(0.75)({t}) = {kernel_eval(abel, t):.6f}"
          f"   exp-table({t}) = {kernel_eval(tabulated, t):.6f}")

print("\nconvolution moments (kernel * s^k)(t):")
print(f"  abel:  (K*1)(1) = {kernel_moment(abel, 0, 1.0):.6f}"
      f"  (closed form 1/Gamma(1.25) = {1 / gamma(1.25):.6f})")
print(f"  delta: (K*1)(1) = {kernel_moment(delta, 0, 1.0):.6f} (identity)")

print("\nresolvents invert the memory convolution: kernel * resolvent = 1")
res = resolvent(abel)
print(f"  abel(0.75) resolvent at t=1: {kernel_eval(res, 1.0):.6f}"
      f"  (1/Gamma(0.75) = {1 / gamma(0.75):.6f})")
for alpha in (0.6, 0.75, 0.9):
    dev = resolvent_identity_deviation(KernelSpec.abel(alpha), 1e-3, 1000)
    print(f"  discrete identity deviation, alpha={alpha}: {dev:.2e}")

print("\nadmissibility (nonnegative and nonincreasing samples):")
grid = np.linspace(0.05, 2.0, 100)
for spec in (abel, tabulated):
    print(f"  {spec.label}: {'pass' if kernel_admissible(spec, grid) else 'FAIL'}")
bad = KernelSpec.tabulated([0.1, 0.2, 0.3], [1.0, 0.5, 0.7])
rep = kernel_admissible(bad, np.array([0.1, 0.2, 0.3]))
print(f"  non-monotone table: fail at t = {rep.first_violation_time} ({rep.reason})")

print("\ncoercivity functional (nonnegative for y(0) = 0):")
t = np.linspace(0.0, 1.0, 1001)
print(f"  y = t:      {coercivity_functional(abel, t, 1e-3):+.6f}"
      f"  (closed form {1 / (2.25 * gamma(1.25)):.6f})")
print(f"  y = t-t^2:  {coercivity_functional(abel, t - t**2, 1e-3):+.6f}")

print("\nCaputo derivative via the L1 scheme, order 0.75:")
d = caputo_l1(0.75, t, 1e-3)
print(f"  D^a[t] at t=1:   {d[-1]:.6f}  analytic {1 / gamma(1.25):.6f}")
d2 = caputo_l1(0.5, t**2, 1e-3)
print(f"  D^.5[t^2] at t=1: {d2[-1]:.6f}  analytic {2 / gamma(2.5):.6f}")
