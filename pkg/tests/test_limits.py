"""Limit solvers: oracles, energy decay, and scheme consistency."""

import numpy as np

from fjmgt import (
    InitialData,
    KernelSpec,
    MediumParams,
    SpectralSpace,
    default_initial_data,
    grid_forcing,
    solve,
    solve_limit,
)


def damped_oscillator(c, delta, lam, xi0, xi1, t):
    """Exact solution of xi'' + delta lam xi' + c^2 lam xi = 0."""
    roots = np.roots([1.0, delta * lam, c**2 * lam])
    amps = np.linalg.solve(np.array([roots**0, roots]),
                           np.array([xi0, xi1], dtype=complex))
    return np.real(np.exp(np.outer(t, roots)) @ amps)


class TestLimitSolver:
    def test_zero_data_zero_trajectory(self):
        space = SpectralSpace(1.0, 4)
        med = MediumParams(k1=0.5, kernel=KernelSpec.abel(0.75))
        data = InitialData(xi0=np.zeros(4), xi1=np.zeros(4))
        traj = solve_limit(med, data, space, T=0.2, dt=1e-2)
        assert np.all(traj.xi == 0.0)

    def test_linear_single_mode_oracle(self):
        space = SpectralSpace(1.0, 1)
        med = MediumParams(c=1.0, delta=0.1, kernel=KernelSpec.delta())
        amp = 1e-2
        data = InitialData(xi0=np.array([amp]), xi1=np.array([0.0]))
        traj = solve_limit(med, data, space, T=1.0, dt=1e-3)
        exact = damped_oscillator(1.0, 0.1, space.eigenvalues[0], amp, 0.0, traj.t)
        assert np.max(np.abs(traj.xi[:, 0] - exact)) <= 1e-3

    def test_manufactured_westervelt_solution(self):
        # u = sin(pi x) cos(t) with the forcing derived symbolically
        space = SpectralSpace(1.0, 64)
        k1, c, d = 0.1, 1.0, 0.1
        med = MediumParams(c=c, delta=d, k1=k1, kernel=KernelSpec.abel(0.75))

        def forcing_fn(x, t):
            s = np.sin(np.pi * x)
            ct, st = np.cos(t), np.sin(t)
            u, ut, utt = s * ct, -s * st, -s * ct
            lap_u, lap_ut = -np.pi**2 * s * ct, np.pi**2 * s * st
            return (1 + 2 * k1 * u) * utt + 2 * k1 * ut**2 - c**2 * lap_u - d * lap_ut

        dt = 1e-3
        xi0 = space.project(np.sin(np.pi * space.x))
        data = InitialData(xi0=xi0, xi1=np.zeros(64))
        traj = solve_limit(med, data, space, T=1.0, dt=dt,
                           forcing=grid_forcing(space, forcing_fn))
        exact = np.outer(np.cos(traj.t), xi0)
        linf_l2 = np.max(space.sobolev_norm(traj.xi - exact, 0))
        assert linf_l2 <= 5 * dt

    def test_energy_decay_linear(self):
        space = SpectralSpace(1.0, 16)
        med = MediumParams(c=1.0, delta=0.1, kernel=KernelSpec.delta())
        data = default_initial_data(space, amplitude=1e-2)
        traj = solve_limit(med, data, space, T=1.0, dt=1e-3)
        energy = (0.5 * space.sobolev_norm(traj.xi_t, 0) ** 2
                  + 0.5 * space.sobolev_norm(traj.xi, 1) ** 2)
        assert np.all(np.diff(energy) <= 1e-12 * energy[0])

    def test_determinism(self):
        space = SpectralSpace(1.0, 8)
        med = MediumParams(c=1.0, delta=0.1, k1=0.4, kernel=KernelSpec.abel(0.75))
        data = default_initial_data(space, amplitude=1e-2)
        a = solve_limit(med, data, space, T=0.3, dt=2e-3)
        b = solve_limit(med, data, space, T=0.3, dt=2e-3)
        assert np.array_equal(a.xi, b.xi)

    def test_initial_acceleration_matches_limit_equation(self):
        # stored xi''(0) solves the limiting equation at t = 0
        space = SpectralSpace(1.0, 4)
        med = MediumParams(c=2.0, delta=0.3, kernel=KernelSpec.delta())
        xi0 = 1e-2 * np.arange(1.0, 5.0)
        data = InitialData(xi0=xi0, xi1=np.zeros(4))
        traj = solve_limit(med, data, space, T=0.1, dt=1e-2)
        lam = space.eigenvalues
        assert np.allclose(traj.xi_tt[0], -4.0 * lam * xi0, rtol=1e-12)


class TestSchemeConsistency:
    def test_fjmgt_converges_to_limit_as_tau_vanishes(self):
        # nested integration makes the tau -> 0 march coincide with the
        # limit march on the same grid; the gap shrinks with tau^a
        space = SpectralSpace(1.0, 8)
        data = default_initial_data(space, amplitude=1e-2)
        for kernel in (KernelSpec.delta(), KernelSpec.abel(0.75)):
            med = MediumParams(c=1.0, delta=0.1, k1=0.5, tau=1e-8, kernel=kernel)
            near = solve(med, data, space, T=0.5, dt=1e-3)
            ref = solve_limit(med, data, space, T=0.5, dt=1e-3)
            assert np.max(np.abs(near.xi - ref.xi)) <= 1e-7

    def test_gap_scales_with_tau_power(self):
        space = SpectralSpace(1.0, 4)
        data = default_initial_data(space, amplitude=1e-2)
        kernel = KernelSpec.abel(0.75)
        ref = None
        gaps = []
        for tau in (1e-4, 1e-6):
            med = MediumParams(c=1.0, delta=0.1, tau=tau, kernel=kernel)
            traj = solve(med, data, space, T=0.3, dt=2e-3)
            if ref is None:
                ref = solve_limit(med, data, space, T=0.3, dt=2e-3)
            gaps.append(np.max(np.abs(traj.xi - ref.xi)))
        # tau drops by 1e2, tau^a by 1e1.5: the gap should follow suit
        assert gaps[1] <= gaps[0] * 10 ** -1.2
