"""1D Dirichlet spectral space on the Laplacian eigenbasis.

Orthonormal sine modes phi_j(x) = sqrt(2/L) sin(j pi x / L) on (0, L),
with eigenvalues lambda_j = (j pi / L)^2 of the negative Laplacian.
Projection and synthesis are dense matrix applications on an interior
quadrature grid wide enough to dealias quadratic products (the grid
defaults to 2N+1 points, above the 3N/2 minimum), Sobolev norms are
exact weighted l2 sums by Parseval, and the nonlinear Galerkin terms of
both nonlinearity families are formed pointwise on the padded grid and
projected back.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, GridMismatch

__all__ = ["SpectralSpace", "nonlinear_galerkin"]


class SpectralSpace:
    """Sine eigenbasis of -Laplace on (0, L) with Dirichlet conditions."""

    def __init__(self, length: float = 1.0, n_modes: int = 64,
                 n_quad: int | None = None):
        if length <= 0.0:
            raise ConfigError(f"domain length must be positive, got {length}")
        if n_modes < 1:
            raise ConfigError(f"need at least one mode, got {n_modes}")
        if n_quad is None:
            n_quad = 2 * n_modes + 1
        if 2 * n_quad < 3 * n_modes:
            raise ConfigError(
                f"quadrature grid of {n_quad} points cannot dealias "
                f"{n_modes} modes (needs at least 3N/2)"
            )
        self.length = float(length)
        self.n_modes = int(n_modes)
        self.n_quad = int(n_quad)

        j = np.arange(1, n_modes + 1, dtype=float)
        self.eigenvalues = (j * np.pi / length) ** 2
        self.h = length / (n_quad + 1)
        self.x = self.h * np.arange(1, n_quad + 1)

        theta = np.pi * np.outer(np.arange(1, n_quad + 1), j) / (n_quad + 1)
        scale = np.sqrt(2.0 / length)
        self._synth = scale * np.sin(theta)                      # (M, N)
        self._grad = scale * (j * np.pi / length) * np.cos(theta)

    # transforms ---------------------------------------------------------

    def project(self, samples) -> np.ndarray:
        """Modal coefficients <samples, phi_j> from quadrature-grid samples."""
        samples = np.asarray(samples, dtype=float)
        if samples.shape[-1] != self.n_quad:
            raise GridMismatch(
                f"expected {self.n_quad} grid samples, got {samples.shape[-1]}"
            )
        return self.h * (samples @ self._synth)

    def synthesize(self, xi) -> np.ndarray:
        """Grid samples of the modal field."""
        return self._modal(xi) @ self._synth.T

    def synthesize_gradient(self, xi) -> np.ndarray:
        """Grid samples of the spatial derivative of the modal field."""
        return self._modal(xi) @ self._grad.T

    def sobolev_norm(self, xi, order: int) -> float | np.ndarray:
        """Exact Sobolev seminorm-type norms by Parseval.

        order 0..3 gives the L2 norms of u, grad u, Laplace u and
        grad Laplace u (the sine basis satisfies the boundary conditions
        of all of them automatically).
        """
        if order not in (0, 1, 2, 3):
            raise ConfigError(f"supported Sobolev orders are 0..3, got {order}")
        xi = self._modal(xi)
        out = np.sqrt(np.sum(self.eigenvalues**order * xi**2, axis=-1))
        return float(out) if out.ndim == 0 else out

    def _modal(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.n_modes:
            raise GridMismatch(
                f"expected {self.n_modes} modal coefficients, got {xi.shape[-1]}"
            )
        return xi


def nonlinear_galerkin(space: SpectralSpace, family: str,
                       k1: float, k2: float, k3: float, c: float,
                       u=None, u_t=None, u_tt=None,
                       u_x=None, u_xt=None, neg_lap_u=None) -> np.ndarray:
    """Modal coefficients of the nonlinear terms of one family.

    Westervelt (pressure form): 2 k1 (u u_tt + u_t^2), the parts of
    ((1 + 2 k1 u) u_t)_t beyond the linear u_tt.
    Kuznetsov-Blackstock: 2 k1 u_t u_tt + 2 k2 c^2 u_t (-Laplace u)
    + 2 k3 u_x u_xt. All inputs are samples on the dealiased quadrature
    grid; missing grids are only tolerated when their coefficient is 0.
    """
    if family == "westervelt":
        if k1 == 0.0:
            return np.zeros(space.n_modes)
        g = 2.0 * k1 * (_grid(space, u) * _grid(space, u_tt) + _grid(space, u_t) ** 2)
        return space.project(g)
    if family == "kuznetsov-blackstock":
        if k1 == k2 == k3 == 0.0:
            return np.zeros(space.n_modes)
        g = np.zeros(space.n_quad)
        if k1 != 0.0:
            g = g + 2.0 * k1 * _grid(space, u_t) * _grid(space, u_tt)
        if k2 != 0.0:
            g = g + 2.0 * k2 * c**2 * _grid(space, u_t) * _grid(space, neg_lap_u)
        if k3 != 0.0:
            g = g + 2.0 * k3 * _grid(space, u_x) * _grid(space, u_xt)
        return space.project(g)
    raise ConfigError(f"unknown nonlinearity family {family!r}")


def _grid(space: SpectralSpace, samples) -> np.ndarray:
    if samples is None:
        raise ConfigError("a required quadrature grid is missing")
    samples = np.asarray(samples, dtype=float)
    if samples.shape[-1] != space.n_quad:
        raise GridMismatch(
            f"expected {space.n_quad} grid samples, got {samples.shape[-1]}"
        )
    return samples
