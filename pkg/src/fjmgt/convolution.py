"""Discrete Laplace-convolution engine.

Product-integration weights with exact kernel moments for the weakly
singular kernels, application of those weights to running histories,
and the L1 evaluator of the Caputo-Djrbashian derivative. The weights
reconstruct the integrand as piecewise constant from the right, so at
step n the discrete convolution reads

    (g * v)(t_n)  ~=  w[0] v(t_n) + sum_{m=1..n-1} w[m] v(t_{n-m}),

with w[m] the exact integral of g over [m dt, (m+1) dt]. History work is
O(n) per step and O(N^2) per run, which is deliberate at desk scale; a
fast history summation would slot in behind conv_apply.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError, LengthMismatch, WeightOverflow
from .kernels import KernelSpec, kernel_moment

__all__ = [
    "QuadratureWeights",
    "HistoryBuffer",
    "pi_weights",
    "power_weights",
    "compose_weights",
    "conv_apply",
    "conv_sequence",
    "caputo_l1",
]

WEIGHT_CAP = 10**7


@dataclass(frozen=True, eq=False)
class QuadratureWeights:
    """Lag weights of one kernel on one uniform grid."""

    dt: float
    lag_weights: np.ndarray  # index m = 0..n_steps
    kernel_id: str

    def __len__(self) -> int:
        return self.lag_weights.size

    @property
    def w0(self) -> float:
        return float(self.lag_weights[0])


def power_weights(beta: float, dt: float, n_steps: int) -> QuadratureWeights:
    """Exact-moment weights of the power kernel t^(beta-1)/Gamma(beta).

    beta = 1 covers the constant-one kernel, beta = 2 the kernel t that
    the simplified memory term of the solver convolves with.
    """
    _check_steps(dt, n_steps)
    m = np.arange(n_steps + 1, dtype=float)
    coef = float(np.exp(-gammaln(beta + 1.0)))
    w = coef * dt**beta * ((m + 1.0) ** beta - m**beta)
    return QuadratureWeights(dt=dt, lag_weights=w, kernel_id=f"power(beta={beta:g})")


def pi_weights(spec, dt: float, n_steps: int) -> QuadratureWeights:
    """Product-integration weights for a kernel or resolvent spec.

    Weight m is the exact integral of the kernel over [m dt, (m+1) dt];
    the Dirac delta collapses to the identity stencil (w0 = 1, rest 0).
    """
    _check_steps(dt, n_steps)
    if isinstance(spec, KernelSpec) and spec.variant == "delta":
        w = np.zeros(n_steps + 1)
        w[0] = 1.0
        return QuadratureWeights(dt=dt, lag_weights=w, kernel_id=spec.label)
    grid = dt * np.arange(n_steps + 2, dtype=float)
    w = np.diff(kernel_moment(spec, 0, grid))[: n_steps + 1]
    if not np.all(np.isfinite(w)):
        raise ConfigError(f"non-finite quadrature weights for {spec.label}")
    return QuadratureWeights(dt=dt, lag_weights=w, kernel_id=spec.label)


def compose_weights(a: QuadratureWeights, b: QuadratureWeights) -> QuadratureWeights:
    """Discrete convolution of two weight sequences.

    Applying the composed weights equals applying b then a (lower-
    triangular Toeplitz algebra), so this is how nested convolution
    operators are expressed as a single lag-weight application.
    """
    if a.dt != b.dt:
        raise ConfigError("can only compose weights on the same grid")
    n = min(len(a), len(b))
    w = np.convolve(a.lag_weights[:n], b.lag_weights[:n])[:n]
    return QuadratureWeights(dt=a.dt, lag_weights=w,
                             kernel_id=f"{a.kernel_id}*{b.kernel_id}")


class HistoryBuffer:
    """Append-only store of past integrand samples for one run.

    Row k holds the integrand at step k+1 (the march never references a
    value at t = 0; the right-constant reconstruction assigns the first
    subinterval the value at t_1). Single writer per run; distinct modes
    share the row layout so one dot product serves all of them.
    """

    def __init__(self, n_steps: int, n_modes: int):
        self._data = np.zeros((n_steps, n_modes))
        self._len = 0

    def __len__(self) -> int:
        return self._len

    def append(self, row) -> None:
        self._data[self._len] = row
        self._len += 1

    def view(self) -> np.ndarray:
        """Read-only view of the completed rows."""
        v = self._data[: self._len]
        v.flags.writeable = False
        return v


def conv_apply(w: QuadratureWeights, hist, current):
    """Discrete convolution value at the current step.

    ``hist`` holds the integrand at steps 1..n (shape (n,) or
    (n, modes)), ``current`` the step-(n+1) value; the result
    approximates (kernel * integrand) at t_{n+1}.
    """
    hist = np.asarray(hist, dtype=float)
    n = hist.shape[0]
    if len(w) < n + 1:
        raise LengthMismatch(f"{len(w)} weights cannot cover a history of {n} steps")
    out = w.lag_weights[0] * np.asarray(current, dtype=float)
    if n:
        out = out + np.tensordot(w.lag_weights[1 : n + 1][::-1], hist, axes=(0, 0))
    return out


def conv_sequence(w: QuadratureWeights, values) -> np.ndarray:
    """Discrete convolution at every step of a full sample sequence.

    values[k] is the integrand at t_{k+1}; entry n of the result is the
    convolution at t_{n+1}. Convenience wrapper used by diagnostics and
    tests, not by the marching hot path.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if len(w) < n:
        raise LengthMismatch(f"{len(w)} weights cannot cover {n} samples")
    out = np.empty_like(values)
    for k in range(n):
        out[k] = conv_apply(w, values[:k], values[k])
    return out


def caputo_l1(alpha: float, samples, dt: float) -> np.ndarray:
    """L1-scheme Caputo-Djrbashian derivative of order alpha on a uniform grid.

    Product integration of the Abel kernel against backward-difference
    slopes; returns the derivative at every grid point (zero at t = 0,
    where the memory is empty). Diagnostic use: flux-law demonstrations
    and the kernel acceptance checks.
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"Caputo order must lie in (0, 1), got {alpha}")
    y = np.asarray(samples, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise ConfigError("caputo_l1 needs at least two samples")
    n = y.size - 1
    w = power_weights(1.0 - alpha, dt, n).lag_weights
    slopes = np.diff(y) / dt
    out = np.zeros_like(y)
    for k in range(1, n + 1):
        out[k] = np.dot(w[:k][::-1], slopes[:k])
    return out


def _check_steps(dt: float, n_steps: int) -> None:
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if n_steps < 1:
        raise ConfigError(f"n_steps must be >= 1, got {n_steps}")
    if n_steps > WEIGHT_CAP:
        raise WeightOverflow(f"{n_steps} lags exceed the configured cap {WEIGHT_CAP}")
