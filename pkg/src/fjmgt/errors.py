"""Exception types shared across the package.

Solver failures (Degenerate, PicardDiverged) carry enough context to
write a run manifest before aborting; configuration problems are kept
separate so the CLI can map them to distinct exit codes.
"""

from __future__ import annotations


class FjmgtError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(FjmgtError):
    """Invalid or inconsistent run configuration."""


class DeltaNotPointwise(FjmgtError):
    """The Dirac kernel has no pointwise values."""


class NonpositiveTime(FjmgtError):
    """Kernel evaluation requested at t <= 0."""


class ResolventUnsolvable(FjmgtError):
    """The numerical Volterra march for a resolvent cannot proceed."""


class WeightOverflow(FjmgtError):
    """Requested more quadrature lags than the configured cap."""


class LengthMismatch(FjmgtError):
    """Quadrature weights shorter than the supplied history."""


class GridMismatch(FjmgtError):
    """Sample or trajectory grids do not match the expected layout."""


class NonpositiveError(FjmgtError):
    """Rate fitting received non-positive error values."""


class SolverError(FjmgtError):
    """Base class for failures inside a time-marching run."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


class PicardDiverged(SolverError):
    """Picard iteration hit its cap without contracting."""

    def __init__(self, t: float, iterations: int, last_delta: float):
        super().__init__(
            f"Picard iteration did not converge at t={t:.6g} "
            f"({iterations} iterations, last update {last_delta:.3e})",
            t,
        )
        self.iterations = iterations
        self.last_delta = last_delta


class Degenerate(SolverError):
    """The leading coefficient dropped below its positivity floor."""

    def __init__(self, t: float, min_value: float, floor: float):
        super().__init__(
            f"leading coefficient degenerated at t={t:.6g}: "
            f"min a = {min_value:.6g} < floor {floor:.6g}",
            t,
        )
        self.min_value = min_value
        self.floor = floor
