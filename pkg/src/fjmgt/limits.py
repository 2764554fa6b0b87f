"""Zero-relaxation-time reference solvers.

Strongly damped Westervelt (pressure form), Kuznetsov, Blackstock and
the general Kuznetsov-Blackstock second-order equations, integrated on
the same spectral space and time grid as the nonlocal solver with the
same first-order implicit-in-linear-terms, Picard-in-nonlinear-terms
scheme. Structurally this is the nonlocal march with tau^a = 0 and the
kernel terms removed, so the nonlocal trajectories converge to these
reference trajectories exactly as the relaxation time goes to zero,
with no residual discretization offset between the two solvers.
"""

from __future__ import annotations

from .solver import (
    A_FLOOR,
    PICARD_MAX,
    PICARD_TOL,
    InitialData,
    MediumParams,
    Trajectory,
    _march,
    resolve_initial_data,
)
from .spectral import SpectralSpace

__all__ = ["solve_limit"]


def solve_limit(medium: MediumParams, data: InitialData, space: SpectralSpace,
                T: float, dt: float, forcing=None, *,
                a_floor: float = A_FLOOR,
                picard_tol: float = PICARD_TOL,
                picard_max: int = PICARD_MAX,
                meta: dict | None = None) -> Trajectory:
    """March the limiting second-order problem; tau in `medium` is ignored.

    Only (u0, u1) of the data are used; the stored initial acceleration
    is the one the limiting equation dictates at t = 0.
    """
    limit_medium = medium.with_tau(0.0)
    compat = InitialData(xi0=data.xi0, xi1=data.xi1, u2_policy="compatible")
    xi0, xi1, xi2 = resolve_initial_data(space, limit_medium, compat, forcing)
    run_meta = dict(meta or {})
    run_meta["solver"] = "limit"
    return _march(space, limit_medium, xi0, xi1, xi2, forcing, T, dt,
                  fractional=False, a_floor=a_floor,
                  picard_tol=picard_tol, picard_max=picard_max,
                  meta=run_meta)
