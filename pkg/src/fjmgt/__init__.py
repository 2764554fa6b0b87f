"""Solvers and experiments for nonlocal JMGT-type nonlinear acoustics.

The package discretizes the fractional Jordan-Moore-Gibson-Thompson
family of wave models (third order in time with a weakly singular
memory kernel) by a sine-spectral Galerkin method in space and a
product-integration Volterra march in time, provides the classical
strongly damped Westervelt / Kuznetsov / Blackstock limit solvers on the
same grids, and measures the convergence rate of the nonlocal solutions
toward the limit solutions as the relaxation time goes to zero.
"""

from .convolution import (
    HistoryBuffer,
    QuadratureWeights,
    caputo_l1,
    compose_weights,
    conv_apply,
    conv_sequence,
    pi_weights,
    power_weights,
)
from .errors import (
    ConfigError,
    Degenerate,
    DeltaNotPointwise,
    FjmgtError,
    GridMismatch,
    LengthMismatch,
    NonpositiveError,
    NonpositiveTime,
    PicardDiverged,
    ResolventUnsolvable,
    SolverError,
    WeightOverflow,
)
from .experiments import NORM_KINDS, RateFit, RateReport, error_norm, fit_rate, tau_sweep
from .kernels import (
    AdmissibilityReport,
    KernelSpec,
    ResolventSpec,
    coercivity_functional,
    kernel_admissible,
    kernel_eval,
    kernel_moment,
    resolvent,
    resolvent_identity_deviation,
)
from .limits import solve_limit
from .solver import (
    InitialData,
    MediumParams,
    ModalState,
    Trajectory,
    assemble_rhs_tilde,
    default_initial_data,
    degeneracy_check,
    grid_forcing,
    resolve_initial_data,
    solve,
)
from .spectral import SpectralSpace, nonlinear_galerkin

__version__ = "0.1.0"
