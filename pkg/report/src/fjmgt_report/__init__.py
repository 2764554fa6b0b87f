"""Rate-sweep reporting: log-log convergence figures and summaries.

Consumes the sweep CSV contract of the solver suite (columns tau, error,
norm_kind, family, alpha_or_delta0, dt, n_modes, status) and produces a
log-log figure with the fitted rate line and the reference slope, plus a
one-page plain-text summary. It never re-runs solvers.
"""

from .render import FigureSpec, SchemaError, fit_loglog, render

__version__ = "0.1.0"

__all__ = ["FigureSpec", "SchemaError", "fit_loglog", "render"]
