"""Average best m-term approximation widths of l_p^n -> l_q^n under several
probability measures on the nonnegative part of the l_p sphere."""

from .analytic import bridge_lemma1, bound_envelope, theorem17_bounds, theorem17_quadrature
from .errors import DegenerateEstimateError, DomainError, NumericalError, RangeError, UnsupportedBoundaryError
from .estimators import EstimateResult, WidthQuery, estimate_widths, ratio_check_prop10
from .samplers import MeasureKind, MeasureSpec, RngState, sample
from .sparse_approx import best_m_term_error, quasi_norm, rearrange, width_bounds

__version__ = "0.1.0"

__all__ = [
    "DegenerateEstimateError",
    "DomainError",
    "EstimateResult",
    "MeasureKind",
    "MeasureSpec",
    "NumericalError",
    "RangeError",
    "RngState",
    "UnsupportedBoundaryError",
    "WidthQuery",
    "best_m_term_error",
    "bound_envelope",
    "bridge_lemma1",
    "estimate_widths",
    "quasi_norm",
    "ratio_check_prop10",
    "rearrange",
    "sample",
    "theorem17_bounds",
    "theorem17_quadrature",
    "width_bounds",
]
