"""Roy-systems, contraction rates and dimension formulas for Diophantine exponent sets."""

from .contraction import average_rate, exponent_functionals, local_rate, rate_extrema, rate_profile
from .dimensions import (
    ExponentSpectrum,
    PartialSpectrum,
    dimension_query,
    hausdorff_intersection,
    hausdorff_pair,
    hausdorff_single,
    optimal_completion,
    validate_spectrum,
)
from .pwl import LinearityInterval, PiecewiseLinearSystem, SlopeBlock, build_system, validate
from .scalar import INF

__version__ = "0.1.0"
