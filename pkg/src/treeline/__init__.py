"""Certified upper bounds for bond percolation on tree-times-line graphs.

The analytic layer evaluates the coefficient products, their generating
function and its continuation, the crossing lower-bound sequences, and the
criterion root that turns them into critical-probability bounds.  The
simulation layer estimates the same crossing probabilities by Monte Carlo
on finite truncations of the graphs, with exact enumeration as an oracle on
tiny instances.  The two layers are developed independently so that each
checks the other.
"""

from .errors import (
    BracketError,
    CapacityError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    MonotonicityWarning,
    TreelineError,
)
from .genfunc import (
    DEFAULT_CONFIG,
    ProbabilityParams,
    ProductCache,
    SeriesConfig,
    coeff_product,
    criterion_threshold,
    gf_continued,
    gf_series,
    pole_criterion,
)
from .graphs import ProductGraph, SlabSpec, build_graph
from .montecarlo import (
    CrossingEstimate,
    OffspringEstimate,
    estimate_crossing,
    estimate_offspring,
    exact_crossing,
)
from .sequences import (
    CrossingTable,
    MultisumTruncation,
    build_table,
    crossing_by_multisum,
    crossing_one_step,
    functional_residual,
    kernel_by_multisum,
    kernel_by_recursion,
    kernel_gf_partial,
)
from .thresholds import (
    BoundReport,
    DegreeCheck,
    DegreeFourCheck,
    ReferenceBounds,
    RootResult,
    bound_report,
    check_degree_four_bound,
    check_inverse_degree_bound,
    critical_upper_bound,
    find_criterion_root,
    growth_lower_bound,
    reference_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "TreelineError",
    "DomainError",
    "ConvergenceError",
    "BracketError",
    "CapacityError",
    "ConsistencyError",
    "MonotonicityWarning",
    "ProbabilityParams",
    "SeriesConfig",
    "DEFAULT_CONFIG",
    "ProductCache",
    "coeff_product",
    "gf_series",
    "gf_continued",
    "pole_criterion",
    "criterion_threshold",
    "CrossingTable",
    "MultisumTruncation",
    "crossing_one_step",
    "kernel_by_recursion",
    "build_table",
    "kernel_by_multisum",
    "crossing_by_multisum",
    "kernel_gf_partial",
    "functional_residual",
    "RootResult",
    "find_criterion_root",
    "growth_lower_bound",
    "critical_upper_bound",
    "ReferenceBounds",
    "reference_bounds",
    "BoundReport",
    "bound_report",
    "DegreeCheck",
    "check_inverse_degree_bound",
    "DegreeFourCheck",
    "check_degree_four_bound",
    "SlabSpec",
    "ProductGraph",
    "build_graph",
    "CrossingEstimate",
    "OffspringEstimate",
    "estimate_crossing",
    "estimate_offspring",
    "exact_crossing",
]
