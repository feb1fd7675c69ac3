"""Criterion roots and certified critical-probability bounds.

The continued generating function of the crossing kernel blows up at the
smallest ``x0 > 1`` where the increasing auxiliary function

    criterion(x) = 2 S(p x) + (p / (1 - p)) S(p**2 x)

reaches the level ``(1 - p) / p`` (``S`` is the power series from
:mod:`treeline.genfunc`; both arguments stay inside its disc).  The kernel
coefficients then decay with n-th root exactly ``1 / x0``, so on the product
of a (d-1)-ary tree with the integer line the expected number of depth-n
branches connected to the origin's column grows like ``((d - 1) / x0)**n``.
Whenever ``x0 < d - 1`` that expectation diverges and the edge probability
sits above the critical point.

This module locates ``x0`` by bisection, turns the comparison
``x0 < d - 1`` into upper bounds on the critical probability, and packages
the two hand-checkable certificates: the inverse-degree bound for every
``d >= 3`` and the sharper bound 0.225 for ``d = 4``, which lands below the
closed-form lower bound for the uniqueness threshold.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BracketError, ConvergenceError, DomainError, MonotonicityWarning
from .genfunc import (
    DEFAULT_CONFIG,
    ProbabilityParams,
    SeriesConfig,
    _require_degree,
    criterion_threshold,
    pole_criterion,
)

__all__ = [
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
]

# Constants of the degree-four certificate: the claimed bound on the edge
# probability and the evaluation point witnessing it.
P_STAR = 0.225
X_STAR = 2.999

MAX_BISECTIONS = 200

# Search floor for the critical-probability scan.  Roots exist below it,
# but no certified statement in this package needs them.
P_SEARCH_LO = 0.01
P_SEARCH_HI = 0.49
P_GRID_SIZE = 50


@dataclass(frozen=True)
class RootResult:
    """Bisection output for the criterion root at a fixed p."""

    p: float
    root: float
    lo: float
    hi: float
    residual: float
    iterations: int


def _require_subcritical_half(params: ProbabilityParams) -> float:
    if params.p >= 0.5:
        raise DomainError(
            f"criterion root requires p < 0.5, got p = {params.p!r}"
        )
    return params.p


def find_criterion_root(
    params: ProbabilityParams,
    tol: float = 1e-9,
    config: SeriesConfig = DEFAULT_CONFIG,
) -> RootResult:
    """Locate the unique ``x0`` with ``criterion(x0) = (1 - p) / p``.

    The criterion is a power series with positive coefficients, hence
    strictly increasing, so bisection is safe.  The initial right endpoint
    comes from the certified floor ``exp(-(p / (1 - p))**2)`` on the
    coefficient products: at

        hi = R / (p (1 + R)),   R = (1 - p) exp(2 a) / (2 p),
        a = (p / (1 - p))**2,

    the criterion provably meets the level, so the bracket never has to be
    grown.  Iterates until the bracket width and the midpoint residual are
    both at most ``tol``.
    """
    p = _require_subcritical_half(params)
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    threshold = criterion_threshold(params)
    a = (p / (1.0 - p)) ** 2
    big_r = (1.0 - p) * math.exp(2.0 * a) / (2.0 * p)
    hi = min(big_r / (p * (1.0 + big_r)), 1.0 / p - config.singularity_margin)
    lo = 0.0
    f_hi = pole_criterion(params, hi, config) - threshold
    if f_hi < 0.0:
        raise BracketError(
            f"criterion at hi = {hi!r} fell below its level; floor bound violated"
        )
    mid = hi
    f_mid = f_hi
    for it in range(1, MAX_BISECTIONS + 1):
        mid = 0.5 * (lo + hi)
        f_mid = pole_criterion(params, mid, config) - threshold
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol and abs(f_mid) <= tol:
            return RootResult(
                p=p, root=mid, lo=lo, hi=hi, residual=abs(f_mid), iterations=it
            )
    raise ConvergenceError(
        f"criterion root did not converge to tol = {tol!r} "
        f"within {MAX_BISECTIONS} bisections (bracket [{lo!r}, {hi!r}])"
    )


def growth_lower_bound(
    params: ProbabilityParams,
    tol: float = 1e-9,
    config: SeriesConfig = DEFAULT_CONFIG,
) -> float:
    """Per-column rate ``1 / x0`` of the kernel sequence.

    This is the limiting n-th root of the kernel coefficients (their
    generating function has positive coefficients, so its radius of
    convergence ``x0`` is its dominant singularity).  Multiplying by the
    branching factor ``d - 1`` gives the growth rate of expected far-column
    connections; a product above 1 certifies percolation.
    """
    return 1.0 / find_criterion_root(params, tol, config).root


@lru_cache(maxsize=8)
def _root_grid(
    tol: float, config: SeriesConfig
) -> tuple[tuple[float, ...], tuple[float, ...], bool]:
    """Criterion roots on a fixed coarse grid of p, shared across degrees.

    The third element records whether the roots decrease strictly along the
    grid; when they do not, callers fall back to scanning instead of
    bisecting in p.
    """
    ps = np.linspace(P_SEARCH_LO, P_SEARCH_HI, P_GRID_SIZE)
    roots = [find_criterion_root(ProbabilityParams(float(p)), tol, config).root for p in ps]
    monotone = bool(np.all(np.diff(roots) < 0.0))
    return tuple(float(p) for p in ps), tuple(float(r) for r in roots), monotone


def critical_upper_bound(
    d: int,
    p_tol: float = 1e-6,
    tol: float = 1e-9,
    config: SeriesConfig = DEFAULT_CONFIG,
) -> float:
    """Smallest certified p with ``x0(p) < d - 1``, located to width p_tol.

    Every value this returns is itself certified (the comparison is
    re-checked at the returned p), so it is always a valid upper bound on
    the critical probability; the root's monotonicity in p is only used to
    make the returned p nearly minimal.  The scan is confined to
    ``[0.01, 0.49]``; if even the left edge certifies, that edge is
    returned.
    """
    d = _require_degree(d)
    if not p_tol > 0.0:
        raise DomainError(f"p_tol must be positive, got {p_tol!r}")
    # Strictness offset: the comparison certifies only when the root clears
    # d - 1 by more than the root solver's own tolerance scale.
    target = float(d - 1) - 1e-9

    def certifies(p: float) -> bool:
        return find_criterion_root(ProbabilityParams(p), tol, config).root < target

    ps, roots, monotone = _root_grid(tol, config)
    if not monotone:
        warnings.warn(
            "criterion root is not strictly decreasing on the search grid; "
            "falling back to a grid scan",
            MonotonicityWarning,
            stacklevel=2,
        )

    hits = [i for i, r in enumerate(roots) if r < target]
    if not hits:
        raise BracketError(
            f"no p in [{P_SEARCH_LO}, {P_SEARCH_HI}] certifies degree {d}"
        )
    first = hits[0]
    if first == 0:
        if not certifies(ps[0]):
            raise BracketError("grid endpoint failed re-certification")
        return ps[0]

    if monotone:
        lo, hi = ps[first - 1], ps[first]
        while hi - lo > p_tol:
            mid = 0.5 * (lo + hi)
            if certifies(mid):
                hi = mid
            else:
                lo = mid
        if not certifies(hi):
            raise BracketError("bisection endpoint failed re-certification")
        return hi

    # Non-monotone fallback: refine the first certified grid cell by scan.
    lo, hi = ps[first - 1], ps[first]
    steps = max(2, int(math.ceil((hi - lo) / p_tol)))
    for p in np.linspace(lo, hi, steps + 1)[1:]:
        if certifies(float(p)):
            return float(p)
    raise BracketError("scan lost the certified point inside its grid cell")


@dataclass(frozen=True)
class ReferenceBounds:
    """Closed-form comparison thresholds for the same product graph.

    pc_upper   best previously tabulated upper bound on the critical
               probability, (d - sqrt(d**2 - 4)) / 2
    pu_lower   lower bound on the uniqueness threshold,
               1 / (sqrt(d - 1) + 1 + sqrt(2 sqrt(d - 1) - 1))
    """

    d: int
    pc_upper: float
    pu_lower: float


def reference_bounds(d: int) -> ReferenceBounds:
    d = _require_degree(d)
    root = math.sqrt(d - 1.0)
    return ReferenceBounds(
        d=d,
        pc_upper=(d - math.sqrt(d * d - 4.0)) / 2.0,
        pu_lower=1.0 / (root + 1.0 + math.sqrt(2.0 * root - 1.0)),
    )


@dataclass(frozen=True)
class BoundReport:
    """Side-by-side comparison of the new bound with the benchmarks."""

    d: int
    pc_upper: float
    inverse_degree: float
    prior_pc_upper: float
    pu_lower: float
    gap_nonempty: bool


def bound_report(
    d: int,
    p_tol: float = 1e-6,
    tol: float = 1e-9,
    config: SeriesConfig = DEFAULT_CONFIG,
) -> BoundReport:
    """Certified upper bound for degree d next to 1/d and the benchmarks.

    ``gap_nonempty`` records whether the certified bound lands strictly
    below the uniqueness-threshold benchmark, i.e. whether the certificate
    exhibits a window of edge probabilities with infinitely many infinite
    clusters.
    """
    d = _require_degree(d)
    pc = critical_upper_bound(d, p_tol, tol, config)
    ref = reference_bounds(d)
    return BoundReport(
        d=d,
        pc_upper=pc,
        inverse_degree=1.0 / d,
        prior_pc_upper=ref.pc_upper,
        pu_lower=ref.pu_lower,
        gap_nonempty=pc < ref.pu_lower,
    )


@dataclass(frozen=True)
class DegreeCheck:
    """Certificate data for the inverse-degree bound at one degree.

    The three booleans are the independent legs of the certificate;
    ``passed`` is their conjunction.
    """

    d: int
    p: float
    point: float
    criterion_value: float
    threshold: float
    floor_factor: float
    point_ok: bool
    criterion_ok: bool
    floor_ok: bool
    passed: bool


def check_inverse_degree_bound(
    d: int,
    eps: float = 1e-3,
    config: SeriesConfig = DEFAULT_CONFIG,
) -> DegreeCheck:
    """Verify the certificate that p = 1/d + eps is supercritical.

    Evaluates the criterion at ``x = (1 - p) / p`` (which is below
    ``d - 1`` exactly because ``p > 1/d``) and checks it meets the level,
    so the root sits at or below x.  Also reports the analytic floor factor
    ``2 exp(-2 (p / (1 - p))**2)``: the criterion provably exceeds the
    level whenever that factor is at least 1, which is the route that
    settles every degree at once.  Both routes must pass.

    eps = 0 is accepted and reports a failed strictness check (the
    evaluation point then sits exactly on d - 1).
    """
    d = _require_degree(d)
    if not 0.0 <= eps < 0.5 - 1.0 / d:
        raise DomainError(f"eps must lie in [0, 1/2 - 1/d), got {eps!r}")
    p = 1.0 / d + eps
    params = ProbabilityParams(p, d)
    x = (1.0 - p) / p
    value = pole_criterion(params, x, config)
    threshold = criterion_threshold(params)
    floor_factor = 2.0 * math.exp(-2.0 * (p / (1.0 - p)) ** 2)
    point_ok = x < d - 1.0
    criterion_ok = value >= threshold
    floor_ok = floor_factor >= 1.0
    return DegreeCheck(
        d=d,
        p=p,
        point=x,
        criterion_value=value,
        threshold=threshold,
        floor_factor=floor_factor,
        point_ok=point_ok,
        criterion_ok=criterion_ok,
        floor_ok=floor_ok,
        passed=point_ok and criterion_ok and floor_ok,
    )


@dataclass(frozen=True)
class DegreeFourCheck:
    """Certificate data for the bound 0.225 at degree four."""

    p: float
    point: float
    criterion_value: float
    threshold: float
    surrogate_value: float
    point_ok: bool
    criterion_ok: bool
    surrogate_ok: bool
    passed: bool


def check_degree_four_bound(config: SeriesConfig = DEFAULT_CONFIG) -> DegreeFourCheck:
    """Verify the certificate that p = 0.225 is supercritical at degree 4.

    Checks the criterion at x = 2.999 < 3 against the level both by direct
    series evaluation and through the hand-checkable surrogate

        2 (1 - 2a) p x / (1 - p x)
            + (p / (1 - p)) (1 - 2a) p**2 x / (1 - p**2 x),

    ``a = (p / (1 - p))**2``, which undercuts every coefficient product by
    the floor ``1 - 2a`` and sums the remaining geometric series.  Both
    routes must clear the level for the certificate to pass.
    """
    p = P_STAR
    x = X_STAR
    params = ProbabilityParams(p, 4)
    value = pole_criterion(params, x, config)
    threshold = criterion_threshold(params)
    a = (p / (1.0 - p)) ** 2
    surrogate = (
        2.0 * (1.0 - 2.0 * a) * p * x / (1.0 - p * x)
        + (p / (1.0 - p)) * (1.0 - 2.0 * a) * p * p * x / (1.0 - p * p * x)
    )
    point_ok = x < 3.0
    criterion_ok = value >= threshold
    surrogate_ok = surrogate >= threshold
    return DegreeFourCheck(
        p=p,
        point=x,
        criterion_value=value,
        threshold=threshold,
        surrogate_value=surrogate,
        point_ok=point_ok,
        criterion_ok=criterion_ok,
        surrogate_ok=surrogate_ok,
        passed=point_ok and criterion_ok and surrogate_ok,
    )
