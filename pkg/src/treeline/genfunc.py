"""Series machinery for strip-crossing weights on tree-times-line graphs.

Four closely related objects live here.

* ``coeff_product(params, l)`` is the decreasing product

      prod_{i=1..l} (1 - p) / (1 - p + p**(i + 1)),

  whose squares are the coefficients of the crossing-weight series.  It
  converges to a positive limit and never falls below
  ``exp(-(p / (1 - p))**2)``.

* ``gf_series(params, z)`` sums the power series ``sum_{l>=1} c_l**2 z**l``
  on ``[0, 1)``.  Truncation always carries an explicit geometric tail
  bound; if the bound cannot be met within the term budget the evaluation
  raises :class:`~treeline.errors.ConvergenceError` instead of returning a
  silently degraded value.

* ``gf_continued(params, x)`` evaluates the same function through a
  three-point functional equation that remains valid for arguments up to
  ``1 / p``, past the natural boundary of the series at 1.  On the open unit
  interval both evaluations must agree, which the test suite checks on a
  grid.

* ``pole_criterion(params, x)`` combines two series evaluations into the
  increasing function whose crossing of the level ``(1 - p) / p`` locates
  the dominant singularity of the crossing-weight generating function.  The
  root of that crossing is what the threshold-bound module bisects for.

Everything is plain double precision.  Accuracy bookkeeping is explicit:
wrappers that combine several series evaluations split their error budget
across the inner calls so the documented tolerance applies to the combined
result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

__all__ = [
    "ProbabilityParams",
    "SeriesConfig",
    "ProductCache",
    "DEFAULT_CONFIG",
    "coeff_product",
    "gf_series",
    "gf_continued",
    "pole_criterion",
    "criterion_threshold",
]


def _require_probability(p) -> float:
    if not isinstance(p, (int, float)) or isinstance(p, bool):
        raise DomainError(f"p must be a real number, got {type(p).__name__}")
    p = float(p)
    if not math.isfinite(p) or not 0.0 < p <= 0.5:
        raise DomainError(f"p must lie in (0, 1/2], got {p!r}")
    return p


def _require_degree(d) -> int | None:
    if d is None:
        return None
    if isinstance(d, bool) or not isinstance(d, int):
        raise DomainError(f"d must be an integer >= 3 or None, got {d!r}")
    if d < 3:
        raise DomainError(f"d must be at least 3, got {d}")
    return d


@dataclass(frozen=True)
class ProbabilityParams:
    """Edge probability ``p`` plus an optional vertex degree ``d``.

    ``p`` is restricted to ``(0, 1/2]``: every quantity computed by this
    package concerns the regime below the square-lattice threshold, and the
    closed forms used by the sequence tables are only certified there.
    """

    p: float
    d: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", _require_probability(self.p))
        object.__setattr__(self, "d", _require_degree(self.d))


@dataclass(frozen=True)
class SeriesConfig:
    """Accuracy budget for truncated series evaluation.

    tail_tol            absolute bound the truncation tail must satisfy
    max_terms           hard cap on summed terms before giving up
    singularity_margin  smallest allowed gap to the singular points of the
                        evaluation (1 for the series, 1 and 1/p for the
                        continuation)
    """

    tail_tol: float = 1e-12
    max_terms: int = 100_000
    singularity_margin: float = 1e-6

    def __post_init__(self):
        if not (isinstance(self.tail_tol, float) and 0.0 < self.tail_tol < 1.0):
            raise DomainError(f"tail_tol must be a float in (0, 1), got {self.tail_tol!r}")
        if not (isinstance(self.max_terms, int) and self.max_terms >= 1):
            raise DomainError(f"max_terms must be a positive integer, got {self.max_terms!r}")
        if not (
            isinstance(self.singularity_margin, float)
            and 0.0 < self.singularity_margin < 1.0
        ):
            raise DomainError(
                f"singularity_margin must be a float in (0, 1), got {self.singularity_margin!r}"
            )


DEFAULT_CONFIG = SeriesConfig()


class ProductCache:
    """Append-only memo of the prefix products for one value of ``p``.

    ``values[l]`` holds the product of the first ``l`` factors, with
    ``values[0] == 1.0`` for the empty product.  Extension appends factors in
    order, so entries already present are never recomputed or rewritten;
    concurrent readers therefore always observe finished prefixes.
    """

    __slots__ = ("p", "_values")

    def __init__(self, p: float):
        self.p = _require_probability(p)
        self._values = [1.0]

    def __len__(self) -> int:
        return len(self._values)

    def value(self, l: int) -> float:
        """Product of the first ``l`` factors (the empty product for 0)."""
        if not isinstance(l, int) or isinstance(l, bool) or l < 0:
            raise DomainError(f"l must be a nonnegative integer, got {l!r}")
        vals = self._values
        p = self.p
        while len(vals) <= l:
            i = len(vals)
            vals.append(vals[-1] * (1.0 - p) / (1.0 - p + p ** (i + 1)))
        return vals[l]


def coeff_product(params: ProbabilityParams, l: int, cache: ProductCache | None = None) -> float:
    """The l-fold product whose square is the series coefficient of z**l.

    Strictly decreasing in ``l`` with a positive limit; bounded below by
    ``exp(-(p / (1 - p))**2)`` for every ``l``.
    """
    if cache is not None:
        if cache.p != params.p:
            raise DomainError("cache was built for a different p")
        return cache.value(l)
    return ProductCache(params.p).value(l)


def gf_series(
    params: ProbabilityParams,
    z: float,
    config: SeriesConfig = DEFAULT_CONFIG,
    cache: ProductCache | None = None,
) -> float:
    """Sum ``sum_{l>=1} c_l**2 z**l`` with a certified truncation tail.

    The partial sums increase toward the result (all coefficients are
    positive).  Summation stops once the geometric bound
    ``c_{L+1}**2 z**(L+1) / (1 - z)`` drops below ``config.tail_tol``;
    exceeding ``config.max_terms`` first raises ConvergenceError.  The
    argument must satisfy ``0 <= z <= 1 - singularity_margin``.
    """
    z = _require_point(z, "z")
    if z > 1.0 - config.singularity_margin:
        raise DomainError(
            f"z = {z!r} is within {config.singularity_margin} of the singularity at 1"
        )
    if z == 0.0:
        return 0.0
    if cache is None:
        cache = ProductCache(params.p)
    elif cache.p != params.p:
        raise DomainError("cache was built for a different p")

    total = 0.0
    zl = 1.0
    geom = z / (1.0 - z)
    for l in range(1, config.max_terms + 1):
        c = cache.value(l)
        zl *= z
        total += c * c * zl
        # c_{l+1} <= c_l, so this dominates the true remainder.
        if c * c * zl * geom <= config.tail_tol:
            return total
    raise ConvergenceError(
        f"series tail bound {config.tail_tol} not reached within "
        f"{config.max_terms} terms at z = {z!r}"
    )


def _require_point(x, name: str) -> float:
    if not isinstance(x, (int, float)) or isinstance(x, bool):
        raise DomainError(f"{name} must be a real number, got {type(x).__name__}")
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"{name} must be finite and nonnegative, got {x!r}")
    return x


def _inner_config(config: SeriesConfig, tail_tol: float, margin: float) -> SeriesConfig:
    return SeriesConfig(
        tail_tol=min(config.tail_tol, tail_tol),
        max_terms=config.max_terms,
        singularity_margin=min(config.singularity_margin, margin),
    )


def gf_continued(
    params: ProbabilityParams,
    x: float,
    config: SeriesConfig = DEFAULT_CONFIG,
    cache: ProductCache | None = None,
) -> float:
    """Evaluate the series through its functional equation.

    The identity expresses the value at ``x`` in terms of the values at
    ``p*x`` and ``p**2*x``, both of which stay inside the unit interval for
    ``x < 1/p``.  That extends the function to ``[0, 1/p)`` apart from the
    pole at 1.  On ``[0, 1)`` the result agrees with ``gf_series`` within
    ``2 * tail_tol``; to honour that, the error budget is split across the
    two inner evaluations in proportion to their coefficients before being
    divided by ``|x - 1|``.
    """
    p = params.p
    x = _require_point(x, "x")
    margin = config.singularity_margin
    if abs(x - 1.0) < margin:
        raise DomainError(f"x = {x!r} is within {margin} of the pole at 1")
    if x > 1.0 / p - margin:
        raise DomainError(f"x = {x!r} is within {margin} of the domain edge 1/p = {1.0 / p!r}")
    if cache is None:
        cache = ProductCache(p)

    c1 = 2.0 * p / (1.0 - p)
    c2 = (p / (1.0 - p)) ** 2
    gap = abs(x - 1.0)
    # After dividing by (x - 1) the two inner errors must still fit in half
    # of tail_tol; x <= 1/p - margin guarantees 1 - p*x >= p*margin.
    cfg1 = _inner_config(config, config.tail_tol * gap / (4.0 * c1), p * margin)
    cfg2 = _inner_config(config, config.tail_tol * gap / (4.0 * c2), p * margin)
    inner1 = gf_series(params, p * x, cfg1, cache)
    inner2 = gf_series(params, p * p * x, cfg2, cache)
    return (c1 * inner1 + c2 * inner2 - x) / (x - 1.0)


def pole_criterion(
    params: ProbabilityParams,
    x: float,
    config: SeriesConfig = DEFAULT_CONFIG,
    cache: ProductCache | None = None,
) -> float:
    """Increasing function whose crossing of ``(1 - p)/p`` marks the pole.

    Defined as ``2 * S(p*x) + (p / (1 - p)) * S(p**2 * x)`` where ``S`` is
    the series.  It vanishes at 0, increases on ``[0, 1/p)``, and diverges
    at the right endpoint, so the crossing point exists and is unique.  Its
    value equals the threshold exactly where the continued series equals -1.
    """
    p = params.p
    x = _require_point(x, "x")
    margin = config.singularity_margin
    if x > 1.0 / p - margin:
        raise DomainError(f"x = {x!r} is within {margin} of the domain edge 1/p = {1.0 / p!r}")
    if cache is None:
        cache = ProductCache(p)

    c2 = p / (1.0 - p)
    cfg1 = _inner_config(config, config.tail_tol / 4.0, p * margin)
    cfg2 = _inner_config(config, config.tail_tol / (2.0 * c2), p * margin)
    return 2.0 * gf_series(params, p * x, cfg1, cache) + c2 * gf_series(
        params, p * p * x, cfg2, cache
    )


def criterion_threshold(params: ProbabilityParams) -> float:
    """The level ``(1 - p) / p`` that the pole criterion must reach."""
    return (1.0 - params.p) / params.p
