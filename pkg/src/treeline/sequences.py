"""Crossing-probability lower-bound sequences for strips of product graphs.

Two nonnegative sequences are computed for each edge probability ``p``:

* ``crossing`` entries bound from below the probability that the origin of
  an n-column strip is connected to the far column (the full bi-infinite
  strip, not a finite truncation);

* ``kernel`` entries are the coefficients of the generating function whose
  dominant pole governs the exponential decay rate of the crossing bounds.
  They satisfy ``kernel[n] <= crossing[n]`` and drive the one-step
  telescoping ``crossing[n+1] = crossing[n] - c * kernel[n]`` with
  ``c = ((1 - p) / (1 - p + p**2))**2``.

Both sequences have two independent evaluation routes:

* a closed recursion (production path, quadratic in ``n``), and
* a direct multiple sum over staircase configurations (oracle path, only
  feasible for ``n <= 5``), truncated to a box with a rigorous bound on the
  omitted mass.

The recursion and the multisum must agree within the multisum's reported
tail estimate; the test suite enforces that on a grid.  Do not replace one
route with the other: their agreement is the point.

Numerical caveat: the recursion subtracts quantities of order one, so
entries below roughly 1e-16 are dominated by cancellation noise.  Tables
stay clean for ``n`` up to about 40 at the probabilities of interest, which
covers every certified use; the far tail of the sequence is only meaningful
through extended-precision evaluation (see the tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConsistencyError, DomainError
from .genfunc import (
    DEFAULT_CONFIG,
    ProbabilityParams,
    ProductCache,
    SeriesConfig,
    gf_series,
)

__all__ = [
    "MultisumTruncation",
    "CrossingTable",
    "crossing_one_step",
    "kernel_by_recursion",
    "build_table",
    "kernel_by_multisum",
    "crossing_by_multisum",
    "kernel_gf_partial",
    "functional_residual",
]

# Entries of `crossing` may sit at the double-precision noise floor for very
# long tables; anything below -POSITIVITY_SLACK is treated as a real
# violation rather than roundoff.
POSITIVITY_SLACK = 1e-12

MULTISUM_MAX_N = 5


@dataclass(frozen=True)
class MultisumTruncation:
    """Box truncation for the staircase multisum.

    m_cap / l_cap   largest retained value of each step index
    tail_estimate   rigorous upper bound on the omitted mass, filled in on
                    results (0.0 on a request object)

    The bound is a union bound over the first index leaving the box, with
    the continuation mass of a partial staircase dominated by
    ``(1 - p)**(-l)``.  It is rigorous for every ``p`` in (0, 1/2] but only
    sharp for ``p`` well below 1/2.
    """

    m_cap: int = 80
    l_cap: int = 80
    tail_estimate: float = 0.0

    def __post_init__(self):
        for name in ("m_cap", "l_cap"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
            # C(m_cap + l_cap, l) must stay inside double range once the
            # probability weights are attached; 300 + 300 is far below the
            # overflow point and far above any useful cap.
            if v > 300:
                raise DomainError(f"{name} must be at most 300, got {v}")
        if not self.tail_estimate >= 0.0:
            raise DomainError("tail_estimate must be nonnegative")


@dataclass(frozen=True, eq=False)
class CrossingTable:
    """Aligned arrays ``kernel[i]`` and ``crossing[i]`` for n = i + 1."""

    p: float
    kernel: np.ndarray
    crossing: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.kernel)

    def kernel_at(self, n: int) -> float:
        return float(self.kernel[n - 1])

    def crossing_at(self, n: int) -> float:
        return float(self.crossing[n - 1])


def _require_n(n, limit=None, name="n") -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DomainError(f"{name} must be a positive integer, got {n!r}")
    if limit is not None and n > limit:
        raise DomainError(f"{name} must be at most {limit}, got {n}")
    return n


def crossing_one_step(params: ProbabilityParams, config: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Exact single-column crossing probability, summed as a series.

    Sums ``(m + 1) p**m (1 - p)**2 (1 - (1 - p)**(m + 1))`` over ``m >= 0``
    until the remainder bound ``p**(M+1) ((M + 2) - (M + 1) p)`` falls below
    ``config.tail_tol``.  Equals ``1 - (1 - p)**3 / (1 - p + p**2)**2``.
    """
    p = params.p
    q = 1.0 - p
    total = 0.0
    pm = 1.0
    qm = q
    for m in range(config.max_terms):
        total += (m + 1) * pm * q * q * (1.0 - qm)
        pm *= p
        qm *= q
        if pm * ((m + 3) - (m + 2) * p) <= config.tail_tol:
            return total
    raise ConsistencyError("one-step series failed to converge within max_terms")


def kernel_by_recursion(
    params: ProbabilityParams, n_max: int, cache: ProductCache | None = None
) -> np.ndarray:
    """Kernel sequence for n = 1..n_max via the closed recursion.

    Each entry is a boundary term minus a convolution of earlier entries
    against squared coefficient products.  Cost is O(n_max**2).
    """
    n_max = _require_n(n_max, name="n_max")
    p = params.p
    if cache is None:
        cache = ProductCache(p)
    q = 1.0 - p
    lead = p / (q * q)
    out = np.empty(n_max)
    for n in range(1, n_max + 1):
        prod = cache.value(n + 1)
        head = lead * prod * prod * (1.0 - p**n) * (1.0 - p * p * q * (1.0 - p ** (n + 1)))
        acc = 0.0
        for k in range(1, n):
            c = cache.value(n - k)
            acc += c * c * out[k - 1]
        out[n - 1] = head - acc
    return out


def build_table(
    params: ProbabilityParams, n_max: int, config: SeriesConfig = DEFAULT_CONFIG
) -> CrossingTable:
    """Kernel and crossing arrays out to ``n_max``, telescoped in one pass.

    Raises ConsistencyError if any crossing entry falls below
    ``-POSITIVITY_SLACK``; entries inside the slack band are kept as
    computed so that the telescoping identity stays exact.
    """
    n_max = _require_n(n_max, name="n_max")
    p = params.p
    cache = ProductCache(p)
    kernel = kernel_by_recursion(params, n_max, cache)
    c1 = cache.value(1)
    step = c1 * c1
    crossing = np.empty(n_max)
    crossing[0] = crossing_one_step(params, config)
    for i in range(1, n_max):
        crossing[i] = crossing[i - 1] - step * kernel[i - 1]
    low = float(crossing.min())
    if low < -POSITIVITY_SLACK:
        raise ConsistencyError(
            f"crossing bound turned negative ({low!r}) before n_max = {n_max}; "
            "the recursion is outside its certified range"
        )
    return CrossingTable(p=p, kernel=kernel, crossing=crossing)


# ---------------------------------------------------------------------------
# multisum oracle
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _stage_data(p: float, m_cap: int, l_cap: int):
    """Transfer matrix A[l', l] of one staircase stage plus the per-stage
    tail vector e[l'], both box-truncated.

    A[l', l] = sum_{m <= m_cap} (m+1) (p(1-p))**m (1-p)**2 C(m+l', l) p**l
    restricted to 1 <= l <= min(m + l', l_cap).  e[l'] bounds the mass of
    staircases whose current stage first leaves the box, with all later
    stages bounded by the geometric continuation weight (1-p)**(-l).
    Binomials are exact integers converted to float only after the small
    weights are attached, which keeps every intermediate finite.
    """
    q = 1.0 - p
    u = 1.0 / q
    a = np.zeros((l_cap + 1, l_cap + 1))
    e = np.zeros(l_cap + 1)
    pl = np.array([p**l for l in range(l_cap + 1)])
    pu = p * u
    m_over = p ** (m_cap + 1) * ((m_cap + 2) - (m_cap + 1) * p)
    for lp in range(1, l_cap + 1):
        e_l = 0.0
        for m in range(m_cap + 1):
            w = (m + 1) * (p * q) ** m * q * q
            top = m + lp
            for l in range(1, min(top, l_cap) + 1):
                a[lp, l] += w * float(math.comb(top, l)) * pl[l]
            if top > l_cap:
                s = 0.0
                for l in range(l_cap + 1, top + 1):
                    s += float(math.comb(top, l)) * pu**l
                e_l += w * s
        e[lp] = u**lp * m_over + e_l
    return a, e


def _multisum(params: ProbabilityParams, n: int, trunc: MultisumTruncation, geometric_last: bool):
    n = _require_n(n, limit=MULTISUM_MAX_N)
    p = params.p
    q = 1.0 - p
    a, e = _stage_data(p, trunc.m_cap, trunc.l_cap)
    v = np.zeros(trunc.l_cap + 1)
    v[1] = 1.0
    tail = 0.0
    for _stage in range(n):
        tail += float(v @ e)
        v = v @ a
    if geometric_last:
        weights = np.array([q ** (-l) for l in range(trunc.l_cap + 1)])
        value = q * float(v[1:] @ weights[1:])
    else:
        value = q * float(v[1:].sum())
    return value, q * tail


def kernel_by_multisum(
    params: ProbabilityParams, n: int, trunc: MultisumTruncation = MultisumTruncation()
) -> tuple[float, float]:
    """Oracle evaluation of ``kernel[n]`` by direct staircase summation.

    Returns ``(value, tail_estimate)``.  The true value lies in
    ``[value, value + tail_estimate]`` up to double roundoff.  Exponential
    cost in the caps; refuses ``n > 5``.
    """
    return _multisum(params, n, trunc, geometric_last=False)


def crossing_by_multisum(
    params: ProbabilityParams, n: int, trunc: MultisumTruncation = MultisumTruncation()
) -> tuple[float, float]:
    """Oracle evaluation of ``crossing[n]``; same contract as the kernel
    variant but with the geometric end weight attached to the last stage."""
    return _multisum(params, n, trunc, geometric_last=True)


# ---------------------------------------------------------------------------
# generating-function checks
# ---------------------------------------------------------------------------

def kernel_gf_partial(
    params: ProbabilityParams,
    z: float,
    n_terms: int,
    config: SeriesConfig = DEFAULT_CONFIG,
) -> float:
    """Partial sum ``sum_{l<=n_terms} kernel[l] z**l`` of the kernel series.

    A polynomial, so any nonnegative z is accepted; as n_terms grows it
    converges only for z below the dominant singularity of the full series
    (which lies beyond 1, so z = 1 is fine and recovers the closed
    evaluation of the series at 1 used by the tests).
    """
    n_terms = _require_n(n_terms, name="n_terms")
    z = float(z)
    if not (math.isfinite(z) and z >= 0.0):
        raise DomainError(f"z must be a finite nonnegative real, got {z!r}")
    kernel = kernel_by_recursion(params, n_terms)
    total = 0.0
    zl = 1.0
    for l in range(1, n_terms + 1):
        zl *= z
        total += kernel[l - 1] * zl
    return float(total)


def functional_residual(
    params: ProbabilityParams,
    z: float,
    n_terms: int,
    config: SeriesConfig = DEFAULT_CONFIG,
) -> float:
    """Absolute defect of the kernel generating function's identity at z.

    The identity ties ``(1 + S(z)) F(z)`` to a fixed combination of the
    series ``S`` at ``z``, ``p z`` and ``p**2 z``, where ``F`` is the kernel
    generating function.  With ``F`` replaced by its n_terms partial sum the
    defect must vanish as ``n_terms`` grows; the residual is that defect's
    absolute value and doubles as a regression check on both routes.
    """
    p = params.p
    z = float(z)
    if not 0.0 < z <= 1.0 - config.singularity_margin:
        raise DomainError(f"z must lie in (0, 1 - margin], got {z!r}")
    cache = ProductCache(p)
    q = 1.0 - p
    s_z = gf_series(params, z, config, cache)
    s_pz = gf_series(params, p * z, config, cache)
    s_ppz = gf_series(params, p * p * z, config, cache)
    lhs = (1.0 + s_z) * kernel_gf_partial(params, z, n_terms, config)
    rhs = (p / (q * q)) * (
        (1.0 - p * p * q) * s_z / z
        - (1.0 - p * p * (1.0 - p * p)) * s_pz / (p * z)
        - p**3 * q * s_ppz / (p * p * z)
    )
    return float(abs(lhs - rhs))
