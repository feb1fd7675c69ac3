"""Crossing-probability estimation on product graphs.

Edge states are Bernoulli(p), independent per edge and per sample, and
connectivity is decided by union-find over the open edges.  Randomness is
counter-based: sample chunk i of a run draws its uniforms from a Philox
generator keyed by (seed, stream, i), so results are bit-identical for a
given (spec, p, samples, seed) no matter how many worker threads execute
the chunks (success counts are integers and summation commutes).  Uniforms
are float32, which biases each edge probability by at most one part in
2**24; that bias is orders of magnitude under the statistical resolution of
any feasible run.

Tiny graphs (at most 25 edges) admit exact evaluation by summing the
probability mass of every edge configuration; that enumeration is the
oracle the estimators are tested against.

Thread count comes from the ``threads`` argument, else the
``TREELINE_THREADS`` environment variable, else 1.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import CapacityError, DomainError
from .graphs import SlabSpec, build_graph

__all__ = [
    "CrossingEstimate",
    "OffspringEstimate",
    "estimate_crossing",
    "estimate_offspring",
    "exact_crossing",
    "CHUNK_SAMPLES",
    "EXACT_EDGE_LIMIT",
]

CHUNK_SAMPLES = 1024
EXACT_EDGE_LIMIT = 25
THREADS_ENV = "TREELINE_THREADS"

_CROSSING_STREAM = 0
_OFFSPRING_STREAM = 1


@dataclass(frozen=True)
class CrossingEstimate:
    """Monte-Carlo estimate of an origin-to-target-fiber crossing."""

    spec: SlabSpec
    p: float
    samples: int
    seed: int
    successes: int
    p_hat: float
    stderr: float


@dataclass(frozen=True)
class OffspringEstimate:
    """Monte-Carlo estimate of the mean count of reached deepest fibers."""

    spec: SlabSpec
    p: float
    samples: int
    seed: int
    total: int
    mean: float
    stderr: float

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def d(self) -> int:
        return self.spec.d


@njit(cache=True, nogil=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def _union(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return
    if ra < rb:
        parent[rb] = ra
    else:
        parent[ra] = rb


@njit(cache=True, nogil=True)
def _count_crossings(uniforms, p, edges_u, edges_v, n_vertices, origin, t_lo, t_hi):
    parent = np.empty(n_vertices, np.int32)
    hits = 0
    for s in range(uniforms.shape[0]):
        for v in range(n_vertices):
            parent[v] = v
        for e in range(edges_u.shape[0]):
            if uniforms[s, e] < p:
                _union(parent, edges_u[e], edges_v[e])
        root = _find(parent, origin)
        for t in range(t_lo, t_hi):
            if _find(parent, t) == root:
                hits += 1
                break
    return hits


@njit(cache=True, nogil=True)
def _count_offspring(
    uniforms, p, edges_u, edges_v, n_vertices, origin, first_leaf, n_leaves, levels
):
    parent = np.empty(n_vertices, np.int32)
    total = np.int64(0)
    total_sq = np.int64(0)
    for s in range(uniforms.shape[0]):
        for v in range(n_vertices):
            parent[v] = v
        for e in range(edges_u.shape[0]):
            if uniforms[s, e] < p:
                _union(parent, edges_u[e], edges_v[e])
        root = _find(parent, origin)
        count = 0
        for leaf in range(n_leaves):
            base = (first_leaf + leaf) * levels
            for t in range(base, base + levels):
                if _find(parent, t) == root:
                    count += 1
                    break
        total += count
        total_sq += count * count
    return total, total_sq


@njit(cache=True)
def _exact_mass(weights, edges_u, edges_v, n_vertices, origin, t_lo, t_hi):
    n_edges = edges_u.shape[0]
    parent = np.empty(n_vertices, np.int32)
    total = 0.0
    for mask in range(1 << n_edges):
        for v in range(n_vertices):
            parent[v] = v
        open_count = 0
        mm = mask
        for e in range(n_edges):
            if mm & 1:
                open_count += 1
                _union(parent, edges_u[e], edges_v[e])
            mm >>= 1
        root = _find(parent, origin)
        for t in range(t_lo, t_hi):
            if _find(parent, t) == root:
                total += weights[open_count]
                break
    return total


def _require_mc_probability(p) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"edge probability must lie in [0, 1], got {p!r}")
    return p


def _require_samples(samples) -> int:
    if not isinstance(samples, int) or isinstance(samples, bool) or samples < 1:
        raise DomainError(f"samples must be a positive integer, got {samples!r}")
    return samples


def _require_seed(seed) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return seed


def _thread_count(threads) -> int:
    if threads is None:
        threads = os.environ.get(THREADS_ENV, "1")
    try:
        threads = int(threads)
    except (TypeError, ValueError):
        raise DomainError(f"thread count must be an integer, got {threads!r}") from None
    if threads < 1:
        raise DomainError(f"thread count must be positive, got {threads}")
    return threads


def _chunk_uniforms(seed: int, stream: int, index: int, shape) -> np.ndarray:
    key = np.array([seed, (stream << 32) + index], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return gen.random(shape, dtype=np.float32)


def _chunk_sizes(samples: int) -> list[int]:
    full, rest = divmod(samples, CHUNK_SAMPLES)
    return [CHUNK_SAMPLES] * full + ([rest] if rest else [])


def _run_chunks(worker, n_chunks: int, threads: int):
    if threads == 1 or n_chunks == 1:
        return [worker(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=min(threads, n_chunks)) as pool:
        return list(pool.map(worker, range(n_chunks)))


def estimate_crossing(
    spec: SlabSpec, p, samples: int, seed: int, threads: int | None = None
) -> CrossingEstimate:
    """Estimate the probability that the origin reaches the target fiber.

    The target is the far column of a strip or the fiber of the leftmost
    deepest leaf of a slab.  stderr is the binomial plug-in value
    ``sqrt(p_hat (1 - p_hat) / samples)``.
    """
    p = _require_mc_probability(p)
    samples = _require_samples(samples)
    seed = _require_seed(seed)
    threads = _thread_count(threads)
    g = build_graph(spec)
    sizes = _chunk_sizes(samples)

    def worker(i: int) -> int:
        u = _chunk_uniforms(seed, _CROSSING_STREAM, i, (sizes[i], g.n_edges))
        return int(
            _count_crossings(
                u, p, g.edges_u, g.edges_v, g.n_vertices, g.origin, g.target_lo, g.target_hi
            )
        )

    successes = sum(_run_chunks(worker, len(sizes), threads))
    p_hat = successes / samples
    return CrossingEstimate(
        spec=spec,
        p=p,
        samples=samples,
        seed=seed,
        successes=successes,
        p_hat=p_hat,
        stderr=math.sqrt(p_hat * (1.0 - p_hat) / samples),
    )


def estimate_offspring(
    spec: SlabSpec, p, samples: int, seed: int, threads: int | None = None
) -> OffspringEstimate:
    """Estimate the mean number of deepest-leaf fibers reached from the
    origin of a slab; stderr is the sample standard error.

    By the symmetry of the slab over its deepest leaves, mean divided by
    the leaf count estimates the same probability as estimate_crossing on
    the single-leaf target (the two use distinct random streams, so they
    are independent estimates).
    """
    if spec.kind != "slab":
        raise DomainError(f"offspring counts need a slab, got kind={spec.kind!r}")
    p = _require_mc_probability(p)
    samples = _require_samples(samples)
    seed = _require_seed(seed)
    threads = _thread_count(threads)
    g = build_graph(spec)
    sizes = _chunk_sizes(samples)

    def worker(i: int) -> tuple[int, int]:
        u = _chunk_uniforms(seed, _OFFSPRING_STREAM, i, (sizes[i], g.n_edges))
        total, total_sq = _count_offspring(
            u, p, g.edges_u, g.edges_v, g.n_vertices, g.origin,
            g.first_leaf, g.n_leaves, g.levels,
        )
        return int(total), int(total_sq)

    parts = _run_chunks(worker, len(sizes), threads)
    total = sum(t for t, _ in parts)
    total_sq = sum(t for _, t in parts)
    mean = total / samples
    if samples > 1:
        var = max(0.0, (total_sq - total * total / samples) / (samples - 1))
        stderr = math.sqrt(var / samples)
    else:
        stderr = 0.0
    return OffspringEstimate(
        spec=spec, p=p, samples=samples, seed=seed, total=total, mean=mean, stderr=stderr
    )


def exact_crossing(spec: SlabSpec, p) -> float:
    """Exact crossing probability by enumerating all edge configurations.

    Cost is 2**edges; refuses graphs above EXACT_EDGE_LIMIT edges.
    """
    p = _require_mc_probability(p)
    g = build_graph(spec)
    if g.n_edges > EXACT_EDGE_LIMIT:
        raise CapacityError(
            f"exact enumeration allows at most {EXACT_EDGE_LIMIT} edges, "
            f"this graph has {g.n_edges}"
        )
    q = 1.0 - p
    weights = np.array([p**k * q ** (g.n_edges - k) for k in range(g.n_edges + 1)])
    return float(
        _exact_mass(
            weights, g.edges_u, g.edges_v, g.n_vertices, g.origin, g.target_lo, g.target_hi
        )
    )
