"""Finite truncations of tree-times-line product graphs.

Two families are supported, both with the integer line cut to the window
[-k, k] (2k + 1 levels):

* ``strip``: a path of n + 1 columns crossed with the line window.  Rung
  edges join consecutive columns at every level; line edges run inside a
  column only for columns 0..n-1, so the far column is reachable only
  through rungs.

* ``slab``: a rooted tree in which every internal vertex has d - 1
  children, grown to depth n, crossed with the line window.  Tree edges
  exist at every level; line edges run inside a vertex's fiber only for
  vertices of depth at most n - 1, so the leaf fibers are reachable only
  through tree edges.

Vertices are indexed ``tree_index * (2k + 1) + (level + k)`` with tree
vertices in breadth-first order (for the strip, column order).  Each fiber
is therefore a contiguous index range, which the samplers exploit.  Edges
are listed level by level, then by tree index, with the edge to the parent
column/vertex before the line edge, giving a canonical deterministic order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError
from .genfunc import _require_degree

__all__ = ["SlabSpec", "ProductGraph", "build_graph", "MAX_VERTICES"]

MAX_VERTICES = 2_000_000

KINDS = ("strip", "slab")


@dataclass(frozen=True)
class SlabSpec:
    """Shape of one finite product graph.

    kind  "strip" or "slab"
    n     tree depth (slab) or number of crossed columns (strip), >= 1
    k     half-width of the line window; levels are -k..k
    d     vertex degree of the underlying infinite tree, slabs only
    """

    kind: str
    n: int
    k: int
    d: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 0:
            raise DomainError(f"k must be a nonnegative integer, got {self.k!r}")
        if self.kind == "slab":
            if self.d is None:
                raise DomainError("slabs need an explicit tree degree d")
            _require_degree(self.d)
        elif self.d is not None:
            raise DomainError("d applies to slabs only; strips take d=None")

    @property
    def branching(self) -> int:
        """Children per internal tree vertex (1 for the strip's path)."""
        return 1 if self.kind == "strip" else self.d - 1


@dataclass(frozen=True, eq=False)
class ProductGraph:
    """Immutable edge-list form of a built SlabSpec.

    ``edges_u[i] - edges_v[i]`` is the i-th edge in canonical order.  The
    crossing target is the fiber of ``first_leaf`` (the far column of a
    strip, the leftmost deepest leaf of a slab), occupying the contiguous
    vertex range [target_lo, target_hi).  ``n_leaves`` counts the deepest
    tree vertices; their fibers are consecutive starting at target_lo.
    """

    spec: SlabSpec
    n_vertices: int
    levels: int
    edges_u: np.ndarray
    edges_v: np.ndarray
    origin: int
    target_lo: int
    target_hi: int
    first_leaf: int
    n_leaves: int
    tree_size: int

    @property
    def n_edges(self) -> int:
        return len(self.edges_u)


def _tree_shape(spec: SlabSpec) -> tuple[int, int, np.ndarray]:
    """Sizes and depths of the tree layer: (size, n_leaves, depth array)."""
    b = spec.branching
    sizes = [b**j for j in range(spec.n + 1)]
    depth = np.repeat(np.arange(spec.n + 1), sizes)
    return int(sum(sizes)), sizes[-1], depth


def build_graph(spec: SlabSpec, max_vertices: int = MAX_VERTICES) -> ProductGraph:
    """Materialize the edge list of a product-graph truncation.

    Raises CapacityError when the vertex count would exceed max_vertices.
    Edge counts obey closed forms used by the tests: a strip has
    ``n (2k + 1)`` rung edges plus ``2 n k`` line edges; a slab has
    ``(tree_size - 1)(2k + 1)`` tree edges plus ``2 k`` line edges per
    vertex of depth below n.
    """
    tree_size, n_leaves, depth = _tree_shape(spec)
    levels = 2 * spec.k + 1
    n_vertices = tree_size * levels
    if n_vertices > max_vertices:
        raise CapacityError(
            f"{spec.kind} with n={spec.n}, k={spec.k} needs {n_vertices} "
            f"vertices, above the limit {max_vertices}"
        )
    b = spec.branching
    us: list[int] = []
    vs: list[int] = []
    for level in range(levels):
        for t in range(tree_size):
            vid = t * levels + level
            if t >= 1:
                parent = t - 1 if spec.kind == "strip" else (t - 1) // b
                us.append(parent * levels + level)
                vs.append(vid)
            if depth[t] <= spec.n - 1 and level + 1 < levels:
                us.append(vid)
                vs.append(vid + 1)
    first_leaf = tree_size - n_leaves
    return ProductGraph(
        spec=spec,
        n_vertices=n_vertices,
        levels=levels,
        edges_u=np.asarray(us, dtype=np.int32),
        edges_v=np.asarray(vs, dtype=np.int32),
        origin=spec.k,
        target_lo=first_leaf * levels,
        target_hi=first_leaf * levels + levels,
        first_leaf=first_leaf,
        n_leaves=n_leaves,
        tree_size=tree_size,
    )
