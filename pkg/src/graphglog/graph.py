"""Weighted undirected graphs and their combinatorial Laplacian."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import (
    DimensionMismatch,
    DisconnectedGraph,
    DuplicateEdge,
    IndexOutOfRange,
    NegativeWeight,
    SelfLoop,
)

__all__ = [
    "WeightedGraph",
    "Laplacian",
    "build_graph",
    "build_laplacian",
    "is_connected",
    "require_connected",
    "grid_graph",
    "as_signal",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with non-negative edge weights.

    ``edges`` holds every input edge as a canonical ``(i, j)`` row with
    ``i < j`` (sorted row-major), zero-weight ones included. Only edges with a
    strictly positive weight enter ``adjacency``.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray
    adjacency: sparse.csr_matrix = field(repr=False, compare=False)

    @property
    def degree(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    @property
    def edge_index(self) -> np.ndarray:
        """``(E, 2)`` array of the positive-weight edges, ``i < j``, sorted."""
        return self.edges[self.weights > 0]

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(self.weights > 0))


@dataclass(frozen=True)
class Laplacian:
    """Combinatorial Laplacian ``L = D - A`` in CSR form."""

    matrix: sparse.csr_matrix = field(repr=False)
    degree: np.ndarray
    edge_index: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def build_graph(n: int, edges: Iterable[Sequence[float]]) -> WeightedGraph:
    """Assemble a :class:`WeightedGraph` from ``(i, j)`` or ``(i, j, w)`` tuples.

    Missing weights default to 1.0. Raises :class:`SelfLoop`,
    :class:`NegativeWeight`, :class:`IndexOutOfRange` or
    :class:`DuplicateEdge` (``(i, j)`` and ``(j, i)`` count as the same edge).
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"node count must be positive, got {n}")

    rows = []
    for e in edges:
        if len(e) == 2:
            i, j, w = e[0], e[1], 1.0
        elif len(e) == 3:
            i, j, w = e
        else:
            raise ValueError(f"edge must be (i, j) or (i, j, w), got {e!r}")
        rows.append((i, j, w))

    if rows:
        arr = np.asarray(rows, dtype=float)
        ij = arr[:, :2]
        if not np.all(ij == np.round(ij)):
            raise IndexOutOfRange("node indices must be integers")
        ij = ij.astype(np.int64)
        w = arr[:, 2]
    else:
        ij = np.empty((0, 2), dtype=np.int64)
        w = np.empty(0, dtype=float)

    bad = (ij < 0) | (ij >= n)
    if bad.any():
        k = int(np.argmax(bad.any(axis=1)))
        raise IndexOutOfRange(f"edge {tuple(ij[k])} has an index outside [0, {n})")
    loops = ij[:, 0] == ij[:, 1]
    if loops.any():
        k = int(np.argmax(loops))
        raise SelfLoop(f"self-loop at node {ij[k, 0]}")
    if not np.all(np.isfinite(w)):
        raise NegativeWeight("edge weights must be finite")
    if (w < 0).any():
        k = int(np.argmax(w < 0))
        raise NegativeWeight(f"edge {tuple(ij[k])} has negative weight {w[k]}")

    canon = np.sort(ij, axis=1)
    order = np.lexsort((canon[:, 1], canon[:, 0]))
    canon, w = canon[order], w[order]
    if len(canon) > 1:
        dup = np.all(canon[1:] == canon[:-1], axis=1)
        if dup.any():
            k = int(np.argmax(dup))
            raise DuplicateEdge(f"edge {tuple(canon[k])} given more than once")

    pos = w > 0
    i, j, wp = canon[pos, 0], canon[pos, 1], w[pos]
    adj = sparse.coo_matrix(
        (np.concatenate([wp, wp]), (np.concatenate([i, j]), np.concatenate([j, i]))),
        shape=(n, n),
    ).tocsr()
    adj.sort_indices()

    return WeightedGraph(n=n, edges=_frozen(canon), weights=_frozen(w), adjacency=adj)


def build_laplacian(g: WeightedGraph) -> Laplacian:
    degree = g.degree
    L = (sparse.diags(degree, format="csr") - g.adjacency).tocsr()
    L.sort_indices()
    return Laplacian(matrix=L, degree=_frozen(degree), edge_index=g.edge_index)


def is_connected(g: WeightedGraph) -> bool:
    """True iff every node is reachable from node 0 through positive-weight edges."""
    if g.n == 1:
        return True
    ncomp, _ = csgraph.connected_components(g.adjacency, directed=False)
    return ncomp == 1


def require_connected(g: WeightedGraph) -> None:
    if not is_connected(g):
        ncomp, _ = csgraph.connected_components(g.adjacency, directed=False)
        raise DisconnectedGraph(f"graph has {ncomp} connected components; exactly 1 is required")


def grid_graph(rows: int, cols: int) -> WeightedGraph:
    """4-neighbour unit-weight grid; node ``r * cols + c`` sits at row r, column c."""
    idx = np.arange(rows * cols).reshape(rows, cols)
    horiz = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    vert = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    return build_graph(rows * cols, np.concatenate([horiz, vert]).tolist())


def as_signal(f, n: int) -> np.ndarray:
    """Validate a graph signal (or an ``(n, m)`` stack of them) against ``n`` nodes."""
    f = np.asarray(f, dtype=float)
    if f.ndim not in (1, 2) or f.shape[0] != n:
        raise DimensionMismatch(f"signal of shape {f.shape} does not match a graph with {n} nodes")
    if not np.all(np.isfinite(f)):
        raise ValueError("graph signal contains non-finite values")
    return f
