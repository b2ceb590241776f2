"""Topological edge weights ``w(i, j)`` and node strengths ``delta(i)``.

For an edge ``(i, j)`` of a graph on ``N`` nodes::

    w(i, j) = |N(i) & N(j)| * H(d(i), d(j)) / ((N - 1)**2 * (N - 2))

with ``H`` the harmonic mean of the endpoint degrees.  This equals
``d(i) d(j) * S(i, j) / ((N - 1)**2 (N - 2))`` with ``S`` the
Dice-Sorensen overlap of the two neighbourhoods.  ``delta(i)`` sums the
weights of the edges at ``i``; it lies in ``[0, 1]`` and equals 1 only on a
clique.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _kernels
from .graph import Graph, GraphError, edge_mask, induced_subgraph


def normalization(n: int) -> float:
    if n < 3:
        raise GraphError(f"edge weights need at least 3 nodes, got {n}")
    return 1.0 / ((n - 1) ** 2 * (n - 2))


def harmonic_mean(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(a + b > 0, 2.0 * a * b / (a + b), 0.0)


def edge_weight(g: Graph, i: int, j: int) -> float:
    """Weight of the pair ``(i, j)``; 0 when they are not adjacent."""
    k = normalization(g.n)
    g._check(i)
    g._check(j)
    if i == j:
        raise GraphError("edge_weight needs two distinct nodes")
    if not g.has_edge(i, j):
        return 0.0
    shared = len(np.intersect1d(g.neighbors(i), g.neighbors(j), assume_unique=True))
    return k * shared * float(harmonic_mean(g.degrees[i], g.degrees[j]))


def edge_weights(g: Graph) -> np.ndarray:
    """Weights of all edges, aligned with ``g.edges``."""
    k = normalization(g.n)
    if g.m == 0:
        return np.zeros(0)
    shared = _kernels.common_neighbors(g.n, g.edges, g.indptr, g.indices)
    d = g.degrees
    return k * shared * harmonic_mean(d[g.edges[:, 0]], d[g.edges[:, 1]])


def strengths(n: int, edges: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Per-node sum of incident edge weights."""
    if len(edges) == 0:
        return np.zeros(n)
    return (np.bincount(edges[:, 0], weights=weight, minlength=n)
            + np.bincount(edges[:, 1], weights=weight, minlength=n))


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """A graph together with its (possibly inherited) topological weights.

    ``origin[i]`` is the id of node ``i`` in the graph the weights were first
    computed on; for a freshly weighted graph it is the identity.
    """

    base: Graph
    weight: np.ndarray
    delta: np.ndarray
    origin: np.ndarray = field(repr=False, default=None)

    def __post_init__(self) -> None:
        if self.origin is None:
            object.__setattr__(self, "origin", np.arange(self.base.n, dtype=np.int64))
        for arr in (self.weight, self.delta, self.origin):
            arr.flags.writeable = False

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    def weight_of(self, i: int, j: int) -> float:
        a, b = (i, j) if i < j else (j, i)
        row = self.base.neighbors(a)
        k = np.searchsorted(row, b)
        if k == len(row) or row[k] != b:
            return 0.0
        lo = np.searchsorted(self.base.edges[:, 0], a)
        hi = np.searchsorted(self.base.edges[:, 0], a, side="right")
        pos = lo + np.searchsorted(self.base.edges[lo:hi, 1], b)
        return float(self.weight[pos])

    def weight_map(self) -> dict[tuple[int, int], float]:
        return {(int(a), int(b)): float(w) for (a, b), w in zip(self.base.edges, self.weight)}

    def restrict(self, keep: Iterable[int]) -> "WeightedGraph":
        """Induced weighted subgraph that keeps the inherited weights.

        Weights are copied, never recomputed from the smaller topology, and
        ``delta`` becomes the restricted sum over surviving edges.
        """
        keep = np.unique(np.asarray(list(keep) if not isinstance(keep, np.ndarray) else keep,
                                    dtype=np.int64))
        sub, ids = induced_subgraph(self.base, keep)
        w = self.weight[edge_mask(self.base, keep)]
        # induced_subgraph keeps edges in the same relative (sorted) order
        return WeightedGraph(sub, w.copy(), strengths(sub.n, sub.edges, w), self.origin[ids])


def compute_weighted_graph(g: Graph) -> WeightedGraph:
    w = edge_weights(g)
    return WeightedGraph(g, w, strengths(g.n, g.edges, w))


def delta_of_subgraph(wg: WeightedGraph, keep: Iterable[int]) -> dict[int, float]:
    """Strength of each kept node counting only edges inside ``keep``."""
    keep = np.unique(np.fromiter(keep, dtype=np.int64))
    sub = wg.restrict(keep)
    return {int(i): float(d) for i, d in zip(keep, sub.delta)}


@dataclass(frozen=True)
class WeightSummary:
    mean_weight: float
    mean_degree: float
    mean_delta: float


def weight_summary(wg: WeightedGraph) -> WeightSummary:
    if wg.base.m == 0:
        raise GraphError("mean edge weight undefined on a graph without edges")
    return WeightSummary(float(wg.weight.mean()), float(wg.base.degrees.mean()),
                         float(wg.delta.mean()))


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------

def write_node_csv(wg: WeightedGraph, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["node", "label", "degree", "delta"])
        for i in range(wg.n):
            out.writerow([i, wg.base.labels[i], int(wg.base.degrees[i]), repr(float(wg.delta[i]))])


def write_edge_csv(wg: WeightedGraph, path: str | Path) -> None:
    labels = wg.base.labels
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["node_i", "node_j", "weight"])
        for (a, b), w in zip(wg.base.edges.tolist(), wg.weight.tolist()):
            out.writerow([labels[a], labels[b], repr(w)])
