"""Null model for topologically weighted graphs.

A sample is built in two steps: the graph is randomised by degree-preserving
double edge swaps, then the original multiset of edge weights is dealt out
uniformly at random over the rewired edges.  Degrees and the weight
distribution survive (so do the mean weight and the mean strength); degree
and strength correlations between neighbours do not.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .graph import Graph, GraphError
from .seeding import derive_seed
from .weights import WeightedGraph, strengths

DEFAULT_SWAPS_PER_EDGE = 10


def _rewire_edges(n: int, edges: np.ndarray, gen: np.random.Generator,
                  swaps_per_edge: int) -> np.ndarray:
    work = np.array(edges, dtype=np.int64, copy=True)
    m = len(work)
    if m < 2 or swaps_per_edge <= 0:
        return work
    attempts = swaps_per_edge * m
    picks = gen.integers(0, m, size=(attempts, 2))
    flips = gen.integers(0, 2, size=attempts).astype(np.bool_)
    _kernels.double_edge_swap(n, work, picks, flips)
    return work


def configuration_rewire(g: Graph, seed: int,
                         swaps_per_edge: int = DEFAULT_SWAPS_PER_EDGE) -> Graph:
    """Degree-preserving randomisation of ``g``.

    Makes ``swaps_per_edge * m`` swap attempts; attempts that would create a
    loop or a repeated edge are dropped (they still count against the
    budget, so rigid graphs such as stars terminate quickly).
    """
    if g.m < 2:
        raise GraphError("configuration_rewire needs at least two edges")
    edges = _rewire_edges(g.n, g.edges, np.random.default_rng(seed), swaps_per_edge)
    return Graph(g.n, edges, g.labels, g.node_attrs)


@dataclass(frozen=True, eq=False)
class NullModelSample:
    """One rewired graph with reshuffled weights (``weight`` aligned with ``edges``)."""

    n: int
    edges: np.ndarray
    weight: np.ndarray
    seed: int

    def strengths(self) -> np.ndarray:
        return strengths(self.n, self.edges, self.weight)

    def graph(self, labels=None) -> Graph:
        labels = labels if labels is not None else tuple(str(i) for i in range(self.n))
        return Graph(self.n, self.edges, labels)


def shuffle_weights(g_null: Graph, source_weights, seed: int) -> NullModelSample:
    """Deal the weight multiset out over the edges of ``g_null`` at random."""
    source_weights = np.asarray(source_weights, dtype=float)
    if len(source_weights) != g_null.m:
        raise GraphError(f"{len(source_weights)} weights for {g_null.m} edges")
    gen = np.random.default_rng(seed)
    return NullModelSample(g_null.n, np.array(g_null.edges), gen.permutation(source_weights), seed)


def null_sample(wg: WeightedGraph, seed: int,
                swaps_per_edge: int = DEFAULT_SWAPS_PER_EDGE) -> NullModelSample:
    gen = np.random.default_rng(seed)
    edges = _rewire_edges(wg.n, wg.base.edges, gen, swaps_per_edge)
    return NullModelSample(wg.n, edges, gen.permutation(wg.weight), seed)


@dataclass(frozen=True, eq=False)
class NullEnsemble:
    samples: tuple[NullModelSample, ...]
    replicate_count: int
    master_seed: int
    swaps_per_edge: int = DEFAULT_SWAPS_PER_EDGE

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)


def replicate_seed(master_seed: int, index: int) -> int:
    return derive_seed(master_seed, "null", index)


def build_ensemble(wg: WeightedGraph, replicates: int, master_seed: int,
                   swaps_per_edge: int = DEFAULT_SWAPS_PER_EDGE) -> NullEnsemble:
    """``replicates`` independent null samples of ``wg``.

    Sample ``k`` is seeded from ``(master_seed, k)`` only, so the ensemble
    does not depend on generation order.  Graphs with fewer than two edges
    cannot be rewired and are only reshuffled.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    samples = tuple(null_sample(wg, replicate_seed(master_seed, k), swaps_per_edge)
                    for k in range(replicates))
    return NullEnsemble(samples, replicates, master_seed, swaps_per_edge)


def write_sample(sample: NullModelSample, labels, edge_path: str | Path) -> None:
    """Export a sample as ``node_i,node_j,weight`` CSV."""
    with open(edge_path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["node_i", "node_j", "weight"])
        for (a, b), w in zip(sample.edges.tolist(), sample.weight.tolist()):
            out.writerow([labels[a], labels[b], repr(w)])


__all__ = [
    "NullEnsemble", "NullModelSample", "build_ensemble", "configuration_rewire",
    "null_sample", "replicate_seed", "shuffle_weights", "write_sample",
]
