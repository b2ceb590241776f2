"""Weighted rich-club coefficient and parameter, plus the degree-based classic.

``phi(n)`` is the share of the total edge weight lying inside the ``n``
nodes of highest strength.  ``rho(n) = phi(n) - <phi_null(n)>`` compares it
with the null ensemble, where every null sample is ranked by its own
(reshuffled) strengths.  The weighted rich club is the top-``M`` set with
``M`` the smallest maximiser of ``rho``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .graph import Graph
from .nullmodel import NullEnsemble
from .weights import WeightedGraph


class TotalWeightZero(ArithmeticError):
    """The graph carries no edge weight, so ``phi`` is undefined."""


@dataclass(frozen=True, eq=False)
class RankedNodes:
    order: np.ndarray
    tie_seed: int | None

    def top(self, n: int) -> np.ndarray:
        return self.order[:n]


def _rank(values: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    # descending by value; exact ties ordered by a random key
    tiebreak = gen.random(len(values))
    return np.lexsort((tiebreak, -np.asarray(values, dtype=float)))


def rank_by_delta(deltas, tie_seed: int | None = 0) -> RankedNodes:
    """Order nodes by decreasing strength, ties broken at random by ``tie_seed``.

    ``deltas`` is an array indexed by node or a mapping ``node -> value``
    over ``0..N-1``.
    """
    if isinstance(deltas, Mapping):
        values = np.array([deltas[i] for i in range(len(deltas))], dtype=float)
    else:
        values = np.asarray(deltas, dtype=float)
    return RankedNodes(_rank(values, np.random.default_rng(tie_seed)), tie_seed)


def phi_curve(n: int, edges: np.ndarray, weight: np.ndarray, order: np.ndarray) -> np.ndarray:
    """``phi(1..n)`` for the given node order in one pass over the edges."""
    total = float(weight.sum())
    if not total > 0:
        raise TotalWeightZero("total edge weight is zero")
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    # an edge joins the top-k set once both of its ends are in it
    enters = np.maximum(pos[edges[:, 0]], pos[edges[:, 1]])
    inside = np.cumsum(np.bincount(enters, weights=weight, minlength=n))
    phi = inside / total
    phi[-1] = 1.0
    return phi


def phi_weighted(wg: WeightedGraph, ranked: RankedNodes, n: int) -> float:
    if not 1 <= n <= wg.n:
        raise ValueError(f"n must lie in 1..{wg.n}")
    return float(phi_curve(wg.n, wg.base.edges, wg.weight, ranked.order)[n - 1])


@dataclass(frozen=True, eq=False)
class RhoCurve:
    phi: np.ndarray
    phi_null_mean: np.ndarray
    phi_null_std: np.ndarray
    rho: np.ndarray
    argmax_n: int
    order: np.ndarray

    @property
    def club(self) -> np.ndarray:
        """Nodes of the weighted rich club (top ``argmax_n`` by strength)."""
        return self.order[:self.argmax_n]

    @property
    def rho_max(self) -> float:
        return float(self.rho[self.argmax_n - 1])


def null_phi_curves(ensemble: NullEnsemble, reuse_order: np.ndarray | None = None) -> np.ndarray:
    """One ``phi`` curve per null sample (rows)."""
    curves = []
    for sample in ensemble:
        if reuse_order is None:
            order = _rank(sample.strengths(), np.random.default_rng((sample.seed, 1)))
        else:
            order = reuse_order
        curves.append(phi_curve(sample.n, sample.edges, sample.weight, order))
    return np.vstack(curves)


def rho_curve(wg: WeightedGraph, ensemble: NullEnsemble, tie_seed: int | None = 0,
              reuse_original_ranking: bool = False) -> RhoCurve:
    if len(ensemble) == 0:
        raise ValueError("empty null ensemble")
    if not wg.total_weight > 0:
        raise TotalWeightZero("total edge weight is zero")
    ranked = rank_by_delta(wg.delta, tie_seed)
    phi = phi_curve(wg.n, wg.base.edges, wg.weight, ranked.order)
    null = null_phi_curves(ensemble, ranked.order if reuse_original_ranking else None)
    mean = null.mean(axis=0)
    std = null.std(axis=0, ddof=1) if len(null) > 1 else np.zeros_like(mean)
    rho = phi - mean
    # np.argmax returns the first (smallest n) maximiser
    return RhoCurve(phi, mean, std, rho, int(np.argmax(rho)) + 1, ranked.order)


def write_rho_csv(curve: RhoCurve, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["n", "phi", "phi_null_mean", "phi_null_std", "rho"])
        for k in range(len(curve.phi)):
            out.writerow([k + 1, repr(float(curve.phi[k])), repr(float(curve.phi_null_mean[k])),
                          repr(float(curve.phi_null_std[k])), repr(float(curve.rho[k]))])


# ---------------------------------------------------------------------------
# classic degree-based rich club (diagnostic only)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnweightedRichClub:
    phi_k: dict[int, float]
    rho_k: dict[int, float]


def phi_unweighted(g: Graph, k: int) -> float | None:
    """Edge density among nodes of degree ``> k``; None if fewer than two."""
    rich = g.degrees > k
    count = int(rich.sum())
    if count < 2:
        return None
    inner = int(np.count_nonzero(rich[g.edges[:, 0]] & rich[g.edges[:, 1]]))
    return 2.0 * inner / (count * (count - 1))


def unweighted_rich_club(g: Graph, null_graphs=()) -> UnweightedRichClub:
    """``phi(k)`` for every degree threshold, and ``phi / <phi_null>`` if nulls are given."""
    phi_k: dict[int, float] = {}
    rho_k: dict[int, float] = {}
    null_graphs = list(null_graphs)
    for k in range(int(g.degrees.max(initial=0)) + 1):
        value = phi_unweighted(g, k)
        if value is None:
            break
        phi_k[k] = value
        if null_graphs:
            nulls = [phi_unweighted(h, k) for h in null_graphs]
            nulls = [x for x in nulls if x is not None]
            if nulls and np.mean(nulls) > 0:
                rho_k[k] = value / float(np.mean(nulls))
    return UnweightedRichClub(phi_k, rho_k)
