"""Iterative extraction of weighted rich clubs (ItRich).

Each round works on the nodes still present, with the edge weights of the
full graph carried over unchanged.  The round's rich club is accepted when
the mean of its ``rho`` curve (the quality ``Q``) beats the threshold in
force; accepted clubs are deleted and the loop goes on.  The first rejection,
an exhausted weight budget or fewer than three remaining nodes end the run;
whatever is left is the sparse part.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import Graph
from .nullmodel import DEFAULT_SWAPS_PER_EDGE, build_ensemble
from .richclub import RhoCurve, rho_curve
from .seeding import derive_seed
from .weights import WeightedGraph, compute_weighted_graph

log = logging.getLogger(__name__)

SPARSE = -1


@dataclass(frozen=True)
class ThresholdPolicy:
    """How the acceptance threshold on ``Q`` is set.

    ``fixed_fraction``: ``parameter * Q_1``, frozen after the first round.
    ``er_calibrated``: recomputed every round as the mean first-round quality
    of ``er_replicates`` Erdos-Renyi graphs matched in size and mean strength.
    ``absolute``: the constant ``parameter``.
    """

    kind: str = "fixed_fraction"
    parameter: float = 0.1
    er_replicates: int = 10

    def __post_init__(self):
        if self.kind not in ("fixed_fraction", "er_calibrated", "absolute"):
            raise ValueError(f"unknown threshold kind {self.kind!r}")
        if self.kind == "fixed_fraction" and not self.parameter > 0:
            raise ValueError("fixed_fraction needs a positive fraction")
        if self.er_replicates < 1:
            raise ValueError("er_replicates must be >= 1")

    @classmethod
    def parse(cls, text: str, er_replicates: int = 10) -> "ThresholdPolicy":
        """Parse ``fixed:<fraction>``, ``er`` or ``abs:<value>``."""
        text = text.strip().lower()
        if text == "er":
            return cls("er_calibrated", 0.0, er_replicates)
        kind, _, value = text.partition(":")
        if kind == "fixed":
            return cls("fixed_fraction", float(value or 0.1), er_replicates)
        if kind == "abs":
            return cls("absolute", float(value), er_replicates)
        raise ValueError(f"bad threshold spec {text!r}; use fixed:<f>, er or abs:<v>")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "parameter": self.parameter,
                "er_replicates": self.er_replicates}


@dataclass(frozen=True)
class Club:
    nodes: tuple[int, ...]
    quality: float
    argmax_n: int
    rho_max: float
    threshold: float


@dataclass(frozen=True)
class Round:
    """Book-keeping for one pass of the loop, accepted or not."""

    iteration: int
    n_nodes: int
    total_weight: float
    quality: float | None
    threshold: float | None
    argmax_n: int | None
    accepted: bool
    stop_reason: str | None = None


@dataclass(frozen=True, eq=False)
class Decomposition:
    n: int
    clubs: tuple[Club, ...]
    sparse_part: frozenset[int]
    assignment: np.ndarray
    delta_trajectory: dict[int, tuple[float, ...]]
    rounds: tuple[Round, ...]
    threshold_policy: ThresholdPolicy
    seeds: dict = field(default_factory=dict)
    replicates: int = 0
    curves: tuple[RhoCurve, ...] = field(default=(), repr=False)

    @property
    def dense_part(self) -> frozenset[int]:
        return frozenset(int(i) for i in np.flatnonzero(self.assignment != SPARSE))

    def to_json(self, labels) -> dict:
        return {
            "clubs": [{"index": k, "nodes": [labels[i] for i in c.nodes], "size": len(c.nodes),
                       "Q": c.quality, "argmax_n": c.argmax_n, "rho_max": c.rho_max,
                       "threshold": c.threshold}
                      for k, c in enumerate(self.clubs)],
            "sparse": [labels[i] for i in sorted(self.sparse_part)],
            "rounds": [r.__dict__ for r in self.rounds],
            "threshold_policy": self.threshold_policy.to_dict(),
            "seeds": self.seeds,
            "replicates": self.replicates,
        }


def quality(curve: RhoCurve | np.ndarray, n_nodes: int | None = None) -> float:
    """Mean of ``rho(n)`` over ``n = 1..n_nodes``."""
    rho = curve.rho if isinstance(curve, RhoCurve) else np.asarray(curve, dtype=float)
    n_nodes = len(rho) if n_nodes is None else n_nodes
    if len(rho) < n_nodes:
        raise ValueError("rho curve shorter than n_nodes")
    return float(np.mean(rho[:n_nodes]))


def first_quality(wg: WeightedGraph, replicates: int, seed: int, tie_seed: int = 0,
                  swaps_per_edge: int = DEFAULT_SWAPS_PER_EDGE) -> tuple[float, RhoCurve | None]:
    """Quality of the first round on ``wg`` (0 when it carries no weight)."""
    if wg.n < 3 or not wg.total_weight > 0:
        return 0.0, None
    ensemble = build_ensemble(wg, replicates, seed, swaps_per_edge)
    curve = rho_curve(wg, ensemble, tie_seed)
    return quality(curve), curve


def erdos_renyi(n: int, p: float, gen: np.random.Generator) -> Graph:
    """G(n, p) by one Bernoulli draw per node pair."""
    iu, ju = np.triu_indices(n, k=1)
    keep = gen.random(len(iu)) < p
    return Graph.from_edges(n, np.column_stack([iu[keep], ju[keep]]))


def er_threshold(n_remaining: int, mean_delta: float, replicates: int, seed: int,
                 null_replicates: int = 50,
                 swaps_per_edge: int = DEFAULT_SWAPS_PER_EDGE) -> float:
    """Mean first-round quality of ``G(n_remaining, mean_delta ** 0.25)``.

    Each random graph gets its own weights and its own null ensemble.
    ``mean_delta ** 0.25`` is the edge probability whose expected mean
    strength is ``mean_delta``.
    """
    if n_remaining < 3:
        raise ValueError("er_threshold needs at least 3 nodes")
    if not 0.0 <= mean_delta <= 1.0:
        raise ValueError("mean strength must lie in [0, 1]")
    p = mean_delta ** 0.25
    if p == 0.0:
        return 0.0
    qs = []
    for r in range(replicates):
        g = erdos_renyi(n_remaining, p, np.random.default_rng(derive_seed(seed, "graph", r)))
        q, _ = first_quality(compute_weighted_graph(g), null_replicates,
                             derive_seed(seed, "nulls", r), derive_seed(seed, "ties", r),
                             swaps_per_edge)
        qs.append(q)
    return float(np.mean(qs))


def run_itrich(wg: WeightedGraph, policy: ThresholdPolicy | None = None, replicates: int = 50,
               master_seed: int = 0, tie_seed: int = 0,
               swaps_per_edge: int = DEFAULT_SWAPS_PER_EDGE,
               keep_curves: bool = False) -> Decomposition:
    policy = policy or ThresholdPolicy()
    n = wg.n
    assignment = np.full(n, SPARSE, dtype=np.int64)
    remaining = np.arange(n, dtype=np.int64)
    trajectory: dict[int, list[float]] = {i: [] for i in range(n)}
    clubs: list[Club] = []
    rounds: list[Round] = []
    curves: list[RhoCurve] = []
    frozen_threshold: float | None = None

    for iteration in range(1, n + 1):
        sub = wg.restrict(remaining)
        for local, node in enumerate(remaining.tolist()):
            trajectory[node].append(float(sub.delta[local]))
        total = sub.total_weight
        if sub.n < 3:
            rounds.append(Round(iteration, sub.n, total, None, None, None, False, "too_few_nodes"))
            break
        if not total > 0:
            rounds.append(Round(iteration, sub.n, total, None, None, None, False, "no_weight"))
            break

        ensemble = build_ensemble(sub, replicates, derive_seed(master_seed, "itrich", iteration),
                                  swaps_per_edge)
        curve = rho_curve(sub, ensemble, derive_seed(tie_seed, "ties", iteration))
        q = quality(curve)
        if keep_curves:
            curves.append(curve)

        if policy.kind == "fixed_fraction":
            if frozen_threshold is None:
                frozen_threshold = policy.parameter * q
            threshold = frozen_threshold
        elif policy.kind == "absolute":
            threshold = policy.parameter
        else:
            threshold = er_threshold(sub.n, float(sub.delta.mean()), policy.er_replicates,
                                     derive_seed(master_seed, "er", iteration),
                                     null_replicates=replicates, swaps_per_edge=swaps_per_edge)

        accepted = q > threshold
        log.debug("round %d: n=%d Q=%.4g threshold=%.4g M=%d %s", iteration, sub.n, q,
                  threshold, curve.argmax_n, "accepted" if accepted else "rejected")
        rounds.append(Round(iteration, sub.n, total, q, threshold, curve.argmax_n, accepted,
                            None if accepted else "below_threshold"))
        if not accepted:
            break
        members = remaining[curve.club]
        assignment[members] = len(clubs)
        clubs.append(Club(tuple(sorted(int(i) for i in members)), q, curve.argmax_n,
                          curve.rho_max, threshold))
        remaining = np.setdiff1d(remaining, members, assume_unique=True)

    sparse = frozenset(int(i) for i in np.flatnonzero(assignment == SPARSE))
    return Decomposition(
        n=n,
        clubs=tuple(clubs),
        sparse_part=sparse,
        assignment=assignment,
        delta_trajectory={i: tuple(v) for i, v in trajectory.items()},
        rounds=tuple(rounds),
        threshold_policy=policy,
        seeds={"master": master_seed, "tie": tie_seed, "swaps_per_edge": swaps_per_edge},
        replicates=replicates,
        curves=tuple(curves),
    )


def write_decomposition_json(dec: Decomposition, labels, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dec.to_json(labels), fh, indent=2, sort_keys=True)
        fh.write("\n")
