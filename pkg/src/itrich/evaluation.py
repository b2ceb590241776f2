"""Scoring against ground truth and per-node diagnostics.

Metrics that are undefined for a given input (no sparse nodes in the truth,
isolated nodes) come back as ``None`` and are written as empty CSV cells.
"""
from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .decompose import SPARSE, Decomposition
from .graph import Graph, GraphError, KShellResult
from .weights import WeightedGraph


@dataclass(frozen=True)
class ClassificationScore:
    recall: float | None
    specificity: float | None
    tp: int  # dense in truth, dense in result
    fn: int  # dense in truth, sparse in result
    fp: int  # sparse in truth, dense in result
    tn: int  # sparse in truth, sparse in result


def score(dense_truth: Iterable[int], sparse_truth: Iterable[int],
          decomposition: Decomposition) -> ClassificationScore:
    D = set(int(i) for i in dense_truth)
    ND = set(int(i) for i in sparse_truth)
    if D & ND:
        raise GraphError("truth sets overlap")
    if len(D) + len(ND) != decomposition.n or (D | ND) != set(range(decomposition.n)):
        raise GraphError("truth sets do not partition the decomposed graph")
    Dr = decomposition.dense_part
    tp = len(D & Dr)
    fn = len(D) - tp
    fp = len(ND & Dr)
    tn = len(ND) - fp
    return ClassificationScore(tp / len(D) if D else None, tn / len(ND) if ND else None,
                               tp, fn, fp, tn)


def label_entropy(g: Graph, classes: Mapping[int, str] | list, i: int) -> float | None:
    """Shannon entropy (natural log) of the classes among the neighbours of ``i``."""
    nbrs = g.neighbors(i)
    if len(nbrs) == 0:
        return None
    counts = Counter(classes[int(j)] for j in nbrs)
    d = len(nbrs)
    return 0.0 - sum((c / d) * math.log(c / d) for c in counts.values())


def neighbor_mean_delta(wg: WeightedGraph, i: int) -> float | None:
    nbrs = wg.base.neighbors(i)
    if len(nbrs) == 0:
        return None
    return float(wg.delta[nbrs].mean())


@dataclass(frozen=True)
class NodeDiagnostics:
    node: int
    label: str
    delta: float
    core_number: int
    neighbor_mean_delta: float | None
    entropy: float | None
    assignment: int


def node_diagnostics(wg: WeightedGraph, kshell: KShellResult, decomposition: Decomposition,
                     classes=None) -> list[NodeDiagnostics]:
    rows = []
    for i in range(wg.n):
        rows.append(NodeDiagnostics(
            i, wg.base.labels[i], float(wg.delta[i]), int(kshell.core_number[i]),
            neighbor_mean_delta(wg, i),
            label_entropy(wg.base, classes, i) if classes is not None else None,
            int(decomposition.assignment[i])))
    return rows


@dataclass(frozen=True)
class CoreDeltaTable:
    rows: list[tuple[int, str, int, float, bool]]  # node, label, core, delta, dense
    overlap: tuple[float, float] | None

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh)
            out.writerow(["node", "label", "core_number", "delta", "part"])
            for node, label, core, delta, dense in self.rows:
                out.writerow([node, label, core, repr(delta), "dense" if dense else "sparse"])


def core_delta_table(wg: WeightedGraph, kshell: KShellResult,
                     decomposition: Decomposition) -> CoreDeltaTable:
    """Per-node (core number, delta, dense?) plus the shared delta range.

    ``overlap`` is the interval of delta values reached by both parts,
    ``None`` when one part is empty or the ranges are disjoint.
    """
    if not (wg.n == decomposition.n == len(kshell.core_number)):
        raise GraphError("graph, k-shells and decomposition disagree on node count")
    dense = decomposition.assignment != SPARSE
    rows = [(i, wg.base.labels[i], int(kshell.core_number[i]), float(wg.delta[i]), bool(dense[i]))
            for i in range(wg.n)]
    overlap = None
    if dense.any() and (~dense).any():
        lo = max(wg.delta[dense].min(), wg.delta[~dense].min())
        hi = min(wg.delta[dense].max(), wg.delta[~dense].max())
        if lo <= hi:
            overlap = (float(lo), float(hi))
    return CoreDeltaTable(rows, overlap)


def write_assignment_csv(wg: WeightedGraph, decomposition: Decomposition,
                         kshell: KShellResult, path: str | Path) -> None:
    """``node,label,assignment,delta_initial,delta_at_removal,core_number``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["node", "label", "assignment", "delta_initial", "delta_at_removal",
                      "core_number"])
        for i in range(wg.n):
            a = int(decomposition.assignment[i])
            traj = decomposition.delta_trajectory[i]
            out.writerow([i, wg.base.labels[i], "sparse" if a == SPARSE else a,
                          repr(traj[0]) if traj else "", repr(traj[-1]) if traj else "",
                          int(kshell.core_number[i])])


def summarize(values: Iterable[float | None]) -> tuple[float | None, float | None]:
    """Mean and population std of the defined values."""
    xs = [v for v in values if v is not None]
    if not xs:
        return None, None
    return float(np.mean(xs)), float(np.std(xs))
