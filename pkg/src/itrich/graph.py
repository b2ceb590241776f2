"""Simple undirected graphs with dense integer ids, edge-list I/O and k-shells."""
from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import _kernels

log = logging.getLogger(__name__)


class GraphError(ValueError):
    """Malformed graph input (bad edge list, self-loop, unknown node)."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph on nodes ``0..n-1``.

    ``edges`` holds each edge once as ``(lo, hi)``, rows sorted
    lexicographically.  ``labels`` are the external node tokens.
    """

    n: int
    edges: np.ndarray
    labels: tuple[str, ...]
    node_attrs: Mapping[int, str] | None = None
    indptr: np.ndarray = field(init=False, repr=False)
    indices: np.ndarray = field(init=False, repr=False)
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = int(self.n)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if len(self.labels) != n:
            raise GraphError(f"expected {n} labels, got {len(self.labels)}")
        if len(edges):
            if edges.min() < 0 or edges.max() >= n:
                raise GraphError("edge endpoint outside 0..n-1")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise GraphError("self-loops are not allowed")
            edges = np.sort(edges, axis=1)
            edges = np.unique(edges, axis=0)
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((dst, src))
        degrees = np.bincount(src, minlength=n).astype(np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degrees, out=indptr[1:])
        indices = dst[order].astype(np.int64)
        for arr in (edges, indptr, indices, degrees):
            arr.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "degrees", degrees)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, labels: Iterable[str] | None = None,
                   node_attrs: Mapping[int, str] | None = None) -> "Graph":
        edges = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                           dtype=np.int64).reshape(-1, 2)
        if labels is None:
            labels = [str(i) for i in range(n)]
        return cls(n, edges, tuple(labels), node_attrs)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> np.ndarray:
        self._check(i)
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        row = self.neighbors(i)
        k = np.searchsorted(row, j)
        return bool(k < len(row) and row[k] == j)

    def index_of(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise GraphError(f"unknown node label {label!r}") from None

    @property
    def _label_index(self) -> dict[str, int]:
        cache = self.__dict__.get("_label_cache")
        if cache is None:
            cache = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_label_cache", cache)
        return cache

    def _check(self, i: int) -> None:
        if not (0 <= int(i) < self.n):
            raise GraphError(f"unknown node {i}")

    def edge_index(self) -> dict[tuple[int, int], int]:
        """Map ``(lo, hi)`` to the row of that edge in ``edges``."""
        return {(int(a), int(b)): k for k, (a, b) in enumerate(self.edges)}

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# ---------------------------------------------------------------------------
# queries
# ---------------------------------------------------------------------------

def degree(g: Graph, i: int) -> int:
    g._check(i)
    return int(g.degrees[i])


def common_neighbors(g: Graph, i: int, j: int) -> int:
    """Number of nodes adjacent to both ``i`` and ``j``."""
    g._check(i)
    g._check(j)
    if i == j:
        raise GraphError("common_neighbors needs two distinct nodes")
    return len(np.intersect1d(g.neighbors(i), g.neighbors(j), assume_unique=True))


def induced_subgraph(g: Graph, keep: Iterable[int]) -> tuple[Graph, np.ndarray]:
    """Subgraph induced by ``keep``.

    Returns the subgraph (renumbered ``0..k-1`` in increasing original id)
    and the array mapping new ids to original ids.  Labels and attributes
    follow their nodes.
    """
    keep = np.unique(np.asarray(list(keep) if not isinstance(keep, np.ndarray) else keep,
                                dtype=np.int64))
    if len(keep) and (keep[0] < 0 or keep[-1] >= g.n):
        raise GraphError("induced_subgraph: node outside the graph")
    new_id = np.full(g.n, -1, dtype=np.int64)
    new_id[keep] = np.arange(len(keep))
    mask = edge_mask(g, keep)
    sub_edges = new_id[g.edges[mask]]
    labels = tuple(g.labels[i] for i in keep)
    attrs = None
    if g.node_attrs is not None:
        attrs = {int(new_id[i]): a for i, a in g.node_attrs.items() if new_id[i] >= 0}
    return Graph(len(keep), sub_edges, labels, attrs), keep


def edge_mask(g: Graph, keep) -> np.ndarray:
    """Boolean mask over ``g.edges`` of edges with both ends in ``keep``."""
    inside = np.zeros(g.n, dtype=bool)
    inside[np.asarray(keep, dtype=np.int64)] = True
    return inside[g.edges[:, 0]] & inside[g.edges[:, 1]]


# ---------------------------------------------------------------------------
# k-shells
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KShellResult:
    core_number: np.ndarray
    shells: dict[int, frozenset[int]]

    def k_core(self, k: int) -> frozenset[int]:
        return frozenset(int(i) for i in np.flatnonzero(self.core_number >= k))


def k_shell_decomposition(g: Graph) -> KShellResult:
    core = np.asarray(_kernels.core_numbers(g.n, g.indptr, g.indices), dtype=np.int64)
    shells: dict[int, set[int]] = {}
    for i, k in enumerate(core.tolist()):
        shells.setdefault(k, set()).add(i)
    return KShellResult(core, {k: frozenset(v) for k, v in sorted(shells.items())})


# ---------------------------------------------------------------------------
# I/O
# ---------------------------------------------------------------------------

_SPLIT = {"whitespace": re.compile(r"\s+"), "csv": re.compile(r"\s*,\s*")}


def load_edge_list(path: str | Path, format: str = "whitespace") -> Graph:
    """Read a two-column edge list.

    Tokens are opaque strings numbered in order of first appearance.  Lines
    that are blank or start with ``#`` are skipped; repeated and reversed
    edges collapse to one undirected edge; self-loops raise ``GraphError``.
    Columns after the second (e.g. weights) are ignored.
    """
    if format not in _SPLIT:
        raise GraphError(f"unknown edge-list format {format!r}")
    splitter = _SPLIT[format]
    ids: dict[str, int] = {}
    pairs: list[tuple[int, int]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("%"):
                continue
            tokens = [t for t in splitter.split(line) if t]
            if len(tokens) < 2:
                raise GraphError(f"{path}:{lineno}: expected two node tokens, got {line!r}")
            a, b = tokens[0], tokens[1]
            if a == b:
                raise GraphError(f"{path}:{lineno}: self-loop on node {a!r}")
            ia = ids.setdefault(a, len(ids))
            ib = ids.setdefault(b, len(ids))
            pairs.append((ia, ib))
    g = Graph.from_edges(len(ids), pairs, list(ids))
    if len(pairs) != g.m:
        log.info("%s: collapsed %d duplicate edge lines", path, len(pairs) - g.m)
    return g


def save_edge_list(g: Graph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in g.edges.tolist():
            fh.write(f"{g.labels[a]} {g.labels[b]}\n")


def load_attributes(g: Graph, path: str | Path) -> Graph:
    """Attach a ``node,attribute`` CSV to ``g`` (header line optional)."""
    attrs: dict[int, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].startswith("#"):
                continue
            if len(row) < 2:
                raise GraphError(f"{path}:{lineno}: expected node,attribute")
            label, value = row[0].strip(), row[1].strip()
            if label not in g._label_index:
                if lineno == 1:
                    continue  # header
                raise GraphError(f"{path}:{lineno}: unknown node {label!r}")
            attrs[g.index_of(label)] = value
    return Graph(g.n, g.edges, g.labels, attrs)
