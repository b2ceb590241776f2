"""Synthetic graphs: the block/tree toy model, tree-structured planted
partitions with their closed-form block statistics, and noise augmentation.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree

from . import _kernels
from .graph import Graph, GraphError
from .weights import compute_weighted_graph

log = logging.getLogger(__name__)

TREE = "tree"
DENSE = "D"
NOISE = "ND"


def _bernoulli_pairs_within(size: int, p: float, gen: np.random.Generator) -> np.ndarray:
    iu, ju = np.triu_indices(size, k=1)
    keep = gen.random(len(iu)) < p
    return np.column_stack([iu[keep], ju[keep]])


def _bernoulli_pairs_between(size_a: int, size_b: int, p: float,
                             gen: np.random.Generator) -> np.ndarray:
    hits = np.flatnonzero(gen.random(size_a * size_b) < p)
    return np.column_stack([hits // size_b, hits % size_b])


# ---------------------------------------------------------------------------
# block + tree toy model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ToySpec:
    block_sizes: tuple[int, ...]
    block_probs: tuple[float, ...]
    tree_size: int
    attach_probs: tuple[float, ...] | str = "auto"
    seed: int = 0

    def __post_init__(self):
        if len(self.block_sizes) != len(self.block_probs):
            raise ValueError("block_sizes and block_probs differ in length")
        if any(not 0.0 <= p <= 1.0 for p in self.block_probs):
            raise ValueError("block probabilities must lie in [0, 1]")
        if self.attach_probs != "auto":
            if len(self.attach_probs) != len(self.block_sizes):
                raise ValueError("one attachment probability per block")
            if any(not 0.0 <= p <= 1.0 for p in self.attach_probs):
                raise ValueError("attachment probabilities must lie in [0, 1]")

    @property
    def block_count(self) -> int:
        return len(self.block_sizes)

    def resolved_attach_probs(self) -> tuple[float, ...]:
        if self.attach_probs != "auto":
            return tuple(self.attach_probs)
        total = sum(self.block_sizes)
        return tuple(size / (self.tree_size * total) for size in self.block_sizes)

    def expected_tree_links(self) -> float:
        """Mean number of tree-to-block links."""
        return sum(self.tree_size * size * p
                   for size, p in zip(self.block_sizes, self.resolved_attach_probs()))

    @classmethod
    def paper(cls, seed: int = 0) -> "ToySpec":
        """Four blocks of 50 (P = 0.8, 0.6, 0.4, 0.2) and a 100-node tree."""
        return cls((50, 50, 50, 50), (0.8, 0.6, 0.4, 0.2), 100, "auto", seed)


def random_tree(size: int, gen: np.random.Generator) -> np.ndarray:
    """Random spanning tree of a connected G(size, 2 ln(size) / size)."""
    if size < 2:
        return np.zeros((0, 2), dtype=np.int64)
    p = min(1.0, 2.0 * math.log(size) / size)
    while True:
        pairs = _bernoulli_pairs_within(size, p, gen)
        w = gen.random(len(pairs)) + 1.0
        adj = coo_matrix((w, (pairs[:, 0], pairs[:, 1])), shape=(size, size)).tocsr()
        ncomp, _ = connected_components(adj, directed=False)
        if ncomp == 1:
            break
        log.debug("tree seed graph disconnected (%d parts); redrawing", ncomp)
    mst = minimum_spanning_tree(adj).tocoo()
    return np.column_stack([mst.row, mst.col]).astype(np.int64)


def generate_toy(spec: ToySpec) -> tuple[Graph, list[str]]:
    """Blocks first (``block0`` ...), then the tree nodes (``tree``)."""
    gen = np.random.default_rng(spec.seed)
    offsets = np.concatenate([[0], np.cumsum(spec.block_sizes)]).astype(np.int64)
    tree_start = int(offsets[-1])
    n = tree_start + spec.tree_size
    parts = []
    truth: list[str] = []
    for b, (size, p) in enumerate(zip(spec.block_sizes, spec.block_probs)):
        parts.append(_bernoulli_pairs_within(size, p, gen) + offsets[b])
        truth += [f"block{b}"] * size
    parts.append(random_tree(spec.tree_size, gen) + tree_start)
    truth += [TREE] * spec.tree_size
    for b, (size, pt) in enumerate(zip(spec.block_sizes, spec.resolved_attach_probs())):
        pairs = _bernoulli_pairs_between(spec.tree_size, size, pt, gen)
        parts.append(np.column_stack([pairs[:, 0] + tree_start, pairs[:, 1] + offsets[b]]))
    if spec.expected_tree_links() < 10.0:
        warnings.warn(f"toy model: only {spec.expected_tree_links():.3g} expected tree-block "
                      "links; the graph is likely disconnected", RuntimeWarning, stacklevel=2)
    g = Graph.from_edges(n, np.concatenate(parts) if parts else np.zeros((0, 2)))
    return g, truth


# ---------------------------------------------------------------------------
# planted partition on a tree of blocks
# ---------------------------------------------------------------------------

def rooted_tree_adjacency(depth: int = 3) -> np.ndarray:
    """Complete binary tree of the given depth (root has 2 children, inner nodes degree 3)."""
    r = 2 ** (depth + 1) - 1
    B = np.zeros((r, r), dtype=np.int64)
    for parent in range(r):
        for child in (2 * parent + 1, 2 * parent + 2):
            if child < r:
                B[parent, child] = B[child, parent] = 1
    return B


PRESETS = {"rooted-depth3": lambda: rooted_tree_adjacency(3)}


def check_tree(B: np.ndarray) -> None:
    B = np.asarray(B)
    r = B.shape[0]
    if B.shape != (r, r) or not np.array_equal(B, B.T) or np.any(np.diag(B) != 0):
        raise GraphError("block adjacency must be square, symmetric and loop-free")
    if not np.isin(B, (0, 1)).all():
        raise GraphError("block adjacency must be 0/1")
    if r > 1:
        if B.sum() // 2 != r - 1 or connected_components(B, directed=False)[0] != 1:
            raise GraphError("block adjacency is not a tree")


@dataclass(frozen=True)
class PPMTreeSpec:
    block_size: int
    p_intra: float
    q_adjacent: float
    tree_adjacency: np.ndarray | str = "rooted-depth3"
    seed: int = 0
    B: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0 <= self.p_intra <= 1 and 0 <= self.q_adjacent <= 1):
            raise ValueError("p and q must lie in [0, 1]")
        if isinstance(self.tree_adjacency, str):
            try:
                B = PRESETS[self.tree_adjacency]()
            except KeyError:
                raise ValueError(f"unknown preset {self.tree_adjacency!r}") from None
        else:
            B = np.asarray(self.tree_adjacency, dtype=np.int64)
        check_tree(B)
        object.__setattr__(self, "B", B)

    @property
    def block_count(self) -> int:
        return self.B.shape[0]

    def adjacent_blocks(self, block: int) -> int:
        return int(self.B[block].sum())

    @classmethod
    def paper(cls, seed: int = 0) -> "PPMTreeSpec":
        return cls(100, 0.85, 0.65, "rooted-depth3", seed)


def generate_ppm_tree(spec: PPMTreeSpec) -> tuple[Graph, np.ndarray]:
    """Sample the planted partition; returns the graph and each node's block."""
    gen = np.random.default_rng(spec.seed)
    n, r = spec.block_size, spec.block_count
    parts = []
    for a in range(r):
        parts.append(_bernoulli_pairs_within(n, spec.p_intra, gen) + a * n)
        for b in range(a + 1, r):
            if spec.B[a, b]:
                pairs = _bernoulli_pairs_between(n, n, spec.q_adjacent, gen)
                parts.append(np.column_stack([pairs[:, 0] + a * n, pairs[:, 1] + b * n]))
    blocks = np.repeat(np.arange(r), n)
    return Graph.from_edges(n * r, np.concatenate(parts)), blocks


def ppm_expected_degree(spec: PPMTreeSpec, block: int) -> float:
    return spec.block_size * (spec.p_intra + spec.q_adjacent * spec.adjacent_blocks(block))


def ppm_expected_clustering(spec: PPMTreeSpec, block: int) -> float:
    p, q, K = spec.p_intra, spec.q_adjacent, spec.adjacent_blocks(block)
    return p * (p ** 2 + 3 * q ** 2 * K) / (p + q * K) ** 2


def ppm_expected_delta(spec: PPMTreeSpec, block: int) -> float:
    p, q, r = spec.p_intra, spec.q_adjacent, spec.block_count
    K = spec.B.sum(axis=1)
    Ki = K[block]
    cross = sum((p + q * K[j]) / (p + q * (Ki + K[j]) / 2.0)
                for j in np.flatnonzero(spec.B[block]))
    return p * (p + q * Ki) / r ** 3 * (p ** 2 + q ** 2 * Ki + 2 * q ** 2 * cross)


def block_types(spec: PPMTreeSpec) -> list[tuple]:
    """Signature of each block: its own degree and its neighbours' degrees.

    Blocks with equal signatures share every closed-form statistic.
    """
    K = spec.B.sum(axis=1)
    return [(int(K[b]), tuple(sorted(int(K[j]) for j in np.flatnonzero(spec.B[b]))))
            for b in range(spec.block_count)]


def local_clustering(g: Graph) -> np.ndarray:
    """Local clustering coefficient per node (0 below degree 2)."""

    if g.m == 0:
        return np.zeros(g.n)
    shared = _kernels.common_neighbors(g.n, g.edges, g.indptr, g.indices).astype(float)
    tri2 = (np.bincount(g.edges[:, 0], weights=shared, minlength=g.n)
            + np.bincount(g.edges[:, 1], weights=shared, minlength=g.n))
    d = g.degrees.astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(d > 1, tri2 / (d * (d - 1)), 0.0)


# ---------------------------------------------------------------------------
# noise augmentation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseSpec:
    base: Graph
    noise_count: int
    gap_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.gap_fraction <= 1.0:
            raise ValueError("gap fraction r must lie in [0, 1]")
        if self.noise_count < 0:
            raise ValueError("noise_count must be >= 0")
        if self.base.n < 3:
            raise ValueError("base graph needs at least 3 nodes")


@dataclass(frozen=True, eq=False)
class NoiseResult:
    graph: Graph
    truth: list[str]
    initial_gap: float | None
    final_gap: float | None
    target_gap: float | None
    added_links: int


def _gap(delta: np.ndarray, n_base: int) -> float:
    return float(delta[:n_base].min() - delta[n_base:].max())


def augment_with_noise(spec: NoiseSpec) -> NoiseResult:
    """Attach ``noise_count`` low-strength nodes to ``base``, then narrow the gap.

    Each noise node draws a degree from the base degree sequence (with
    replacement) and links to that many distinct existing nodes chosen with
    probability proportional to their current degree.  The strength gap
    ``g0 = min(base) - max(noise)`` is then closed to ``g0 * (1 - r)`` by
    adding random noise-noise links in batches of ``max(1, noise_count // 10)``.
    """
    base = spec.base
    nb, nn = base.n, spec.noise_count
    truth = [DENSE] * nb + [NOISE] * nn
    if nn == 0:
        return NoiseResult(base, truth, None, None, None, 0)
    gen = np.random.default_rng(spec.seed)
    degrees = np.zeros(nb + nn, dtype=np.int64)
    degrees[:nb] = base.degrees
    wanted = gen.choice(base.degrees, size=nn, replace=True)
    new_edges = []
    for k in range(nn):
        node = nb + k
        pool = np.flatnonzero(degrees[:node] > 0)
        want = min(int(wanted[k]), len(pool))
        if want == 0:
            continue
        prob = degrees[pool] / degrees[pool].sum()
        targets = gen.choice(pool, size=want, replace=False, p=prob)
        for t in targets.tolist():
            new_edges.append((t, node))
        degrees[targets] += 1
        degrees[node] += want
    labels = list(base.labels) + [f"noise{k}" for k in range(nn)]
    edges = np.concatenate([base.edges, np.asarray(new_edges, dtype=np.int64).reshape(-1, 2)])
    g = Graph.from_edges(nb + nn, edges, labels)

    delta = compute_weighted_graph(g).delta
    g0 = _gap(delta, nb)
    target = g0 * (1.0 - spec.gap_fraction)
    added = 0
    if spec.gap_fraction > 0:
        if g0 <= 0:
            warnings.warn(f"no strength gap to close (g0 = {g0:.3g})", RuntimeWarning, stacklevel=2)
        else:
            batch = max(1, nn // 10)
            present = {(int(a), int(b)) for a, b in g.edges.tolist() if b >= nb and a >= nb}
            free = nn * (nn - 1) // 2 - len(present)
            gap = g0
            while gap > target:
                if free <= 0:
                    warnings.warn("noise subgraph is complete; gap cannot be closed further",
                                  RuntimeWarning, stacklevel=2)
                    break
                fresh = []
                while len(fresh) < min(batch, free):
                    a, b = gen.integers(nb, nb + nn, size=2)
                    if a == b:
                        continue
                    pair = (int(min(a, b)), int(max(a, b)))
                    if pair in present:
                        continue
                    present.add(pair)
                    fresh.append(pair)
                free -= len(fresh)
                added += len(fresh)
                edges = np.concatenate([g.edges, np.asarray(fresh, dtype=np.int64)])
                g = Graph.from_edges(nb + nn, edges, labels)
                gap = _gap(compute_weighted_graph(g).delta, nb)
    final = _gap(compute_weighted_graph(g).delta, nb) if added else g0
    return NoiseResult(g, truth, g0, final, target, added)
