"""Classical baseline graph kernels: geometric random walks and graphlets.

Both baselines ignore node/edge attributes and look only at topology. The
random-walk kernel counts weighted walks on the direct-product graph via a
single linear solve; the graphlet kernel compares frequency vectors of
induced k-node subgraph shapes, classified by an exact brute-force canonical
form (k ≤ 6, so at most 720 orderings per shape — and shapes repeat, so a
small cache absorbs nearly all of them).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .graphs import Graph
from .kernels import KernelMatrix

__all__ = [
    "GraphletFeatures",
    "random_walk_kernel",
    "random_walk_gram",
    "graphlet_features",
    "graphlet_kernel",
    "graphlet_gram",
]

DENSE_PRODUCT_LIMIT = 2000  # vertices; above this the solve goes sparse CG
GRAPHLET_SIZES = (3, 4, 5, 6)


@dataclass(frozen=True)
class GraphletFeatures:
    """Normalized frequencies of canonical induced-subgraph shapes."""

    graphlet_size: int
    counts: dict

    def __post_init__(self):
        if self.graphlet_size not in GRAPHLET_SIZES:
            raise ValueError(f"graphlet size must be one of {GRAPHLET_SIZES}")
        total = sum(self.counts.values())
        if self.counts and abs(total - 1.0) > 1e-9:
            raise ValueError(f"frequencies sum to {total}, not 1")

    def dot(self, other: "GraphletFeatures") -> float:
        if self.graphlet_size != other.graphlet_size:
            raise ValueError("cannot compare graphlets of different sizes")
        shared = self.counts.keys() & other.counts.keys()
        return float(sum(self.counts[c] * other.counts[c] for c in shared))


@lru_cache(maxsize=4096)
def _spectral_radius(graph: Graph) -> float:
    """Largest adjacency eigenvalue (non-negative by Perron–Frobenius)."""
    if graph.num_edges == 0:
        return 0.0
    a = graph.adjacency_matrix(weighted=False)
    if graph.num_nodes <= 1000:
        return float(np.linalg.eigvalsh(a)[-1])
    top = scipy.sparse.linalg.eigsh(
        scipy.sparse.csr_matrix(a), k=1, which="LA", return_eigenvectors=False
    )
    return float(top[0])


def random_walk_kernel(g1: Graph, g2: Graph, lam: float) -> float:
    """Geometric random-walk kernel e^T (I − λ A_×)^{-1} e.

    A_× is the adjacency of the direct product graph (vertex pairs, edges
    where both projections are edges). Convergence requires
    λ < 1/(λ_max(A₁)·λ_max(A₂)); outside that range the series diverges and
    the call raises rather than returning a meaningless solve.
    """
    if lam <= 0:
        raise ValueError("walk weight must be positive")
    bound = _spectral_radius(g1) * _spectral_radius(g2)
    if bound > 0 and lam >= 1.0 / bound:
        raise ValueError(
            f"walk weight {lam} outside convergence range (need < {1.0 / bound:.6g})"
        )
    n = g1.num_nodes * g2.num_nodes
    if n <= DENSE_PRODUCT_LIMIT:
        a = np.kron(
            g1.adjacency_matrix(weighted=False), g2.adjacency_matrix(weighted=False)
        )
        x = np.linalg.solve(np.eye(n) - lam * a, np.ones(n))
        return float(x.sum())
    a = scipy.sparse.kron(
        scipy.sparse.csr_matrix(g1.adjacency_matrix(weighted=False)),
        scipy.sparse.csr_matrix(g2.adjacency_matrix(weighted=False)),
        format="csr",
    )
    system = scipy.sparse.identity(n, format="csr") - lam * a
    x, info = scipy.sparse.linalg.cg(system, np.ones(n), rtol=1e-10, atol=0.0)
    if info != 0:
        raise RuntimeError(f"conjugate gradient failed to converge (info={info})")
    return float(x.sum())


def random_walk_gram(graphs: list[Graph], lam: float) -> KernelMatrix:
    """Pairwise random-walk kernel matrix (including diagonal self-kernels)."""
    n = len(graphs)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            values[i, j] = values[j, i] = random_walk_kernel(graphs[i], graphs[j], lam)
    return KernelMatrix(graph_ids=tuple(g.id for g in graphs), values=values)


@lru_cache(maxsize=8)
def _pair_index(k: int):
    """Upper-triangle pair list for k nodes and the permutation source table.

    Row p of the table maps each pair position t to the position holding the
    bit of the permuted pair, so a shape's orbit under relabeling is just a
    fancy-indexing gather.
    """
    pairs = list(itertools.combinations(range(k), 2))
    pos = {pair: t for t, pair in enumerate(pairs)}
    perms = list(itertools.permutations(range(k)))
    src = np.empty((len(perms), len(pairs)), dtype=np.int64)
    for pi, perm in enumerate(perms):
        for t, (i, j) in enumerate(pairs):
            a, b = perm[i], perm[j]
            src[pi, t] = pos[(a, b) if a < b else (b, a)]
    return pairs, src


_canonical_cache: dict = {}


def _canonical_form(raw: int, k: int) -> int:
    """Minimum bit-pattern over all k! orderings of a k-node shape."""
    key = (k, raw)
    cached = _canonical_cache.get(key)
    if cached is not None:
        return cached
    pairs, src = _pair_index(k)
    m = len(pairs)
    bits = np.array([(raw >> t) & 1 for t in range(m)], dtype=np.int64)
    powers = np.left_shift(1, np.arange(m, dtype=np.int64))
    canon = int((bits[src] @ powers).min())
    _canonical_cache[key] = canon
    return canon


def _subset_patterns(graph: Graph, subsets: np.ndarray, k: int) -> np.ndarray:
    """Raw adjacency bit-pattern of each induced k-subset."""
    a = graph.adjacency_matrix(weighted=False).astype(bool)
    pairs, _ = _pair_index(k)
    ai = subsets[:, [p[0] for p in pairs]]
    bj = subsets[:, [p[1] for p in pairs]]
    bits = a[ai, bj].astype(np.int64)
    powers = np.left_shift(1, np.arange(len(pairs), dtype=np.int64))
    return bits @ powers


def graphlet_features(
    graph: Graph, k: int, samples: int = 1000, seed: int | np.random.Generator = 0
) -> GraphletFeatures:
    """Frequencies of canonical k-node induced subgraph shapes.

    Node subsets are drawn uniformly with replacement; when the graph has no
    more than ``samples`` subsets in total the count is exhaustive instead
    (every subset exactly once), which also makes the result seed-independent
    and invariant under node relabeling.
    """
    if k not in GRAPHLET_SIZES:
        raise ValueError(f"graphlet size must be one of {GRAPHLET_SIZES}")
    if k > graph.num_nodes:
        raise ValueError(
            f"cannot draw {k}-node subgraphs from a {graph.num_nodes}-node graph"
        )
    if samples < 1:
        raise ValueError("need at least one sample")
    n = graph.num_nodes
    if math.comb(n, k) <= samples:
        subsets = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        subsets = np.argsort(rng.random((samples, n)), axis=1)[:, :k]
    raws = _subset_patterns(graph, subsets, k)
    tally = Counter(_canonical_form(int(r), k) for r in raws)
    total = len(raws)
    counts = {form: cnt / total for form, cnt in sorted(tally.items())}
    return GraphletFeatures(graphlet_size=k, counts=counts)


def graphlet_kernel(
    g1: Graph, g2: Graph, k: int, samples: int = 1000, seed: int = 0
) -> float:
    """Dot product of the two graphs' graphlet frequency vectors.

    Each graph gets an independent sampling stream derived from ``seed``.
    """
    s1, s2 = np.random.SeedSequence(seed).spawn(2)
    f1 = graphlet_features(g1, k, samples, np.random.default_rng(s1))
    f2 = graphlet_features(g2, k, samples, np.random.default_rng(s2))
    return f1.dot(f2)


def graphlet_gram(
    graphs: list[Graph], k: int, samples: int = 1000, seed: int = 0
) -> KernelMatrix:
    """Graphlet kernel matrix, computing each graph's features exactly once.

    Graphs with fewer than k nodes cannot contain any k-node subgraph; they
    get an identically zero feature vector (zero kernel row) instead of an
    error, so mixed-size benchmark datasets remain usable.
    """
    seeds = np.random.SeedSequence(seed).spawn(len(graphs))
    feats: list[GraphletFeatures | None] = []
    for g, s in zip(graphs, seeds):
        if g.num_nodes < k:
            feats.append(None)
        else:
            feats.append(graphlet_features(g, k, samples, np.random.default_rng(s)))
    n = len(graphs)
    values = np.zeros((n, n))
    for i in range(n):
        if feats[i] is None:
            continue
        for j in range(i, n):
            if feats[j] is None:
                continue
            values[i, j] = values[j, i] = feats[i].dot(feats[j])
    return KernelMatrix(graph_ids=tuple(g.id for g in graphs), values=values)
