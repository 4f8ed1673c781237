"""Graph and dataset containers, TU-format ingestion, and derived graph structure.

Graphs are immutable (frozen dataclasses over tuples) so they can be shared
across workers and used as cache keys by the simulator. All node indices are
0-based; edges are stored as unordered pairs (i, j) with i < j.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, replace
from functools import cached_property
from math import comb
from pathlib import Path

import numpy as np

__all__ = [
    "Graph",
    "Dataset",
    "parse_tu_dataset",
    "preprocess",
    "erdos_renyi",
    "degree_histogram",
    "occupation_graph",
    "occupation_counts",
]

OCCUPATION_VERTEX_BUDGET = 100_000


@dataclass(frozen=True)
class Graph:
    """An undirected graph with optional per-node fields, edge weights,
    2D positions (micrometers), and a class label.

    ``edges`` is normalized to sorted (i, j) pairs with i < j; ``edge_weights``
    stays parallel to ``edges`` through the normalization.
    """

    id: int
    num_nodes: int
    edges: tuple[tuple[int, int], ...]
    node_fields: tuple[float, ...] | None = None
    edge_weights: tuple[float, ...] | None = None
    positions: tuple[tuple[float, float], ...] | None = None
    class_label: int | None = None

    def __post_init__(self):
        if self.num_nodes < 1:
            raise ValueError(f"graph {self.id}: needs at least one node")
        norm = []
        for k, (i, j) in enumerate(self.edges):
            if i == j:
                raise ValueError(f"graph {self.id}: self-loop on node {i}")
            if not (0 <= i < self.num_nodes and 0 <= j < self.num_nodes):
                raise ValueError(
                    f"graph {self.id}: edge ({i},{j}) endpoint out of range"
                )
            norm.append(((min(i, j), max(i, j)), k))
        norm.sort()
        pairs = tuple(p for p, _ in norm)
        if len(set(pairs)) != len(pairs):
            raise ValueError(f"graph {self.id}: duplicate edges")
        object.__setattr__(self, "edges", pairs)
        if self.edge_weights is not None:
            if len(self.edge_weights) != len(pairs):
                raise ValueError(f"graph {self.id}: edge_weights/edges length mismatch")
            w = tuple(float(self.edge_weights[k]) for _, k in norm)
            object.__setattr__(self, "edge_weights", w)
        if self.node_fields is not None and len(self.node_fields) != self.num_nodes:
            raise ValueError(f"graph {self.id}: node_fields length mismatch")
        if self.positions is not None and len(self.positions) != self.num_nodes:
            raise ValueError(f"graph {self.id}: positions length mismatch")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Per-node degree vector (edge multiplicity ignores weights)."""
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        deg.setflags(write=False)
        return deg

    @cached_property
    def neighbor_lists(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return tuple(tuple(sorted(v)) for v in nbrs)

    def weight_array(self) -> np.ndarray:
        """Edge weights J_ij in edge order; defaults to 1 when unweighted."""
        if self.edge_weights is None:
            return np.ones(len(self.edges))
        return np.asarray(self.edge_weights, dtype=float)

    def field_array(self) -> np.ndarray:
        """Node fields h_i; defaults to 0 when absent."""
        if self.node_fields is None:
            return np.zeros(self.num_nodes)
        return np.asarray(self.node_fields, dtype=float)

    def adjacency_matrix(self, weighted: bool = True) -> np.ndarray:
        a = np.zeros((self.num_nodes, self.num_nodes))
        w = self.weight_array() if weighted else np.ones(len(self.edges))
        for (i, j), wij in zip(self.edges, w):
            a[i, j] = wij
            a[j, i] = wij
        return a

    @property
    def is_weighted(self) -> bool:
        return self.edge_weights is not None


@dataclass
class Dataset:
    """An ordered collection of labeled graphs.

    Graphs keep their original class labels; ``label_map`` (original -> 0-based
    encoded, ascending original order) is attached by :func:`preprocess` so the
    filter is idempotent while consumers get contiguous labels.
    """

    name: str
    graphs: list[Graph]
    label_map: dict[int, int] | None = None

    def __len__(self) -> int:
        return len(self.graphs)

    @property
    def class_counts(self) -> dict[int, int]:
        """Count of graphs per (original) class label."""
        return dict(sorted(Counter(g.class_label for g in self.graphs).items()))

    def encoded_labels(self) -> np.ndarray:
        """Label vector re-encoded to 0..n_c-1 (ascending original order)."""
        mapping = self.label_map
        if mapping is None:
            labels = sorted({g.class_label for g in self.graphs})
            mapping = {lab: k for k, lab in enumerate(labels)}
        return np.array([mapping[g.class_label] for g in self.graphs], dtype=np.int64)


def _read_lines(path: Path) -> list[str]:
    return [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]


def parse_tu_dataset(directory: str | Path, name: str) -> Dataset:
    """Parse a TU-Dortmund-format dataset directory into a :class:`Dataset`.

    Expects ``<name>_A.txt`` (1-indexed "i, j" edge lines, each undirected edge
    usually listed in both directions), ``<name>_graph_indicator.txt``,
    ``<name>_graph_labels.txt``, and optionally ``<name>_node_attributes.txt``
    whose first two columns are taken as 2D node coordinates. Bidirectional
    listings are deduplicated; self-loop lines are ignored.
    """
    directory = Path(directory)
    paths = {
        key: directory / f"{name}_{key}.txt"
        for key in ("A", "graph_indicator", "graph_labels")
    }
    for key, p in paths.items():
        if not p.exists():
            raise FileNotFoundError(f"missing mandatory file: {p}")

    indicator = [int(x) for x in _read_lines(paths["graph_indicator"])]
    labels = [int(x) for x in _read_lines(paths["graph_labels"])]
    num_graphs = max(indicator, default=0)
    if num_graphs != len(labels) or sorted(set(indicator)) != list(
        range(1, num_graphs + 1)
    ):
        raise ValueError(
            f"{name}: graph_indicator ids and graph_labels are inconsistent "
            f"({num_graphs} indicated vs {len(labels)} labels)"
        )

    # global (1-indexed) node id -> (graph id, local 0-based index)
    local_index: dict[int, tuple[int, int]] = {}
    sizes = Counter(indicator)
    running = Counter()
    for node, gid in enumerate(indicator, start=1):
        local_index[node] = (gid, running[gid])
        running[gid] += 1

    edges: dict[int, set[tuple[int, int]]] = {g: set() for g in range(1, num_graphs + 1)}
    for lineno, line in enumerate(_read_lines(paths["A"]), start=1):
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"{paths['A']}:{lineno}: expected 'i, j', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u not in local_index or v not in local_index:
            raise ValueError(f"{paths['A']}:{lineno}: edge references unknown node")
        (gu, lu), (gv, lv) = local_index[u], local_index[v]
        if gu != gv:
            raise ValueError(
                f"{paths['A']}:{lineno}: edge crosses graphs {gu} and {gv}"
            )
        if lu == lv:
            continue  # self-loop line: not representable, skip
        edges[gu].add((min(lu, lv), max(lu, lv)))

    positions: dict[int, list[tuple[float, float]]] | None = None
    attr_path = directory / f"{name}_node_attributes.txt"
    if attr_path.exists():
        rows = [
            [float(x) for x in ln.replace(",", " ").split()]
            for ln in _read_lines(attr_path)
        ]
        if len(rows) != len(indicator):
            raise ValueError(f"{attr_path}: one line per node expected")
        if all(len(r) >= 2 for r in rows):
            positions = {g: [] for g in range(1, num_graphs + 1)}
            for (gid, _), row in zip(
                (local_index[n] for n in range(1, len(indicator) + 1)), rows
            ):
                positions[gid].append((row[0], row[1]))

    graphs = []
    for gid in range(1, num_graphs + 1):
        if sizes[gid] == 0:
            raise ValueError(f"{name}: graph {gid} has zero nodes")
        graphs.append(
            Graph(
                id=gid,
                num_nodes=sizes[gid],
                edges=tuple(sorted(edges[gid])),
                positions=tuple(positions[gid]) if positions else None,
                class_label=labels[gid - 1],
            )
        )
    return Dataset(name=name, graphs=graphs)


def preprocess(
    dataset: Dataset, max_nodes: int, keep_classes: set[int] | None = None
) -> Dataset:
    """Retain graphs with 1 <= N <= max_nodes (and label in ``keep_classes``
    when given), preserving order.

    Filtering operates on original class labels, so applying the same call
    twice is a no-op; the contiguous 0-based re-encoding is recorded in
    ``label_map`` rather than rewritten onto the graphs.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be >= 1")
    kept = [
        g
        for g in dataset.graphs
        if g.num_nodes <= max_nodes
        and (keep_classes is None or g.class_label in keep_classes)
    ]
    if not kept:
        raise ValueError(
            f"{dataset.name}: preprocessing left no graphs "
            f"(max_nodes={max_nodes}, keep_classes={keep_classes})"
        )
    labels = sorted({g.class_label for g in kept})
    return Dataset(
        name=dataset.name,
        graphs=kept,
        label_map={lab: k for k, lab in enumerate(labels)},
    )


def erdos_renyi(n: int, rho: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, rho) graph: each of the C(n,2) pairs is an edge
    independently with probability rho, drawn from a generator seeded with
    ``seed`` (which also becomes the graph id)."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must be a probability")
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    draws = rng.random(len(pairs))
    edges = tuple(p for p, u in zip(pairs, draws) if u < rho)
    return Graph(id=seed, num_nodes=n, edges=edges)


def degree_histogram(graph: Graph) -> np.ndarray:
    """Histogram m(κ) of node degrees, indexed κ = 0..N-1."""
    return np.bincount(graph.degrees, minlength=graph.num_nodes)


def _config_masks(n: int, k: int) -> list[int]:
    """All n-choose-k occupation bitmasks, ascending (bit 0 of the string is
    the most significant bit of the mask, matching the simulator's basis
    ordering), i.e. lexicographic in the bitstring."""
    masks = [
        sum(1 << (n - 1 - i) for i in combo)
        for combo in itertools.combinations(range(n), k)
    ]
    masks.sort()
    return masks


def occupation_graph(
    graph: Graph, n: int, max_vertices: int = OCCUPATION_VERTEX_BUDGET
) -> Graph:
    """Build the configuration graph whose vertices are the C(N,n) placements
    of n indistinguishable particles on the input graph's nodes, with an edge
    whenever two placements differ by one particle hopping along an input
    edge (the hop target must be empty).

    Vertices are ordered lexicographically by occupation bitstring.
    """
    N = graph.num_nodes
    if not 0 < n < N:
        raise ValueError(f"occupation number must satisfy 0 < n < N, got {n}")
    if comb(N, n) > max_vertices:
        raise ValueError(
            f"occupation graph would have {comb(N, n)} vertices "
            f"(budget {max_vertices})"
        )
    masks = _config_masks(N, n)
    index = {m: v for v, m in enumerate(masks)}
    bit = [1 << (N - 1 - i) for i in range(N)]
    out = set()
    for v, m in enumerate(masks):
        for i, j in graph.edges:
            if bool(m & bit[i]) != bool(m & bit[j]):
                w = index[m ^ (bit[i] | bit[j])]
                out.add((min(v, w), max(v, w)))
    return Graph(id=graph.id, num_nodes=len(masks), edges=tuple(sorted(out)))


def occupation_counts(graph: Graph, n: int) -> tuple[int, int, float]:
    """Closed-form (vertices, edges, density) of the n-particle configuration
    graph, without building it.

    Edges count configurations of the other n-1 particles on the N-2 sites
    away from a hopping edge: M·C(N-2, n-1). (The naive M·C(N-1, n-1) count
    ignores that a hop onto an occupied site is forbidden; enumeration
    confirms the corrected form — see tests.)
    """
    N, M = graph.num_nodes, graph.num_edges
    if not 0 < n < N:
        raise ValueError(f"occupation number must satisfy 0 < n < N, got {n}")
    v = comb(N, n)
    e = M * comb(N - 2, n - 1) if N >= 2 else 0
    density = 2.0 * e / (v * (v - 1)) if v > 1 else 0.0
    return v, e, density


def relabeled(graph: Graph, perm: list[int] | np.ndarray, new_id: int | None = None) -> Graph:
    """Graph with node i renamed perm[i] (a permutation of range(N))."""
    perm = list(perm)
    if sorted(perm) != list(range(graph.num_nodes)):
        raise ValueError("perm must be a permutation of range(num_nodes)")
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return replace(
        graph,
        id=graph.id if new_id is None else new_id,
        edges=tuple((perm[i], perm[j]) for i, j in graph.edges),
        node_fields=tuple(graph.node_fields[inv[k]] for k in range(graph.num_nodes))
        if graph.node_fields
        else None,
        positions=tuple(graph.positions[inv[k]] for k in range(graph.num_nodes))
        if graph.positions
        else None,
    )
