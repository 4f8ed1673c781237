"""Small graph constructors and a TU-format dataset writer shared by tests."""

from __future__ import annotations

from pathlib import Path

from qekernel import Graph

# (num_nodes, edges, label, node_attrs) per graph; attrs optional.
TuGraph = tuple[int, list[tuple[int, int]], int]


def path_graph(n: int, graph_id: int = 0, **kwargs) -> Graph:
    return Graph(
        id=graph_id,
        num_nodes=n,
        edges=tuple((i, i + 1) for i in range(n - 1)),
        **kwargs,
    )


def ring_graph(n: int, graph_id: int = 0, **kwargs) -> Graph:
    edges = [(i, (i + 1) % n) for i in range(n)]
    return Graph(id=graph_id, num_nodes=n, edges=tuple(edges), **kwargs)


def complete_graph(n: int, graph_id: int = 0, **kwargs) -> Graph:
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    return Graph(id=graph_id, num_nodes=n, edges=edges, **kwargs)


def star_graph(leaves: int, graph_id: int = 0, **kwargs) -> Graph:
    """Hub node 0 connected to ``leaves`` spokes."""
    return Graph(
        id=graph_id,
        num_nodes=leaves + 1,
        edges=tuple((0, i) for i in range(1, leaves + 1)),
        **kwargs,
    )


def edgeless_graph(n: int, graph_id: int = 0, **kwargs) -> Graph:
    return Graph(id=graph_id, num_nodes=n, edges=(), **kwargs)


def write_tu_dataset(
    root: Path,
    name: str,
    graphs: list[TuGraph],
    node_attrs: list[list[tuple[float, float]]] | None = None,
) -> Path:
    """Write a minimal TU-format dataset directory under ``root``.

    Node ids are global and 1-based, edges are emitted in both directions the
    way the public datasets do it. Returns the dataset directory.
    """
    directory = root / name
    directory.mkdir(parents=True, exist_ok=True)
    a_lines: list[str] = []
    indicator: list[str] = []
    labels: list[str] = []
    attr_lines: list[str] = []
    offset = 0
    for gi, (n, edges, label) in enumerate(graphs, start=1):
        for u, v in edges:
            a_lines.append(f"{offset + u + 1}, {offset + v + 1}")
            a_lines.append(f"{offset + v + 1}, {offset + u + 1}")
        indicator.extend([str(gi)] * n)
        labels.append(str(label))
        if node_attrs is not None:
            for x, y in node_attrs[gi - 1]:
                attr_lines.append(f"{x:.6f}, {y:.6f}")
        offset += n
    (directory / f"{name}_A.txt").write_text("\n".join(a_lines) + "\n")
    (directory / f"{name}_graph_indicator.txt").write_text("\n".join(indicator) + "\n")
    (directory / f"{name}_graph_labels.txt").write_text("\n".join(labels) + "\n")
    if node_attrs is not None:
        (directory / f"{name}_node_attributes.txt").write_text(
            "\n".join(attr_lines) + "\n"
        )
    return directory
