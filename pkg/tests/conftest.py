from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from helpers import write_tu_dataset

# Real benchmark datasets (TU collection format) are optional. Point this
# environment variable at a directory containing e.g. PTC_FM/PTC_FM_A.txt to
# enable the data-dependent tests; they skip loudly otherwise.
TU_DATA_ENV = "QEK_TU_DATA"


def tu_dataset_dir(name: str) -> Path | None:
    root = os.environ.get(TU_DATA_ENV, "")
    candidates = [Path(root)] if root else []
    candidates.append(Path(__file__).resolve().parent.parent / "data")
    for base in candidates:
        if (base / name / f"{name}_A.txt").is_file():
            return base / name
    return None


def require_tu_dataset(name: str) -> Path:
    found = tu_dataset_dir(name)
    if found is None:
        pytest.skip(
            f"benchmark dataset {name!r} not present; set {TU_DATA_ENV} to a "
            f"directory containing {name}/{name}_A.txt to enable this test"
        )
    return found


def _ring_edges(n: int) -> list[tuple[int, int]]:
    return [(i, (i + 1) % n) for i in range(n)]


def _blob_edges(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.85:
                edges.append((i, j))
    if not edges:
        edges.append((0, 1))
    return edges


@pytest.fixture(scope="session")
def synthetic_tu_dir(tmp_path_factory) -> Path:
    """A 12-graph two-class dataset on disk: sparse rings vs dense blobs.

    Labels are 1 and 2 (deliberately not 0-based) so encoding is exercised.
    """
    rng = np.random.default_rng(2024)
    graphs = []
    sizes = [5, 6, 7, 5, 6, 7]
    for n in sizes:
        graphs.append((n, _ring_edges(n), 1))
    for n in sizes:
        graphs.append((n, _blob_edges(n, rng), 2))
    return write_tu_dataset(tmp_path_factory.mktemp("tu"), "SYNTH", graphs)


@pytest.fixture(scope="session")
def multiclass_tu_dir(tmp_path_factory) -> Path:
    """Four classes (0, 3, 4, 5) with node counts straddling 12."""
    rng = np.random.default_rng(99)
    graphs = []
    for label in (0, 3, 4, 5):
        for size in (6, 10, 14):
            graphs.append((size, _blob_edges(size, rng), label))
    return write_tu_dataset(tmp_path_factory.mktemp("tu_multi"), "MULTI", graphs)
