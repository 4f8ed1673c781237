"""Entropy, Jensen-Shannon divergence, and the divergence-based graph kernel.

Two graphs are compared through the outcome distributions of one measured
observable: K_μ(P, P′) = exp(−μ·JS(P, P′)). JS is bounded by ln 2, so the
kernel lives in [2^{−μ}, 1] and equals 1 exactly on identical distributions.
Distributions over different supports are aligned first — union of bin ids,
missing bins filled with zero probability — which is part of the kernel's
definition here, since graphs of different sizes rarely share a support.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .measurement import ProbabilityDistribution

__all__ = [
    "KernelMatrix",
    "shannon_entropy",
    "js_divergence",
    "qe_kernel",
    "kernel_matrix",
    "relative_kernel_deviation",
    "combine_kernels",
]

logger = logging.getLogger(__name__)

LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric Gram matrix with the graph ids labelling its rows."""

    graph_ids: tuple
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        n = len(self.graph_ids)
        if vals.shape != (n, n):
            raise ValueError(f"matrix shape {vals.shape} does not match {n} ids")
        if n and not np.allclose(vals, vals.T, atol=1e-12):
            raise ValueError("kernel matrix must be symmetric")
        vals.setflags(write=False)
        object.__setattr__(self, "graph_ids", tuple(self.graph_ids))
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", *self.graph_ids])
            for gid, row in zip(self.graph_ids, self.values):
                writer.writerow([gid, *(f"{v:.12g}" for v in row)])

    def to_json_dict(self) -> dict:
        return {
            "graph_ids": list(self.graph_ids),
            "values": self.values.tolist(),
        }


def _entropy_rows(p: np.ndarray) -> np.ndarray:
    """Row-wise −Σ p log p with the 0·log 0 = 0 convention."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(p), 0.0)
    return -terms.sum(axis=-1)


def shannon_entropy(dist: ProbabilityDistribution) -> float:
    """Entropy in nats."""
    return float(_entropy_rows(dist.probabilities))


def _align(p: ProbabilityDistribution, q: ProbabilityDistribution):
    """Zero-fill both distributions onto the union of their bin ids."""
    ids = np.union1d(p.bin_ids, q.bin_ids)
    pv = np.zeros(ids.size)
    qv = np.zeros(ids.size)
    pv[np.searchsorted(ids, p.bin_ids)] = p.probabilities
    qv[np.searchsorted(ids, q.bin_ids)] = q.probabilities
    return pv, qv


def js_divergence(p: ProbabilityDistribution, q: ProbabilityDistribution) -> float:
    """JS(P, P′) = H((P+P′)/2) − (H(P) + H(P′))/2 after support alignment.

    Symmetric, zero iff the aligned distributions coincide, and at most ln 2
    (attained on disjoint supports).
    """
    pv, qv = _align(p, q)
    js = _entropy_rows(0.5 * (pv + qv)) - 0.5 * (_entropy_rows(pv) + _entropy_rows(qv))
    # cancellation can leave a few ulps below zero for near-identical inputs
    return max(float(js), 0.0)


def qe_kernel(
    p: ProbabilityDistribution, q: ProbabilityDistribution, mu: float = 1.0
) -> float:
    """exp(−μ·JS(P, P′)) ∈ [2^{−μ}, 1]."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    return float(np.exp(-mu * js_divergence(p, q)))


def _aligned_matrix(dists: list[ProbabilityDistribution]) -> np.ndarray:
    """Stack all distributions on the global union support, zero-filled."""
    all_ids = np.unique(np.concatenate([d.bin_ids for d in dists]))
    mat = np.zeros((len(dists), all_ids.size))
    for row, d in enumerate(dists):
        mat[row, np.searchsorted(all_ids, d.bin_ids)] = d.probabilities
    return mat


def kernel_matrix(
    dists: list[ProbabilityDistribution],
    mu: float = 1.0,
    graph_ids=None,
) -> KernelMatrix:
    """Pairwise kernel values over a set of distributions.

    The unique-pair block (i ≤ j) is computed vectorized on a shared global
    support and mirrored; the diagonal is exactly 1 by construction.
    """
    if not dists:
        raise ValueError("no distributions")
    if mu < 0:
        raise ValueError("mu must be non-negative")
    if graph_ids is None:
        graph_ids = tuple(range(len(dists)))
    if len(graph_ids) != len(dists):
        raise ValueError("graph_ids length does not match distributions")
    n = len(dists)
    p = _aligned_matrix(dists)
    h = _entropy_rows(p)
    js = np.zeros((n, n))
    for i in range(n - 1):
        mix = 0.5 * (p[i][None, :] + p[i + 1 :])
        js[i, i + 1 :] = _entropy_rows(mix) - 0.5 * (h[i] + h[i + 1 :])
    js = np.maximum(js + js.T, 0.0)
    values = np.exp(-mu * js)
    np.fill_diagonal(values, 1.0)
    if logger.isEnabledFor(logging.DEBUG):
        min_eig = float(np.linalg.eigvalsh(values).min())
        logger.debug("gram matrix of %d graphs: min eigenvalue %.3e", n, min_eig)
    return KernelMatrix(graph_ids=tuple(graph_ids), values=values)


def relative_kernel_deviation(
    noisy: KernelMatrix, clean: KernelMatrix
) -> np.ndarray:
    """Entrywise δK = |1 − K_noisy/K_clean|.

    The divergence kernel is bounded below by 2^{−μ} > 0, so the clean
    matrix never has zero entries to divide by.
    """
    if noisy.shape != clean.shape:
        raise ValueError(f"shape mismatch: {noisy.shape} vs {clean.shape}")
    if np.any(clean.values == 0.0):
        raise ValueError("clean kernel matrix has zero entries")
    return np.abs(1.0 - noisy.values / clean.values)


def combine_kernels(
    kernels: list[KernelMatrix], weights
) -> KernelMatrix:
    """Non-negative linear combination Σ_i p_i K_i of same-shape matrices."""
    if not kernels:
        raise ValueError("no kernels")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(kernels),):
        raise ValueError("one weight per kernel required")
    if np.any(weights < 0):
        raise ValueError("weights must be non-negative")
    first = kernels[0]
    for k in kernels[1:]:
        if k.shape != first.shape:
            raise ValueError("kernel matrices must share a shape")
        if k.graph_ids != first.graph_ids:
            raise ValueError("kernel matrices must cover the same graphs")
    total = np.zeros(first.shape)
    for w, k in zip(weights, kernels):
        total += w * k.values
    return KernelMatrix(graph_ids=first.graph_ids, values=total)
