"""Closed forms for the depth-1 Ramsey sequence on diagonal-interaction graphs.

Everything here evaluates, without simulation, the total-occupation signal
produced by pulse ϑ → free evolution for time t → pulse −ϑ on the all-zero
state. For an unweighted graph the signal depends only on the degree
histogram, its Fourier components live on integer frequencies k, and each
component is a dot product of the histogram with a fixed basis vector V_k(ϑ).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .graphs import Graph, degree_histogram
from .measurement import ProbabilityDistribution

__all__ = [
    "RamseyConfig",
    "occupation_trace",
    "occupation_trace_generic",
    "feature_basis_vectors",
    "fourier_features",
    "steady_state_features",
]

ZERO_SIGNAL_TOL = 1e-12


@dataclass(frozen=True)
class RamseyConfig:
    """Parameters of the closed-form feature map.

    ``num_components`` is the number of Fourier components kept (k = 0..K-1);
    ``period`` and ``time_samples`` only matter for the finite-grid DFT
    cross-check path, the closed form itself is the infinite-time limit.
    """

    theta: float
    num_components: int
    period: float = 2 * math.pi
    time_samples: int | None = None

    def __post_init__(self):
        if not 0 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta {self.theta} outside [0, pi/2]")
        if self.num_components < 1:
            raise ValueError("need at least one Fourier component")
        if self.time_samples is None:
            object.__setattr__(
                self, "time_samples", max(4 * self.num_components, 64)
            )
        if self.time_samples < 2 * self.num_components:
            raise ValueError(
                f"{self.time_samples} time samples cannot resolve "
                f"{self.num_components} components"
            )


def _require_plain(graph: Graph, op: str) -> None:
    if graph.is_weighted or graph.node_fields is not None:
        raise ValueError(
            f"{op} assumes unit couplings and no site fields; "
            "use occupation_trace_generic for weighted/field graphs"
        )


def occupation_trace(graph: Graph, theta: float, t):
    """Total occupation after the Ramsey sequence at time t (scalar or array).

    n(t) = 2 cos²ϑ sin²ϑ Σ_κ m(κ) Re{1 − (cos²ϑ + sin²ϑ e^{it})^κ}
    where m(κ) counts vertices of degree κ.
    """
    _require_plain(graph, "occupation_trace")
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    m = degree_histogram(graph)
    kappas = np.nonzero(m)[0]
    t_arr = np.asarray(t, dtype=float)
    if kappas.size == 0:
        out = np.zeros_like(t_arr)
    else:
        base = c2 + s2 * np.exp(1j * t_arr)
        terms = 1.0 - np.real(base[..., None] ** kappas)
        out = 2.0 * c2 * s2 * (terms @ m[kappas])
    return float(out) if np.isscalar(t) else out


def occupation_trace_generic(graph: Graph, theta: float, t):
    """Ramsey occupation signal with per-site fields h_i and per-edge
    couplings J_ij:

    n(t) = 2 sin²ϑ cos²ϑ Σ_i Re{1 − e^{i h_i t} Π_{j~i} (cos²ϑ + sin²ϑ e^{i J_ij t})}

    Reduces to :func:`occupation_trace` when h = 0 and J = 1.
    """
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    h = graph.field_array()
    weights = graph.weight_array()
    incident: list[list[float]] = [[] for _ in range(graph.num_nodes)]
    for (i, j), w in zip(graph.edges, weights):
        incident[i].append(w)
        incident[j].append(w)
    t_arr = np.asarray(t, dtype=float)
    total = np.zeros(t_arr.shape, dtype=float)
    for i in range(graph.num_nodes):
        prod = np.ones(t_arr.shape, dtype=np.complex128)
        for w in incident[i]:
            prod *= c2 + s2 * np.exp(1j * w * t_arr)
        total += 1.0 - np.real(np.exp(1j * h[i] * t_arr) * prod)
    out = 2.0 * c2 * s2 * total
    return float(out) if np.isscalar(t) else out


def feature_basis_vectors(theta: float, max_degree: int, num_components: int) -> np.ndarray:
    """Matrix V of shape (num_components, max_degree + 1).

    Row k against a degree histogram gives the k-th Fourier component of the
    occupation trace:

        V_0[κ] = 2 cos²ϑ sin²ϑ (1 − cos^{2κ}ϑ)
        V_k[κ] = binom(κ, k) sin^{2(k+1)}ϑ cos^{2(κ−k+1)}ϑ   (k ≥ 1)

    Entries with κ < k are zero (the binomial vanishes).
    """
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    kappas = np.arange(max_degree + 1)
    v = np.zeros((num_components, max_degree + 1))
    v[0] = 2.0 * c2 * s2 * (1.0 - c2**kappas)
    for k in range(1, num_components):
        reach = kappas >= k
        # exponent of cos²ϑ is κ−k+1 ≥ 1 wherever the binomial survives,
        # so ϑ = π/2 never raises 0 to a negative power
        v[k, reach] = (
            comb(kappas[reach], k)
            * s2 ** (k + 1)
            * c2 ** (kappas[reach] - k + 1)
        )
    return v


def fourier_features(graph: Graph, config: RamseyConfig) -> ProbabilityDistribution:
    """Normalized Fourier-component feature distribution of the graph.

    Components p_k = m · V_k for k = 0..K−1 are normalized to sum 1. If every
    component is numerically zero (edgeless graph, or ϑ ∈ {0, π/2}) the
    convention is a point mass on k = 0: a constant signal is pure DC.
    """
    _require_plain(graph, "fourier_features")
    m = degree_histogram(graph).astype(float)
    v = feature_basis_vectors(config.theta, len(m) - 1, config.num_components)
    p = v @ m
    bin_ids = np.arange(config.num_components)
    total = p.sum()
    if total < ZERO_SIGNAL_TOL:
        point = np.zeros(config.num_components)
        point[0] = 1.0
        return ProbabilityDistribution(bin_ids=bin_ids, probabilities=point)
    return ProbabilityDistribution(bin_ids=bin_ids, probabilities=p / total)


def steady_state_features(graph: Graph, theta: float) -> np.ndarray:
    """Per-site time-averaged occupation, 2cos²ϑsin²ϑ(1 − cos^{2κ_i}ϑ).

    For small ϑ this is ≈ 2ϑ⁴κ_i — proportional to the degree sequence, the
    same quantity a steady-state random walk equilibrates to.
    """
    _require_plain(graph, "steady_state_features")
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    return 2.0 * c2 * s2 * (1.0 - c2 ** graph.degrees.astype(float))
