"""Observables, outcome distributions, finite-shot sampling, and detection noise.

The measured quantities are functions of the computational basis index:
Ising edge energy (sum of couplings whose two endpoints are both occupied),
total occupation, or a single site's occupation. A distribution's support is
the set of values *reachable* on the full basis — bins a given state happens
to miss are kept with probability zero, so exact and sampled distributions
for the same graph always share a bin set, and distributions from different
graphs can be aligned by bin id alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .graphs import Graph
from .simulator import StateVector, _bit_table

__all__ = [
    "ObservableKind",
    "Observable",
    "ProbabilityDistribution",
    "NoiseModel",
    "BinningMode",
    "BinningSpec",
    "default_binning",
    "exact_distribution",
    "sample_bitstrings",
    "histogram_from_samples",
    "sampled_distribution",
    "expectation",
    "fourier_distribution",
]

PROB_SUM_TOL = 1e-12


class ObservableKind(Enum):
    ISING_ENERGY = "ising_energy"
    TOTAL_OCCUPATION = "total_occupation"
    SITE_OCCUPATION = "site_occupation"


@dataclass(frozen=True)
class Observable:
    kind: ObservableKind
    site: int | None = None

    def __post_init__(self):
        if self.kind is ObservableKind.SITE_OCCUPATION:
            if self.site is None or self.site < 0:
                raise ValueError("site occupation needs a non-negative site index")
        elif self.site is not None:
            raise ValueError(f"{self.kind.value} takes no site index")

    @classmethod
    def ising_energy(cls) -> "Observable":
        return cls(ObservableKind.ISING_ENERGY)

    @classmethod
    def total_occupation(cls) -> "Observable":
        return cls(ObservableKind.TOTAL_OCCUPATION)

    @classmethod
    def site_occupation(cls, site: int) -> "Observable":
        return cls(ObservableKind.SITE_OCCUPATION, site=site)


@dataclass(frozen=True)
class NoiseModel:
    """Detection errors: a measured 0 reads as 1 with probability ``epsilon``
    (false positive) and a measured 1 reads as 0 with probability
    ``epsilon_prime`` (false negative)."""

    epsilon: float = 0.0
    epsilon_prime: float = 0.0

    def __post_init__(self):
        for name in ("epsilon", "epsilon_prime"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name}={val} outside [0, 1]")

    @property
    def is_trivial(self) -> bool:
        return self.epsilon == 0.0 and self.epsilon_prime == 0.0


class BinningMode(Enum):
    INTEGER = "integer"
    FIXED_WIDTH = "fixed_width"


@dataclass(frozen=True)
class BinningSpec:
    """How observable values map to integer bin ids.

    INTEGER rounds to the nearest integer (natural for unweighted graphs,
    where Ising energies already are integers). FIXED_WIDTH assigns
    ``floor((value - origin) / width)``.
    """

    mode: BinningMode = BinningMode.INTEGER
    width: float = 1.0
    origin: float = 0.0

    def __post_init__(self):
        if self.mode is BinningMode.FIXED_WIDTH and self.width <= 0:
            raise ValueError("bin width must be positive")

    @classmethod
    def integer(cls) -> "BinningSpec":
        return cls(BinningMode.INTEGER)

    @classmethod
    def fixed_width(cls, width: float, origin: float = 0.0) -> "BinningSpec":
        return cls(BinningMode.FIXED_WIDTH, width=width, origin=origin)

    def bin_ids(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if self.mode is BinningMode.INTEGER:
            return np.rint(values).astype(np.int64)
        return np.floor((values - self.origin) / self.width).astype(np.int64)


@dataclass(frozen=True)
class ProbabilityDistribution:
    """Outcome probabilities keyed by strictly increasing integer bin ids."""

    bin_ids: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.bin_ids, dtype=np.int64)
        probs = np.asarray(self.probabilities, dtype=float)
        if ids.shape != probs.shape or ids.ndim != 1:
            raise ValueError("bin_ids and probabilities must be matching 1-d arrays")
        if ids.size == 0:
            raise ValueError("empty distribution")
        if np.any(np.diff(ids) <= 0):
            raise ValueError("bin ids must be strictly increasing")
        if np.any(probs < -PROB_SUM_TOL):
            raise ValueError("negative probability")
        total = probs.sum()
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        probs = np.clip(probs, 0.0, None)
        ids.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "bin_ids", ids)
        object.__setattr__(self, "probabilities", probs)

    def __len__(self) -> int:
        return int(self.bin_ids.size)

    def as_dict(self) -> dict[int, float]:
        return {int(b): float(p) for b, p in zip(self.bin_ids, self.probabilities)}


@lru_cache(maxsize=512)
def _observable_values(graph: Graph, obs: Observable) -> np.ndarray:
    """Value of ``obs`` on every computational basis state of the graph."""
    n = graph.num_nodes
    bits = _bit_table(n)
    if obs.kind is ObservableKind.TOTAL_OCCUPATION:
        values = bits.sum(axis=1).astype(float)
    elif obs.kind is ObservableKind.SITE_OCCUPATION:
        if obs.site >= n:
            raise ValueError(f"site {obs.site} out of range for {n} nodes")
        values = bits[:, obs.site].astype(float)
    else:
        values = np.zeros(2**n)
        for (i, j), w in zip(graph.edges, graph.weight_array()):
            values += w * (bits[:, i] & bits[:, j])
    values.setflags(write=False)
    return values


def default_binning(graph: Graph, obs: Observable) -> BinningSpec:
    """Integer bins when all reachable values are integers (unweighted
    graphs); otherwise fixed-width bins covering the reachable range in 64
    steps, anchored at the minimum value."""
    values = _observable_values(graph, obs)
    if np.allclose(values, np.rint(values), atol=1e-9):
        return BinningSpec.integer()
    lo, hi = float(values.min()), float(values.max())
    width = (hi - lo) / 64.0 if hi > lo else 1.0
    return BinningSpec.fixed_width(width=width, origin=lo)


def _reachable_bins(graph: Graph, obs: Observable, binning: BinningSpec):
    """(sorted unique bin ids, per-basis-state bin index) for the graph."""
    values = _observable_values(graph, obs)
    ids = binning.bin_ids(values)
    unique, inverse = np.unique(ids, return_inverse=True)
    return unique, inverse


def _check_match(state: StateVector, graph: Graph) -> None:
    if state.n_qubits != graph.num_nodes:
        raise ValueError(
            f"state on {state.n_qubits} qubits, graph has {graph.num_nodes} nodes"
        )


def exact_distribution(
    state: StateVector,
    graph: Graph,
    obs: Observable,
    binning: BinningSpec | None = None,
) -> ProbabilityDistribution:
    """Born-rule outcome distribution of ``obs``, aggregated into bins.

    Degenerate values land in one shared bin. The support covers every bin
    reachable on the full basis, zero-probability bins included.
    """
    _check_match(state, graph)
    if binning is None:
        binning = default_binning(graph, obs)
    unique, inverse = _reachable_bins(graph, obs, binning)
    weights = state.probabilities()
    probs = np.bincount(inverse, weights=weights, minlength=len(unique))
    probs = probs / probs.sum()
    return ProbabilityDistribution(bin_ids=unique, probabilities=probs)


def _draw_noisy_indices(
    state: StateVector, shots: int, noise: NoiseModel, rng: np.random.Generator
) -> np.ndarray:
    """Sample basis indices from |ψ|² and apply per-bit detection flips.

    With trivial noise no flip randomness is consumed, so noiseless sampling
    is bit-for-bit reproducible regardless of the noise code path.
    """
    probs = state.probabilities()
    indices = rng.choice(probs.size, size=shots, p=probs / probs.sum())
    if noise.is_trivial:
        return indices
    n = state.n_qubits
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (indices[:, None] >> shifts[None, :]) & 1
    u = rng.random((shots, n))
    flip = np.where(bits == 0, u < noise.epsilon, u < noise.epsilon_prime)
    bits = bits ^ flip
    return (bits << shifts[None, :]).sum(axis=1)


def sample_bitstrings(
    state: StateVector,
    shots: int,
    noise: NoiseModel = NoiseModel(),
    seed: int | np.random.Generator = 0,
) -> list[str]:
    """``shots`` measurement records as 0/1 strings, qubit 0 leftmost."""
    if shots < 1:
        raise ValueError("need at least one shot")
    rng = np.random.default_rng(seed)
    indices = _draw_noisy_indices(state, shots, noise, rng)
    n = state.n_qubits
    return [format(int(b), f"0{n}b") for b in indices]


def histogram_from_samples(
    samples: list[str],
    graph: Graph,
    obs: Observable,
    binning: BinningSpec | None = None,
) -> ProbabilityDistribution:
    """Empirical distribution of ``obs`` over measured bitstrings, on the
    same reachable-bin support as :func:`exact_distribution`."""
    if not samples:
        raise ValueError("no samples")
    if binning is None:
        binning = default_binning(graph, obs)
    unique, inverse = _reachable_bins(graph, obs, binning)
    if any(len(s) != graph.num_nodes for s in samples):
        raise ValueError("sample bitstring length does not match graph")
    indices = np.array([int(s, 2) for s in samples], dtype=np.int64)
    counts = np.bincount(inverse[indices], minlength=len(unique)).astype(float)
    return ProbabilityDistribution(bin_ids=unique, probabilities=counts / len(samples))


def sampled_distribution(
    state: StateVector,
    graph: Graph,
    obs: Observable,
    shots: int,
    noise: NoiseModel = NoiseModel(),
    seed: int | np.random.Generator = 0,
    binning: BinningSpec | None = None,
) -> ProbabilityDistribution:
    """Finite-shot estimate of :func:`exact_distribution`.

    Identical to sampling bitstrings and histogramming them, minus the
    round-trip through strings.
    """
    if shots < 1:
        raise ValueError("need at least one shot")
    _check_match(state, graph)
    if binning is None:
        binning = default_binning(graph, obs)
    rng = np.random.default_rng(seed)
    indices = _draw_noisy_indices(state, shots, noise, rng)
    unique, inverse = _reachable_bins(graph, obs, binning)
    counts = np.bincount(inverse[indices], minlength=len(unique)).astype(float)
    return ProbabilityDistribution(bin_ids=unique, probabilities=counts / shots)


def expectation(state: StateVector, graph: Graph, obs: Observable) -> float:
    """⟨obs⟩ = Σ_σ |ψ_σ|² · value(σ)."""
    _check_match(state, graph)
    return float(state.probabilities() @ _observable_values(graph, obs))


def fourier_distribution(trace: np.ndarray, num_components: int) -> ProbabilityDistribution:
    """Distribution over the magnitudes of the first K Fourier coefficients
    of a real signal sampled uniformly over one period (endpoint excluded,
    where the periodic trapezoid rule reduces to a plain mean):

        p_k ∝ |mean_j trace_j · exp(-2πi k j / n)|,  k = 0..K−1.

    An (all but) identically zero trace is pure DC: point mass at k = 0.
    """
    trace = np.asarray(trace, dtype=float)
    if trace.ndim != 1:
        raise ValueError("trace must be a 1-d sample array")
    n = trace.size
    if n < 4 * num_components:
        raise ValueError(
            f"grid too coarse: {n} samples cannot resolve {num_components} "
            "components (need at least 4 per component)"
        )
    bin_ids = np.arange(num_components)
    if np.max(np.abs(trace)) < 1e-12:
        probs = np.zeros(num_components)
        probs[0] = 1.0
        return ProbabilityDistribution(bin_ids=bin_ids, probabilities=probs)
    j = np.arange(n)
    k = np.arange(num_components)
    phases = np.exp(-2j * np.pi * np.outer(k, j) / n)
    p = np.abs(phases @ trace) / n
    return ProbabilityDistribution(bin_ids=bin_ids, probabilities=p / p.sum())
