"""Exact statevector simulation of layered pulse/free-evolution sequences.

Basis convention, fixed project-wide: basis index b encodes qubit q's bit as
``(b >> (n - 1 - q)) & 1`` — qubit 0 is the leftmost character of a bitstring
and the most significant bit of the index. A set bit (1) is the excited /
occupied state; diagonal interaction energies count occupied pairs,
``E_σ = Σ_edges J_ij σ_i σ_j + Σ_i h_i σ_i`` over bit values σ ∈ {0, 1}.
The global mixing pulse is ``exp(-iθ Σ_q σ^y_q)``, which rotates each qubit
by ``|0⟩ → cosθ|0⟩ + sinθ|1⟩``.

Free evolution under hopping (XY) or hardware-drive Hamiltonians uses a
Lanczos (Krylov-subspace) propagator over a cached sparse matrix, with
adaptive time sub-stepping to meet the error tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse

from .graphs import Graph

__all__ = [
    "StateVector",
    "HamiltonianKind",
    "HamiltonianSpec",
    "PulseSequence",
    "HardwareConfig",
    "initial_state",
    "evolve_diagonal",
    "apply_global_pulse",
    "evolve_sparse",
    "run_sequence",
    "run_hardware_sequence",
    "hardware_interaction_graph",
]

MAX_QUBITS = 16
DEFAULT_KRYLOV_TOL = 1e-10
KRYLOV_DIM = 30


@dataclass
class StateVector:
    """Normalized complex amplitudes over the 2^n computational basis.

    Treated as immutable: operations return new instances.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes, got {self.amplitudes.shape}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def assert_normalized(self, tol: float = 1e-10) -> None:
        if abs(self.norm - 1.0) > tol:
            raise ValueError(f"state norm {self.norm} deviates from 1 beyond {tol}")


class HamiltonianKind(Enum):
    ISING_GRAPH = "ising"
    XY_GRAPH = "xy"
    GLOBAL_Y = "global_y"
    HARDWARE_DRIVE = "hardware"


@dataclass(frozen=True)
class HamiltonianSpec:
    """A Hamiltonian selection for free evolution.

    For HARDWARE_DRIVE, ``graph`` must already carry the position-derived
    all-pairs couplings (see :func:`hardware_interaction_graph`) and the
    transverse drive amplitude / detuning are in rad/µs.
    """

    kind: HamiltonianKind
    graph: Graph
    drive_amplitude: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        if self.kind is HamiltonianKind.HARDWARE_DRIVE and self.graph.positions is None:
            # the coupling graph built from positions is complete and weighted;
            # positions themselves are no longer needed, but a bare unweighted
            # graph here almost certainly means the caller skipped the rescale.
            if self.graph.edge_weights is None:
                raise ValueError("HardwareDrive requires position-derived couplings")


@dataclass(frozen=True)
class PulseSequence:
    """Layered sequence Λ = {θ_0, t_1, θ_1, ..., t_p, θ_p}: a global pulse,
    then p rounds of free evolution followed by another global pulse."""

    thetas: tuple[float, ...]
    times: tuple[float, ...]

    def __post_init__(self):
        if len(self.thetas) != len(self.times) + 1:
            raise ValueError("need exactly one more pulse angle than free times")
        if any(t < 0 for t in self.times):
            raise ValueError("free-evolution times must be non-negative")

    @property
    def depth(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class HardwareConfig:
    """Neutral-atom hardware model parameters.

    ``c6`` is the van-der-Waals coefficient in rad·µm⁶/µs; couplings are
    J_ij = c6 / R_ij^6 over *all* atom pairs after rescaling positions so the
    minimum pairwise distance equals ``min_distance`` µm. Durations are given
    in nanoseconds; each segment must exceed ``min_pulse_ns`` and the total
    must stay below ``max_total_ns``.
    """

    c6: float = 5_420_503.0
    drive_amplitude: float = 15.0  # Ω_0, rad/µs
    detuning: float = 0.0  # δ, rad/µs
    min_distance: float = 5.0  # µm
    min_pulse_ns: float = 4.0
    max_total_ns: float = 500.0
    c3: float | None = None  # reserved for dipolar (XY) hardware coupling


def initial_state(n: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    """The empty product state |0...0>."""
    if not 1 <= n <= max_qubits:
        raise ValueError(f"qubit count {n} outside budget 1..{max_qubits}")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


def _bit_table(n: int) -> np.ndarray:
    """(2^n, n) array of bits; column q is qubit q's bit (qubit 0 = MSB)."""
    idx = np.arange(2**n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)


@lru_cache(maxsize=256)
def _diagonal_energies(graph: Graph) -> np.ndarray:
    """Diagonal interaction energies E_σ over the 2^N basis (bit convention:
    an edge contributes J_ij when both endpoints are 1; fields contribute
    h_i per set bit)."""
    bits = _bit_table(graph.num_nodes)
    energy = np.zeros(len(bits))
    weights = graph.weight_array()
    for (i, j), w in zip(graph.edges, weights):
        energy += w * (bits[:, i] & bits[:, j])
    h = graph.field_array()
    if np.any(h):
        energy += bits @ h
    energy.setflags(write=False)
    return energy


def evolve_diagonal(state: StateVector, graph: Graph, t: float) -> StateVector:
    """Multiply each basis amplitude by exp(-i E_σ t) for the diagonal
    interaction Hamiltonian of ``graph``."""
    if state.n_qubits != graph.num_nodes:
        raise ValueError(
            f"state has {state.n_qubits} qubits but graph has {graph.num_nodes} nodes"
        )
    phases = np.exp(-1j * t * _diagonal_energies(graph))
    return StateVector(state.n_qubits, state.amplitudes * phases)


def apply_global_pulse(state: StateVector, theta: float) -> StateVector:
    """Apply exp(-iθ Σ_q σ^y_q): the same real rotation on every qubit,
    |0⟩ → cosθ|0⟩ + sinθ|1⟩, |1⟩ → -sinθ|0⟩ + cosθ|1⟩."""
    c, s = math.cos(theta), math.sin(theta)
    u = np.array([[c, -s], [s, c]])
    n = state.n_qubits
    psi = state.amplitudes.reshape((2,) * n)
    for q in range(n):
        psi = np.moveaxis(np.tensordot(u, psi, axes=(1, q)), 0, q)
    return StateVector(n, np.ascontiguousarray(psi.reshape(-1)))


@lru_cache(maxsize=64)
def _sparse_hamiltonian(spec: HamiltonianSpec) -> scipy.sparse.csr_matrix:
    """CSR matrix of the requested Hamiltonian in the computational basis."""
    g = spec.graph
    n = g.num_nodes
    dim = 2**n
    idx = np.arange(dim, dtype=np.int64)
    bit = [1 << (n - 1 - q) for q in range(n)]
    rows, cols, data = [], [], []

    if spec.kind is HamiltonianKind.XY_GRAPH:
        for (i, j), w in zip(g.edges, g.weight_array()):
            differ = ((idx >> (n - 1 - i)) & 1) != ((idx >> (n - 1 - j)) & 1)
            src = idx[differ]
            dst = src ^ (bit[i] | bit[j])
            rows.append(dst)
            cols.append(src)
            data.append(np.full(len(src), w))
    elif spec.kind is HamiltonianKind.GLOBAL_Y:
        for q in range(n):
            b = (idx >> (n - 1 - q)) & 1
            dst = idx ^ bit[q]
            rows.append(dst)
            cols.append(idx)
            # ⟨1|σ^y|0⟩ = i, ⟨0|σ^y|1⟩ = -i
            data.append(np.where(b == 0, 1j, -1j))
    elif spec.kind is HamiltonianKind.HARDWARE_DRIVE:
        diag = _diagonal_energies(g).copy()
        if spec.detuning:
            diag = diag - spec.detuning * _bit_table(n).sum(axis=1)
        rows.append(idx)
        cols.append(idx)
        data.append(diag.astype(np.complex128))
        half_omega = 0.5 * spec.drive_amplitude
        for q in range(n):
            rows.append(idx ^ bit[q])
            cols.append(idx)
            data.append(np.full(dim, half_omega, dtype=np.complex128))
    else:
        raise ValueError(f"no sparse builder for {spec.kind}")

    mat = scipy.sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    mat.sum_duplicates()
    return mat


def _lanczos_step(h, psi: np.ndarray, t: float, tol: float, max_dim: int):
    """One Lanczos approximation of exp(-i t H) psi; returns (result, ok)."""
    beta0 = np.linalg.norm(psi)
    if beta0 == 0.0 or t == 0.0:
        return psi.copy(), True
    basis = [psi / beta0]
    alphas: list[float] = []
    betas: list[float] = []
    for m in range(1, max_dim + 1):
        w = h @ basis[-1]
        a = float(np.vdot(basis[-1], w).real)
        alphas.append(a)
        w = w - a * basis[-1]
        if betas:
            w = w - betas[-1] * basis[-2]
        # full reorthogonalization: subspace is small, ghost modes are not
        for v in basis:
            w = w - np.vdot(v, w) * v
        b = float(np.linalg.norm(w))
        # propagate in the tridiagonal subspace
        if m == 1:
            small = np.exp(-1j * t * alphas[0]) * np.ones(1)
        else:
            evals, evecs = scipy.linalg.eigh_tridiagonal(alphas, betas)
            small = evecs @ (np.exp(-1j * t * evals) * evecs[0, :].conj())
        err = b * abs(small[-1])
        if b < 1e-13 or err <= tol:
            out = beta0 * (np.column_stack(basis) @ small)
            return out, True
        betas.append(b)
        basis.append(w / b)
    return None, False


def _krylov_propagate(h, psi: np.ndarray, t: float, tol: float) -> np.ndarray:
    """exp(-i t H) psi with adaptive halving of the time step."""
    segments = [(t, 0)]
    out = psi
    while segments:
        dt, depth = segments.pop()
        result, ok = _lanczos_step(h, out, dt, tol, KRYLOV_DIM)
        if ok:
            out = result
        else:
            if depth >= 40:
                raise RuntimeError("Krylov propagation failed to converge")
            segments.append((dt / 2, depth + 1))
            segments.append((dt / 2, depth + 1))
    return out


def evolve_sparse(
    state: StateVector,
    ham: HamiltonianSpec,
    t: float,
    tol: float = DEFAULT_KRYLOV_TOL,
) -> StateVector:
    """Propagate exp(-i H t)|ψ⟩ by Krylov-subspace iteration over the sparse
    matrix of ``ham``; sub-steps are halved until the local error estimate
    drops below ``tol``."""
    if ham.kind is HamiltonianKind.ISING_GRAPH:
        raise ValueError("diagonal Hamiltonians use evolve_diagonal")
    if state.n_qubits != ham.graph.num_nodes:
        raise ValueError("state size does not match Hamiltonian graph")
    h = _sparse_hamiltonian(ham)
    amps = _krylov_propagate(h, state.amplitudes, t, tol)
    return StateVector(state.n_qubits, amps)


def run_sequence(
    graph: Graph,
    seq: PulseSequence,
    ham_kind: HamiltonianKind = HamiltonianKind.ISING_GRAPH,
    tol: float = DEFAULT_KRYLOV_TOL,
    max_qubits: int = MAX_QUBITS,
) -> StateVector:
    """Run the layered evolution: pulse θ_0, then for each layer free
    evolution under the graph Hamiltonian followed by the layer's pulse."""
    state = initial_state(graph.num_nodes, max_qubits=max_qubits)
    state = apply_global_pulse(state, seq.thetas[0])
    spec = None
    if ham_kind is not HamiltonianKind.ISING_GRAPH:
        spec = HamiltonianSpec(kind=ham_kind, graph=graph)
    for theta, t in zip(seq.thetas[1:], seq.times):
        if spec is None:
            state = evolve_diagonal(state, graph, t)
        else:
            state = evolve_sparse(state, spec, t, tol)
        state = apply_global_pulse(state, theta)
    return state


@lru_cache(maxsize=256)
def hardware_interaction_graph(
    graph: Graph, c6: float = 5_420_503.0, min_distance: float = 5.0
) -> Graph:
    """Complete weighted graph of van-der-Waals couplings J_ij = c6/R_ij^6.

    Positions are uniformly rescaled so the closest atom pair sits exactly
    ``min_distance`` µm apart (the hardware's minimum spacing).
    """
    if graph.positions is None:
        raise ValueError(f"graph {graph.id}: positions required for hardware couplings")
    pos = np.asarray(graph.positions, dtype=float)
    n = graph.num_nodes
    if n < 2:
        return Graph(id=graph.id, num_nodes=n, edges=(), positions=graph.positions,
                     class_label=graph.class_label)
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    iu = np.triu_indices(n, 1)
    dmin = dist[iu].min()
    if dmin == 0.0:
        raise ValueError(f"graph {graph.id}: coincident atom positions")
    scaled = dist * (min_distance / dmin)
    edges, weights = [], []
    for i, j in zip(*iu):
        edges.append((int(i), int(j)))
        weights.append(float(c6 / scaled[i, j] ** 6))
    return Graph(
        id=graph.id,
        num_nodes=n,
        edges=tuple(edges),
        edge_weights=tuple(weights),
        positions=tuple((float(x), float(y)) for x, y in pos * (min_distance / dmin)),
        class_label=graph.class_label,
    )


def run_hardware_sequence(
    graph: Graph,
    hw: HardwareConfig,
    durations_ns: tuple[float, ...],
    tol: float = DEFAULT_KRYLOV_TOL,
    max_qubits: int = MAX_QUBITS,
) -> StateVector:
    """Run the hardware pulse train {τ_0, t_0, τ_1, t_1, τ_2} (nanoseconds).

    Odd positions are free segments (interaction only, diagonal fast path);
    even positions are mixing segments where the transverse drive at Ω_0 acts
    on top of the always-on interaction. The default shape is two layers, but
    any odd-length alternation that starts and ends with a mixing segment is
    accepted.
    """
    if len(durations_ns) < 3 or len(durations_ns) % 2 == 0:
        raise ValueError("durations must alternate mix/free/.../mix (odd count >= 3)")
    if any(d <= hw.min_pulse_ns for d in durations_ns):
        raise ValueError(
            f"every segment must exceed {hw.min_pulse_ns} ns, got {durations_ns}"
        )
    if sum(durations_ns) >= hw.max_total_ns:
        raise ValueError(
            f"total duration {sum(durations_ns)} ns exceeds {hw.max_total_ns} ns"
        )
    coupling = hardware_interaction_graph(graph, hw.c6, hw.min_distance)
    mix = HamiltonianSpec(
        kind=HamiltonianKind.HARDWARE_DRIVE,
        graph=coupling,
        drive_amplitude=hw.drive_amplitude,
        detuning=hw.detuning,
    )
    state = initial_state(graph.num_nodes, max_qubits=max_qubits)
    for k, d_ns in enumerate(durations_ns):
        t = d_ns * 1e-3  # ns -> µs; couplings and Ω are rad/µs
        if k % 2 == 0:
            state = evolve_sparse(state, mix, t, tol)
        else:
            state = evolve_diagonal(state, coupling, t)
    return state
