"""Independent reference implementations used to cross-check the package.

Everything in this module is deliberately naive: explicit Kronecker products,
dense eigendecompositions, projected-gradient loops, truncated power series.
Slow is fine — the point is that none of it shares code paths with the
library, so agreement between the two is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from qekernel import Graph

I2 = np.eye(2)
# Occupation-number operator |1><1| in the (|0>, |1>) basis.
N_OP = np.array([[0.0, 0.0], [0.0, 1.0]])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
# Raising operator |1><0|.
SPLUS = np.array([[0.0, 0.0], [1.0, 0.0]])


def site_operator(n: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    """Kron together single-site operators; qubit 0 is the first factor."""
    out = np.array([[1.0 + 0.0j]])
    for q in range(n):
        out = np.kron(out, ops.get(q, I2))
    return out


def dense_ising(graph: Graph) -> np.ndarray:
    n = graph.num_nodes
    h = np.zeros((2**n, 2**n), dtype=complex)
    weights = graph.weight_array()
    for (i, j), w in zip(graph.edges, weights):
        h += w * site_operator(n, {i: N_OP, j: N_OP})
    fields = graph.field_array()
    for i, hi in enumerate(fields):
        if hi != 0.0:
            h += hi * site_operator(n, {i: N_OP})
    return h


def dense_xy(graph: Graph) -> np.ndarray:
    n = graph.num_nodes
    h = np.zeros((2**n, 2**n), dtype=complex)
    weights = graph.weight_array()
    for (i, j), w in zip(graph.edges, weights):
        hop = site_operator(n, {i: SPLUS, j: SPLUS.T})
        h += w * (hop + hop.conj().T)
    return h


def dense_global_y(n: int) -> np.ndarray:
    h = np.zeros((2**n, 2**n), dtype=complex)
    for q in range(n):
        h += site_operator(n, {q: SY})
    return h


def dense_hardware(graph: Graph, omega: float, delta: float) -> np.ndarray:
    """Interaction + transverse drive - detuning, all from explicit krons."""
    n = graph.num_nodes
    h = dense_ising(graph).astype(complex)
    for q in range(n):
        h += (omega / 2.0) * site_operator(n, {q: SX})
        h -= delta * site_operator(n, {q: N_OP})
    return h


def evolve_dense(h: np.ndarray, psi: np.ndarray, t: float) -> np.ndarray:
    """exp(-iHt) |psi> through a full eigendecomposition."""
    evals, evecs = np.linalg.eigh(h)
    return evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ psi))


def pulse_matrix(n: int, theta: float) -> np.ndarray:
    u = np.array(
        [
            [math.cos(theta), -math.sin(theta)],
            [math.sin(theta), math.cos(theta)],
        ],
        dtype=complex,
    )
    return site_operator(n, {q: u for q in range(n)})


def total_occupation_dense(n: int, psi: np.ndarray) -> float:
    op = sum(site_operator(n, {q: N_OP}) for q in range(n))
    return float(np.real(psi.conj() @ op @ psi))


def ramsey_occupation_dense(graph: Graph, theta: float, t: float) -> float:
    """Pulse, free diagonal evolution, inverse pulse, mean total occupation."""
    n = graph.num_nodes
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    psi = pulse_matrix(n, theta) @ psi
    psi = evolve_dense(dense_ising(graph), psi, t)
    psi = pulse_matrix(n, -theta) @ psi
    return total_occupation_dense(n, psi)


def exhaustive_occupation_graph(
    graph: Graph, n_excited: int
) -> tuple[list[int], set[tuple[int, int]]]:
    """Brute-force configuration graph over n-hot bitmasks.

    Vertices are all ways of exciting exactly ``n_excited`` of the nodes;
    two configurations are adjacent when they differ by moving one
    excitation along an edge of the underlying graph whose far end is
    unoccupied.
    """
    n = graph.num_nodes
    masks = []
    for combo in itertools.combinations(range(n), n_excited):
        m = 0
        for q in combo:
            m |= 1 << (n - 1 - q)
        masks.append(m)
    masks.sort()
    index = {m: i for i, m in enumerate(masks)}
    edges: set[tuple[int, int]] = set()
    for m in masks:
        for i, j in graph.edges:
            bi = 1 << (n - 1 - i)
            bj = 1 << (n - 1 - j)
            if bool(m & bi) != bool(m & bj):
                other = m ^ bi ^ bj
                a, b = index[m], index[other]
                edges.add((min(a, b), max(a, b)))
    return masks, edges


def reference_svm_dual(
    kernel: np.ndarray,
    y: np.ndarray,
    c: float,
    iterations: int = 3_000,
) -> tuple[np.ndarray, float]:
    """Projected-gradient ascent on the standard SVM dual.

    Maximizes sum(a) - 0.5 a'Qa with Q = (yy') * K over the box [0, C]^n
    intersected with the hyperplane y'a = 0. The projection onto that set is
    computed by bisecting on the hyperplane multiplier. Convergence is slow
    but certain, which is exactly what a reference needs.
    """
    y = np.asarray(y, dtype=float)
    q = np.outer(y, y) * kernel
    n = y.size
    step = 1.0 / (np.linalg.eigvalsh(q)[-1] + 1.0)
    alphas = np.zeros(n)

    def project(v: np.ndarray) -> np.ndarray:
        lo = -(np.max(np.abs(v)) + c + 1.0)
        hi = -lo
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            a = np.clip(v - mid * y, 0.0, c)
            if float(y @ a) > 0.0:
                lo = mid
            else:
                hi = mid
        return np.clip(v - 0.5 * (lo + hi) * y, 0.0, c)

    for _ in range(iterations):
        grad = 1.0 - q @ alphas
        alphas = project(alphas + step * grad)
    objective = float(alphas.sum() - 0.5 * alphas @ q @ alphas)
    return alphas, objective


def svm_dual_objective(kernel: np.ndarray, y: np.ndarray, alphas: np.ndarray) -> float:
    y = np.asarray(y, dtype=float)
    q = np.outer(y, y) * kernel
    return float(alphas.sum() - 0.5 * alphas @ q @ alphas)


def dense_gp_posterior(
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_query: np.ndarray,
    kernel_fn,
    jitter: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray]:
    """Textbook GP posterior with an explicit matrix inverse."""
    k_tt = kernel_fn(x_train, x_train) + jitter * np.eye(len(x_train))
    k_qt = kernel_fn(x_query, x_train)
    k_qq = kernel_fn(x_query, x_query)
    inv = np.linalg.inv(k_tt)
    mean_shift = float(np.mean(y_train))
    mean = k_qt @ inv @ (y_train - mean_shift) + mean_shift
    cov = k_qq - k_qt @ inv @ k_qt.T
    return mean, np.sqrt(np.clip(np.diag(cov), 0.0, None))


def random_walk_series(
    g1: Graph, g2: Graph, lam: float, terms: int = 400
) -> float:
    """Truncated Neumann series for the product-graph walk sum."""
    a = np.kron(g1.adjacency_matrix(weighted=False), g2.adjacency_matrix(weighted=False))
    size = a.shape[0]
    vec = np.ones(size)
    total = np.ones(size)
    for _ in range(terms):
        vec = lam * (a @ vec)
        total += vec
    return float(total.sum())
