import math

import numpy as np
import pytest

from qekernel import (
    Graph,
    RamseyConfig,
    erdos_renyi,
    feature_basis_vectors,
    fourier_distribution,
    fourier_features,
    occupation_trace,
    occupation_trace_generic,
    steady_state_features,
)

import oracles
from helpers import complete_graph, edgeless_graph, path_graph, star_graph

GRID = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
THETAS = (math.pi / 8, math.pi / 4, 3 * math.pi / 8)


def test_two_node_trace_has_textbook_form():
    g = complete_graph(2)
    expected = 0.5 * (1.0 - np.cos(GRID))
    np.testing.assert_allclose(
        occupation_trace(g, math.pi / 4, GRID), expected, atol=1e-14
    )


def test_trace_vanishes_without_edges_or_rotation():
    g = edgeless_graph(4)
    np.testing.assert_array_equal(occupation_trace(g, 0.7, GRID), np.zeros(64))
    assert occupation_trace(path_graph(3), 0.0, 1.3) == 0.0


def test_trace_scalar_and_array_forms_agree():
    g = path_graph(4)
    arr = occupation_trace(g, 0.5, GRID)
    assert isinstance(occupation_trace(g, 0.5, float(GRID[7])), float)
    assert occupation_trace(g, 0.5, float(GRID[7])) == pytest.approx(arr[7], abs=1e-15)
    assert arr.shape == (64,)


@pytest.mark.parametrize("theta", THETAS)
def test_trace_matches_dense_simulation(theta):
    rng = np.random.default_rng(31)
    for trial in range(6):
        n = int(rng.integers(2, 8))
        g = erdos_renyi(n, float(rng.uniform(0.25, 0.9)), seed=700 + trial)
        ts = rng.uniform(0.0, 2 * math.pi, size=5)
        got = occupation_trace(g, theta, ts)
        want = [oracles.ramsey_occupation_dense(g, theta, t) for t in ts]
        np.testing.assert_allclose(got, want, atol=1e-10)


def test_trace_is_periodic_for_unit_couplings():
    g = erdos_renyi(6, 0.5, seed=77)
    np.testing.assert_allclose(
        occupation_trace(g, 0.6, GRID),
        occupation_trace(g, 0.6, GRID + 2 * math.pi),
        atol=1e-12,
    )


def test_plain_trace_rejects_weights_and_fields():
    weighted = Graph(id=0, num_nodes=2, edges=((0, 1),), edge_weights=(2.0,))
    with pytest.raises(ValueError, match="occupation_trace_generic"):
        occupation_trace(weighted, 0.5, 1.0)
    fielded = Graph(id=0, num_nodes=2, edges=((0, 1),), node_fields=(1.0, 0.0))
    with pytest.raises(ValueError, match="occupation_trace_generic"):
        occupation_trace(fielded, 0.5, 1.0)


class TestGenericTrace:
    def test_reduces_to_plain_form(self):
        g = erdos_renyi(6, 0.6, seed=13)
        np.testing.assert_allclose(
            occupation_trace_generic(g, 0.8, GRID),
            occupation_trace(g, 0.8, GRID),
            atol=1e-12,
        )

    def test_isolated_node_with_field(self):
        # One driven node with a site field detunes the fringe: the signal is
        # 2 c^2 s^2 (1 - cos(h t)).
        h = 1.7
        g = Graph(id=0, num_nodes=1, edges=(), node_fields=(h,))
        theta = 0.6
        c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
        expected = 2 * c2 * s2 * (1.0 - np.cos(h * GRID))
        np.testing.assert_allclose(
            occupation_trace_generic(g, theta, GRID), expected, atol=1e-13
        )

    def test_matches_dense_oracle_on_weighted_fielded_pairs(self):
        rng = np.random.default_rng(12)
        for trial in range(20):
            g = Graph(
                id=trial,
                num_nodes=2,
                edges=((0, 1),),
                edge_weights=(float(rng.normal(0, 2)),),
                node_fields=(float(rng.normal(0, 2)), float(rng.normal(0, 2))),
            )
            theta = float(rng.uniform(0.05, 1.5))
            t = float(rng.uniform(0.0, 8.0))
            assert occupation_trace_generic(g, theta, t) == pytest.approx(
                oracles.ramsey_occupation_dense(g, theta, t), abs=1e-12
            )


class TestBasisVectors:
    def test_shape_and_reach(self):
        v = feature_basis_vectors(0.4, max_degree=5, num_components=4)
        assert v.shape == (4, 6)
        for k in range(1, 4):
            for kappa in range(0, k):
                assert v[k, kappa] == 0.0

    def test_balanced_angle_values(self):
        # cos² = sin² = 1/2 collapses the component formulas to powers of 2
        v = feature_basis_vectors(math.pi / 4, max_degree=3, num_components=3)
        np.testing.assert_allclose(
            v[0], [0.0, 0.25, 0.375, 0.4375], atol=1e-15
        )
        assert v[1, 1] == pytest.approx(1 / 8)
        assert v[2, 2] == pytest.approx(1 / 16)
        assert v[1, 3] == pytest.approx(math.comb(3, 1) / 32)

    def test_zero_angle_is_silent(self):
        assert not feature_basis_vectors(0.0, 4, 3).any()

    def test_max_degree_validated(self):
        with pytest.raises(ValueError):
            feature_basis_vectors(0.4, -1, 2)


class TestFourierFeatures:
    def test_two_node_graph_splits_two_to_one(self):
        cfg = RamseyConfig(theta=math.pi / 4, num_components=2)
        dist = fourier_features(complete_graph(2), cfg)
        assert dist.bin_ids.tolist() == [0, 1]
        np.testing.assert_allclose(dist.probabilities, [2 / 3, 1 / 3], atol=1e-14)

    def test_edgeless_graph_gets_zero_frequency_point_mass(self):
        cfg = RamseyConfig(theta=0.9, num_components=3)
        dist = fourier_features(edgeless_graph(5), cfg)
        # all K bins are kept so supports align across a dataset
        assert dist.bin_ids.tolist() == [0, 1, 2]
        np.testing.assert_array_equal(dist.probabilities, [1.0, 0.0, 0.0])

    def test_matches_dft_of_time_trace(self):
        g = erdos_renyi(8, 0.5, seed=91)
        k = int(g.degrees.max()) + 1
        cfg = RamseyConfig(theta=0.6, num_components=k)
        closed = fourier_features(g, cfg)
        n_t = max(4 * k, 64)
        ts = np.arange(n_t) * (2 * math.pi / n_t)
        dft = fourier_distribution(occupation_trace(g, 0.6, ts), k)
        assert closed.bin_ids.tolist() == dft.bin_ids.tolist()
        np.testing.assert_allclose(closed.probabilities, dft.probabilities, atol=1e-10)

    def test_probabilities_normalized(self):
        g = star_graph(6)
        cfg = RamseyConfig(theta=0.3, num_components=7)
        dist = fourier_features(g, cfg)
        assert dist.probabilities.sum() == pytest.approx(1.0, abs=1e-12)

    def test_config_validation(self):
        with pytest.raises(ValueError, match="outside"):
            RamseyConfig(theta=2.0, num_components=2)
        with pytest.raises(ValueError, match="component"):
            RamseyConfig(theta=0.5, num_components=0)
        with pytest.raises(ValueError, match="resolve"):
            RamseyConfig(theta=0.5, num_components=8, time_samples=10)
        cfg = RamseyConfig(theta=0.5, num_components=4)
        assert cfg.time_samples == 64


class TestSteadyState:
    def test_two_node_graph(self):
        np.testing.assert_allclose(
            steady_state_features(complete_graph(2), math.pi / 4), [0.25, 0.25]
        )

    def test_grows_with_degree(self):
        g = star_graph(5)
        vals = steady_state_features(g, 0.7)
        assert vals[0] > vals[1]
        np.testing.assert_allclose(vals[1:], vals[1])

    def test_matches_long_time_average_of_trace(self):
        g = erdos_renyi(7, 0.5, seed=55)
        theta = 0.45
        n_t = 4096
        ts = np.arange(n_t) * (2 * math.pi / n_t)
        avg = occupation_trace(g, theta, ts).mean()
        assert steady_state_features(g, theta).sum() == pytest.approx(avg, abs=1e-10)
