import json
import math

import numpy as np
import pytest

from qekernel import (
    BOConfig,
    KernelMatrix,
    SurrogateKernel,
    bayes_optimize,
    gp_fit,
    gp_posterior,
    lcb,
    matern_kernel,
    optimize_multikernel,
    rbf_kernel,
)
from qekernel.bayesopt import ObjectiveError, refit_hyperparameters

from oracles import dense_gp_posterior

R_GRID = (1e-6, 0.1, 1.0, 5.0, 10.0)


def quadratic(x) -> float:
    return float((x[0] - 0.3) ** 2)


# ------------------------------------------------------------ kernel algebra


@pytest.mark.parametrize("r", R_GRID)
def test_matern_half_integer_closed_forms(r):
    x, x2 = np.array([0.0]), np.array([r])
    a = 1.7
    assert matern_kernel(x, x2, nu=0.5, amplitude=a) == pytest.approx(
        a * math.exp(-r), abs=1e-9
    )
    s3 = math.sqrt(3) * r
    assert matern_kernel(x, x2, nu=1.5, amplitude=a) == pytest.approx(
        a * (1 + s3) * math.exp(-s3), abs=1e-9
    )
    s5 = math.sqrt(5) * r
    assert matern_kernel(x, x2, nu=2.5, amplitude=a) == pytest.approx(
        a * (1 + s5 + 5 * r**2 / 3) * math.exp(-s5), abs=1e-9
    )


def test_matern_at_zero_distance_is_amplitude():
    x = np.array([0.4, -1.0])
    assert matern_kernel(x, x, nu=2.5, amplitude=2.3) == 2.3
    # non-half-integer orders hit the Bessel limit path
    assert matern_kernel(x, x, nu=1.7, amplitude=2.3) == pytest.approx(2.3, abs=1e-12)


def test_weighted_distances_stretch_axes():
    x, y = np.array([0.0, 0.0]), np.array([1.0, 1.0])
    iso = matern_kernel(x, y, nu=2.5, weights=(1.0, 1.0))
    squeezed = matern_kernel(x, y, nu=2.5, weights=(1.0, 25.0))
    assert squeezed < iso
    # weight w rescales distance by sqrt(w) per axis
    only_second = matern_kernel(np.array([0.0]), np.array([5.0]), nu=2.5)
    assert matern_kernel(x, y, nu=2.5, weights=(0.0 + 1e-300, 25.0)) == pytest.approx(
        only_second, rel=1e-6
    )


def test_rbf_reference_values():
    assert rbf_kernel(np.zeros(2), np.zeros(2), amplitude=3.0) == 3.0
    assert rbf_kernel(np.array([0.0]), np.array([2.0])) == pytest.approx(
        math.exp(-4.0), abs=1e-12
    )


def test_kernel_parameter_validation():
    x = np.zeros(1)
    with pytest.raises(ValueError, match="nu"):
        matern_kernel(x, x, nu=0.0)
    with pytest.raises(ValueError, match="amplitude"):
        matern_kernel(x, x, amplitude=-1.0)
    with pytest.raises(ValueError, match="amplitude"):
        rbf_kernel(x, x, amplitude=0.0)
    with pytest.raises(ValueError, match="kernel"):
        SurrogateKernel(kind="cubic")
    with pytest.raises(ValueError, match="weights"):
        SurrogateKernel(weights=(0.0,))


def test_pairwise_matches_scalar_kernel():
    rng = np.random.default_rng(50)
    xs = rng.normal(size=(6, 2))
    kern = SurrogateKernel(kind="matern", nu=1.5, amplitude=0.9, weights=(1.0, 2.0))
    pair = kern.pairwise(xs, xs)
    for i in range(6):
        for j in range(6):
            assert pair[i, j] == pytest.approx(
                matern_kernel(xs[i], xs[j], nu=1.5, amplitude=0.9, weights=(1.0, 2.0)),
                abs=1e-12,
            )


# ------------------------------------------------------------------ the GP


def test_posterior_interpolates_single_observation():
    model = gp_fit(np.array([[0.5]]), np.array([2.0]), SurrogateKernel())
    mean, std = gp_posterior(model, np.array([[0.5], [3.0]]))
    assert mean[0] == pytest.approx(2.0, abs=1e-6)
    assert std[0] == pytest.approx(0.0, abs=1e-3)
    assert std[1] > 0.5  # far from data the prior takes over


def test_posterior_matches_dense_reference():
    rng = np.random.default_rng(51)
    xtr = rng.uniform(0, 3, size=(9, 2))
    ytr = np.sin(xtr[:, 0]) + 0.5 * xtr[:, 1]
    xq = rng.uniform(0, 3, size=(20, 2))
    kern = SurrogateKernel(kind="matern", nu=2.5, amplitude=1.3, weights=(0.8, 1.7))
    model = gp_fit(xtr, ytr, kern)
    mean, std = gp_posterior(model, xq)
    want_mean, want_std = dense_gp_posterior(xtr, ytr, xq, kern.pairwise, model.jitter)
    np.testing.assert_allclose(mean, want_mean, atol=1e-10)
    np.testing.assert_allclose(std, want_std, atol=1e-10)


def test_smooth_function_is_recovered():
    xtr = np.linspace(0, math.pi, 8)[:, None]
    model = gp_fit(xtr, np.sin(xtr[:, 0]), SurrogateKernel())
    xq = np.linspace(0, math.pi, 101)[:, None]
    mean, _ = gp_posterior(model, xq)
    assert np.max(np.abs(mean - np.sin(xq[:, 0]))) <= 0.1


def test_duplicate_rows_escalate_jitter_not_crash():
    x = np.array([[0.2], [0.2], [0.8]])
    y = np.array([1.0, 1.0, -1.0])
    model = gp_fit(x, y, SurrogateKernel())
    assert model.jitter >= 1e-8
    mean, std = gp_posterior(model, np.array([[0.5]]))
    assert np.isfinite(mean).all() and np.isfinite(std).all()


def test_constant_targets_predict_constant():
    x = np.linspace(0, 1, 5)[:, None]
    model = gp_fit(x, np.full(5, 3.7), SurrogateKernel())
    mean, _ = gp_posterior(model, np.array([[0.33], [0.91]]))
    np.testing.assert_allclose(mean, 3.7, atol=1e-8)


def test_lcb_is_mean_shifted_by_kappa():
    rng = np.random.default_rng(52)
    x = rng.uniform(0, 1, size=(6, 1))
    model = gp_fit(x, rng.normal(size=6), SurrogateKernel())
    xq = np.array([[0.44]])
    mean, std = gp_posterior(model, xq)
    assert lcb(model, xq, kappa=0.0)[0] == pytest.approx(mean[0], abs=1e-12)
    assert lcb(model, xq, kappa=2.0)[0] == pytest.approx(mean[0] - 2 * std[0], abs=1e-12)
    with pytest.raises(ValueError, match="kappa"):
        lcb(model, xq, kappa=-1.0)


def test_refit_returns_usable_kernel():
    rng = np.random.default_rng(53)
    x = rng.uniform(0, 2, size=(12, 1))
    y = np.sin(3 * x[:, 0])
    start = SurrogateKernel(weights=(1.0,))
    tuned = refit_hyperparameters(x, y, start, rng)
    assert tuned.kind == "matern"
    assert tuned.amplitude > 0 and all(w > 0 for w in tuned.weights)
    before = gp_fit(x, y, start).log_marginal_likelihood()
    after = gp_fit(x, y, tuned).log_marginal_likelihood()
    assert np.isfinite(after)
    assert after >= before - 1e-6  # the search never makes things worse


# ----------------------------------------------------------- the optimizer


def test_config_validation():
    with pytest.raises(ValueError, match="lo < hi"):
        BOConfig(bounds=((1.0, 0.0),))
    with pytest.raises(ValueError, match="dimension"):
        BOConfig(bounds=())
    with pytest.raises(ValueError, match="budget"):
        BOConfig(bounds=((0.0, 1.0),), n_init=10, budget=5)
    with pytest.raises(ValueError, match="worker"):
        BOConfig(bounds=((0.0, 1.0),), workers=0)
    with pytest.raises(ValueError, match="dimension mismatch"):
        BOConfig(bounds=((0.0, 1.0),), initial_points=((0.5, 0.5),))


def test_quadratic_is_minimized_sequentially():
    cfg = BOConfig(bounds=((0.0, 1.0),), n_init=8, budget=30, seed=0)
    res = bayes_optimize(quadratic, cfg)
    assert abs(res.best_x[0] - 0.3) <= 1e-3
    assert len(res.history) == 30
    assert res.best_value == pytest.approx(res.values.min())


def test_runs_are_deterministic():
    cfg = BOConfig(bounds=((0.0, 1.0),), n_init=6, budget=14, seed=4)
    a = bayes_optimize(quadratic, cfg)
    b = bayes_optimize(quadratic, cfg)
    np.testing.assert_array_equal(a.values, b.values)
    np.testing.assert_array_equal(a.best_x, b.best_x)


def test_budget_equal_to_init_is_pure_random_search():
    cfg = BOConfig(bounds=((0.0, 1.0),), n_init=12, budget=12, seed=2)
    res = bayes_optimize(quadratic, cfg)
    assert len(res.history) == 12
    xs = np.array([h["x"][0] for h in res.history])
    assert res.best_value == pytest.approx(((xs - 0.3) ** 2).min())


def test_seeded_initial_points_run_first():
    cfg = BOConfig(
        bounds=((0.0, 1.0),), n_init=5, budget=8, seed=0, initial_points=((0.3,),)
    )
    res = bayes_optimize(quadratic, cfg)
    assert res.history[0]["x"] == [0.3]
    assert res.best_value == 0.0


def test_parallel_batches_cover_budget():
    cfg = BOConfig(bounds=((0.0, 1.0),), n_init=8, budget=30, seed=0, workers=3)
    res = bayes_optimize(quadratic, cfg)
    assert len(res.history) == 30
    assert abs(res.best_x[0] - 0.3) <= 0.02


def test_objective_failures_carry_the_point(tmp_path):
    def broken(x):
        raise RuntimeError("sensor offline")

    cfg = BOConfig(bounds=((0.0, 1.0),), n_init=2, budget=3, seed=0)
    with pytest.raises(ObjectiveError) as err:
        bayes_optimize(broken, cfg)
    assert 0.0 <= err.value.x[0] <= 1.0


def test_history_jsonl_sink(tmp_path):
    path = tmp_path / "trace.jsonl"
    cfg = BOConfig(bounds=((0.0, 1.0),), n_init=3, budget=5, seed=1)
    res = bayes_optimize(quadratic, cfg, history_path=path)
    lines = [json.loads(ln) for ln in path.read_text().splitlines()]
    assert len(lines) == 5
    assert [ln["iteration"] for ln in lines] == list(range(5))
    assert lines[-1]["value"] == res.history[-1]["value"]
    assert set(lines[0]) == {"iteration", "x", "value", "wall_time"}


# --------------------------------------------------------- kernel combining


def _complementary_kernels():
    # kernel A separates class 0 from {1, 2}; kernel B separates 1 from 2.
    y = np.array([0] * 4 + [1] * 4 + [2] * 4)
    a = np.full((12, 12), 0.9)
    a[:4, 4:] = 0.1
    a[4:, :4] = 0.1
    np.fill_diagonal(a, 1.0)
    b = np.full((12, 12), 0.9)
    b[4:8, 8:] = 0.1
    b[8:, 4:8] = 0.1
    np.fill_diagonal(b, 1.0)
    ids = tuple(range(12))
    return [KernelMatrix(ids, a), KernelMatrix(ids, b)], y


def test_combined_kernel_beats_either_ingredient():
    kernels, y = _complementary_kernels()
    res = optimize_multikernel(
        kernels, y, budget=14, n_init=8, folds=4, repeats=2, seed=0
    )
    assert res.score == 1.0
    assert res.weights.shape == (2,)
    assert np.all(res.weights >= 0.0) and np.all(res.weights <= 1.0)
    assert len(res.bo_result.history) == 14


def test_single_kernel_axes_are_in_the_initial_design():
    kernels, y = _complementary_kernels()
    res = optimize_multikernel(
        kernels, y, budget=10, n_init=8, folds=4, repeats=1, seed=3
    )
    seen = {tuple(h["x"]) for h in res.bo_result.history}
    assert (1.0, 0.0) in seen and (0.0, 1.0) in seen
