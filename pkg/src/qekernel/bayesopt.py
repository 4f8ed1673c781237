"""Bayesian optimization on a Gaussian-process surrogate.

Minimization convention throughout: objectives are costs (benchmarks negate
accuracy before handing it over). The acquisition is the lower confidence
bound μ(x) − κσ(x), minimized over a fresh pool of uniform candidate points
each iteration — optimistic where the surrogate is uncertain, as exploration
under minimization requires.

Batched mode draws one joint surrogate sample per worker (Thompson style)
and evaluates the workers' argmins together before updating the model.

Covariances are Matérn (default ν = 5/2) or squared-exponential, both with
an overall amplitude and per-dimension length-scale weights refit
periodically by maximizing the log marginal likelihood.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize
from scipy.special import gamma as gamma_fn
from scipy.special import kv

from .kernels import KernelMatrix, combine_kernels
from .ml import DEFAULT_C_GRID, cross_validate

__all__ = [
    "SurrogateKernel",
    "GPModel",
    "BOConfig",
    "BOResult",
    "ObjectiveError",
    "MultikernelResult",
    "matern_kernel",
    "rbf_kernel",
    "gp_fit",
    "gp_posterior",
    "lcb",
    "refit_hyperparameters",
    "bayes_optimize",
    "optimize_multikernel",
]

JITTER_START = 1e-8
JITTER_CEIL = 1e-2
LOG_PARAM_RANGE = 10.0  # hyperparameters are searched in log-space [-10, 10]


class ObjectiveError(RuntimeError):
    """Objective evaluation failed; ``x`` is the point that broke it."""

    def __init__(self, x, cause: BaseException):
        super().__init__(f"objective failed at x={np.asarray(x).tolist()}: {cause}")
        self.x = np.asarray(x, dtype=float)


@dataclass(frozen=True)
class SurrogateKernel:
    """Covariance family with amplitude and per-dimension distance weights."""

    kind: str = "matern"  # "matern" | "rbf"
    nu: float = 2.5
    amplitude: float = 1.0
    weights: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if self.kind not in ("matern", "rbf"):
            raise ValueError(f"unknown surrogate kernel {self.kind!r}")
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")
        if any(w <= 0 for w in self.weights):
            raise ValueError("distance weights must be positive")

    def pairwise(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        w = np.asarray(self.weights, dtype=float)
        d2 = np.einsum(
            "ijd,d->ij",
            (x1[:, None, :] - x2[None, :, :]) ** 2,
            w,
        )
        if self.kind == "rbf":
            return self.amplitude * np.exp(-d2)
        return _matern_from_r(np.sqrt(d2), self.nu, self.amplitude)


def _matern_from_r(r: np.ndarray, nu: float, amplitude: float) -> np.ndarray:
    scaled = math.sqrt(2.0 * nu) * r
    with np.errstate(invalid="ignore", over="ignore"):
        vals = (
            amplitude
            * (2.0 ** (1.0 - nu) / gamma_fn(nu))
            * scaled**nu
            * kv(nu, scaled)
        )
    # the r → 0 limit of the Bessel form is the amplitude itself
    return np.where(r <= 0.0, amplitude, np.nan_to_num(vals, nan=amplitude))


def matern_kernel(x, x2, nu: float = 2.5, amplitude: float = 1.0, weights=None) -> float:
    """Matérn covariance of two parameter vectors under the weighted norm
    r² = Σ_d w_d (x_d − x′_d)²."""
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if nu <= 0:
        raise ValueError("nu must be positive")
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    w = np.ones(x.size) if weights is None else np.asarray(weights, dtype=float)
    r = math.sqrt(float(w @ (x - x2) ** 2))
    return float(_matern_from_r(np.array(r), nu, amplitude))


def rbf_kernel(x, x2, amplitude: float = 1.0, weights=None) -> float:
    """Squared-exponential covariance amplitude·exp(−r²), decaying with the
    weighted squared distance."""
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    w = np.ones(x.size) if weights is None else np.asarray(weights, dtype=float)
    return float(amplitude * math.exp(-float(w @ (x - x2) ** 2)))


@dataclass
class GPModel:
    x_train: np.ndarray
    y_train: np.ndarray
    kernel: SurrogateKernel
    y_mean: float
    chol: np.ndarray
    alpha_vec: np.ndarray
    jitter: float

    def log_marginal_likelihood(self) -> float:
        centered = self.y_train - self.y_mean
        n = self.y_train.size
        return float(
            -0.5 * centered @ self.alpha_vec
            - np.log(np.diag(self.chol)).sum()
            - 0.5 * n * math.log(2.0 * math.pi)
        )


def gp_fit(x_train, y_train, kernel: SurrogateKernel) -> GPModel:
    """Fit the GP regression model, escalating diagonal jitter tenfold (up to
    1e-2) until the covariance factorizes."""
    x_train = np.atleast_2d(np.asarray(x_train, dtype=float))
    y_train = np.asarray(y_train, dtype=float)
    if x_train.shape[0] != y_train.size or y_train.size < 1:
        raise ValueError("need matching, non-empty training inputs and targets")
    if len(kernel.weights) != x_train.shape[1]:
        kernel = replace(kernel, weights=tuple([1.0] * x_train.shape[1]))
    k = kernel.pairwise(x_train, x_train)
    y_mean = float(y_train.mean())
    centered = y_train - y_mean
    jitter = JITTER_START
    while True:
        try:
            chol = np.linalg.cholesky(k + jitter * np.eye(y_train.size))
            break
        except np.linalg.LinAlgError:
            jitter *= 10.0
            if jitter > JITTER_CEIL:
                raise RuntimeError(
                    "GP covariance not positive definite even at maximal jitter"
                )
    alpha_vec = cho_solve((chol, True), centered)
    return GPModel(
        x_train=x_train,
        y_train=y_train,
        kernel=kernel,
        y_mean=y_mean,
        chol=chol,
        alpha_vec=alpha_vec,
        jitter=jitter,
    )


def gp_posterior(model: GPModel, x_query) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and standard deviation at the query points."""
    x_query = np.atleast_2d(np.asarray(x_query, dtype=float))
    k_star = model.kernel.pairwise(x_query, model.x_train)
    mean = model.y_mean + k_star @ model.alpha_vec
    v = solve_triangular(model.chol, k_star.T, lower=True)
    var = model.kernel.amplitude - np.einsum("ij,ij->j", v, v)
    if np.any(var < -1e-8):
        raise AssertionError(f"posterior variance fell to {var.min()}")
    return mean, np.sqrt(np.clip(var, 0.0, None))


def lcb(model: GPModel, x_query, kappa: float = 2.0) -> np.ndarray:
    """Acquisition μ − κσ: under minimization, optimism means subtracting
    the uncertainty bonus."""
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    mean, std = gp_posterior(model, x_query)
    return mean - kappa * std


def _lml_of_logparams(log_params: np.ndarray, x, y, kernel: SurrogateKernel) -> float:
    if np.any(np.abs(log_params) > LOG_PARAM_RANGE):
        return -1e10
    amp = math.exp(log_params[0])
    weights = tuple(math.exp(v) for v in log_params[1:])
    try:
        model = gp_fit(x, y, replace(kernel, amplitude=amp, weights=weights))
        return model.log_marginal_likelihood()
    except (RuntimeError, np.linalg.LinAlgError):
        return -1e10


def refit_hyperparameters(
    x_train,
    y_train,
    kernel: SurrogateKernel,
    rng: np.random.Generator,
    restarts: int = 3,
    maxiter: int = 80,
) -> SurrogateKernel:
    """Maximize the log marginal likelihood over log-amplitude and
    log-weights with a derivative-free simplex search from a few restarts
    (the current values, then random draws)."""
    x_train = np.atleast_2d(np.asarray(x_train, dtype=float))
    y_train = np.asarray(y_train, dtype=float)
    d = x_train.shape[1]
    if len(kernel.weights) != d:
        kernel = replace(kernel, weights=tuple([1.0] * d))
    starts = [np.log([kernel.amplitude, *kernel.weights])]
    for _ in range(restarts - 1):
        starts.append(rng.uniform(-2.0, 2.0, size=d + 1))
    best_params, best_val = starts[0], _lml_of_logparams(starts[0], x_train, y_train, kernel)
    for start in starts:
        res = minimize(
            lambda p: -_lml_of_logparams(p, x_train, y_train, kernel),
            start,
            method="Nelder-Mead",
            options={"maxiter": maxiter, "xatol": 1e-3, "fatol": 1e-4},
        )
        if -res.fun > best_val:
            best_val, best_params = -res.fun, res.x
    return replace(
        kernel,
        amplitude=math.exp(best_params[0]),
        weights=tuple(math.exp(v) for v in best_params[1:]),
    )


@dataclass(frozen=True)
class BOConfig:
    """Optimization run parameters over a box domain.

    ``initial_points`` are always evaluated as part of the initial design
    (uniform draws fill the remainder up to ``n_init``). A budget equal to
    ``n_init`` degenerates to pure random search over the initial design;
    the budget may never be smaller.
    """

    bounds: tuple[tuple[float, float], ...]
    n_init: int = 10
    budget: int = 50
    kappa: float = 2.0
    candidate_samples: int = 5000
    workers: int = 1
    seed: int = 0
    kernel: SurrogateKernel = field(default_factory=SurrogateKernel)
    refit_every: int = 1
    initial_points: tuple[tuple[float, ...], ...] = ()
    max_joint_candidates: int = 1024  # joint-sample cap in batched mode

    def __post_init__(self):
        if not self.bounds:
            raise ValueError("at least one dimension required")
        if any(hi <= lo for lo, hi in self.bounds):
            raise ValueError("each bound must satisfy lo < hi")
        n_init = self.n_init
        if len(self.initial_points) > n_init:
            n_init = len(self.initial_points)
            object.__setattr__(self, "n_init", n_init)
        if self.budget < n_init:
            raise ValueError("budget must cover the initial design")
        if self.candidate_samples < 1:
            raise ValueError("need at least one candidate sample")
        if self.workers < 1:
            raise ValueError("need at least one worker")
        if self.refit_every < 1:
            raise ValueError("refit_every must be >= 1")
        for pt in self.initial_points:
            if len(pt) != len(self.bounds):
                raise ValueError("initial point dimension mismatch")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def uniform(self, rng: np.random.Generator, count: int) -> np.ndarray:
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return lo + rng.random((count, self.dim)) * (hi - lo)


@dataclass
class BOResult:
    best_x: np.ndarray
    best_value: float
    history: list  # dicts: iteration, x, value, wall_time

    @property
    def values(self) -> np.ndarray:
        return np.array([h["value"] for h in self.history])


def _evaluate(objective, x: np.ndarray) -> float:
    try:
        return float(objective(x))
    except Exception as exc:  # noqa: BLE001 - converted to a typed failure
        raise ObjectiveError(x, exc) from exc


def bayes_optimize(objective, config: BOConfig, history_path=None) -> BOResult:
    """Minimize a black-box function over the configured box.

    Sequential mode (workers=1) follows fit → minimize LCB over a fresh
    uniform candidate pool → evaluate → update. With workers=k each batch
    instead draws k joint surrogate samples and evaluates their argmins
    together. The returned history always has exactly ``budget`` entries and
    the reported best is its running minimum.
    """
    rng = np.random.default_rng(config.seed)
    t0 = time.perf_counter()
    history: list[dict] = []
    sink = open(history_path, "w") if history_path is not None else None

    def record(x: np.ndarray, value: float) -> None:
        entry = {
            "iteration": len(history),
            "x": [float(v) for v in x],
            "value": float(value),
            "wall_time": time.perf_counter() - t0,
        }
        history.append(entry)
        if sink is not None:
            sink.write(json.dumps(entry) + "\n")
            sink.flush()

    try:
        init = [np.asarray(p, dtype=float) for p in config.initial_points]
        fill = config.n_init - len(init)
        if fill > 0:
            init.extend(config.uniform(rng, fill))
        for x in init[: config.budget]:
            record(x, _evaluate(objective, x))

        kernel = config.kernel
        iteration = 0
        while len(history) < config.budget:
            x_seen = np.array([h["x"] for h in history])
            y_seen = np.array([h["value"] for h in history])
            if iteration % config.refit_every == 0:
                kernel = refit_hyperparameters(x_seen, y_seen, kernel, rng)
            model = gp_fit(x_seen, y_seen, kernel)
            if config.workers == 1:
                cands = config.uniform(rng, config.candidate_samples)
                x_next = cands[int(np.argmin(lcb(model, cands, config.kappa)))]
                record(x_next, _evaluate(objective, x_next))
            else:
                picks = _thompson_batch(model, config, rng)
                for x_next in picks:
                    if len(history) >= config.budget:
                        break
                    record(x_next, _evaluate(objective, x_next))
            iteration += 1
    finally:
        if sink is not None:
            sink.close()

    values = [h["value"] for h in history]
    best = int(np.argmin(values))
    return BOResult(
        best_x=np.array(history[best]["x"]),
        best_value=values[best],
        history=history,
    )


def _thompson_batch(
    model: GPModel, config: BOConfig, rng: np.random.Generator
) -> list[np.ndarray]:
    """One argmin of an independent joint posterior sample per worker."""
    count = min(config.candidate_samples, config.max_joint_candidates)
    cands = config.uniform(rng, count)
    mean, _ = gp_posterior(model, cands)
    k_star = model.kernel.pairwise(cands, model.x_train)
    v = solve_triangular(model.chol, k_star.T, lower=True)
    cov = model.kernel.pairwise(cands, cands) - v.T @ v
    cov += max(model.jitter, JITTER_START) * np.eye(count)
    try:
        factor = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        factor = np.linalg.cholesky(cov + 1e-6 * np.eye(count))
    picks = []
    for _ in range(config.workers):
        sample = mean + factor @ rng.standard_normal(count)
        picks.append(cands[int(np.argmin(sample))])
    return picks


@dataclass
class MultikernelResult:
    weights: np.ndarray
    score: float
    bo_result: BOResult


def optimize_multikernel(
    kernels: list[KernelMatrix],
    y,
    budget: int | None = None,
    n_init: int | None = None,
    folds: int = 10,
    repeats: int = 10,
    c_grid=DEFAULT_C_GRID,
    cv_seed: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> MultikernelResult:
    """Search combination weights p ∈ [0,1]^R maximizing cross-validated
    accuracy of Σ p_i K_i.

    Every one-hot weight vector is part of the initial design, so the result
    can never score below the best individual kernel: the argmin over the
    history has the single-kernel evaluations to fall back on. The CV seed
    is held fixed across evaluations — every candidate sees the same splits.
    """
    r = len(kernels)
    if r < 1:
        raise ValueError("need at least one kernel")
    budget = 50 * r if budget is None else budget
    n_init = 20 * r if n_init is None else n_init
    one_hots = tuple(tuple(np.eye(r)[i]) for i in range(r))

    def objective(p: np.ndarray) -> float:
        combined = combine_kernels(kernels, p)
        report = cross_validate(
            combined, y, folds=folds, repeats=repeats, c_grid=c_grid, seed=cv_seed
        )
        return -report.mean_accuracy

    config = BOConfig(
        bounds=tuple((0.0, 1.0) for _ in range(r)),
        n_init=n_init,
        budget=budget,
        seed=seed,
        workers=workers,
        initial_points=one_hots,
    )
    result = bayes_optimize(objective, config)
    return MultikernelResult(
        weights=result.best_x, score=-result.best_value, bo_result=result
    )
