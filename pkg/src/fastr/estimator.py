"""Sparse unit-rank tensor regression by alternating closed-form updates.

Each sweep updates the CP factor of every mode in ascending order
(Gauss-Seidel: each update sees the latest other factors). A factor update
projects the samples onto that mode's space, solves the ridge-perturbed
normal equations, and soft-thresholds the result. Sweeps stop when the
relative Frobenius change of the unit-rank coefficient tensor drops to the
tolerance, or at the iteration cap.
"""

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .tensor import (
    ShapeMismatchError,
    as_factors,
    frobenius_norm,
    mode_contract,
    outer_product,
    projection,
)

# redraw threshold for degenerate random initializations: a factor this close
# to zero makes every later projection zero, an absorbing state
_INIT_FLOOR = 1e-12


class NumericDomainError(ArithmeticError):
    """Non-finite values reached a linear solve."""


@dataclass(frozen=True)
class FitConfig:
    """Hyperparameters of one fit: shrinkage lam, ridge epsilon, loop control."""

    lam: float
    epsilon: float
    max_iter: int = 1000
    tol: float = 1e-3
    seed: int = 0
    rescale: bool = False  # optional per-sweep factor norm balancing, default off
    anneal: bool = False  # optional ridge continuation warm start, default off
    anneal_start: float = 100.0  # first rung of the epsilon ladder when annealing
    anneal_step: float = 10.0  # geometric rung spacing
    anneal_cap: int = 200  # sweep budget per warm-start rung

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.anneal and (self.anneal_step <= 1 or self.anneal_start <= 0):
            raise ValueError("annealing needs anneal_start > 0 and anneal_step > 1")


@dataclass
class FitReport:
    """Fitted factors plus the convergence trace that gated termination."""

    factors: list
    iterations: int
    rel_change_trace: list
    converged: bool


def soft_threshold(u, lam):
    """Elementwise shrink toward zero: sign(u) * max(|u| - lam, 0)."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    u = np.asarray(u, dtype=np.float64)
    return np.sign(u) * np.maximum(np.abs(u) - lam, 0.0)


def ridge_solve(P, y, epsilon):
    """Solve (P'P + epsilon*I) x = P'y via Cholesky factorization.

    epsilon > 0 makes the system symmetric positive definite; the explicit
    inverse is never formed.
    """
    P = np.asarray(P, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    if P.ndim != 2 or y.ndim != 1 or P.shape[0] != y.size:
        raise ShapeMismatchError(f"incompatible shapes P {P.shape}, y {y.shape}")
    if not (np.all(np.isfinite(P)) and np.all(np.isfinite(y))):
        raise NumericDomainError("non-finite values in ridge system")
    p = P.shape[1]
    gram = P.T @ P
    gram[np.diag_indices(p)] += epsilon
    rhs = P.T @ y
    try:
        c, low = scipy.linalg.cho_factor(gram, lower=True)
        return scipy.linalg.cho_solve((c, low), rhs)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - SPD by construction
        raise NumericDomainError(f"Cholesky solve failed: {exc}") from exc


def update_component(samples, responses, factors, mode, cfg):
    """Closed-form update of one factor: soft-threshold the ridge solution
    on the mode's projection matrix."""
    P = projection(samples, factors, mode)
    return soft_threshold(ridge_solve(P, responses, cfg.epsilon), cfg.lam)


def init_factors(dims, rng):
    """Standard-normal factor initialization, redrawing near-zero vectors."""
    factors = []
    for p in dims:
        w = rng.standard_normal(p)
        while np.max(np.abs(w)) < _INIT_FLOOR:
            w = rng.standard_normal(p)
        factors.append(w)
    return factors


def _rel_change(w_new, w_old):
    denom = frobenius_norm(w_old)
    num = frobenius_norm(w_new - w_old)
    if denom == 0.0:
        return 0.0 if num == 0.0 else np.inf
    return num / denom


def _rescale_factors(factors):
    norms = [float(np.linalg.norm(f)) for f in factors]
    if any(n == 0.0 for n in norms):
        return factors
    target = float(np.prod(norms)) ** (1.0 / len(factors))
    return [f * (target / n) for f, n in zip(factors, norms)]


def fit(samples, responses, cfg, timings=None):
    """Alternating fit of the unit-rank sparse coefficient tensor.

    samples: array (N, p_0, ..., p_{M-1}); responses: array (N,).
    Deterministic given (samples, responses, cfg). If `timings` is a dict,
    per-phase wall time (projection / solve / threshold) is accumulated
    into it.
    """
    samples = np.asarray(samples, dtype=np.float64)
    responses = np.asarray(responses, dtype=np.float64)
    if samples.ndim < 2 or samples.shape[0] < 1:
        raise ShapeMismatchError("samples must be a non-empty (N, dims...) array")
    if responses.shape != (samples.shape[0],):
        raise ShapeMismatchError(
            f"responses shape {responses.shape} does not match N={samples.shape[0]}"
        )
    if not np.all(np.isfinite(samples)):
        raise ValueError("sample entries must be finite")
    if not np.all(np.isfinite(responses)):
        raise ValueError("responses must be finite")

    dims = samples.shape[1:]
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    factors = init_factors(dims, rng)

    state = {"w_prev": outer_product(factors), "trace": []}

    def run_stage(epsilon, budget, lam, normalize=False):
        for _ in range(budget):
            for m in range(len(dims)):
                t0 = time.perf_counter()
                P = projection(samples, factors, m)
                t1 = time.perf_counter()
                x = ridge_solve(P, responses, epsilon)
                t2 = time.perf_counter()
                factors[m] = soft_threshold(x, lam)
                if normalize:
                    norm = float(np.linalg.norm(factors[m]))
                    if norm > 0.0:
                        factors[m] = factors[m] / norm
                t3 = time.perf_counter()
                if timings is not None:
                    timings["projection"] = timings.get("projection", 0.0) + (t1 - t0)
                    timings["solve"] = timings.get("solve", 0.0) + (t2 - t1)
                    timings["threshold"] = timings.get("threshold", 0.0) + (t3 - t2)
            if cfg.rescale:
                factors[:] = _rescale_factors(factors)
            w_cur = outer_product(factors)
            rel = _rel_change(w_cur, state["w_prev"])
            state["trace"].append(rel)
            state["w_prev"] = w_cur
            if rel <= cfg.tol:
                return True
        return False

    converged = False
    if cfg.anneal:
        # ridge continuation: converge at a descending epsilon ladder first,
        # with no thresholding. Large epsilon behaves like a power iteration
        # on the response-weighted sample moments, which steers random starts
        # toward the dominant unit-rank component before the target
        # hyperparameters take over.
        rung = cfg.anneal_start
        while rung > cfg.epsilon and len(state["trace"]) < cfg.max_iter:
            budget = min(cfg.anneal_cap, cfg.max_iter - len(state["trace"]))
            run_stage(rung, budget, 0.0, normalize=True)
            rung /= cfg.anneal_step
        # warm-up iterates are kept unit-norm; restore the magnitude with a
        # scalar least-squares fit of the predictions before the target stage
        y_hat = predict(factors, samples)
        denom = float(np.dot(y_hat, y_hat))
        if denom > 0.0:
            scale = float(np.dot(y_hat, responses)) / denom
            gain = abs(scale) ** (1.0 / len(dims))
            factors[:] = [f * gain for f in factors]
            if scale < 0.0:
                factors[0] = -factors[0]
            state["w_prev"] = outer_product(factors)
    remaining = cfg.max_iter - len(state["trace"])
    if remaining > 0:
        converged = run_stage(cfg.epsilon, remaining, cfg.lam)
    trace = state["trace"]

    return FitReport(
        factors=factors,
        iterations=len(trace),
        rel_change_trace=trace,
        converged=converged,
    )


def predict(factors, samples):
    """Predicted responses <W, X_i> without materializing W: contract each
    sample by every factor in ascending mode order."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim < 2:
        raise ShapeMismatchError("samples must have a leading sample axis")
    factors = as_factors(factors, dims=samples.shape[1:])
    # contract the highest mode first so earlier axes keep their positions
    cur = samples
    for m in reversed(range(len(factors))):
        cur = mode_contract(cur, factors[m], m + 1)
    return np.asarray(cur, dtype=np.float64).reshape(samples.shape[0])
