"""Seeded synthetic data generation for unit-rank recovery experiments.

The generator is a pure function of the spec. RNG is NumPy's PCG64 stream
via np.random.Generator, with standard normals drawn by
Generator.standard_normal (ziggurat transform); the draw order is factors
(mode 0 upward, values then zero positions), then samples, then noise.
"""

from dataclasses import dataclass

import numpy as np

from .tensor import as_factors, outer_product


@dataclass(frozen=True)
class SimSpec:
    dims: tuple
    n_samples: int
    sparsity_pct: float
    noise_alpha: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError("dims must be non-empty with every entry >= 1")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not 0 <= self.sparsity_pct <= 100:
            raise ValueError("sparsity_pct must lie in [0, 100]")
        if self.noise_alpha < 0:
            raise ValueError("noise_alpha must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass
class SimOutput:
    samples: np.ndarray  # (N, *dims)
    responses: np.ndarray  # (N,)
    true_factors: list
    true_tensor: np.ndarray


def gen_factors(dims, sparsity_pct, rng):
    """Standard-normal factors with floor(s% * p_m) entries zeroed per mode.

    Zero positions are drawn uniformly without replacement, independently
    per factor.
    """
    factors = []
    for p in dims:
        w = rng.standard_normal(p)
        n_zero = int(np.floor(sparsity_pct / 100.0 * p))
        if n_zero > 0:
            idx = rng.choice(p, size=n_zero, replace=False)
            w[idx] = 0.0
        factors.append(w)
    return as_factors(factors, dims=dims)


def gen_dataset(spec):
    """Generate samples and responses y_i = <W*, X_i> + alpha * eps_i."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    factors = gen_factors(spec.dims, spec.sparsity_pct, rng)
    w_true = outer_product(factors)
    X = rng.standard_normal((spec.n_samples,) + spec.dims)
    noise = rng.standard_normal(spec.n_samples)
    y = X.reshape(spec.n_samples, -1) @ w_true.ravel() + spec.noise_alpha * noise
    return SimOutput(
        samples=X,
        responses=y,
        true_factors=factors,
        true_tensor=w_true,
    )
