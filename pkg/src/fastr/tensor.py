"""Dense tensor algebra: inner products, outer products, mode contractions,
and the per-mode projection of a stack of sample tensors.

Tensors are C-ordered (row-major, last index fastest) float64 ndarrays.
Factor sets are lists of 1-D float64 vectors, one per mode. Mode indices are
0-based throughout.
"""

import numpy as np

from ._backend import contract_axis


class ShapeMismatchError(ValueError):
    """Operand shapes are incompatible for the requested operation."""


def as_tensor(data):
    """Validate and return a C-contiguous float64 tensor.

    Rejects empty shapes, zero-length axes, and non-finite entries.
    """
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if any(d < 1 for d in arr.shape):
        raise ValueError("every tensor dimension must be >= 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError("tensor entries must be finite")
    return arr


def as_factors(factors, dims=None):
    """Validate a factor set (one finite 1-D vector per mode)."""
    out = [np.ascontiguousarray(f, dtype=np.float64) for f in factors]
    if not out:
        raise ValueError("factor set must be non-empty")
    for f in out:
        if f.ndim != 1 or f.size < 1:
            raise ValueError("each factor must be a non-empty vector")
        if not np.all(np.isfinite(f)):
            raise ValueError("factor entries must be finite")
    if dims is not None:
        if len(out) != len(dims) or any(f.size != d for f, d in zip(out, dims)):
            raise ShapeMismatchError(
                f"factor lengths {[f.size for f in out]} do not match dims {tuple(dims)}"
            )
    return out


def inner_product(a, b):
    """Full tensor inner product <a, b> = sum of elementwise products."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shapes {a.shape} and {b.shape} differ")
    return float(np.dot(a.ravel(), b.ravel()))


def outer_product(factors):
    """Unit-rank tensor from factor vectors: W[i1..iM] = prod_m f[m][i_m]."""
    factors = as_factors(factors)
    out = factors[0]
    for f in factors[1:]:
        out = np.multiply.outer(out, f)
    return np.ascontiguousarray(out)


def mode_contract(t, v, mode):
    """Contract tensor `t` with vector `v` along axis `mode` (0-based).

    Reduces the order by one; contracting a 1-mode tensor yields a
    1-element tensor (order-0 results are not representable).
    """
    t = np.asarray(t, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if not 0 <= mode < t.ndim:
        raise IndexError(f"mode {mode} out of range for order-{t.ndim} tensor")
    if v.ndim != 1 or v.size != t.shape[mode]:
        raise ShapeMismatchError(
            f"vector length {v.size} does not match dim {t.shape[mode]} of mode {mode}"
        )
    out = contract_axis(t, mode, v)
    if out.ndim == 0:
        out = out.reshape(1)
    return out


def projection(samples, factors, mode):
    """Project each sample tensor onto the `mode`-th space.

    `samples` has shape (N, p_0, ..., p_{M-1}). Every mode except `mode` is
    contracted with its factor, in ascending mode order with eagerly
    materialized intermediates, leaving the N x p_mode projection matrix.
    With M == 1 there is nothing to contract and the samples are returned
    as an N x p_0 matrix.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim < 2:
        raise ShapeMismatchError("samples must have a leading sample axis plus >=1 mode")
    order = samples.ndim - 1
    if not 0 <= mode < order:
        raise IndexError(f"mode {mode} out of range for order-{order} samples")
    factors = as_factors(factors, dims=samples.shape[1:])

    cur = samples
    remaining = list(range(order))  # original mode ids still present after axis 0
    for m in range(order):
        if m == mode:
            continue
        axis = 1 + remaining.index(m)
        cur = contract_axis(cur, axis, factors[m])
        remaining.remove(m)
    return np.ascontiguousarray(cur)


def frobenius_norm(t):
    """Frobenius norm: sqrt of the sum of squared entries."""
    return float(np.linalg.norm(np.asarray(t, dtype=np.float64).ravel()))
