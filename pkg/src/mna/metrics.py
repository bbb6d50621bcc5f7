"""Error measurement on the unit cube and the sinc reconstruction demo."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

VectorFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ErrorEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int

    def upper(self, k: float = 3.0) -> float:
        return self.value + k * self.std_error


def mc_l2_error(f: VectorFn, g: VectorFn, d: int, n_samples: int = 10_000, seed: int = 0,
                batch: int = 8192) -> ErrorEstimate:
    """L2([0,1]^d) distance between f and g by plain uniform Monte-Carlo.

    ``f`` and ``g`` map an (N, d) array to N values. The standard error of
    the mean squared difference is carried through the square root by the
    delta method (and is exactly zero for a constant difference).
    """
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    rng = np.random.default_rng(seed)
    X = rng.random((n_samples, d))
    sq = np.empty(n_samples)
    for i in range(0, n_samples, batch):
        xb = X[i:i + batch]
        diff = np.asarray(f(xb), dtype=float) - np.asarray(g(xb), dtype=float)
        bad = np.flatnonzero(~np.isfinite(diff))
        if bad.size:
            raise ArithmeticError(f"non-finite difference at x = {xb[bad[0]].tolist()}")
        sq[i:i + batch] = diff * diff
    mean = float(sq.mean())
    value = math.sqrt(mean)
    spread = float(sq.std(ddof=1)) if np.ptp(sq) > 0 else 0.0
    se_mean = spread / math.sqrt(n_samples)
    std_error = se_mean / (2 * value) if value > 0 else 0.0
    return ErrorEstimate(value, std_error, n_samples, seed)


def sup_error_grid(f: Callable, g: Callable, interval: tuple[float, float], grid_n: int) -> float:
    """max |f - g| over ``grid_n`` uniformly spaced points including both endpoints."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    x = np.linspace(interval[0], interval[1], grid_n)
    diff = np.asarray(f(x), dtype=float) - np.asarray(g(x), dtype=float)
    if not np.all(np.isfinite(diff)):
        raise ArithmeticError("non-finite difference on the grid")
    return float(np.max(np.abs(diff)))


def sinc_reconstruct(sample_fn: Callable[[np.ndarray], np.ndarray], radius: int, x):
    """Truncated cardinal series sum_{|k| <= R} f(k) sinc(x - k).

    ``np.sinc`` is sin(pi t)/(pi t) with the removable singularity set to 1,
    so integer x reproduces the sample exactly.
    """
    if radius < 1:
        raise ValueError("radius must be at least 1")
    k = np.arange(-radius, radius + 1)
    samples = np.asarray(sample_fn(k), dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.sinc(x[..., None] - k) @ samples
    # Exact cardinal property even where sinc rounding would leave 1e-17 residue.
    xi = np.rint(x)
    on_node = (x == xi) & (np.abs(xi) <= radius)
    if np.any(on_node):
        out = np.where(on_node, samples[(xi + radius).astype(int).clip(0, 2 * radius)], out)
    return out if out.ndim else float(out)


def sinc_truncation_error(f: Callable, radius: int, interval=(-2.0, 2.0), n_points: int = 4001) -> float:
    """L2 norm on ``interval`` of the truncation error of the cardinal series."""
    x = np.linspace(*interval, n_points)
    diff = sinc_reconstruct(f, radius, x) - f(x)
    # Trapezoid rule for the L2 norm.
    return float(math.sqrt(np.trapezoid(diff * diff, x)))
