"""Bootstrap variance of an estimator as a function of the number of repetitions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..sampling import ShotDataset


class ZeroVariance(ValueError):
    """Every resample gave the same estimate, so the log-log fit is undefined."""


class BootstrapError(RuntimeError):
    def __init__(self, index: int, cause: Exception):
        super().__init__(f"estimator failed on bootstrap subsample {index}: {cause}")
        self.index = index


Estimator = Callable[[ShotDataset, np.random.Generator], float]


def bootstrap_estimates(
    ds: ShotDataset,
    estimator: Estimator,
    n_p: int,
    resamples: int = 100,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Estimator values on ``resamples`` subsamples of ``n_p`` repetitions drawn with replacement.

    A repetition is one round over every setting in ``ds``, so tomographic
    subsamples keep all bases.  The estimator also receives ``rng`` so that
    setting selection can be redone for each subsample.
    """
    if n_p < 2:
        raise ValueError("subsample size must be at least 2")
    rng = np.random.default_rng() if rng is None else rng
    values = np.empty(resamples)
    for i in range(resamples):
        picks = rng.integers(0, ds.shots, size=n_p)
        try:
            values[i] = estimator(ds.subsample(picks), rng)
        except Exception as exc:  # noqa: BLE001 - re-raised with the subsample index
            raise BootstrapError(i, exc) from exc
    return values


def bootstrap_variance(ds, estimator, n_p, resamples=100, rng=None) -> float:
    return float(np.var(bootstrap_estimates(ds, estimator, n_p, resamples, rng), ddof=1))


def subsample_grid(size: int, points: int = 8, smallest: int = 50) -> np.ndarray:
    """Log-spaced, strictly increasing subsample sizes from ``smallest`` to ``size``."""
    smallest = min(smallest, size)
    grid = np.unique(np.round(np.geomspace(smallest, size, points)).astype(int))
    return grid


@dataclass(frozen=True)
class VarianceCurve:
    n_p: np.ndarray
    variance: np.ndarray
    amplitude: float
    exponent: float

    def __post_init__(self):
        if np.any(np.diff(self.n_p) <= 0):
            raise ValueError("subsample sizes must be strictly increasing")
        if np.any(self.variance <= 0):
            raise ValueError("variances must be positive")

    def predict(self, n_p) -> np.ndarray:
        return self.amplitude * np.asarray(n_p, dtype=float) ** (-self.exponent)


def fit_power_law(n_p, variance) -> tuple[float, float]:
    """Least-squares fit of ``variance = a * n_p**(-b)`` in log-log space."""
    n_p = np.asarray(n_p, dtype=float)
    variance = np.asarray(variance, dtype=float)
    if len(n_p) < 3 or len(n_p) != len(variance):
        raise ValueError("need at least three (n_p, variance) points")
    if np.any(n_p <= 0):
        raise ValueError("power-law fit needs positive sizes")
    if np.any(variance <= 0):
        raise ZeroVariance(f"zero bootstrap variance at n_p = {n_p[variance <= 0].astype(int).tolist()}")
    slope, intercept = np.polyfit(np.log(n_p), np.log(variance), 1)
    return float(np.exp(intercept)), float(-slope)


def variance_curve(ds, estimator, grid=None, resamples=100, rng=None) -> VarianceCurve:
    rng = np.random.default_rng() if rng is None else rng
    grid = subsample_grid(ds.shots) if grid is None else np.asarray(grid)
    variances = np.array([bootstrap_variance(ds, estimator, int(n), resamples, rng) for n in grid])
    a, b = fit_power_law(grid, variances)
    return VarianceCurve(np.asarray(grid), variances, a, b)


class NonConvergent(ValueError):
    pass


def repetitions_for_variance(curve, target: float = 1e-3) -> int:
    """Smallest integer ``N`` with ``a N^-b <= target``.

    ``curve`` is a :class:`VarianceCurve` or an ``(a, b)`` pair.
    """
    a, b = (curve.amplitude, curve.exponent) if isinstance(curve, VarianceCurve) else curve
    if b <= 0:
        raise NonConvergent(f"variance does not decrease with repetitions (b = {b})")
    if target <= 0:
        raise ValueError("target variance must be positive")
    # rounding absorbs float noise such as (1/1e-3) = 1000.0000000000001
    return max(1, math.ceil(round((a / target) ** (1 / b), 9)))
