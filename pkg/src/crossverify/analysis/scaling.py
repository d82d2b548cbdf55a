"""Sampling-complexity study: repetitions needed per protocol and qubit count."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..noise import NoiseModel
from ..protocols.pipeline import derive_seed, estimate, simulate_dataset
from .bootstrap import VarianceCurve, ZeroVariance, repetitions_for_variance, subsample_grid, variance_curve

# full-size datasets: 10^4 rounds of every tomography setting, 1.5e5 Bell rounds
DATASET_REPETITIONS = {"qst": 10_000, "rm": 10_000, "bbm": 150_000}


def measurements_per_repetition(protocol: str, n: int) -> int:
    """Single-shot measurements in one round of the protocol.

    The LOCC protocols measure each module in its own run, so a round costs
    one shot per setting per module; a Bell round reads both modules at once.
    """
    return {"qst": 2 * 6**n, "rm": 2 * 3**n, "bbm": 1}[protocol]


def bracketing_grid(
    estimate: float, size: int, points: int = 8, span: float = 4.0, floor: int = 2
) -> np.ndarray:
    """Subsample sizes spanning ``estimate / span`` to ``estimate * span`` (within ``[floor, size]``)."""
    floor = min(max(2, floor), size)
    lo = max(float(floor), estimate / span)
    hi = min(float(size), max(estimate * span, lo * span))
    grid = np.unique(np.round(np.geomspace(lo, hi, points)).astype(int))
    if len(grid) < 3:
        grid = np.arange(floor, floor + points)
    return grid


@dataclass(frozen=True)
class ScalingPoint:
    protocol: str
    n: int
    curve: VarianceCurve
    repetitions: int
    measurements: int
    overlap: float


def protocol_estimator(protocol: str, nm: NoiseModel | None):
    def run(ds, rng):
        return estimate(protocol, ds, nm, rng).overlap

    return run


def scaling_point(
    protocol: str,
    n: int,
    nm: NoiseModel,
    seed: int,
    repetitions: int | None = None,
    target: float = 1e-3,
    resamples: int = 100,
    grid=None,
) -> ScalingPoint:
    """Simulate one large dataset, bootstrap its variance curve and invert for ``target``.

    RM draws on the positive settings of the tomography dataset, as the same
    data serves both LOCC protocols.  Without an explicit ``grid`` a coarse
    log grid locates the target first, then a second grid brackets it so the
    power law is interpolated rather than extrapolated.
    """
    repetitions = DATASET_REPETITIONS[protocol] if repetitions is None else repetitions
    source = "bbm" if protocol == "bbm" else "qst"
    ds = simulate_dataset(source, n, 0.0, nm, repetitions, derive_seed(seed, n, ord(source[0])))
    if protocol == "rm":
        ds = ds.select([ds.settings[k] for k in range(len(ds.settings)) if ds.basis(k).positive])
    estimator = protocol_estimator(protocol, nm)
    rng = np.random.default_rng(derive_seed(seed, n, ord(protocol[0]), 1))
    if grid is None:
        coarse = _positive_curve(ds, estimator, lambda f: subsample_grid(ds.shots, smallest=25 * f), resamples, rng)
        estimate_n = required_repetitions(coarse, target)
        curve = _positive_curve(
            ds, estimator, lambda f: bracketing_grid(estimate_n, ds.shots, floor=f), resamples, rng
        )
    else:
        curve = variance_curve(ds, estimator, grid, resamples, rng)
    exact = required_repetitions(curve, target)
    overlap = estimator(ds, np.random.default_rng(derive_seed(seed, n, 2)))
    measurements = math.ceil(round(exact * measurements_per_repetition(protocol, n), 9))
    return ScalingPoint(protocol, n, curve, repetitions_for_variance(curve, target), measurements, overlap)


def _positive_curve(ds, estimator, make_grid, resamples, rng) -> VarianceCurve:
    """Variance curve on ``make_grid(floor)``, doubling ``floor`` while some variance is zero.

    Near-perfect overlaps give identical estimates on every small subsample.
    """
    floor = 2
    while True:
        try:
            return variance_curve(ds, estimator, make_grid(floor), resamples, rng)
        except ZeroVariance:
            if floor >= ds.shots:
                raise
            floor *= 2


def required_repetitions(curve: VarianceCurve, target: float) -> float:
    """Unrounded ``(a / target)**(1/b)``."""
    repetitions_for_variance(curve, target)  # validates the fit
    return (curve.amplitude / target) ** (1 / curve.exponent)


def scaling_fit(ns, counts, model: str) -> dict:
    """Fit required counts against qubit number.

    ``exponential``: ``N = c * 2**(b n)`` by least squares on ``log2 N``.
    ``quadratic``: ``N = alpha + beta n + gamma n**2``.
    """
    ns = np.asarray(ns, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if model == "exponential":
        if len(ns) < 2:
            raise ValueError("exponential fit needs at least two points")
        b, log_c = np.polyfit(ns, np.log2(counts), 1)
        fitted = 2**log_c * 2 ** (b * ns)
        return {"c": float(2**log_c), "b": float(b), "residual": float(np.sum((fitted - counts) ** 2))}
    if model == "quadratic":
        if len(ns) < 3:
            raise ValueError("quadratic fit needs at least three points")
        gamma, beta, alpha = np.polyfit(ns, counts, 2)
        fitted = alpha + beta * ns + gamma * ns**2
        return {
            "alpha": float(alpha),
            "beta": float(beta),
            "gamma": float(gamma),
            "residual": float(np.sum((fitted - counts) ** 2)),
        }
    raise ValueError(f"unknown scaling model {model!r}")
