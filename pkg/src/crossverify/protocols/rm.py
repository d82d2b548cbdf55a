"""Randomized-measurement overlap estimation and greedy basis selection."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..sampling import BasisSetting, ShotDataset, counts
from ..states import StateError, kron
from .report import EstimateReport


def unitary_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``sqrt(2 - (2/d) |tr(u^dag v)|)``; for one qubit this is ``sqrt(2 - |tr(u^dag v)|)``."""
    d = u.shape[0]
    value = 2 - 2 / d * abs(np.trace(u.conj().T @ v))
    return float(np.sqrt(max(value, 0.0)))


def _as_unitary(item) -> np.ndarray:
    return item.rotation() if isinstance(item, BasisSetting) else np.asarray(item, dtype=complex)


def greedy_select(pool, k: int, rng: np.random.Generator) -> list[int]:
    """Indices into ``pool`` chosen greedily to spread the selected unitaries apart.

    The first index is uniform; each next one maximizes the summed distance
    to everything selected so far, ties going to the lowest index.
    """
    if not 1 <= k <= len(pool):
        raise StateError(f"cannot select {k} of {len(pool)} candidates")
    unitaries = [_as_unitary(item) for item in pool]
    m = len(unitaries)
    dist = np.array([[unitary_distance(u, v) for v in unitaries] for u in unitaries])
    chosen = [int(rng.integers(m))]
    total = dist[chosen[0]].copy()
    available = np.ones(m, dtype=bool)
    available[chosen[0]] = False
    while len(chosen) < k:
        # Pauli settings tie often; rounding keeps ties exact so argmin picks the lowest index
        cost = np.where(available, np.round(-total, 12), np.inf)
        nxt = int(np.argmin(cost))
        chosen.append(nxt)
        available[nxt] = False
        total += dist[nxt]
    return chosen


def rm_greedy_select(settings, k: int, rng: np.random.Generator) -> list[BasisSetting]:
    """Greedy selection over a pool of settings, ordered lowest id first for ties."""
    pool = sorted(settings, key=lambda s: s.id)
    return [pool[i] for i in greedy_select(pool, k, rng)]


@lru_cache(maxsize=None)
def hamming_kernel(n: int) -> np.ndarray:
    """``K[s, s'] = (-2)^(-D[s, s'])`` over n-bit outcomes."""
    single = np.array([[1.0, -0.5], [-0.5, 1.0]])
    return kron(*([single] * n)) if n > 1 else single


def rm_from_probabilities(probs_a: np.ndarray, probs_b: np.ndarray, n: int) -> float:
    """``2^n * mean_U sum_{s,s'} (-2)^(-D) P_A(s) P_B(s')`` over the rows (settings)."""
    probs_a = np.atleast_2d(probs_a)
    probs_b = np.atleast_2d(probs_b)
    if probs_a.shape != probs_b.shape:
        raise StateError("module distributions must cover the same settings")
    cross = np.einsum("us,st,ut->u", probs_a, hamming_kernel(n), probs_b)
    return float((1 << n) * cross.mean())


def rm_estimate(ds_a: ShotDataset, ds_b: ShotDataset | None = None, phi: float = 0.0) -> EstimateReport:
    """Cross-correlation estimate of ``tr(rho_A rho_B)`` from shared local settings.

    Module A outcomes come from ``ds_a`` and module B outcomes from ``ds_b``
    (defaulting to the same dataset).  Plug-in frequencies suffice since the
    two factors are sampled on independent devices.
    """
    ds_b = ds_a if ds_b is None else ds_b
    if tuple(ds_a.settings) != tuple(ds_b.settings) or ds_a.n != ds_b.n:
        raise StateError("datasets must cover the same settings in the same order")
    pa = counts(ds_a.a, ds_a.n) / ds_a.shots
    pb = counts(ds_b.b, ds_b.n) / ds_b.shots
    value = rm_from_probabilities(pa, pb, ds_a.n)
    return EstimateReport("rm", ds_a.n, phi, value, ds_a.shots * len(ds_a.settings), seed=ds_a.seed)
