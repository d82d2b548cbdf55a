"""Bell-basis-measurement overlap estimation.

After the pairwise Bell rotation, ``tr(rho_A rho_B)`` is the expectation of
``(-1)^pi`` with ``pi`` the parity of the bitwise AND of the two modules'
outcomes.
"""

from __future__ import annotations

import numpy as np

from ..noise import ConfusionMatrix
from ..sampling import ShotDataset, parity_table
from ..states import StateError, num_qubits
from .report import EstimateReport


def and_parity(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return parity_table(n)[np.asarray(a) & np.asarray(b)]


def bbm_from_parities(parities: np.ndarray) -> tuple[float, float]:
    """Overlap ``1 - 2 mean(pi)`` and its binomial variance ``4 p (1 - p) / N``."""
    parities = np.asarray(parities).ravel()
    if parities.size == 0:
        raise StateError("empty Bell-measurement dataset")
    odd = parities.mean()
    even = 1 - odd
    return float(1 - 2 * odd), float(4 * even * (1 - even) / parities.size)


def bbm_estimate(ds: ShotDataset, phi: float = 0.0) -> EstimateReport:
    if ds.a.size == 0:
        raise StateError("empty Bell-measurement dataset")
    overlap, variance = bbm_from_parities(and_parity(ds.a, ds.b, ds.n))
    return EstimateReport("bbm", ds.n, phi, overlap, ds.a.size, variance, ds.seed)


def even_parity_probability(rho_out: np.ndarray, cm: ConfusionMatrix | None = None) -> float:
    """Exact even-parity probability of the ``2n``-qubit state after the Bell rotation."""
    total = num_qubits(rho_out)
    n = total // 2
    probs = np.real(np.diag(rho_out))
    if cm is not None:
        probs = cm.apply(probs)
    joint = np.arange(1 << total)
    odd = and_parity(joint >> n, joint & ((1 << n) - 1), n)
    return float(probs[odd == 0].sum())


def bbm_exact_overlap(rho_out: np.ndarray, cm: ConfusionMatrix | None = None) -> float:
    """Infinite-shot Bell-measurement estimate from the post-rotation state."""
    return 2 * even_parity_probability(rho_out, cm) - 1
