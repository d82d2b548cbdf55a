"""Overcomplete-basis state tomography with readout correction.

Each Pauli string's expectation is the average over every measured setting
whose axes match it on its support, with the sign of negative settings folded
in.  The linear-inversion estimate is then projected onto physical states.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..noise import ConfusionMatrix
from ..sampling import BasisSetting, ShotDataset, counts, qst_settings, sample_shots, setting_rng
from ..states import StateError, all_pauli_strings, basis_state, dm, project_to_physical, trace_overlap
from .report import EstimateReport


class IncompleteDataset(StateError):
    pass


@lru_cache(maxsize=None)
def _pauli_matrices(n: int) -> np.ndarray:
    return np.array([p.matrix() for p in all_pauli_strings(n)])


@lru_cache(maxsize=None)
def _averaging_weights(n: int, settings: tuple[int, ...]) -> np.ndarray:
    """Matrix W with ``<P> = W[P] . probs.ravel()`` for probs of shape (settings, 2**n)."""
    outcomes = np.arange(1 << n)
    bits = (outcomes[:, None] >> (n - 1 - np.arange(n))) & 1  # bits[k, q]
    eig = 1 - 2 * bits
    bases = [BasisSetting.from_id(s, n) for s in settings]
    weights = np.zeros((4**n, len(settings), 1 << n))
    for i, p in enumerate(all_pauli_strings(n)):
        support = [q for q, c in enumerate(p.letters) if c != "I"]
        covering = [k for k, b in enumerate(bases) if all(b.axes[q] == p.letters[q] for q in support)]
        if not covering:
            raise IncompleteDataset(f"no setting measures Pauli {p.letters}")
        for k in covering:
            sign = np.prod([bases[k].signs[q] for q in support]) if support else 1
            weights[i, k] = sign * np.prod(eig[:, support], axis=1) / len(covering)
    return weights.reshape(4**n, -1)


def reconstruct_from_probabilities(
    probs: np.ndarray,
    n: int,
    settings: tuple[int, ...] | None = None,
    cm: ConfusionMatrix | None = None,
) -> np.ndarray:
    """Physical state from reported outcome distributions over ``settings``."""
    settings = tuple(b.id for b in qst_settings(n)) if settings is None else tuple(settings)
    probs = np.asarray(probs, dtype=float)
    if cm is not None:
        probs = cm.correct(probs)
    expectations = _averaging_weights(n, settings) @ probs.ravel()
    linear = np.tensordot(expectations, _pauli_matrices(n), axes=1) / (1 << n)
    return project_to_physical(linear)


def calibration_shots(n: int, shots: int, cm: ConfusionMatrix, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Computational-basis calibration: every ``|x>`` prepared ``shots`` times and read out."""
    z = BasisSetting(("+Z",) * n)
    prepared, reported = [], []
    for x in range(1 << n):
        rho = dm(basis_state(x, n))
        reported.append(sample_shots(rho, z, shots, cm, setting_rng(seed, 10_000 + x)))
        prepared.append(np.full(shots, x))
    return np.concatenate(prepared), np.concatenate(reported)


def _correction(n: int, cm: ConfusionMatrix | None, calibration) -> ConfusionMatrix | None:
    if calibration is not None:
        return ConfusionMatrix.from_calibration(*calibration, n)
    return cm


def qst_reconstruct(
    ds: ShotDataset,
    cm: ConfusionMatrix | None = None,
    calibration=None,
    module: str = "a",
) -> np.ndarray:
    """Reconstruct one module's state from a dataset covering all ``6**n`` settings.

    ``calibration`` is an optional ``(prepared, reported)`` pair of integer
    arrays; when given it replaces ``cm`` as the readout model.
    """
    required = {b.id for b in qst_settings(ds.n)}
    missing = required - set(ds.settings)
    if missing or ds.shots < 1:
        raise IncompleteDataset(f"dataset lacks {len(missing)} of {len(required)} tomography settings")
    data = ds.a if module == "a" else ds.b
    probs = counts(data, ds.n) / data.shape[1]
    return reconstruct_from_probabilities(probs, ds.n, ds.settings, _correction(ds.n, cm, calibration))


def qst_inner_product(
    ds_a: ShotDataset,
    ds_b: ShotDataset | None = None,
    cm: ConfusionMatrix | None = None,
    calibration=None,
    phi: float = 0.0,
) -> EstimateReport:
    """Overlap of module A's reconstruction (from ``ds_a``) and module B's (from ``ds_b``).

    With ``ds_b`` omitted both modules are read from ``ds_a``.
    """
    ds_b = ds_a if ds_b is None else ds_b
    rho_a = qst_reconstruct(ds_a, cm, calibration, module="a")
    rho_b = qst_reconstruct(ds_b, cm, calibration, module="b")
    return EstimateReport(
        "qst", ds_a.n, phi, trace_overlap(rho_a, rho_b), ds_a.shots * len(ds_a.settings), seed=ds_a.seed
    )
