"""Error budget of the Bell-basis overlap by finite-difference sensitivity.

The total error ``E = 1 - tr(rho_A rho_B)`` of two identical GHZ preparations
is linearised in each error source, ``E ~ sum_i p_i dE/dp_i``, and each term's
share of the sum is that source's fraction.  The derivative comes from
halving one source at a time; gate sources also halve their gate time so that
idling during those gates shrinks with them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..noise import NoiseModel
from ..protocols.bbm import bbm_estimate, bbm_exact_overlap
from ..protocols.pipeline import bell_rotated_pair, simulate_dataset

SOURCES = ("measurement", "single_qubit", "two_qubit")


class DegenerateBudget(ArithmeticError):
    pass


@dataclass(frozen=True)
class ErrorBudget:
    n: int
    error: float
    fractions: dict

    def __getitem__(self, source: str) -> float:
        return self.fractions[source]

    def rows(self) -> list[tuple[int, str, float]]:
        return [(self.n, s, self.fractions[s]) for s in SOURCES]


def _halve_readout(nm: NoiseModel) -> NoiseModel:
    eps = np.asarray(nm.eps_ro, float) / 2
    confusion = None
    if nm.confusion is not None:
        confusion = tuple(
            [[1 - m[0][1] / 2, m[0][1] / 2], [m[1][0] / 2, 1 - m[1][0] / 2]] for m in nm.confusion
        )
    return nm.replace(eps_ro=float(eps) if eps.ndim == 0 else tuple(eps.tolist()), confusion=confusion)


def halved(nm: NoiseModel, source: str) -> NoiseModel:
    """``nm`` with one error source halved."""
    if source == "measurement":
        return _halve_readout(nm)
    if source == "single_qubit":
        return nm.replace(p_1q=nm.p_1q / 2, t_1q=nm.t_1q / 2)
    if source == "two_qubit":
        return nm.replace(p_2q=nm.p_2q / 2, t_2q=nm.t_2q / 2)
    raise ValueError(f"unknown error source {source!r}")


def bbm_error(nm: NoiseModel, n: int, shots: int | None = None, rng=None) -> float:
    """``1 - overlap`` of two identical ``|GHZ_n(0)>`` preparations read out by BBM."""
    if shots is None:
        return 1.0 - bbm_exact_overlap(bell_rotated_pair(n, 0.0, nm), nm.readout(2 * n))
    rng = np.random.default_rng() if rng is None else rng
    ds = simulate_dataset("bbm", n, 0.0, nm, shots, int(rng.integers(2**63)))
    return 1.0 - bbm_estimate(ds).overlap


def error_budget(nm: NoiseModel, n: int, shots: int | None = None, rng=None) -> ErrorBudget:
    """Fraction of the BBM error attributable to readout, 1q gates and 2q gates.

    With ``p_i dE/dp_i ~ p_i (E - E_i) / (p_i / 2)`` the rate cancels, so each
    weight is ``2 (E - E_i)`` and a source with zero rate gets zero weight.
    Exact density matrices are used unless ``shots`` is given.
    """
    if n not in (1, 2, 3):
        raise ValueError("error budget supports n = 1, 2, 3")
    rng = np.random.default_rng() if rng is None and shots is not None else rng
    error = bbm_error(nm, n, shots, rng)
    weights = {s: 2.0 * (error - bbm_error(halved(nm, s), n, shots, rng)) for s in SOURCES}
    total = sum(weights.values())
    if all(abs(w) < 1e-15 for w in weights.values()) or total == 0:
        raise DegenerateBudget("every error-source derivative vanishes")
    return ErrorBudget(n, float(error), {s: float(w / total) for s, w in weights.items()})
