"""End-to-end simulation of the three protocols on GHZ state pairs."""

from __future__ import annotations

import numpy as np

from ..circuits import bbm_circuit, pair_prep_circuit
from ..noise import NoiseModel, run_circuit
from ..sampling import ShotDataset, computational_setting, measure, pauli_settings, qst_settings
from .bbm import bbm_estimate
from .qst import qst_inner_product
from .report import PROTOCOLS, EstimateReport
from .rm import rm_estimate, rm_greedy_select


def derive_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1)[0])


def prepared_pair(n: int, phi: float, nm: NoiseModel) -> np.ndarray:
    """Joint state of ``|GHZ_n(0)> (x) |GHZ_n(phi)>`` prepared in parallel under ``nm``."""
    return run_circuit(pair_prep_circuit(n, phi), None, nm)


def bell_rotated_pair(n: int, phi: float, nm: NoiseModel) -> np.ndarray:
    return run_circuit(pair_prep_circuit(n, phi).then(bbm_circuit(n)), None, nm)


def simulate_dataset(protocol: str, n: int, phi: float, nm: NoiseModel, shots: int, seed: int) -> ShotDataset:
    """Shots of one protocol on a freshly prepared GHZ pair.

    QST measures all ``6**n`` signed settings, RM the ``3**n`` positive ones,
    BBM the computational basis after the Bell rotation.
    """
    meta = {"phi": repr(float(phi))}
    if protocol == "bbm":
        rho = bell_rotated_pair(n, phi, nm)
        settings = [computational_setting(n)]
    else:
        rho = prepared_pair(n, phi, nm)
        settings = qst_settings(n) if protocol == "qst" else pauli_settings(n)
    return measure(rho, n, settings, shots, nm.readout(2 * n), seed, protocol, meta)


def estimate(
    protocol: str,
    ds: ShotDataset,
    nm: NoiseModel | None = None,
    rng: np.random.Generator | None = None,
    phi: float = 0.0,
) -> EstimateReport:
    """Run the protocol's estimator on a dataset.

    QST corrects readout with ``nm``'s confusion matrices.  RM first selects
    ``3**n`` settings greedily from the positive settings present in ``ds``.
    """
    if protocol == "qst":
        cm = None if nm is None else nm.readout(ds.n)
        return qst_inner_product(ds, ds, cm, phi=phi)
    if protocol == "rm":
        rng = np.random.default_rng(0) if rng is None else rng
        pool = [ds.basis(k) for k in range(len(ds.settings)) if ds.basis(k).positive]
        chosen = rm_greedy_select(pool, min(3**ds.n, len(pool)), rng)
        return rm_estimate(ds.select([s.id for s in chosen]), phi=phi)
    if protocol == "bbm":
        return bbm_estimate(ds, phi=phi)
    raise ValueError(f"unknown protocol {protocol!r}; expected one of {PROTOCOLS}")


def phase_sweep(
    protocol: str, n: int, phis, nm: NoiseModel, shots: int, seed: int, on_dataset=None
) -> list[EstimateReport]:
    """One report per phase, each from an independently seeded dataset.

    ``on_dataset(i, ds)`` is called with every simulated dataset, e.g. to save it.
    """
    reports = []
    for i, phi in enumerate(phis):
        point_seed = derive_seed(seed, i)
        ds = simulate_dataset(protocol, n, phi, nm, shots, point_seed)
        if on_dataset is not None:
            on_dataset(i, ds)
        report = estimate(protocol, ds, nm, np.random.default_rng(point_seed), phi=float(phi))
        reports.append(
            EstimateReport(
                report.protocol, report.n, float(phi), report.overlap, report.shots, report.variance, seed
            )
        )
    return reports


def default_phases(count: int = 15) -> np.ndarray:
    return np.linspace(0, 2 * np.pi, count)
