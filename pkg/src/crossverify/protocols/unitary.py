"""Comparing unitaries through averaged state overlaps.

``U_A`` and ``U_B`` act on identical input states on the two modules; the
overlap of the outputs is averaged over the inputs.  Inputs are products of
the same single-qubit state on corresponding qubits.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..circuits import bbm_circuit, pair_prep_circuit
from ..noise import NoiseModel, run_circuit
from ..states import CARDINAL_STATES, StateError, dm, kron, num_qubits
from ..sampling import computational_setting, measure
from .bbm import bbm_estimate, bbm_exact_overlap

COMPUTATIONAL = ("0", "1")
CARDINAL = tuple(CARDINAL_STATES)


def input_states(n: int, ensemble: str = "cardinal") -> list[np.ndarray]:
    labels = CARDINAL if ensemble == "cardinal" else COMPUTATIONAL
    return [kron(*(CARDINAL_STATES[c] for c in combo)) for combo in itertools.product(labels, repeat=n)]


def _exact_overlap(u_a, u_b, psi) -> float:
    return float(abs(np.vdot(u_a @ psi, u_b @ psi)) ** 2)


def _bbm_overlap(u_a, u_b, psi, nm: NoiseModel | None) -> float:
    n = num_qubits(u_a)
    joint = kron(u_a @ psi, u_b @ psi)
    rho = run_circuit(bbm_circuit(n), dm(joint), nm)
    cm = None if nm is None else nm.readout(2 * n)
    return bbm_exact_overlap(rho, cm)


def average_inner_product(u_a, u_b, ensemble: str = "cardinal", method: str = "exact", nm=None) -> float:
    """Mean output overlap over product inputs from ``ensemble``.

    ``method="bbm"`` evaluates each overlap through the Bell-measurement
    circuit at infinite shots, optionally under the noise model ``nm`` (which
    then affects only the measurement stage).
    """
    u_a = np.asarray(u_a, dtype=complex)
    u_b = np.asarray(u_b, dtype=complex)
    if u_a.shape != u_b.shape:
        raise StateError("unitaries act on different dimensions")
    n = num_qubits(u_a)
    if method == "exact":
        values = [_exact_overlap(u_a, u_b, psi) for psi in input_states(n, ensemble)]
    elif method == "bbm":
        values = [_bbm_overlap(u_a, u_b, psi, nm) for psi in input_states(n, ensemble)]
    else:
        raise StateError(f"unknown method {method!r}")
    return float(np.mean(values))


def unitary_avg_fidelity(u_a, u_b, method: str = "exact", nm=None) -> float:
    """Average fidelity over the six single-qubit cardinal states (a 2-design)."""
    if np.asarray(u_a).shape != (2, 2):
        raise StateError("cardinal-state average fidelity is only a 2-design for one qubit")
    return average_inner_product(u_a, u_b, "cardinal", method, nm)


def process_fidelity_from_avg(f_av: float, d: int) -> float:
    return ((d + 1) * f_av - 1) / d


def process_fidelity(u_a, u_b) -> float:
    """``|tr(U_A^dag U_B)|^2 / d^2``, the entanglement fidelity of ``U_A^dag U_B``."""
    d = np.asarray(u_a).shape[0]
    return float(abs(np.trace(np.asarray(u_a).conj().T @ u_b)) ** 2 / d**2)


def computational_basis_fidelity(u_a, u_b, method: str = "exact", nm=None) -> float:
    """``(1/d) sum_p |<p| U_A^dag U_B |p>|^2`` over computational inputs."""
    n = num_qubits(np.asarray(u_a))
    if not 1 <= n <= 2:
        raise StateError("computational-basis fidelity supports one or two qubits")
    return average_inner_product(u_a, u_b, "computational", method, nm)


def ghz_unitary_overlaps(n: int, phi: float, ensemble: str = "cardinal", nm=None, shots=None, seed: int = 0):
    """Per-input BBM overlaps for the GHZ preparation unitaries ``U(0)`` and ``U(phi)``.

    Each product input is prepared ideally on both modules, then both
    preparation circuits and the Bell measurement run under ``nm``.  With
    ``shots`` the overlaps are sampled, otherwise taken at infinite shots.
    """
    nm = NoiseModel.noiseless() if nm is None else nm
    circuit = pair_prep_circuit(n, phi).then(bbm_circuit(n))
    cm = nm.readout(2 * n)
    values = []
    for k, psi in enumerate(input_states(n, ensemble)):
        rho = run_circuit(circuit, dm(kron(psi, psi)), nm)
        if shots is None:
            values.append(bbm_exact_overlap(rho, cm))
        else:
            ds = measure(rho, n, [computational_setting(n)], shots, cm, seed + k, "bbm")
            values.append(bbm_estimate(ds).overlap)
    return np.array(values)
