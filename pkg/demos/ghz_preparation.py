"""Preparing phase-shifted GHZ states under realistic noise.

The preparation is a Hadamard, a virtual-Z phase and a chain of CNOTs.  We
compare the noisy density matrix with the ideal state and watch how the
fidelity falls as qubits (and entangling gates) are added.
"""

import numpy as np

from crossverify import NoiseModel, fidelity, ghz_prep_circuit, ghz_state, purity, run_circuit
from crossverify.states import dm

nm = NoiseModel()
print("noise model:", nm)

for n in (1, 2, 3):
    circuit = ghz_prep_circuit(n, phi=0.0)
    rho = run_circuit(circuit, None, nm)
    f = fidelity(rho, dm(ghz_state(n)))
    print(f"n={n}: {circuit.count('2q')} CNOTs, fidelity {f:.4f}, purity {purity(rho):.4f}")

# the phase enters through a zero-duration frame change, so it costs nothing
rho = run_circuit(ghz_prep_circuit(2, np.pi / 2), None, NoiseModel.noiseless())
print("noiseless |GHZ_2(pi/2)> amplitudes:", np.round(np.diag(rho).real, 3), np.round(rho[0, 3], 3))
