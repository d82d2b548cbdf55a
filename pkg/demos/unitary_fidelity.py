"""Comparing two gate sequences instead of two states.

The same product input goes into both modules, one module runs the GHZ
preparation with an extra phase, and BBM measures the overlap.  Averaging
over the six cardinal states gives the average gate fidelity for one qubit,
which converts to a process fidelity; computational inputs give a cheaper
basis-dependent figure.
"""

import numpy as np

from crossverify import NoiseModel
from crossverify.protocols import ghz_unitary_overlaps, process_fidelity_from_avg

for phi in np.linspace(0, np.pi, 5):
    ideal = ghz_unitary_overlaps(1, phi, "cardinal").mean()
    noisy = ghz_unitary_overlaps(1, phi, "cardinal", NoiseModel(), shots=5000, seed=2).mean()
    comp2 = ghz_unitary_overlaps(2, phi, "computational", NoiseModel()).mean()
    print(f"phi={phi:4.2f}  F_av ideal {ideal:.3f} noisy {noisy:.3f} "
          f"(F_p {process_fidelity_from_avg(noisy, 2):.3f})  two-qubit F_sq {comp2:.3f}")
