"""Readout errors and their correction in tomography.

A symmetric assignment error shrinks every measured Pauli expectation by
(1 - 2 eps) per qubit in its support.  Inverting the confusion matrix, either
known or estimated from calibration shots, undoes the shrinkage.
"""

from crossverify import ConfusionMatrix, NoiseModel
from crossverify.protocols import calibration_shots, qst_reconstruct, simulate_dataset
from crossverify.states import pauli_expectation

eps = 0.05
nm = NoiseModel.noiseless().replace(eps_ro=eps)
ds = simulate_dataset("qst", 2, 0.0, nm, 20_000, seed=4)

raw = qst_reconstruct(ds)
known = qst_reconstruct(ds, ConfusionMatrix.symmetric(eps, 2))
calib = qst_reconstruct(ds, calibration=calibration_shots(2, 20_000, ConfusionMatrix.symmetric(eps, 2), seed=5))

for label in ("ZZ", "XX", "YY"):
    print(f"<{label}>: raw {pauli_expectation(raw, label):+.3f}, corrected {pauli_expectation(known, label):+.3f}, "
          f"calibrated {pauli_expectation(calib, label):+.3f}, ideal {1 if label != 'YY' else -1:+d}")
