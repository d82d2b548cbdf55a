"""Cross-platform comparison of quantum states and gates on small simulated modules.

Three estimators of ``tr(rho_A rho_B)`` are provided: local tomography (QST),
randomized local measurements (RM) and a Bell-basis measurement (BBM) that
needs a quantum link.  A dense density-matrix simulator supplies the data.
"""

from .circuits import Circuit, Gate, bbm_circuit, ghz_prep_circuit, pair_prep_circuit
from .noise import ConfusionMatrix, NoiseModel, UnphysicalParameters, run_circuit
from .sampling import BasisSetting, ShotDataset, measure
from .states import (
    NumericalError,
    StateError,
    fidelity,
    ghz_state,
    project_to_physical,
    purity,
    trace_overlap,
)

__version__ = "0.1.0"
