from .bbm import bbm_estimate, bbm_exact_overlap, bbm_from_parities, even_parity_probability
from .pipeline import estimate, phase_sweep, prepared_pair, simulate_dataset
from .qst import IncompleteDataset, calibration_shots, qst_inner_product, qst_reconstruct, reconstruct_from_probabilities
from .report import PROTOCOLS, EstimateReport
from .rm import greedy_select, rm_estimate, rm_from_probabilities, rm_greedy_select, unitary_distance
from .unitary import (
    average_inner_product,
    computational_basis_fidelity,
    ghz_unitary_overlaps,
    process_fidelity,
    process_fidelity_from_avg,
    unitary_avg_fidelity,
)
