import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crossverify.circuits import bbm_circuit, ghz_prep_circuit
from crossverify.noise import ConfusionMatrix, NoiseModel, run_circuit
from crossverify.protocols import (
    EstimateReport,
    IncompleteDataset,
    average_inner_product,
    bbm_estimate,
    bbm_exact_overlap,
    bbm_from_parities,
    calibration_shots,
    computational_basis_fidelity,
    even_parity_probability,
    estimate,
    greedy_select,
    phase_sweep,
    process_fidelity,
    process_fidelity_from_avg,
    qst_inner_product,
    qst_reconstruct,
    reconstruct_from_probabilities,
    rm_estimate,
    rm_from_probabilities,
    rm_greedy_select,
    simulate_dataset,
    unitary_avg_fidelity,
    unitary_distance,
)
from crossverify.protocols.pipeline import prepared_pair
from crossverify.protocols.rm import hamming_kernel
from crossverify.sampling import (
    BasisSetting,
    ShotDataset,
    computational_setting,
    exact_distributions,
    measure,
    pauli_settings,
    qst_settings,
)
from crossverify.states import (
    StateError,
    basis_state,
    dm,
    fidelity,
    ghz_state,
    kron,
    maximally_mixed,
    pauli_expectation,
    random_density_matrix,
    trace_distance,
    trace_overlap,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def state_pool(n, seed=0):
    r = np.random.default_rng(seed)
    return [
        dm(ghz_state(n, 0.0)),
        dm(ghz_state(n, 1.1)),
        maximally_mixed(n),
        random_density_matrix(n, r),
        random_density_matrix(n, r, rank=1),
    ]


def reduced(rho, n, module):
    t = rho.reshape(1 << n, 1 << n, 1 << n, 1 << n)
    return np.einsum("ijkj->ik", t) if module == "a" else np.einsum("ijil->jl", t)


# --- tomography -------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_qst_exact_probabilities_reconstruct_state(n):
    for rho in state_pool(n, seed=n):
        probs = exact_distributions(rho, qst_settings(n))
        assert trace_distance(reconstruct_from_probabilities(probs, n), rho) < 1e-9


def test_qst_exact_with_readout_correction():
    rho = random_density_matrix(2, np.random.default_rng(9))
    cm = ConfusionMatrix.symmetric([0.05, 0.02], 2)
    probs = exact_distributions(rho, qst_settings(2), cm)
    assert trace_distance(reconstruct_from_probabilities(probs, 2, cm=cm), rho) < 1e-9


def test_qst_ghz3_from_shots():
    ds = simulate_dataset("qst", 3, 0.0, NoiseModel.noiseless(), 10_000, 3)
    rho = qst_reconstruct(ds)
    assert fidelity(rho, dm(ghz_state(3))) > 0.99
    assert qst_inner_product(ds).overlap > 0.99


def test_qst_maximally_mixed_from_shots():
    rho = kron(maximally_mixed(1), maximally_mixed(1))
    ds = measure(rho, 1, qst_settings(1), 10_000, None, 4, "qst")
    assert trace_distance(qst_reconstruct(ds), maximally_mixed(1)) < 0.02


def test_qst_readout_correction_recovers_z():
    eps, shots = 0.05, 20_000
    rho = random_density_matrix(1, np.random.default_rng(3))
    cm = ConfusionMatrix.symmetric(eps, 2)
    ds = measure(kron(rho, rho), 1, qst_settings(1), shots, cm, 8, "qst")
    est = pauli_expectation(qst_reconstruct(ds, ConfusionMatrix.symmetric(eps, 1)), "Z")
    true = pauli_expectation(rho, "Z")
    # Z is averaged over two settings; inversion scales the binomial error by 1/(1-2 eps)
    sigma = np.sqrt((1 - true**2) / (2 * shots)) / (1 - 2 * eps)
    assert abs(est - true) < 2 * sigma + 1e-3
    raw = pauli_expectation(qst_reconstruct(ds), "Z")
    assert abs(raw - (1 - 2 * eps) * true) < 0.02


def test_qst_calibration_path_matches_true_matrix():
    cm = ConfusionMatrix.symmetric([0.03, 0.06], 2)
    prepared, reported = calibration_shots(2, 50_000, cm, 1)
    fitted = ConfusionMatrix.from_calibration(prepared, reported, 2)
    assert np.allclose(fitted.flip_probabilities(), cm.flip_probabilities(), atol=0.005)
    rho = prepared_pair(1, 0.4, NoiseModel.noiseless())
    ds = measure(rho, 1, qst_settings(1), 5000, cm[:2], 2, "qst")
    a = qst_inner_product(ds, cm=cm[:1]).overlap
    b = qst_inner_product(ds, calibration=calibration_shots(1, 50_000, cm[:1], 1)).overlap
    assert abs(a - b) < 0.01


def test_qst_reports_total_shots():
    ds = simulate_dataset("qst", 1, 0.0, NoiseModel.noiseless(), 100, 0)
    rep = qst_inner_product(ds)
    assert rep.shots == 600 and rep.protocol == "qst"


def test_qst_incomplete_dataset():
    ds = simulate_dataset("rm", 1, 0.0, NoiseModel.noiseless(), 10, 0)
    with pytest.raises(IncompleteDataset):
        qst_reconstruct(ds)


def test_qst_orthogonal_ghz1():
    nm = NoiseModel.noiseless()
    ds = simulate_dataset("qst", 1, np.pi, nm, 10_000, 6)
    assert qst_inner_product(ds).overlap < 0.01


def test_qst_median_noise_ghz3_matches_density_matrix_oracle():
    nm = NoiseModel()
    rho = prepared_pair(3, 0.0, nm)
    oracle = trace_overlap(reduced(rho, 3, "a"), reduced(rho, 3, "b"))
    ds = simulate_dataset("qst", 3, 0.0, nm, 5_000, 12)
    assert abs(estimate("qst", ds, nm).overlap - oracle) < 0.03


# --- randomized measurements ------------------------------------------------


def rm_brute_force(rho_a, rho_b, n):
    total = 0.0
    for setting in pauli_settings(n):
        pa = exact_distributions(rho_a, [setting])[0]
        pb = exact_distributions(rho_b, [setting])[0]
        for s, t in itertools.product(range(1 << n), repeat=2):
            d = bin(s ^ t).count("1")
            total += (-2.0) ** (-d) * pa[s] * pb[t]
    return 2**n * total / 3**n


@pytest.mark.parametrize(
    "rho_a, rho_b, expected",
    [
        (dm(basis_state("0")), dm(basis_state("0")), 1.0),
        (dm(basis_state("0")), dm(basis_state("1")), 0.0),
        (maximally_mixed(1), maximally_mixed(1), 0.5),
    ],
)
def test_rm_hand_examples(rho_a, rho_b, expected):
    pa = exact_distributions(rho_a, pauli_settings(1))
    pb = exact_distributions(rho_b, pauli_settings(1))
    assert rm_from_probabilities(pa, pb, 1) == pytest.approx(expected, abs=1e-12)
    assert rm_brute_force(rho_a, rho_b, 1) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_rm_exact_equals_trace_overlap(n):
    pool = state_pool(n, seed=10 + n)
    for rho_a, rho_b in itertools.product(pool, repeat=2):
        pa = exact_distributions(rho_a, pauli_settings(n))
        pb = exact_distributions(rho_b, pauli_settings(n))
        value = rm_from_probabilities(pa, pb, n)
        assert value == pytest.approx(trace_overlap(rho_a, rho_b), abs=1e-10)
        assert value == pytest.approx(rm_brute_force(rho_a, rho_b, n), abs=1e-12)


def test_hamming_kernel_entries():
    k = hamming_kernel(2)
    for s, t in itertools.product(range(4), repeat=2):
        assert k[s, t] == (-2.0) ** (-bin(s ^ t).count("1"))


def test_rm_estimate_from_dataset():
    ds = simulate_dataset("rm", 2, np.pi / 2, NoiseModel.noiseless(), 20_000, 3)
    assert rm_estimate(ds).overlap == pytest.approx(0.5, abs=0.03)
    with pytest.raises(StateError):
        rm_estimate(ds, ds.select(ds.settings[:3]))


def test_unitary_distance_examples():
    zrot = BasisSetting(("+Z",)).rotation()
    xrot = BasisSetting(("+X",)).rotation()
    assert unitary_distance(xrot, xrot) == pytest.approx(0, abs=1e-7)
    assert unitary_distance(zrot, xrot) == pytest.approx(np.sqrt(2))


def pool_strategy():
    return st.integers(1, 2).flatmap(
        lambda n: st.tuples(st.just(pauli_settings(n)), st.integers(1, 3**n), st.integers(0, 1000))
    )


@given(pool_strategy())
def test_greedy_deterministic_and_unique(case):
    pool, k, seed = case
    a = greedy_select(pool, k, np.random.default_rng(seed))
    b = greedy_select(pool, k, np.random.default_rng(seed))
    assert a == b and len(set(a)) == k


@pytest.mark.parametrize("n", [1, 2, 3])
def test_greedy_full_pool(n):
    chosen = rm_greedy_select(pauli_settings(n), 3**n, np.random.default_rng(0))
    assert {s.id for s in chosen} == {s.id for s in pauli_settings(n)}


def test_greedy_maximizes_spread():
    # from +X the farthest single-qubit setting is reached next
    pool = pauli_settings(1)
    chosen = greedy_select(pool, 2, np.random.default_rng(0))
    dist = [unitary_distance(pool[chosen[0]].rotation(), p.rotation()) for p in pool]
    assert dist[chosen[1]] == pytest.approx(max(dist))
    with pytest.raises(StateError):
        greedy_select(pool, 4, np.random.default_rng(0))


# --- Bell-basis measurement -------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bbm_parity_identity(n):
    r = np.random.default_rng(100 + n)
    for _ in range(5):
        rho_a = random_density_matrix(n, r, rank=int(r.integers(1, (1 << n) + 1)))
        rho_b = random_density_matrix(n, r)
        out = run_circuit(bbm_circuit(n), kron(rho_a, rho_b))
        even = even_parity_probability(out)
        assert abs(even - (1 + trace_overlap(rho_a, rho_b)) / 2) < 1e-12


def test_bbm_trivial_datasets():
    zeros = ShotDataset(2, "bbm", (computational_setting(2).id,), np.zeros((1, 50)), np.zeros((1, 50)))
    assert bbm_estimate(zeros).overlap == 1.0
    a = np.array([[1, 1, 0, 1]])
    b = np.array([[1, 0, 1, 1]])  # a & b parity: 1, 0, 0, 1
    half = ShotDataset(1, "bbm", (computational_setting(1).id,), a, b)
    assert bbm_estimate(half).overlap == 0.0


def test_bbm_binomial_variance():
    overlap, variance = bbm_from_parities(np.array([0, 0, 0, 1]))
    assert overlap == 0.5
    assert variance == pytest.approx(4 * 0.75 * 0.25 / 4)
    with pytest.raises(StateError):
        bbm_from_parities(np.array([]))


@pytest.mark.parametrize(
    "n, phi, module_b, expected",
    [(3, 0.0, None, 1.0), (1, None, "1", 0.0), (2, np.pi / 2, None, 0.5)],
)
def test_bbm_noiseless_examples(n, phi, module_b, expected):
    if module_b is None:
        rho = run_circuit(bbm_circuit(n), prepared_pair(n, phi, NoiseModel.noiseless()))
    else:
        rho = run_circuit(bbm_circuit(n), dm(kron(basis_state("0"), basis_state(module_b))))
    assert bbm_exact_overlap(rho) == pytest.approx(expected, abs=1e-12)


def test_bbm_ghz3_shots():
    ds = simulate_dataset("bbm", 3, 0.0, NoiseModel.noiseless(), 100_000, 1)
    assert bbm_estimate(ds).overlap == pytest.approx(1.0, abs=0.01)


def test_readout_error_lowers_bbm_overlap():
    rho = run_circuit(bbm_circuit(1), prepared_pair(1, 0.0, NoiseModel.noiseless()))
    eps = 0.05
    value = bbm_exact_overlap(rho, ConfusionMatrix.symmetric(eps, 2))
    # |+>|+> rotates to a = 0 with b uniform, so odd parity needs a flipped a: P = eps / 2
    assert value == pytest.approx(1 - eps, abs=1e-12)


# --- unitary comparison -----------------------------------------------------


@pytest.mark.parametrize(
    "u_b, expected",
    [(np.eye(2), 1.0), (Z, 1 / 3), (X, 1 / 3)],
)
def test_average_fidelity_single_qubit(u_b, expected):
    assert unitary_avg_fidelity(np.eye(2), u_b) == pytest.approx(expected, abs=1e-12)
    assert unitary_avg_fidelity(np.eye(2), u_b, method="bbm") == pytest.approx(expected, abs=1e-12)


def test_average_fidelity_is_two_design():
    # for one qubit F_av over the cardinal states equals (d F_p + 1) / (d + 1)
    r = np.random.default_rng(4)
    for _ in range(5):
        q, _ = np.linalg.qr(r.normal(size=(2, 2)) + 1j * r.normal(size=(2, 2)))
        f_av = unitary_avg_fidelity(np.eye(2), q)
        assert process_fidelity_from_avg(f_av, 2) == pytest.approx(process_fidelity(np.eye(2), q), abs=1e-12)


@pytest.mark.parametrize("f_av, d, expected", [(1.0, 2, 1.0), (0.5, 2, 0.25), (1 / 3, 2, 0.0), (1 / 5, 4, 0.0)])
def test_process_fidelity_from_avg(f_av, d, expected):
    assert process_fidelity_from_avg(f_av, d) == pytest.approx(expected, abs=1e-15)


def test_computational_basis_fidelity():
    assert computational_basis_fidelity(np.eye(2), np.eye(2)) == pytest.approx(1)
    assert computational_basis_fidelity(np.eye(2), X) == pytest.approx(0)
    with pytest.raises(StateError):
        computational_basis_fidelity(np.eye(8), np.eye(8))
    with pytest.raises(StateError):
        unitary_avg_fidelity(np.eye(4), np.eye(4))


def test_ghz_prep_unitary_fidelity_curve():
    phis = np.linspace(0, 2 * np.pi, 15)
    u0 = ghz_prep_circuit(2, 0.0).unitary()
    f = [computational_basis_fidelity(u0, ghz_prep_circuit(2, p).unitary()) for p in phis]
    assert f[0] == pytest.approx(1.0)
    assert np.allclose(f, (1 + np.cos(phis)) / 2, atol=1e-12)
    assert average_inner_product(u0, u0, "cardinal") == pytest.approx(1)


# --- end to end ---------------------------------------------------------------


@pytest.mark.parametrize("phi", [0.0, 2.0])
def test_estimators_agree_noiseless(phi):
    nm = NoiseModel.noiseless()
    values = []
    for i, protocol in enumerate(("qst", "rm", "bbm")):
        ds = simulate_dataset(protocol, 2, phi, nm, 100_000, 20 + i)
        values.append(estimate(protocol, ds, nm).overlap)
    assert max(values) - min(values) < 0.02
    assert np.mean(values) == pytest.approx((1 + np.cos(phi)) / 2, abs=0.02)


def test_phase_sweep_reports_and_seeding():
    nm = NoiseModel.noiseless()
    seen = []
    reps = phase_sweep("bbm", 1, [0.0, np.pi], nm, 1000, 5, on_dataset=lambda i, ds: seen.append(i))
    assert seen == [0, 1]
    assert [r.phi for r in reps] == [0.0, np.pi]
    assert reps[0].overlap == 1.0 and reps[1].overlap == pytest.approx(0.0, abs=0.1)
    again = phase_sweep("bbm", 1, [0.0, np.pi], nm, 1000, 5)
    assert again == reps


def test_unknown_protocol():
    ds = simulate_dataset("bbm", 1, 0.0, NoiseModel.noiseless(), 10, 0)
    with pytest.raises(ValueError):
        estimate("swap", ds)


def test_report_json_roundtrip():
    rep = EstimateReport("rm", 2, 0.5, 0.81, 900, None, 3)
    assert EstimateReport.from_json(rep.to_json()) == rep
    with pytest.raises(ValueError):
        EstimateReport("rm", 2, 0.5, float("nan"), 900)
