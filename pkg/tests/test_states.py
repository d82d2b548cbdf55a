import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crossverify.states import (
    CARDINAL_STATES,
    NumericalError,
    PauliString,
    StateError,
    all_pauli_strings,
    basis_state,
    check_density_matrix,
    dm,
    fidelity,
    from_pauli_expectations,
    ghz_state,
    is_density_matrix,
    maximally_mixed,
    pauli_decomposition,
    pauli_expectation,
    project_to_physical,
    purity,
    random_density_matrix,
    trace_distance,
    trace_overlap,
)

PHASES = np.linspace(0, 2 * np.pi, 15)
s2 = 1 / np.sqrt(2)


def states(n_max=3):
    @st.composite
    def draw(draw_fn):
        n = draw_fn(st.integers(1, n_max))
        seed = draw_fn(st.integers(0, 2**32 - 1))
        rank = draw_fn(st.integers(1, 1 << n))
        return random_density_matrix(n, np.random.default_rng(seed), rank)

    return draw()


@pytest.mark.parametrize(
    "n, phi, expected",
    [
        (1, 0.0, [s2, s2]),
        (3, np.pi, [s2, 0, 0, 0, 0, 0, 0, -s2]),
        (2, np.pi / 2, [s2, 0, 0, 1j * s2]),
    ],
)
def test_ghz_state_amplitudes(n, phi, expected):
    assert np.allclose(ghz_state(n, phi), expected, atol=1e-15)


@pytest.mark.parametrize("n, phi", [(0, 0.0), (7, 0.0), (2, np.nan), (2, np.inf)])
def test_ghz_state_rejects(n, phi):
    with pytest.raises(StateError):
        ghz_state(n, phi)


def test_basis_state_msb_first():
    assert np.argmax(basis_state("100")) == 4
    assert np.argmax(basis_state(6, 3)) == 6
    with pytest.raises(StateError):
        basis_state(1)


def test_cardinal_states_are_normalized_and_distinct():
    kets = list(CARDINAL_STATES.values())
    assert all(np.isclose(np.vdot(k, k).real, 1) for k in kets)
    # mutually unbiased pairs have overlap 1/2, antipodal pairs 0
    overlaps = sorted(round(abs(np.vdot(a, b)) ** 2, 12) for a, b in itertools.combinations(kets, 2))
    assert overlaps == [0.0] * 3 + [0.5] * 12


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("phi", PHASES)
def test_ghz_overlap_is_raised_cosine(n, phi):
    value = trace_overlap(dm(ghz_state(n, 0)), dm(ghz_state(n, phi)))
    assert abs(value - (1 + np.cos(phi)) / 2) < 1e-12


def test_trace_overlap_examples():
    g = dm(ghz_state(3))
    assert trace_overlap(g, g) == pytest.approx(1, abs=1e-12)
    for n in (1, 2, 3):
        assert trace_overlap(maximally_mixed(n), maximally_mixed(n)) == pytest.approx(2.0**-n, abs=1e-15)


def test_trace_overlap_shape_mismatch():
    with pytest.raises(StateError):
        trace_overlap(maximally_mixed(1), maximally_mixed(2))


def test_trace_overlap_flags_non_hermitian_product():
    a = np.array([[0.5, 0.5j], [0.5j, 0.5]])
    with pytest.raises(NumericalError):
        trace_overlap(a, np.array([[0.5, 0.5], [0.5, 0.5]]))


def test_fidelity_examples():
    zero = dm(basis_state("0"))
    assert fidelity(zero, zero) == pytest.approx(1)
    assert fidelity(maximally_mixed(1), maximally_mixed(1)) == pytest.approx(1)
    # 1/2 / max(1, 1/2)
    assert fidelity(zero, maximally_mixed(1)) == pytest.approx(0.5)


def test_purity_examples():
    assert purity(dm(ghz_state(2, 0.3))) == pytest.approx(1)
    assert purity(maximally_mixed(3)) == pytest.approx(1 / 8)
    p = 0.5
    rho = (1 - p) * dm(basis_state("0")) + p * maximally_mixed(1)
    # diag(0.75, 0.25) -> 0.5625 + 0.0625
    assert purity(rho) == pytest.approx(0.625, abs=1e-15)


@given(states(), states())
def test_fidelity_symmetric(a, b):
    if a.shape != b.shape:
        return
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-12)


@given(states())
def test_fidelity_with_itself_is_one(a):
    assert fidelity(a, a) == pytest.approx(1, abs=1e-12)


@given(states(), st.integers(0, 2**32 - 1))
def test_overlap_bounded_by_purities(a, seed):
    b = random_density_matrix(int(np.log2(a.shape[0])), np.random.default_rng(seed))
    value = trace_overlap(a, b)
    assert 0 <= value <= np.sqrt(purity(a) * purity(b)) + 1e-12


def test_project_to_physical_identity_on_physical(rng):
    rho = random_density_matrix(2, rng)
    assert np.allclose(project_to_physical(rho), rho, atol=1e-10)


def test_project_to_physical_truncation():
    out = project_to_physical(np.diag([1.1, -0.1]))
    assert np.allclose(out, np.diag([1.0, 0.0]), atol=1e-12)


def water_filling(w):
    """Brute force: try every support size, keep the feasible shift."""
    w = np.sort(w)[::-1]
    best = None
    for k in range(1, len(w) + 1):
        tau = (w[:k].sum() - 1) / k
        cand = np.concatenate([w[:k] - tau, np.zeros(len(w) - k)])
        if np.all(cand >= -1e-15):
            dist = np.sum((cand - w) ** 2)
            if best is None or dist < best[0]:
                best = (dist, cand)
    return best[1]


def test_project_to_physical_water_filling():
    out = project_to_physical(np.diag([0.7, 0.5, -0.1, -0.1]))
    w = np.sort(np.linalg.eigvalsh(out))[::-1]
    assert np.allclose(w, water_filling(np.array([0.7, 0.5, -0.1, -0.1])), atol=1e-12)
    assert np.allclose(w, [0.6, 0.4, 0, 0], atol=1e-12)
    assert np.trace(out).real == pytest.approx(1)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.floats(0.01, 2.0))
def test_project_to_physical_matches_oracle_and_is_idempotent(seed, n, scale):
    r = np.random.default_rng(seed)
    d = 1 << n
    g = r.normal(size=(d, d)) + 1j * r.normal(size=(d, d))
    h = (g + g.conj().T) * scale
    h = h - np.eye(d) * (np.trace(h).real - 1) / d
    out = project_to_physical(h)
    assert is_density_matrix(out)
    w = np.sort(np.linalg.eigvalsh(out))[::-1]
    assert np.allclose(w, water_filling(np.linalg.eigvalsh(h)), atol=1e-9)
    again = project_to_physical(out)
    assert np.linalg.norm(again - out) <= 1e-9


@pytest.mark.parametrize(
    "bad",
    [np.array([[1.0, 1.0], [0.0, 0.0]]), np.diag([0.6, 0.6]), np.eye(3) / 3],
)
def test_project_to_physical_rejects(bad):
    with pytest.raises(StateError):
        project_to_physical(bad)


@pytest.mark.parametrize("letters, expected", [("ZZI", 1.0), ("XXX", 1.0), ("III", 1.0), ("ZII", 0.0), ("YYX", -1.0)])
def test_pauli_expectation_ghz3(letters, expected):
    assert pauli_expectation(dm(ghz_state(3)), letters) == pytest.approx(expected, abs=1e-12)


def test_pauli_expectation_brute_force(rng):
    rho = random_density_matrix(2, rng)
    Z = np.diag([1, -1])
    X = np.array([[0, 1], [1, 0]])
    assert pauli_expectation(rho, "ZX") == pytest.approx(np.trace(rho @ np.kron(Z, X)).real)
    assert pauli_expectation(rho, "-ZX") == pytest.approx(-np.trace(rho @ np.kron(Z, X)).real)


def test_pauli_string_parsing():
    p = PauliString.parse("-XIZ")
    assert (p.letters, p.sign, p.weight, p.n, str(p)) == ("XIZ", -1, 2, 3, "-XIZ")
    with pytest.raises(StateError):
        PauliString("XA")
    assert len(all_pauli_strings(3)) == 64


@given(states())
def test_pauli_roundtrip(rho):
    n = int(np.log2(rho.shape[0]))
    back = from_pauli_expectations(pauli_decomposition(rho), n)
    assert np.max(np.abs(back - rho)) < 1e-10


def test_check_density_matrix():
    check_density_matrix(maximally_mixed(2))
    with pytest.raises(StateError):
        check_density_matrix(np.diag([1.2, -0.2]))
    with pytest.raises(StateError):
        check_density_matrix(np.diag([0.5, 0.6]))
    with pytest.raises(StateError):
        dm(np.array([1.0, 1.0]))


def test_trace_distance_orthogonal():
    assert trace_distance(dm(basis_state("0")), dm(basis_state("1"))) == pytest.approx(1)
