"""Dense states, operators and overlap functionals for small registers.

States are plain numpy arrays: kets are complex vectors of length ``2**n`` and
density matrices are ``2**n x 2**n`` complex arrays.  Qubit 0 is the most
significant bit of a basis-state index, so ``|q0 q1 ... q_{n-1}>`` has index
``sum(q_k * 2**(n-1-k))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

MAX_QUBITS = 6

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
NORM_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


class StateError(ValueError):
    """Raised for invalid dimensions, qubit counts or unphysical inputs."""


class NumericalError(ArithmeticError):
    """Raised when a result that should be real or normalized is not."""


def num_qubits(a: np.ndarray) -> int:
    """Qubit count of a ket or square operator."""
    dim = a.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim or (a.ndim == 2 and a.shape[1] != dim):
        raise StateError(f"shape {a.shape} is not a qubit register")
    return n


def kron(*ops: np.ndarray) -> np.ndarray:
    return reduce(np.kron, ops)


def basis_state(bits: str | int, n: int | None = None) -> np.ndarray:
    """Computational basis ket; ``bits`` is a '0'/'1' string or an index."""
    if isinstance(bits, str):
        n = len(bits)
        index = int(bits, 2)
    else:
        if n is None:
            raise StateError("n is required when bits is an integer")
        index = bits
    psi = np.zeros(1 << n, dtype=complex)
    psi[index] = 1.0
    return psi


def ghz_state(n: int, phi: float = 0.0) -> np.ndarray:
    """Phase-shifted GHZ ket ``(|0...0> + exp(i phi)|1...1>)/sqrt(2)``."""
    if not 1 <= n <= MAX_QUBITS:
        raise StateError(f"n must be in 1..{MAX_QUBITS}, got {n}")
    if not np.isfinite(phi):
        raise StateError("phi must be finite")
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1 / np.sqrt(2)
    psi[-1] = np.exp(1j * phi) / np.sqrt(2)
    return psi


# single-qubit cardinal states, in the order |0>, |1>, |+>, |->, |i>, |-i>
CARDINAL_STATES = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
    "+i": np.array([1, 1j], dtype=complex) / np.sqrt(2),
    "-i": np.array([1, -1j], dtype=complex) / np.sqrt(2),
}


def dm(psi: np.ndarray) -> np.ndarray:
    """Density matrix ``|psi><psi|`` of a normalized ket."""
    psi = np.asarray(psi, dtype=complex)
    norm = np.vdot(psi, psi).real
    if abs(norm - 1) > NORM_TOL * len(psi):
        raise StateError(f"ket is not normalized (norm^2 = {norm})")
    return np.outer(psi, psi.conj())


def maximally_mixed(n: int) -> np.ndarray:
    return np.eye(1 << n, dtype=complex) / (1 << n)


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random physical state drawn from the Ginibre ensemble."""
    d = 1 << n
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def check_density_matrix(rho: np.ndarray, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array after validating physicality."""
    rho = np.asarray(rho, dtype=complex)
    num_qubits(rho)
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise StateError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1) > TRACE_TOL:
        raise StateError(f"density matrix trace {np.trace(rho).real} != 1")
    if np.linalg.eigvalsh(rho)[0] < -psd_tol:
        raise StateError("density matrix has a negative eigenvalue")
    return rho


def is_density_matrix(rho: np.ndarray) -> bool:
    try:
        check_density_matrix(rho)
    except StateError:
        return False
    return True


def _real_trace(value: complex, what: str) -> float:
    if abs(value.imag) >= 1e-9:
        raise NumericalError(f"{what} has imaginary part {value.imag:.3g}")
    return float(value.real)


def _clamp_unit(x: float) -> float:
    if -1e-9 < x < 0:
        return 0.0
    if 1 < x < 1 + 1e-9:
        return 1.0
    return x


def trace_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """Inner product ``tr(a b)`` of two density matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise StateError(f"dimension mismatch: {a.shape} vs {b.shape}")
    # tr(ab) = sum_ij a_ij b_ji
    value = _real_trace(np.einsum("ij,ji->", a, b), "tr(a b)")
    return _clamp_unit(value)


def purity(a: np.ndarray) -> float:
    return trace_overlap(a, a)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Overlap normalized by the larger purity, ``tr(ab)/max(tr a^2, tr b^2)``.

    Coincides with the Uhlmann fidelity whenever either state is pure.
    """
    denom = max(purity(a), purity(b))
    if denom < 1e-12:
        raise StateError("both states have zero purity")
    return trace_overlap(a, b) / denom


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def _project_simplex(w: np.ndarray) -> np.ndarray:
    # Euclidean projection onto {x >= 0, sum x = 1}; w is sorted descending.
    cumulative = np.cumsum(w)
    k = np.arange(1, len(w) + 1)
    shifted = w - (cumulative - 1) / k
    r = np.nonzero(shifted > 0)[0][-1]
    tau = (cumulative[r] - 1) / (r + 1)
    return np.maximum(w - tau, 0.0)


def project_to_physical(a: np.ndarray) -> np.ndarray:
    """Closest (Frobenius) positive semidefinite unit-trace matrix to ``a``.

    Negative eigenvalues are truncated and the removed weight is taken evenly
    from the remaining ones, which is the projection of the spectrum onto the
    probability simplex.
    """
    a = np.asarray(a, dtype=complex)
    num_qubits(a)
    if np.max(np.abs(a - a.conj().T)) > 1e-8:
        raise StateError("input is not Hermitian")
    if abs(np.trace(a).real - 1) > 1e-8:
        raise StateError(f"input trace {np.trace(a).real} != 1")
    a = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(a)
    if w[0] >= 0:
        return a / np.trace(a).real
    w_new = _project_simplex(w[::-1])[::-1]
    return (v * w_new) @ v.conj().T


@dataclass(frozen=True)
class PauliString:
    """Signed tensor product of single-qubit Paulis, e.g. ``PauliString("XZI")``."""

    letters: str
    sign: int = 1

    def __post_init__(self):
        if not self.letters or set(self.letters) - set("IXYZ"):
            raise StateError(f"invalid Pauli letters {self.letters!r}")
        if self.sign not in (1, -1):
            raise StateError("sign must be +1 or -1")

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        text = text.strip()
        sign = -1 if text.startswith("-") else 1
        return cls(text.lstrip("+-"), sign)

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.letters)

    def matrix(self) -> np.ndarray:
        return self.sign * kron(*(PAULIS[c] for c in self.letters))

    def __str__(self):
        return ("-" if self.sign < 0 else "") + self.letters


def all_pauli_strings(n: int) -> list[PauliString]:
    """The ``4**n`` positive Pauli strings in lexicographic I<X<Y<Z order."""
    return [PauliString("".join(p)) for p in itertools.product("IXYZ", repeat=n)]


def pauli_expectation(rho: np.ndarray, p: PauliString | str) -> float:
    if isinstance(p, str):
        p = PauliString.parse(p)
    rho = np.asarray(rho, dtype=complex)
    if num_qubits(rho) != p.n:
        raise StateError(f"Pauli string on {p.n} qubits vs {num_qubits(rho)}-qubit state")
    return _real_trace(np.einsum("ij,ji->", rho, p.matrix()), "<P>")


def pauli_decomposition(rho: np.ndarray) -> dict[str, float]:
    n = num_qubits(rho)
    return {p.letters: pauli_expectation(rho, p) for p in all_pauli_strings(n)}


def from_pauli_expectations(expectations: dict[str, float], n: int) -> np.ndarray:
    """Linear inversion ``rho = 2**-n * sum_P <P> P``; missing strings count as 0."""
    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    for letters, value in expectations.items():
        rho += value * PauliString(letters).matrix()
    return rho / (1 << n)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), atol=tol, rtol=0
    )
