"""Layered circuits over a qubit register, and the GHZ / Bell-measurement builders.

A :class:`Circuit` is a list of layers; each layer is a tuple of gates acting
on disjoint qubits.  Gates only carry their unitary and their class
(virtual, single-qubit, two-qubit); timing comes from the noise model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .states import StateError

VIRTUAL, SINGLE, TWO = "virtual", "1q", "2q"

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def phase(theta: float) -> np.ndarray:
    """``diag(1, e^{i theta})``; equal to ``Rz(theta)`` up to a global phase."""
    return np.diag([1, np.exp(1j * theta)])


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.name not in _BUILDERS:
            raise StateError(f"unknown gate {self.name!r}")
        arity = 2 if self.name in ("cnot", "cz") else 1
        if len(self.qubits) != arity or len(set(self.qubits)) != arity:
            raise StateError(f"{self.name} needs {arity} distinct qubits, got {self.qubits}")

    @property
    def kind(self) -> str:
        if self.name == "vz":
            return VIRTUAL
        return TWO if len(self.qubits) == 2 else SINGLE

    def matrix(self) -> np.ndarray:
        return _BUILDERS[self.name](*self.params)


_BUILDERS = {
    "h": lambda: _H,
    "x": lambda: _X,
    "rx": rx,
    "ry": ry,
    "vz": phase,
    "cnot": lambda: _CNOT,
    "cz": lambda: _CZ,
}


def h(q):
    return Gate("h", (q,))


def x(q):
    return Gate("x", (q,))


def vz(q, theta):
    return Gate("vz", (q,), (float(theta),))


def cnot(c, t):
    return Gate("cnot", (c, t))


@dataclass(frozen=True)
class Circuit:
    n: int
    layers: tuple[tuple[Gate, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        for layer in self.layers:
            used = [q for g in layer for q in g.qubits]
            if len(used) != len(set(used)):
                raise StateError(f"qubit used twice in layer {layer}")
            if any(not 0 <= q < self.n for q in used):
                raise StateError(f"qubit index out of range in layer {layer}")

    @classmethod
    def from_layers(cls, n: int, layers) -> "Circuit":
        return cls(n, tuple(tuple(layer) for layer in layers if layer))

    @property
    def gates(self) -> list[Gate]:
        return [g for layer in self.layers for g in layer]

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    def then(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise StateError("register size mismatch")
        return Circuit(self.n, self.layers + other.layers)

    def shifted(self, offset: int, n: int) -> "Circuit":
        """Same circuit relabelled onto qubits ``offset..`` of an ``n``-qubit register."""
        layers = [
            [Gate(g.name, tuple(q + offset for q in g.qubits), g.params) for g in layer]
            for layer in self.layers
        ]
        return Circuit.from_layers(n, layers)

    def parallel(self, other: "Circuit") -> "Circuit":
        """Run two circuits side by side, layer by layer, on the union register."""
        if self.n != other.n:
            raise StateError("register size mismatch")
        depth = max(len(self.layers), len(other.layers))
        layers = []
        for k in range(depth):
            a = self.layers[k] if k < len(self.layers) else ()
            b = other.layers[k] if k < len(other.layers) else ()
            layers.append(a + b)
        return Circuit.from_layers(self.n, layers)

    def unitary(self) -> np.ndarray:
        """Ideal unitary of the whole circuit (dense, for checks only)."""
        from .noise import apply_unitary

        u = np.eye(1 << self.n, dtype=complex)
        for g in self.gates:
            u = apply_unitary(u, g.matrix(), g.qubits, self.n, left_only=True)
        return u


def ghz_prep_circuit(n: int, phi: float = 0.0) -> Circuit:
    """Hadamard on qubit 0, virtual-Z phase, then a CNOT chain 0->1->...->n-1."""
    if not 1 <= n <= 3:
        raise StateError(f"GHZ preparation supports n in 1..3, got {n}")
    layers = [[h(0)], [vz(0, phi)]]
    layers += [[cnot(k, k + 1)] for k in range(n - 1)]
    return Circuit.from_layers(n, layers)


def pair_prep_circuit(n: int, phi: float = 0.0, phi_a: float = 0.0) -> Circuit:
    """GHZ preparation on both modules of a ``2n`` register; module B carries ``phi``."""
    a = ghz_prep_circuit(n, phi_a).shifted(0, 2 * n)
    b = ghz_prep_circuit(n, phi).shifted(n, 2 * n)
    return a.parallel(b)


def bbm_circuit(n: int) -> Circuit:
    """Pairwise Bell-basis rotation between qubit i (module A) and i+n (module B).

    A CNOT from i to i+n followed by a Hadamard on i maps the Bell states onto
    computational outcomes; the singlet becomes ``a_i = b_i = 1``.
    """
    if not 1 <= n <= 3:
        raise StateError(f"Bell-basis measurement supports n in 1..3, got {n}")
    return Circuit.from_layers(
        2 * n,
        [[cnot(i, i + n) for i in range(n)], [h(i) for i in range(n)]],
    )
