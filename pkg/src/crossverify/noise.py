"""Noise channels and noisy layer-by-layer density-matrix evolution.

Per layer the order is fixed: gate unitaries, then a depolarizing channel on
each gate's own qubits, then thermal relaxation for the layer duration on
every qubit that no physical gate touched.  Virtual-Z gates take no time and
add no error.  Readout error is not a channel here; it lives in
:class:`ConfusionMatrix` and is applied when sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .circuits import SINGLE, TWO, VIRTUAL, Circuit
from .states import StateError, basis_state, dm, kron, num_qubits


class UnphysicalParameters(StateError):
    """Noise parameters outside their physical range (e.g. T2 > 2 T1)."""


def _check_qubits(qubits: Sequence[int], n: int) -> tuple[int, ...]:
    qubits = tuple(int(q) for q in qubits)
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < n for q in qubits):
        raise StateError(f"invalid qubit indices {qubits} for {n} qubits")
    return qubits


def _to_front(rho: np.ndarray, qubits: tuple[int, ...], n: int):
    """View ``rho`` as a (D_k, D_rest, D_k, D_rest) array with ``qubits`` leading."""
    rest = [q for q in range(n) if q not in qubits]
    order = list(qubits) + rest
    perm = order + [q + n for q in order]
    k = len(qubits)
    t = rho.reshape([2] * (2 * n)).transpose(perm)
    return t.reshape(1 << k, 1 << (n - k), 1 << k, 1 << (n - k)), perm


def _from_front(t: np.ndarray, perm: list[int], n: int) -> np.ndarray:
    inverse = np.argsort(perm)
    return t.reshape([2] * (2 * n)).transpose(inverse).reshape(1 << n, 1 << n)


def apply_unitary(rho, u, qubits, n=None, left_only=False):
    """Conjugate ``rho`` by ``u`` acting on ``qubits`` (or only left-multiply)."""
    n = num_qubits(rho) if n is None else n
    qubits = _check_qubits(qubits, n)
    k = len(qubits)
    d = 1 << n

    def left(m):
        t = m.reshape([2] * n + [d])
        out = np.tensordot(u.reshape([2] * (2 * k)), t, axes=(list(range(k, 2 * k)), list(qubits)))
        out = np.moveaxis(out, list(range(k)), list(qubits))
        return out.reshape(d, d)

    once = left(np.asarray(rho, dtype=complex))
    if left_only:
        return once
    return left(once.conj().T).conj().T


def depolarize(rho: np.ndarray, p: float, qubits: Sequence[int]) -> np.ndarray:
    """``(1-p) rho + p Tr_q(rho) (x) I/2^k`` with the subsystem kept in place."""
    if not 0 <= p <= 1:
        raise UnphysicalParameters(f"depolarizing probability {p} not in [0, 1]")
    n = num_qubits(rho)
    qubits = _check_qubits(qubits, n)
    if p == 0 or not qubits:
        return rho
    t, perm = _to_front(rho, qubits, n)
    dk = t.shape[0]
    reduced = np.einsum("aiaj->ij", t)
    mixed = np.einsum("ac,ij->aicj", np.eye(dk) / dk, reduced)
    return (1 - p) * rho + p * _from_front(mixed, perm, n)


def thermal_relax(
    rho: np.ndarray,
    qubit: int,
    t: float,
    t1: float,
    t2: float,
    p_th: float = 0.0,
    literal: bool = False,
) -> np.ndarray:
    """Relax one qubit for ``t`` ns with ``t1``, ``t2`` in microseconds.

    Populations decay with rate ``1/t1`` toward the equilibrium where the
    excited state holds ``p_th``; coherences decay with rate ``1/t2``.  With
    ``literal=True`` the equilibrium is mirrored so the ground population tends
    to ``p_th``, exactly as the populations equations are sometimes printed.
    """
    if t < 0:
        raise UnphysicalParameters("relaxation time must be non-negative")
    if not 0 <= p_th <= 0.5:
        raise UnphysicalParameters(f"p_th = {p_th} not in [0, 0.5]")
    if t1 <= 0 or t2 <= 0 or t2 > 2 * t1:
        raise UnphysicalParameters(f"need 0 < T2 <= 2 T1, got T1={t1}, T2={t2}")
    if t == 0:
        return rho
    n = num_qubits(rho)
    (qubit,) = _check_qubits([qubit], n)
    decay1 = math.exp(-t / (1000 * t1))
    decay2 = math.exp(-t / (1000 * t2))
    excited_eq = 1 - p_th if literal else p_th

    b, perm = _to_front(rho, (qubit,), n)
    out = np.empty_like(b)
    total = b[0, :, 0, :] + b[1, :, 1, :]
    out[0, :, 0, :] = decay1 * b[0, :, 0, :] + (1 - decay1) * (1 - excited_eq) * total
    out[1, :, 1, :] = decay1 * b[1, :, 1, :] + (1 - decay1) * excited_eq * total
    out[0, :, 1, :] = decay2 * b[0, :, 1, :]
    out[1, :, 0, :] = decay2 * b[1, :, 0, :]
    return _from_front(out, perm, n)


class ConfusionMatrix:
    """Per-qubit assignment matrices ``M[true, reported]``; rows sum to one."""

    def __init__(self, matrices):
        mats = [np.array(m, dtype=float) for m in matrices]
        for m in mats:
            if m.shape != (2, 2) or np.any(m < 0) or np.any(m > 1):
                raise StateError("confusion matrices must be 2x2 with entries in [0, 1]")
            if np.max(np.abs(m.sum(axis=1) - 1)) > 1e-12:
                raise StateError("confusion matrix rows must sum to 1")
        self.matrices = tuple(mats)

    @classmethod
    def symmetric(cls, eps, n: int) -> "ConfusionMatrix":
        eps = np.broadcast_to(np.asarray(eps, dtype=float), (n,))
        return cls([[[1 - e, e], [e, 1 - e]] for e in eps])

    @classmethod
    def ideal(cls, n: int) -> "ConfusionMatrix":
        return cls.symmetric(0.0, n)

    @classmethod
    def from_calibration(cls, prepared: np.ndarray, reported: np.ndarray, n: int) -> "ConfusionMatrix":
        """Estimate per-qubit matrices from computational-basis calibration shots.

        ``prepared`` and ``reported`` are integer outcome arrays of equal length.
        """
        prepared = np.asarray(prepared)
        reported = np.asarray(reported)
        mats = []
        for q in range(n):
            shift = n - 1 - q
            true_bit = (prepared >> shift) & 1
            seen_bit = (reported >> shift) & 1
            m = np.zeros((2, 2))
            for bit in (0, 1):
                sel = true_bit == bit
                if not sel.any():
                    raise StateError(f"calibration lacks qubit {q} prepared in |{bit}>")
                m[bit, 1] = seen_bit[sel].mean()
                m[bit, 0] = 1 - m[bit, 1]
            mats.append(m)
        return cls(mats)

    @property
    def n(self) -> int:
        return len(self.matrices)

    def __len__(self):
        return len(self.matrices)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return ConfusionMatrix(self.matrices[index])
        return self.matrices[index]

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.matrices + other.matrices)

    def flip_probabilities(self) -> np.ndarray:
        """Array ``f[q, true_bit]`` of misassignment probabilities."""
        return np.array([[m[0, 1], m[1, 0]] for m in self.matrices])

    def tensor(self) -> np.ndarray:
        """Full ``2^n x 2^n`` matrix ``P(reported | true)``, indexed [true, reported]."""
        return kron(*self.matrices)

    def apply(self, probs: np.ndarray) -> np.ndarray:
        """Reported-outcome distribution(s) from true ones (last axis = outcome)."""
        return _apply_per_qubit(probs, self.matrices)

    def correct(self, probs: np.ndarray) -> np.ndarray:
        """Invert the assignment map; negative entries are clipped and renormalized."""
        try:
            inverses = [np.linalg.inv(m) for m in self.matrices]
        except np.linalg.LinAlgError as exc:
            raise StateError("singular confusion matrix") from exc
        fixed = np.clip(_apply_per_qubit(probs, inverses), 0.0, None)
        return fixed / fixed.sum(axis=-1, keepdims=True)


def _apply_per_qubit(probs: np.ndarray, mats) -> np.ndarray:
    # probs[..., s] with s = outcome index, qubit 0 most significant
    probs = np.asarray(probs, dtype=float)
    n = len(mats)
    lead = probs.shape[:-1]
    t = probs.reshape(lead + (2,) * n)
    for q, m in enumerate(mats):
        axis = len(lead) + q
        t = np.moveaxis(np.tensordot(t, m, axes=([axis], [0])), -1, axis)
    return t.reshape(probs.shape)


_CONVERSIONS = {"average": {SINGLE: 2.0, TWO: 4.0 / 3.0}, "direct": {SINGLE: 1.0, TWO: 1.0}}


@dataclass(frozen=True)
class NoiseModel:
    """Error rates and timing for a register.

    ``eps_ro``, ``t1`` and ``t2`` may be scalars or per-qubit sequences.
    Gate error rates are average gate infidelities; ``rate_conversion="average"``
    turns them into depolarizing parameters ``p = r d / (d - 1)``, while
    ``"direct"`` uses ``p = r``.
    """

    p_1q: float = 0.0011
    p_2q: float = 0.0145
    eps_ro: float | tuple[float, ...] = 0.0221
    t1: float | tuple[float, ...] = 30.0
    t2: float | tuple[float, ...] = 20.0
    p_th: float = 0.01
    t_1q: float = 40.0
    t_2q: float = 100.0
    rate_conversion: str = "average"
    literal_relaxation: bool = False
    confusion: tuple = field(default=None, compare=False)

    def __post_init__(self):
        if self.rate_conversion not in _CONVERSIONS:
            raise UnphysicalParameters(f"rate_conversion must be one of {sorted(_CONVERSIONS)}")
        for name, kind in (("p_1q", SINGLE), ("p_2q", TWO)):
            value = getattr(self, name)
            if not 0 <= value <= 1 or not 0 <= self.depolarizing(kind) <= 1:
                raise UnphysicalParameters(f"{name} = {value} outside [0, 1]")
        if np.any(np.asarray(self.eps_ro) < 0) or np.any(np.asarray(self.eps_ro) > 1):
            raise UnphysicalParameters(f"eps_ro = {self.eps_ro} outside [0, 1]")
        if not 0 <= self.p_th <= 0.5:
            raise UnphysicalParameters(f"p_th = {self.p_th} outside [0, 0.5]")
        t1, t2 = np.asarray(self.t1, float), np.asarray(self.t2, float)
        if np.any(t1 <= 0) or np.any(t2 <= 0) or np.any(t2 > 2 * t1):
            raise UnphysicalParameters(f"need 0 < T2 <= 2 T1, got T1={self.t1}, T2={self.t2}")
        if self.t_1q < 0 or self.t_2q < 0:
            raise UnphysicalParameters("gate durations must be non-negative")

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        inf = float("inf")
        return cls(p_1q=0.0, p_2q=0.0, eps_ro=0.0, t1=inf, t2=inf, p_th=0.0)

    def scaled(self, factor: float) -> "NoiseModel":
        """All error rates multiplied by ``factor``; relaxation times unchanged."""
        eps = np.asarray(self.eps_ro, float) * factor
        confusion = None
        if self.confusion is not None:
            confusion = tuple(
                [[1 - m[0][1] * factor, m[0][1] * factor], [m[1][0] * factor, 1 - m[1][0] * factor]]
                for m in self.confusion
            )
        return replace(
            self,
            p_1q=self.p_1q * factor,
            p_2q=self.p_2q * factor,
            eps_ro=float(eps) if eps.ndim == 0 else tuple(eps.tolist()),
            confusion=confusion,
        )

    def replace(self, **changes) -> "NoiseModel":
        return replace(self, **changes)

    def depolarizing(self, kind: str) -> float:
        if kind == VIRTUAL:
            return 0.0
        rate = self.p_1q if kind == SINGLE else self.p_2q
        return rate * _CONVERSIONS[self.rate_conversion][kind]

    def duration(self, kind: str) -> float:
        return {SINGLE: self.t_1q, TWO: self.t_2q, VIRTUAL: 0.0}[kind]

    def _per_qubit(self, value, q: int) -> float:
        if np.ndim(value) == 0:
            return float(value)
        return float(value[q % len(value)])

    def relaxation(self, q: int) -> tuple[float, float]:
        return self._per_qubit(self.t1, q), self._per_qubit(self.t2, q)

    def readout(self, n: int) -> ConfusionMatrix:
        if self.confusion is not None:
            cm = ConfusionMatrix(self.confusion)
            if cm.n != n:
                cm = ConfusionMatrix([cm.matrices[q % cm.n] for q in range(n)])
            return cm
        eps = self.eps_ro
        if np.ndim(eps) == 0:
            return ConfusionMatrix.symmetric(float(eps), n)
        eps = np.asarray(eps, float)
        return ConfusionMatrix.symmetric([eps[q % len(eps)] for q in range(n)], n)


def idle(rho: np.ndarray, qubits, t: float, nm: NoiseModel) -> np.ndarray:
    for q in qubits:
        t1, t2 = nm.relaxation(q)
        if math.isinf(t1) and math.isinf(t2):
            continue
        rho = thermal_relax(rho, q, t, t1, t2, nm.p_th, nm.literal_relaxation)
    return rho


def run_circuit(c: Circuit, rho0: np.ndarray | None = None, nm: NoiseModel | None = None) -> np.ndarray:
    """Evolve ``rho0`` (default ``|0...0>``) through ``c`` under ``nm``."""
    nm = NoiseModel.noiseless() if nm is None else nm
    rho = dm(basis_state(0, c.n)) if rho0 is None else np.asarray(rho0, dtype=complex)
    if num_qubits(rho) != c.n:
        raise StateError(f"{c.n}-qubit circuit on a {num_qubits(rho)}-qubit state")
    for layer in c.layers:
        busy = set()
        duration = 0.0
        for g in layer:
            rho = apply_unitary(rho, g.matrix(), g.qubits, c.n)
            if g.kind == VIRTUAL:
                continue
            busy.update(g.qubits)
            duration = max(duration, nm.duration(g.kind))
            rho = depolarize(rho, nm.depolarizing(g.kind), g.qubits)
        if duration > 0:
            rho = idle(rho, [q for q in range(c.n) if q not in busy], duration, nm)
    return rho
