"""Measurement settings, seeded shot sampling and the shot-dataset file format.

Every setting is a per-qubit signed Pauli basis from the overcomplete table
``{+X, -X, +Y, -Y, +Z, -Z}^n``; its id is the row-major index into that table,
so randomized-measurement and Bell-basis datasets reuse the same ids.  A
setting is applied identically to both modules.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .noise import ConfusionMatrix
from .states import NumericalError, StateError, kron, num_qubits

LABELS = ("+X", "-X", "+Y", "-Y", "+Z", "-Z")

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_Xm = np.array([[0, 1], [1, 0]], dtype=complex)
_Sdg = np.diag([1, -1j])

# pre-rotations taking the +1 eigenstate of the signed Pauli to |0>
ROTATIONS = {
    "+Z": np.eye(2, dtype=complex),
    "-Z": _Xm,
    "+X": _H,
    "-X": _Xm @ _H,
    "+Y": _H @ _Sdg,
    "-Y": _Xm @ _H @ _Sdg,
}


@dataclass(frozen=True)
class BasisSetting:
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels or any(lab not in LABELS for lab in self.labels):
            raise StateError(f"invalid basis labels {self.labels}")

    @classmethod
    def from_id(cls, setting_id: int, n: int) -> "BasisSetting":
        if not 0 <= setting_id < 6**n:
            raise StateError(f"setting id {setting_id} out of range for n={n}")
        digits = np.base_repr(setting_id, 6).zfill(n)
        return cls(tuple(LABELS[int(d)] for d in digits))

    @classmethod
    def parse(cls, text: str) -> "BasisSetting":
        return cls(tuple(re.findall(r"[+-][XYZ]", text)))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def id(self) -> int:
        return int("".join(str(LABELS.index(lab)) for lab in self.labels), 6)

    @property
    def axes(self) -> str:
        return "".join(lab[1] for lab in self.labels)

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(1 if lab[0] == "+" else -1 for lab in self.labels)

    @property
    def positive(self) -> bool:
        return all(lab[0] == "+" for lab in self.labels)

    def rotation(self) -> np.ndarray:
        return kron(*(ROTATIONS[lab] for lab in self.labels))

    def __str__(self):
        return "".join(self.labels)


def qst_settings(n: int) -> list[BasisSetting]:
    """All ``6**n`` signed settings, ordered by id."""
    return [BasisSetting(labs) for labs in itertools.product(LABELS, repeat=n)]


def pauli_settings(n: int) -> list[BasisSetting]:
    """The ``3**n`` positive settings (X, Y, Z per qubit), ordered by id."""
    return [BasisSetting(labs) for labs in itertools.product(("+X", "+Y", "+Z"), repeat=n)]


def computational_setting(n: int) -> BasisSetting:
    return BasisSetting(("+Z",) * n)


def born_probabilities(rho: np.ndarray, setting: BasisSetting) -> np.ndarray:
    """Outcome distribution after rotating ``rho`` into ``setting``'s frame."""
    if setting.n != num_qubits(rho):
        raise StateError(f"{setting.n}-qubit setting on {num_qubits(rho)}-qubit state")
    u = setting.rotation()
    probs = np.einsum("ij,jk,ik->i", u, rho, u.conj()).real
    total = probs.sum()
    if abs(total - 1) > 1e-9:
        raise NumericalError(f"outcome probabilities sum to {total}")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def flip_readout(outcomes: np.ndarray, cm: ConfusionMatrix, rng: np.random.Generator) -> np.ndarray:
    """Independently misreport each bit with its qubit's confusion probabilities."""
    flips = cm.flip_probabilities()
    if not flips.any():
        return outcomes
    n = cm.n
    out = outcomes.copy()
    for q in range(n):
        shift = n - 1 - q
        bit = (outcomes >> shift) & 1
        flip = rng.random(outcomes.shape) < flips[q][bit]
        out ^= flip.astype(out.dtype) << shift
    return out


def sample_shots(
    rho: np.ndarray,
    setting: BasisSetting,
    shots: int,
    cm: ConfusionMatrix | None,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw ``shots`` reported outcomes (integers, qubit 0 most significant)."""
    if shots < 1:
        raise StateError("shots must be >= 1")
    probs = born_probabilities(rho, setting)
    outcomes = rng.choice(len(probs), size=shots, p=probs).astype(np.int64)
    if cm is not None:
        outcomes = flip_readout(outcomes, cm, rng)
    return outcomes


def setting_rng(seed: int, index: int) -> np.random.Generator:
    """Independent, reproducible stream for one setting (or batch) of a run."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def split_modules(joint: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Split ``2n``-qubit outcomes into module A (high bits) and module B."""
    return joint >> n, joint & ((1 << n) - 1)


@dataclass
class ShotDataset:
    """Repetitions of a measurement run on two ``n``-qubit modules.

    ``a[k, r]`` and ``b[k, r]`` are the integer outcomes of module A and B
    for repetition ``r`` of setting ``settings[k]``.  All settings carry the
    same number of repetitions, so repetition ``r`` across settings forms one
    full round of the protocol.
    """

    n: int
    protocol: str
    settings: tuple[int, ...]
    a: np.ndarray
    b: np.ndarray
    seed: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.settings = tuple(int(s) for s in self.settings)
        self.a = np.asarray(self.a, dtype=np.int64)
        self.b = np.asarray(self.b, dtype=np.int64)
        if self.a.ndim != 2 or self.a.shape != self.b.shape or self.a.shape[0] != len(self.settings):
            raise StateError("outcome arrays must be (settings, shots) and match each other")
        limit = 1 << self.n
        if self.a.size and (self.a.min() < 0 or self.a.max() >= limit or self.b.min() < 0 or self.b.max() >= limit):
            raise StateError(f"outcome outside {self.n}-bit range")
        for s in self.settings:
            BasisSetting.from_id(s, self.n)

    @property
    def shots(self) -> int:
        return self.a.shape[1]

    def __len__(self):
        return self.a.size

    def basis(self, k: int) -> BasisSetting:
        return BasisSetting.from_id(self.settings[k], self.n)

    def subsample(self, repetitions: np.ndarray) -> "ShotDataset":
        """Dataset made of the given repetition indices (applied to every setting)."""
        repetitions = np.asarray(repetitions)
        return ShotDataset(
            self.n, self.protocol, self.settings, self.a[:, repetitions], self.b[:, repetitions],
            self.seed, self.metadata,
        )

    def select(self, setting_ids) -> "ShotDataset":
        index = {s: k for k, s in enumerate(self.settings)}
        try:
            rows = [index[s] for s in setting_ids]
        except KeyError as exc:
            raise StateError(f"setting {exc.args[0]} not in dataset") from None
        return ShotDataset(
            self.n, self.protocol, tuple(setting_ids), self.a[rows], self.b[rows], self.seed, self.metadata
        )

    def frequencies(self, module: str = "a") -> np.ndarray:
        """Empirical outcome distribution per setting, shape ``(settings, 2**n)``."""
        data = self.a if module == "a" else self.b
        return counts(data, self.n) / data.shape[1]

    def records(self) -> Iterator[tuple[int, str, str]]:
        width = self.n
        for k, s in enumerate(self.settings):
            for r in range(self.shots):
                yield s, format(self.a[k, r], f"0{width}b"), format(self.b[k, r], f"0{width}b")

    def header(self) -> dict:
        head = {
            "n": self.n,
            "protocol": self.protocol,
            "seed": self.seed,
            "shots_per_setting": self.shots,
            "settings": ",".join(map(str, self.settings)),
        }
        head.update(self.metadata)
        return head

    def to_text(self) -> str:
        lines = [f"# {key}: {value}" for key, value in self.header().items()]
        width = self.n
        for k, s in enumerate(self.settings):
            bits_a = [format(v, f"0{width}b") for v in self.a[k]]
            bits_b = [format(v, f"0{width}b") for v in self.b[k]]
            lines.extend(f"{s}\t{x}\t{y}" for x, y in zip(bits_a, bits_b))
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "ShotDataset":
        header: dict[str, str] = {}
        rows: dict[int, tuple[list[int], list[int]]] = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                header[key.strip()] = value.strip()
                continue
            setting, bits_a, bits_b = line.split("\t")
            col_a, col_b = rows.setdefault(int(setting), ([], []))
            col_a.append(int(bits_a, 2))
            col_b.append(int(bits_b, 2))
        try:
            n = int(header.pop("n"))
            protocol = header.pop("protocol")
        except KeyError as exc:
            raise StateError(f"dataset header lacks {exc.args[0]!r}") from None
        seed = header.pop("seed", "None")
        header.pop("shots_per_setting", None)
        declared = header.pop("settings", "")
        order = [int(s) for s in declared.split(",") if s] or sorted(rows)
        if set(order) != set(rows):
            raise StateError("records reference settings missing from the header table")
        lengths = {len(rows[s][0]) for s in order}
        if len(lengths) != 1:
            raise StateError("settings have unequal repetition counts")
        a = np.array([rows[s][0] for s in order])
        b = np.array([rows[s][1] for s in order])
        return cls(n, protocol, tuple(order), a, b, None if seed == "None" else int(seed), header)

    @classmethod
    def load(cls, path) -> "ShotDataset":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


def counts(outcomes: np.ndarray, n: int) -> np.ndarray:
    """Histogram of each row of an integer outcome array."""
    rows = outcomes.shape[0]
    offsets = (np.arange(rows) << n)[:, None]
    flat = np.bincount((outcomes + offsets).ravel(), minlength=rows << n)
    return flat.reshape(rows, 1 << n).astype(float)


def measure(
    rho: np.ndarray,
    n: int,
    settings,
    shots: int,
    cm: ConfusionMatrix | None,
    seed: int,
    protocol: str,
    metadata: dict | None = None,
) -> ShotDataset:
    """Sample a two-module dataset from the joint ``2n``-qubit state ``rho``.

    Setting ``k`` is measured on both modules with its own random stream
    derived from ``(seed, k)``.
    """
    if num_qubits(rho) != 2 * n:
        raise StateError("rho must be the joint state of both modules")
    settings = [s if isinstance(s, BasisSetting) else BasisSetting.from_id(s, n) for s in settings]
    a = np.empty((len(settings), shots), dtype=np.int64)
    b = np.empty_like(a)
    for k, setting in enumerate(settings):
        joint_setting = BasisSetting(setting.labels * 2)
        joint = sample_shots(rho, joint_setting, shots, cm, setting_rng(seed, k))
        a[k], b[k] = split_modules(joint, n)
    return ShotDataset(n, protocol, tuple(s.id for s in settings), a, b, seed, dict(metadata or {}))


def exact_distributions(rho: np.ndarray, settings, cm: ConfusionMatrix | None = None) -> np.ndarray:
    """Infinite-shot reported distributions of a single-module state, one row per setting."""
    n = num_qubits(rho)
    settings = [s if isinstance(s, BasisSetting) else BasisSetting.from_id(s, n) for s in settings]
    probs = np.array([born_probabilities(rho, s) for s in settings])
    return probs if cm is None else cm.apply(probs)


@lru_cache(maxsize=None)
def parity_table(n: int) -> np.ndarray:
    """``popcount(k) mod 2`` for ``k < 2**n``."""
    k = np.arange(1 << n)
    bits = (k[:, None] >> np.arange(n)) & 1
    return bits.sum(axis=1) % 2
