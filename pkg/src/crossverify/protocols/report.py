from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

PROTOCOLS = ("qst", "rm", "bbm")


@dataclass(frozen=True)
class EstimateReport:
    """Result of one inner-product estimate.

    RM and BBM overlaps are unbiased and may fall slightly outside [0, 1];
    QST overlaps come from physical reconstructions and never do.
    """

    protocol: str
    n: int
    phi: float
    overlap: float
    shots: int
    variance: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if not math.isfinite(self.overlap):
            raise ValueError("overlap must be finite")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "EstimateReport":
        return cls(**json.loads(line))
