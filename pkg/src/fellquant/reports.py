"""Check reports and their JSON form."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HOLDS_EXHAUSTIVE = "holds-exhaustive"
HOLDS_SAMPLED = "holds-sampled"
VERIFIED_BY_THEOREM = "verified-by-theorem"
FAILS = "fails"


def encode_vectors(rows) -> list[list[list[float]]]:
    """Complex vectors as lists of [re, im] pairs, rounded for stable output."""
    out = []
    for v in np.atleast_2d(np.asarray(rows, dtype=complex)):
        out.append([[round(float(z.real), 12) + 0.0, round(float(z.imag), 12) + 0.0] for z in v])
    return out


@dataclass
class CheckReport:
    property: str
    verdict: str
    samples: int = 0
    seed: int | None = None
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.verdict == FAILS

    def to_dict(self) -> dict:
        out = {"property": self.property, "verdict": self.verdict,
               "samples": self.samples, "seed": self.seed}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out
