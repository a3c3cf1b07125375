"""Immutable result records and their text serializations."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .exceptions import InputError

ATTRACTED = "ATTRACTED"
NOT_ATTRACTED = "NOT_ATTRACTED_WITHIN_BUDGET"
DIVERGED = "DIVERGED"
VERDICTS = (ATTRACTED, NOT_ATTRACTED, DIVERGED)


def _json_float(x: float):
    # strict JSON has no NaN or Infinity
    return x if math.isfinite(x) else None


@dataclass(frozen=True)
class ConvergenceReport:
    """Hausdorff distances measured along a ladder of step or burn-in values."""

    ladder: tuple
    reference_descriptor: str
    converged: bool
    tol: float
    notes: tuple = field(default=())

    def __post_init__(self):
        ladder = tuple((int(k), float(d)) for k, d in self.ladder)
        ks = [k for k, _ in ladder]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise InputError("ladder values must be strictly increasing")
        if any(d < 0 for _, d in ladder):
            raise InputError("Hausdorff distances are nonnegative")
        object.__setattr__(self, "ladder", ladder)
        object.__setattr__(self, "notes", tuple(self.notes))

    @property
    def final(self) -> float:
        return self.ladder[-1][1] if self.ladder else float("nan")

    def to_text(self) -> str:
        lines = [
            f"reference: {self.reference_descriptor}",
            f"tol: {self.tol!r}",
            f"converged: {str(self.converged).lower()}",
            f"final_dH: {self.final!r}",
            f"entries: {len(self.ladder)}",
        ]
        lines += [f"ladder {k}: {d!r}" for k, d in self.ladder]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"

    def to_record(self) -> str:
        return json.dumps({
            "type": "convergence",
            "reference": self.reference_descriptor,
            "tol": self.tol,
            "converged": self.converged,
            "final_dH": _json_float(self.final),
            "ladder": [list(e) for e in self.ladder],
            "notes": list(self.notes),
        }, sort_keys=True)


@dataclass(frozen=True)
class BasinVerdict:
    point: tuple
    verdict: str
    k_reached: int
    final_dH: float

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise InputError(f"unknown verdict {self.verdict!r}")

    def to_text(self) -> str:
        return (f"point: {' '.join(repr(c) for c in self.point)}\nverdict: {self.verdict}\n"
                f"k_reached: {self.k_reached}\nfinal_dH: {self.final_dH!r}\n")

    def to_record(self) -> str:
        return json.dumps({
            "type": "basin",
            "point": list(self.point),
            "verdict": self.verdict,
            "k_reached": self.k_reached,
            "final_dH": _json_float(self.final_dH),
        }, sort_keys=True)

    def table_row(self) -> str:
        coords = ",".join(repr(c) for c in self.point)
        return f"{coords}\t{self.verdict}\t{self.k_reached}\t{self.final_dH!r}"
