"""Running record values of R(q) over a scan."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .records import iter_scan

DEFAULT_MIN_START_Q = 10_000
DEFAULT_MAX_START_Q = 3


@dataclass
class ChampionLedger:
    """(q, R) pairs where R beats every earlier value with q >= start_q.

    ``kind`` is ``"max"`` (new maxima) or ``"min"`` (new minima).
    """

    kind: str
    start_q: int = 3
    entries: list[tuple[int, float]] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("max", "min"):
            raise ValueError(f"kind must be 'max' or 'min', got {self.kind!r}")

    def update(self, q: int, big_r: float) -> bool:
        if q < self.start_q:
            return False
        if self.entries:
            best = self.entries[-1][1]
            if (self.kind == "max" and big_r <= best) or (self.kind == "min" and big_r >= best):
                return False
        self.entries.append((q, big_r))
        return True

    def qs(self) -> list[int]:
        return [q for q, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def track(records: Iterable, min_start_q: int = DEFAULT_MIN_START_Q, max_start_q: int = DEFAULT_MAX_START_Q):
    """Accumulate max and min ledgers over (already q-ordered) records."""
    hi = ChampionLedger("max", max_start_q)
    lo = ChampionLedger("min", min_start_q)
    for rec in records:
        hi.update(rec.q, rec.R)
        lo.update(rec.q, rec.R)
    return hi, lo


def champions(csv_path, min_start_q: int = DEFAULT_MIN_START_Q, max_start_q: int = DEFAULT_MAX_START_Q):
    """(max ledger, min ledger) recomputed from a scan CSV."""
    return track(iter_scan(csv_path), min_start_q=min_start_q, max_start_q=max_start_q)
