"""Check scan values of R(q) against the shipped table of truncated values."""

from __future__ import annotations

import csv
import decimal
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .records import iter_scan

DEFAULT_DIGITS = 10


class MissingRowError(LookupError):
    """A reference q inside the scanned range has no scan row."""


def default_reference_path() -> Path:
    return Path(str(resources.files("kummer") / "data" / "table1_reference.csv"))


def load_reference(path=None) -> dict[int, str]:
    """{q: truncated R string} from a reference CSV with columns q,R_truncated[,source]."""
    path = default_reference_path() if path is None else Path(path)
    with open(path, newline="", encoding="ascii") as fh:
        return {int(row["q"]): row["R_truncated"].strip() for row in csv.DictReader(fh)}


def truncate_significant(value, digits: int) -> decimal.Decimal:
    """Truncate toward zero to ``digits`` significant digits.

    Floats go through their shortest repr, so 1.489316073 is not read as
    1.48931607299... and truncated one unit low.
    """
    d = decimal.Decimal(value if isinstance(value, str) else repr(float(value)))
    if d == 0:
        return d
    exp = d.adjusted() - digits + 1
    return d.quantize(decimal.Decimal(1).scaleb(exp), rounding=decimal.ROUND_DOWN)


def matches_truncated(value: float, reference: str, digits: int = DEFAULT_DIGITS) -> bool:
    """First ``digits`` significant digits agree, hence value >= reference at that precision."""
    return truncate_significant(value, digits) == truncate_significant(reference, digits)


@dataclass
class VerifyReport:
    digits: int
    checked: list[tuple[int, float, str, bool]] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)

    @property
    def n_pass(self) -> int:
        return sum(ok for *_, ok in self.checked)

    @property
    def failures(self) -> list[tuple[int, float, str]]:
        return [(q, v, ref) for q, v, ref, ok in self.checked if not ok]

    @property
    def ok(self) -> bool:
        return bool(self.checked) and not self.failures

    def summary(self) -> str:
        return (
            f"checked {len(self.checked)}, passed {self.n_pass}, failed {len(self.failures)}, "
            f"skipped {len(self.skipped)} (outside the scanned range)"
        )


def verify_values(values: dict[int, float], reference: dict[int, str], digits: int = DEFAULT_DIGITS,
                  max_q: Optional[int] = None) -> VerifyReport:
    max_q = max(values) if max_q is None and values else (max_q or 0)
    report = VerifyReport(digits)
    for q in sorted(reference):
        if q > max_q:
            report.skipped.append(q)
            continue
        if q not in values:
            raise MissingRowError(f"q={q} is in the scanned range but has no row")
        report.checked.append((q, values[q], reference[q], matches_truncated(values[q], reference[q], digits)))
    return report


def verify_table(csv_path, reference_path=None, digits: int = DEFAULT_DIGITS) -> VerifyReport:
    values = {rec.q: rec.R for rec in iter_scan(csv_path)}
    return verify_values(values, load_reference(reference_path), digits)
