"""Scan rows and their CSV serialization.

Schema (one header line, ``\\n`` line endings, no quoting)::

    q,g,r,R,e2_rel,einf,f2p,f2m,f4p,f4m

Reals carry 15 significant digits; flags are 0/1.  Records are normalized to
the 15-digit values at construction, so parse(serialize(record)) == record.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Iterator

HEADER = "q,g,r,R,e2_rel,einf,f2p,f2m,f4p,f4m"
_FIELDS = HEADER.split(",")


class ScanFormatError(ValueError):
    """Malformed, unsorted or truncated scan CSV."""

    def __init__(self, path, line_no: int, reason: str, last_valid_q):
        self.path = str(path)
        self.line_no = line_no
        self.last_valid_q = last_valid_q
        super().__init__(f"{path}:{line_no}: {reason} (last valid q: {last_valid_q})")


def fmt_real(x: float) -> str:
    return format(x, ".15g")


def round15(x: float) -> float:
    return float(fmt_real(x))


@dataclass(frozen=True)
class KummerRecord:
    q: int
    g: int
    r: float
    R: float
    e2_rel: float
    einf: float
    flag_2qp1: bool
    flag_2qm1: bool
    flag_4qp1: bool
    flag_4qm1: bool

    def __post_init__(self):
        for name in ("r", "R", "e2_rel", "einf"):
            object.__setattr__(self, name, round15(getattr(self, name)))
        for name in ("flag_2qp1", "flag_2qm1", "flag_4qp1", "flag_4qm1"):
            object.__setattr__(self, name, bool(getattr(self, name)))

    @property
    def flags(self) -> tuple[bool, bool, bool, bool]:
        return (self.flag_2qp1, self.flag_2qm1, self.flag_4qp1, self.flag_4qm1)

    def to_csv(self) -> str:
        flags = ",".join("1" if f else "0" for f in self.flags)
        reals = ",".join(fmt_real(v) for v in (self.r, self.R, self.e2_rel, self.einf))
        return f"{self.q},{self.g},{reals},{flags}"

    @classmethod
    def from_csv(cls, line: str) -> "KummerRecord":
        parts = line.split(",")
        if len(parts) != len(_FIELDS):
            raise ValueError(f"expected {len(_FIELDS)} fields, got {len(parts)}")
        for p in parts[6:]:
            if p not in ("0", "1"):
                raise ValueError(f"flag field must be 0 or 1, got {p!r}")
        return cls(
            int(parts[0]),
            int(parts[1]),
            float(parts[2]),
            float(parts[3]),
            float(parts[4]),
            float(parts[5]),
            *(p == "1" for p in parts[6:]),
        )


def iter_scan(path) -> Iterator[KummerRecord]:
    """Yield records of a scan CSV, validating header, syntax and ordering."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data:
        raise ScanFormatError(path, 0, "empty file", None)
    text = data.decode("ascii", errors="replace")
    lines = text.split("\n")
    if lines[0] != HEADER:
        raise ScanFormatError(path, 1, "bad header", None)
    if lines[-1] != "":
        raise ScanFormatError(path, len(lines), "last line is not newline-terminated", _last_q(lines))
    last_q = None
    for i, line in enumerate(lines[1:-1], start=2):
        try:
            rec = KummerRecord.from_csv(line)
        except ValueError as exc:
            raise ScanFormatError(path, i, str(exc), last_q) from None
        if last_q is not None and rec.q <= last_q:
            raise ScanFormatError(path, i, f"q={rec.q} is not above the previous row", last_q)
        last_q = rec.q
        yield rec


def _last_q(lines) -> object:
    for line in reversed(lines[1:-1]):
        try:
            return KummerRecord.from_csv(line).q
        except ValueError:
            continue
    return None


def read_scan(path) -> list[KummerRecord]:
    return list(iter_scan(path))


def append_rows(fd: int, records: Iterable[KummerRecord]) -> None:
    """Append whole rows with a single write, then fsync."""
    payload = "".join(rec.to_csv() + "\n" for rec in records).encode("ascii")
    if not payload:
        return
    view = memoryview(payload)
    while view:
        written = os.write(fd, view)
        view = view[written:]
    os.fsync(fd)
