"""Batch scan over odd primes, written as a resumable CSV.

Rows are produced in q order whatever the worker count, and the writer is the
only process touching the file.  A run resumed from a file cut after any
complete row ends byte-identical to an uninterrupted run.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from ..kummer_core import kummer_r_fft
from ..nt_core import is_prime, odd_primes_between
from .champions import DEFAULT_MAX_START_Q, DEFAULT_MIN_START_Q, ChampionLedger, track
from .records import HEADER, KummerRecord, ScanFormatError, append_rows, read_scan

log = logging.getLogger(__name__)

DEFAULT_ENGINE = "pocketfft"
_FLUSH_ROWS = 256


def spike_flags(q: int) -> tuple[bool, bool, bool, bool]:
    """Primality of 2q+1, 2q-1, 4q+1, 4q-1."""
    return (is_prime(2 * q + 1), is_prime(2 * q - 1), is_prime(4 * q + 1), is_prime(4 * q - 1))


def compute_record(q: int, engine: str = DEFAULT_ENGINE, max_bytes: Optional[int] = None) -> KummerRecord:
    res = kummer_r_fft(q, engine=engine, max_bytes=max_bytes)
    acc = res.fft_accuracy
    return KummerRecord(
        q,
        res.g,
        res.r,
        res.big_r,
        acc.measured_e2_rel,
        acc.measured_einf,
        *spike_flags(q),
    )


@dataclass
class ScanResult:
    path: Path
    rows_written: int
    rows_total: int
    last_q: Optional[int]
    max_ledger: ChampionLedger
    min_ledger: ChampionLedger


def _check_resume_rows(path, rows: list[KummerRecord]) -> None:
    if not rows:
        return
    expected = odd_primes_between(3, rows[-1].q)
    last = None
    for i, rec in enumerate(rows):
        if i >= len(expected) or rec.q != expected[i]:
            raise ScanFormatError(path, i + 2, f"q={rec.q} breaks the sequence of odd primes", last)
        last = rec.q


def scan(
    max_q: int,
    out_path,
    resume: bool = False,
    workers: int = 1,
    engine: str = DEFAULT_ENGINE,
    max_bytes: Optional[int] = None,
    min_start_q: int = DEFAULT_MIN_START_Q,
    max_start_q: int = DEFAULT_MAX_START_Q,
    progress: Optional[Callable[[int], None]] = None,
) -> ScanResult:
    """Write one row per odd prime q <= max_q to ``out_path``."""
    if max_q < 3:
        raise ValueError("max_q must be at least 3")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    path = Path(out_path)
    done: list[KummerRecord] = []
    if resume and path.exists():
        done = read_scan(path)
        _check_resume_rows(path, done)
    else:
        path.write_bytes((HEADER + "\n").encode("ascii"))
    start = done[-1].q + 1 if done else 3
    todo = odd_primes_between(start, max_q)
    hi, lo = track(done, min_start_q=min_start_q, max_start_q=max_start_q)
    if done:
        log.info("resuming %s after q=%d, %d primes left", path, done[-1].q, len(todo))

    written = 0
    last_q = done[-1].q if done else None
    fd = os.open(path, os.O_WRONLY | os.O_APPEND)
    try:
        pending: list[KummerRecord] = []

        def emit(rec: KummerRecord) -> None:
            nonlocal written, last_q
            pending.append(rec)
            hi.update(rec.q, rec.R)
            lo.update(rec.q, rec.R)
            last_q = rec.q
            if len(pending) >= _FLUSH_ROWS:
                append_rows(fd, pending)
                written += len(pending)
                pending.clear()
                if progress is not None:
                    progress(last_q)

        if workers == 1 or len(todo) < 2:
            for q in todo:
                emit(compute_record(q, engine, max_bytes))
        else:
            chunk = max(1, min(64, len(todo) // (4 * workers)))
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = pool.map(
                    compute_record,
                    todo,
                    [engine] * len(todo),
                    [max_bytes] * len(todo),
                    chunksize=chunk,
                )
                for rec in results:
                    emit(rec)
        append_rows(fd, pending)
        written += len(pending)
        if progress is not None and last_q is not None:
            progress(last_q)
    finally:
        os.close(fd)
    return ScanResult(path, written, len(done) + written, last_q, hi, lo)
