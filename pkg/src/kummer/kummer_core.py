"""The Kummer ratio R(q) = h1(q) / G(q) and r(q) = log R(q).

Three independent evaluations of r(q) are provided:

* :func:`kummer_r_fft` transforms the half-length sequence
  c_k = e(k/(q-1)) (2 a_k/q - 1); the moduli of its DFT are the moduli of the
  first chi-Bernoulli numbers of the (q-1)/2 odd characters.
* :func:`kummer_r_direct` sums B_{1,chi} = sum_a (a/q) chi(a) directly,
  character by character (quadratic cost).
* :func:`kummer_r_digamma` uses L(1, chi) = -(1/q) sum_a chi(a) psi(a/q).

The exact integer h1(q) for small q comes from Maillet's determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from .dft_engine import AccuracyReport, forward, plan_dft, plan_external, roundtrip_report, unit_roots
from .nt_core import digamma, is_prime, power_table, prime_context, primitive_root, PrimeContext

DIRECT_MAX_Q = 100_000
DIGAMMA_MAX_Q = 10_000
MAILLET_MAX_Q = 199

# entries per block of the direct character sums
_BLOCK_ENTRIES = 1 << 22


class VanishingCharacterSumError(ArithmeticError):
    """A character sum came out as zero or non-finite."""


@dataclass(frozen=True)
class RaderSequence:
    q: int
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class KummerResult:
    q: int
    r: float
    method: str
    g: Optional[int] = None
    fft_accuracy: Optional[AccuracyReport] = None

    @property
    def big_r(self) -> float:
        return math.exp(self.r)

    @property
    def log10_h1(self) -> float:
        return (self.r + log_G(self.q)) / math.log(10)

    def h1_leading_digits(self, digits: int = 8) -> str:
        """Leading decimal digits of h1(q), from r(q) and log G(q)."""
        with mpmath.workdps(40):
            lg = (mpmath.mpf(self.r) + log_G_mp(self.q)) / mpmath.log(10)
            frac = lg - mpmath.floor(lg)
            mant = mpmath.power(10, frac)
            return mpmath.nstr(mant, digits, strip_zeros=False).replace(".", "")[:digits]


def rader_dif_sequence(ctx: PrimeContext) -> RaderSequence:
    """c_k = e(k/(q-1)) (2 a_k - q)/q for k < (q-1)/2."""
    q = ctx.q
    n = ctx.half
    a = ctx.powers[:n]
    x = (2 * a - q) / q  # one rounding per entry
    phase = np.conj(unit_roots(q - 1)[:n])  # e(+k/(q-1))
    return RaderSequence(q=q, values=phase * x)


def _assemble_log_sum(constant, logs: np.ndarray) -> float:
    """constant + sum(logs), with the log-sum kept to well below one ulp."""
    terms = logs.tolist()
    hi = math.fsum(terms)
    terms.append(-hi)
    lo = math.fsum(terms)
    with mpmath.workdps(40):
        return float(constant() + mpmath.mpf(hi) + mpmath.mpf(lo))


def _bernoulli_constant(q: int):
    n = (q - 1) // 2
    return lambda: n * (mpmath.log(mpmath.pi) - mpmath.log(q) / 2)


def _checked_log_moduli(values: np.ndarray, q: int) -> np.ndarray:
    mod = np.abs(values)
    bad = ~np.isfinite(mod) | (mod == 0)
    if bad.any():
        raise VanishingCharacterSumError(
            f"q={q}: {int(bad.sum())} character sums are zero or non-finite"
        )
    return np.log(mod)


def kummer_r_fft(
    q: int,
    engine: str = "native",
    precision: str = "extended",
    accuracy: bool = True,
    max_bytes: Optional[int] = None,
    ctx: Optional[PrimeContext] = None,
) -> KummerResult:
    """r(q) from one length-(q-1)/2 transform.

    ``engine="native"`` uses this package's planner; ``engine="pocketfft"``
    hands the same sequence to numpy.fft (faster for long batch scans).
    """
    if q < 3 or not is_prime(q):
        raise ValueError(f"q must be an odd prime, got {q}")
    if ctx is None:
        ctx = prime_context(q)
    seq = rader_dif_sequence(ctx)
    if engine == "native":
        plan = plan_dft(seq.n, precision=precision, max_bytes=max_bytes)
    elif engine == "pocketfft":
        plan = plan_external(seq.n)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    spectrum = forward(plan, seq.values)
    logs = _checked_log_moduli(spectrum, q)
    r = _assemble_log_sum(_bernoulli_constant(q), logs)
    report = roundtrip_report(plan, seq.values, spectrum=spectrum) if accuracy else None
    return KummerResult(q=q, r=r, method="fft", g=ctx.g, fft_accuracy=report)


def odd_character_sums(ctx: PrimeContext, values: np.ndarray) -> np.ndarray:
    """sum_k values[k] chi_j(a_k) for every odd j = 1, 3, ..., q-2.

    ``values[k]`` is f(a_k) for k = 0..q-2 and chi_j(g^k) = e(jk/(q-1)).
    Phases are reduced exactly as integers before the table lookup.
    """
    m = ctx.q - 1
    table = np.conj(unit_roots(m))  # e(+t/m)
    ks = np.arange(m, dtype=np.int64)
    js = np.arange(1, m, 2, dtype=np.int64)
    vals = np.asarray(values, dtype=np.float64)
    out = np.empty(js.shape[0], dtype=np.complex128)
    rows = max(1, _BLOCK_ENTRIES // m)
    for start in range(0, js.shape[0], rows):
        block = js[start : start + rows]
        idx = (block[:, None] * ks[None, :]) % m
        out[start : start + rows] = table[idx] @ vals
    return out


def _guard_range(q: int, limit: int, name: str) -> None:
    if q < 3 or not is_prime(q):
        raise ValueError(f"q must be an odd prime, got {q}")
    if q > limit:
        raise ValueError(f"{name} is quadratic in q and capped at q <= {limit}, got {q}")


def bernoulli_sums(q: int, g: Optional[int] = None) -> np.ndarray:
    """B_{1,chi} = sum_a (a/q) chi(a) for the odd characters chi_1^j, j odd."""
    ctx = prime_context(q) if g is None else power_table(q, g)
    return odd_character_sums(ctx, ctx.powers / q)


def kummer_r_direct(q: int, g: Optional[int] = None) -> KummerResult:
    """r(q) by explicit summation of the chi-Bernoulli numbers."""
    _guard_range(q, DIRECT_MAX_Q, "kummer_r_direct")
    ctx = prime_context(q) if g is None else power_table(q, g)
    sums = odd_character_sums(ctx, ctx.powers / q)
    r = _assemble_log_sum(_bernoulli_constant(q), _checked_log_moduli(sums, q))
    return KummerResult(q=q, r=r, method="direct", g=ctx.g)


def kummer_r_digamma(q: int, g: Optional[int] = None) -> KummerResult:
    """r(q) from sums of chi(a) psi(a/q) over the odd characters."""
    _guard_range(q, DIGAMMA_MAX_Q, "kummer_r_digamma")
    ctx = prime_context(q) if g is None else power_table(q, g)
    sums = odd_character_sums(ctx, digamma(ctx.powers / q))
    n = (q - 1) // 2
    r = _assemble_log_sum(lambda: -n * mpmath.log(q), _checked_log_moduli(sums, q))
    return KummerResult(q=q, r=r, method="digamma", g=ctx.g)


def kummer_r(q: int, method: str = "fft", **kwargs) -> KummerResult:
    if method == "fft":
        return kummer_r_fft(q, **kwargs)
    if method == "direct":
        return kummer_r_direct(q, **kwargs)
    if method == "digamma":
        return kummer_r_digamma(q, **kwargs)
    raise ValueError(f"unknown method {method!r}")


def log_G(q: int) -> float:
    """log of 2q (q / 4 pi^2)^((q-1)/4)."""
    return math.log(2 * q) + (q - 1) / 4 * (math.log(q) - 2 * math.log(2 * math.pi))


def log_G_mp(q: int):
    return mpmath.log(2 * q) + mpmath.mpf(q - 1) / 4 * (mpmath.log(q) - 2 * mpmath.log(2 * mpmath.pi))


def h1_from_character_sums(q: int, dps: Optional[int] = None) -> int:
    """h1(q) = 2q prod(-B_{1,chi}/2), evaluated in multiprecision and rounded.

    Separate from Maillet's determinant; used to cross-check it.
    """
    _guard_range(q, 2000, "h1_from_character_sums")
    n = (q - 1) // 2
    if dps is None:
        digits = (log_G(q) + 1.0) / math.log(10)
        dps = int(digits) + 25
    ctx = prime_context(q)
    powers = [int(a) for a in ctx.powers]
    m = q - 1
    with mpmath.workdps(dps):
        table = [mpmath.expjpi(mpmath.mpf(2 * t) / m) for t in range(m)]
        xs = [mpmath.mpf(a) / q for a in powers]
        total = mpmath.mpf(0)
        for j in range(1, m, 2):
            s = mpmath.fsum(xs[k] * table[(j * k) % m] for k in range(m))
            total += mpmath.log(abs(s))
        r = n * (mpmath.log(mpmath.pi) - mpmath.log(q) / 2) + total
        value = mpmath.exp(r + log_G_mp(q))
        h1 = int(mpmath.nint(value))
        if abs(value - h1) > mpmath.mpf("0.01"):
            raise ArithmeticError(f"q={q}: h1 estimate {value} is not near an integer")
    return h1


def maillet_matrix(q: int) -> list[list[int]]:
    """(A(m n', q)) for 1 <= m, n <= (q-1)/2, with n n' = 1 mod q."""
    half = (q - 1) // 2
    inverses = [pow(n, -1, q) for n in range(1, half + 1)]
    return [[(m * inv) % q for inv in inverses] for m in range(1, half + 1)]


def bareiss_determinant(matrix: list[list[int]]) -> int:
    """Exact determinant by fraction-free Gaussian elimination."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot_row = a[k]
        pivot = pivot_row[k]
        tail = pivot_row[k + 1 :]
        for i in range(k + 1, n):
            row = a[i]
            lead = row[k]
            row[k + 1 :] = [(x * pivot - lead * y) // prev for x, y in zip(row[k + 1 :], tail)]
            row[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def maillet_h1(q: int, limit: int = MAILLET_MAX_Q) -> int:
    """h1(q) = |det M_q| / q^((q-3)/2), exactly."""
    _guard_range(q, limit, "maillet_h1")
    det = abs(bareiss_determinant(maillet_matrix(q)))
    h1, rem = divmod(det, q ** ((q - 3) // 2))
    if rem != 0:
        raise ArithmeticError(f"q={q}: Maillet determinant is not divisible by q^((q-3)/2)")
    return h1


@dataclass(frozen=True)
class H1BoundsReport:
    q: int
    log_h1: float
    log_carlitz: Optional[float]
    log_metsankyla: float
    log_feng: float

    @property
    def carlitz(self) -> Optional[bool]:
        if self.log_carlitz is None:
            return None
        return self.log_h1 <= self.log_carlitz

    @property
    def metsankyla(self) -> bool:
        return self.log_h1 < self.log_metsankyla

    @property
    def feng(self) -> bool:
        return self.log_h1 < self.log_feng

    @property
    def all_hold(self) -> bool:
        return self.carlitz is not False and self.metsankyla and self.feng


def classical_h1_bounds_check(q: int, h1: int) -> H1BoundsReport:
    """Compare h1(q) with the Carlitz, Metsankyla and Feng upper bounds (log scale)."""
    if h1 < 1:
        raise ValueError("h1 must be a positive integer")
    log_h1 = math.log(h1)
    carlitz = None
    if q % 4 == 1 and q >= 5:
        carlitz = math.lgamma((q - 5) / 4 + 1)
    elif q % 4 == 3 and q >= 7:
        carlitz = math.lgamma((q - 7) / 4 + 1) + 0.5 * math.log((q - 3) / 4)
    expo = (q - 1) / 4
    mets = math.log(2 * q) + expo * math.log(q / 24)
    feng = math.log(2 * q) + expo * math.log((q - 1) / 31.997158)
    return H1BoundsReport(q, log_h1, carlitz, mets, feng)


__all__ = [
    "KummerResult",
    "RaderSequence",
    "VanishingCharacterSumError",
    "bareiss_determinant",
    "bernoulli_sums",
    "classical_h1_bounds_check",
    "h1_from_character_sums",
    "kummer_r",
    "kummer_r_digamma",
    "kummer_r_direct",
    "kummer_r_fft",
    "log_G",
    "maillet_h1",
    "maillet_matrix",
    "odd_character_sums",
    "rader_dif_sequence",
    "primitive_root",
]
