"""Auxiliary constants, bounds and prime-sum approximants for r(q).

The prime sums run over p (or p^m) congruent to +1 or -1 modulo q.  Both
progressions are sieved directly: candidates n = kq + b are indexed by k and
composites are struck out with the base primes up to sqrt(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from .dft_engine import AccuracyReport, predicted_report
from .nt_core import ZETA3, harmonic, is_prime, prime_sieve

SEGMENT_ENTRIES = 1 << 22
THEOREM_EXPONENT = 0.41
LEMMA_LEADING_CONSTANT = 43 / 13 - 18 * ZETA3 / 13
EPSILONS = {53: 2.0**-53, 64: 2.0**-64, 113: 2.0**-113}


@dataclass(frozen=True)
class PrimeSumSpec:
    q: int
    b: int
    x: float

    def __post_init__(self):
        if self.b not in (-1, 1):
            raise ValueError(f"b must be -1 or +1, got {self.b}")
        if self.x < 2:
            raise ValueError(f"x must be >= 2, got {self.x}")
        if self.q < 3 or not is_prime(self.q):
            raise ValueError(f"q must be an odd prime, got {self.q}")


def _base_primes(limit: int) -> np.ndarray:
    return prime_sieve(limit) if limit >= 2 else np.zeros(0, dtype=np.int64)


def _progression_primes(q: int, b: int, x: int, segment: int = SEGMENT_ENTRIES) -> Iterator[np.ndarray]:
    """Ascending blocks of the primes p <= x with p = b (mod q)."""
    k_max = (x - b) // q
    if k_max < 1:
        return
    root = math.isqrt(x)
    base = _base_primes(root)
    base = base[base != q]
    # first k with kq + b = 0 (mod p), for every base prime
    inv_q = np.array([pow(int(q), -1, int(p)) for p in base], dtype=np.int64)
    k0 = (-b * inv_q) % base
    for lo in range(1, k_max + 1, segment):
        hi = min(k_max, lo + segment - 1)
        keep = np.ones(hi - lo + 1, dtype=bool)
        for p, start in zip(base.tolist(), k0.tolist()):
            keep[(start - lo) % p :: p] = False
        n = np.arange(lo, hi + 1, dtype=np.int64) * q + b
        # base primes in the progression were struck out by themselves
        small = n <= root
        if small.any():
            keep[small] = [is_prime(int(v)) for v in n[small]]
        if lo == 1 and n[0] == 1:
            keep[0] = False
        yield n[keep]


def _reciprocal_sum(blocks: Iterable[np.ndarray]) -> float:
    return math.fsum(v for blk in blocks for v in (1.0 / blk.astype(np.float64)).tolist())


def prime_sum_S(spec: PrimeSumSpec) -> float:
    """Sum of 1/p over primes p <= x with p = b (mod q)."""
    return _reciprocal_sum(_progression_primes(spec.q, spec.b, int(math.floor(spec.x))))


def _check_q(q: int) -> None:
    if q < 3 or not is_prime(q):
        raise ValueError(f"q must be an odd prime, got {q}")


def g_q_x(q: int, x: float) -> float:
    """S_q(1, x) - S_q(-1, x)."""
    _check_q(q)
    if x < 2:
        return 0.0
    xi = int(math.floor(x))
    plus = [1.0 / v for blk in _progression_primes(q, 1, xi) for v in blk.tolist()]
    minus = [-1.0 / v for blk in _progression_primes(q, -1, xi) for v in blk.tolist()]
    return math.fsum(plus + minus)


def _higher_power_terms(q: int, xcap: int) -> list[float]:
    """Signed 1/(m p^m) for m >= 2, p^m <= xcap, p^m = +-1 (mod q)."""
    out = []
    for p in _base_primes(math.isqrt(xcap)).tolist():
        if p == q:
            continue
        pm, m = p * p, 2
        while pm <= xcap:
            res = pm % q
            if res == 1:
                out.append(1.0 / (m * pm))
            elif res == q - 1:
                out.append(-1.0 / (m * pm))
            pm *= p
            m += 1
    return out


def t_q_partial(q: int, xcap: float) -> float:
    """The m >= 2 part of the prime-power sum, truncated at p^m <= xcap."""
    _check_q(q)
    if xcap < q:
        raise ValueError("xcap must be >= q")
    return math.fsum(_higher_power_terms(q, int(math.floor(xcap))))


def f_q_x(q: int, x: float) -> float:
    """Full prime-power sum over p^m <= x, p^m = +-1 (mod q)."""
    _check_q(q)
    if x < 2:
        raise ValueError("x must be >= 2")
    xi = int(math.floor(x))
    terms = _higher_power_terms(q, xi)
    terms += [1.0 / v for blk in _progression_primes(q, 1, xi) for v in blk.tolist()]
    terms += [-1.0 / v for blk in _progression_primes(q, -1, xi) for v in blk.tolist()]
    return math.fsum(terms)


def r_prime_approx(q: int, x: float) -> float:
    return (q - 1) / 2 * f_q_x(q, x)


def c1_of_k(k: int) -> float:
    if k < 3 or k % 2 == 0:
        raise ValueError(f"k must be odd and >= 3, got {k}")
    return harmonic((k - 1) // 2) / 4 - math.log(math.log(k))


def minimize_c1(limit: int = 501) -> tuple[int, float]:
    """(k, c1(k)) minimizing c1 over odd 3 <= k <= limit."""
    if limit < 3:
        raise ValueError("limit must be >= 3")
    return min(((k, c1_of_k(k)) for k in range(3, limit + 1, 2)), key=lambda kv: kv[1])


def _alpha(m: int) -> int:
    return (m * m - m) // 2


def _beta(m: int) -> int:
    return (m * m + m) // 2 - 1


def lemma_direct_sum(q: Optional[int], T: int = 2000) -> float:
    """Sum over 2 <= m <= T of (1/m) sum_{alpha(m) <= r <= beta(m)} (1/r)(1 + 1/(rq - 1)).

    ``q=None`` gives the q -> infinity form, without the 1/(rq - 1) factor.
    """
    if T < 2:
        raise ValueError("T must be >= 2")
    if q is not None and q < 3:
        raise ValueError("q must be >= 3")
    outer = []
    for m in range(2, T + 1):
        r = np.arange(_alpha(m), _beta(m) + 1, dtype=np.float64)
        inner = 1.0 / r if q is None else q / (r * q - 1.0)
        outer.append(math.fsum(inner.tolist()) / m)
    return math.fsum(outer)


def lemma_limit_constant(isolate_up_to_m: int = 2) -> float:
    """Leading constant with the terms m <= m0 isolated and the tail bounded.

    For m > m0 the inner sum is at most 2/(m-1) - 6/(c m^2), using
    3m + 4 <= c m with c = 3 + 4/(m0+1); summed in closed form the tail is
    2/m0 - (6/c)(zeta(3) - sum_{m<=m0} 1/m^3).  m0 = 2 gives c = 13/3.
    """
    m0 = isolate_up_to_m
    if m0 < 2:
        raise ValueError("isolate_up_to_m must be >= 2")
    head = []
    for m in range(2, m0 + 1):
        head.append(math.fsum(1.0 / r for r in range(_alpha(m), _beta(m) + 1)) / m)
    zeta_tail = ZETA3 - math.fsum(1.0 / m**3 for m in range(1, m0 + 1))
    c = 3 + 4 / (m0 + 1)
    return math.fsum(head) + 2 / m0 - 6 / c * zeta_tail


def rader_input_norm(q: int) -> float:
    """Closed-form l2 norm of the sequence (2 a_k / q - 1), 0 <= k < (q-1)/2."""
    return math.sqrt((q - 1) * (q - 2) / (6 * q))


def fft_error_budget(q: int, epsilon: float) -> AccuracyReport:
    """Predicted round-trip error for the length-(q-1)/2 transform of the Rader input."""
    if q < 3 or q % 2 == 0:
        raise ValueError(f"q must be an odd prime, got {q}")
    n = (q - 1) // 2
    return predicted_report(n, rader_input_norm(q), (q - 2) / q, epsilon)


@dataclass(frozen=True)
class AdmissibleSet:
    elements: tuple[int, ...]

    def __post_init__(self):
        els = tuple(int(a) for a in self.elements)
        if any(a < 1 for a in els):
            raise ValueError("elements must be >= 1")
        if len(set(els)) != len(els):
            raise ValueError("elements must be distinct")
        object.__setattr__(self, "elements", tuple(sorted(els)))

    @property
    def s(self) -> int:
        return len(self.elements)


def admissible_measure(aset: AdmissibleSet) -> float:
    return math.fsum(1.0 / a for a in aset.elements)


def omega(aset: AdmissibleSet, p: int) -> int:
    """Number of roots of X * prod(a_i X + 1) modulo p."""
    roots = {0}
    for a in aset.elements:
        if a % p:
            roots.add((-pow(a, -1, p)) % p)
    return len(roots)


def is_admissible(aset: AdmissibleSet) -> bool:
    return all(omega(aset, p) < p for p in range(2, aset.s + 2) if is_prime(p))


@dataclass(frozen=True)
class TheoremBoundReport:
    count: int
    max_ratio: float
    max_q: int

    @property
    def below_one(self) -> bool:
        return self.max_ratio < 1


def theorem_bound_report(records: Iterable) -> TheoremBoundReport:
    """Largest e^{|r(q)|} / (e^{0.41} log q) over the records.  Informational only."""
    best_ratio, best_q, count = -math.inf, None, 0
    scale = math.exp(THEOREM_EXPONENT)
    for rec in records:
        ratio = math.exp(abs(rec.r)) / (scale * math.log(rec.q))
        count += 1
        if ratio > best_ratio:
            best_ratio, best_q = ratio, rec.q
    if not count:
        raise ValueError("records must be nonempty")
    return TheoremBoundReport(count, best_ratio, best_q)


def topsoe_gap(x: float) -> float:
    """(x/2)(x+6)/(2x+3) - log(1+x); nonnegative for x >= 0."""
    return x / 2 * (x + 6) / (2 * x + 3) - math.log1p(x)
