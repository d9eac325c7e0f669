"""Arithmetic primitives and special functions.

Everything here is a pure function of its arguments.  ``PrimeContext`` is
frozen and its power table is marked read-only, so one instance can be shared
freely between threads or pickled to worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EULER_GAMMA = 0.57721566490153286060651209008240243
ZETA3 = 1.2020569031595942853997381615114500

# Deterministic for every n < 3.3e24, which covers the whole 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_U64_LIMIT = 1 << 64

# Bernoulli numbers B_2 .. B_16 for the digamma asymptotic series.
_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)
_DIGAMMA_SHIFT = 16.0

_E1_SERIES_MAX = 1.0


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin test for 0 <= n < 2**64."""
    if n < 0 or n >= _U64_LIMIT:
        raise ValueError(f"is_prime expects 0 <= n < 2**64, got {n}")
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (Eratosthenes, odd-only)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # odd[i] represents 2*i + 1
    odd = np.ones((limit + 1) // 2, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2 :: p] = False
    primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    return np.concatenate(([2], primes)).astype(np.int64)


def odd_primes_between(lo: int, hi: int) -> list[int]:
    """Odd primes p with lo <= p <= hi, ascending."""
    if hi < 3:
        return []
    ps = prime_sieve(hi)
    ps = ps[(ps >= max(lo, 3))]
    return [int(p) for p in ps]


def _distinct_prime_factors(n: int) -> list[int]:
    factors = []
    for p in (2, 3):
        if n % p == 0:
            factors.append(p)
            while n % p == 0:
                n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            if n % p == 0:
                factors.append(p)
                while n % p == 0:
                    n //= p
        f += 6
    if n > 1:
        factors.append(n)
    return factors


def primitive_root(q: int) -> int:
    """Smallest generator of the multiplicative group mod the odd prime q."""
    if q < 3 or not is_prime(q):
        raise ValueError(f"primitive_root needs an odd prime, got {q}")
    phi = q - 1
    cofactors = [phi // p for p in _distinct_prime_factors(phi)]
    g = 2
    while True:
        if all(pow(g, c, q) != 1 for c in cofactors):
            return g
        g += 1


@dataclass(frozen=True)
class PrimeContext:
    """A prime q, a primitive root g and the table a_k = g**k mod q."""

    q: int
    g: int
    powers: np.ndarray = field(repr=False, compare=False)

    @property
    def half(self) -> int:
        """(q - 1) / 2, the number of odd characters."""
        return (self.q - 1) // 2


def _power_sequence(q: int, g: int) -> np.ndarray:
    n = q - 1
    out = np.empty(n, dtype=np.int64)
    if q >= 1 << 31:
        v = 1
        for k in range(n):
            out[k] = v
            v = v * g % q
        return out
    # a_{pos + i} = a_i * g^pos: the filled prefix doubles on every pass
    out[0] = 1
    pos = 1
    while pos < n:
        m = min(pos, n - pos)
        out[pos : pos + m] = out[:m] * pow(g, pos, q) % q
        pos += m
    return out


def power_table(q: int, g: int) -> PrimeContext:
    """Build the PrimeContext for q and the primitive root g."""
    if q < 3 or not is_prime(q):
        raise ValueError(f"power_table needs an odd prime, got {q}")
    if not 1 < g < q:
        raise ValueError(f"g must lie in 2..q-1, got {g}")
    powers = _power_sequence(q, g)
    seen = np.zeros(q, dtype=bool)
    seen[powers] = True
    if seen[0] or not seen[1:].all():
        raise ValueError(f"{g} is not a primitive root modulo {q}")
    powers.setflags(write=False)
    return PrimeContext(q=q, g=g, powers=powers)


def prime_context(q: int) -> PrimeContext:
    """PrimeContext built on the smallest primitive root of q."""
    return power_table(q, primitive_root(q))


def _digamma_shifted(x):
    # x >= _DIGAMMA_SHIFT here
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for k, b in enumerate(_BERNOULLI_EVEN, start=1):
        series = series + b / (2 * k) * power
        power = power * inv2
    return np.log(x) - 0.5 / x - series


def digamma(x):
    """Digamma function psi(x) for x > 0 (scalar or array)."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~(arr > 0)):
        raise ValueError("digamma is only implemented for x > 0")
    shift = np.maximum(np.ceil(_DIGAMMA_SHIFT - arr), 0.0)
    nmax = int(shift.max(initial=0.0))
    # psi(x) = psi(x + n) - sum_{i<n} 1/(x + i); add the small terms last
    corr = np.zeros_like(arr)
    for i in range(nmax - 1, -1, -1):
        corr = corr + np.where(i < shift, 1.0 / (arr + i), 0.0)
    out = _digamma_shifted(arr + shift) - corr
    if np.ndim(x) == 0:
        return float(out)
    return out


def _e1_series(x: float) -> float:
    # Ein(x) = sum_{k>=1} (-1)^(k+1) x^k / (k k!)
    term = x
    total = x
    k = 1
    while abs(term) > 1e-18 * abs(total):
        term *= -x * k / ((k + 1) * (k + 1))
        total += term
        k += 1
    return -EULER_GAMMA - math.log(x) + total


def _e1_continued_fraction(x: float) -> float:
    # modified Lentz on e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x)


def exp_integral_e1(x: float) -> float:
    """Exponential integral E_1(x) for x > 0."""
    if not x > 0:
        raise ValueError("E1 is only implemented for x > 0")
    if x <= _E1_SERIES_MAX:
        return _e1_series(x)
    return _e1_continued_fraction(x)


def harmonic(n: int) -> float:
    """n-th harmonic number, summed in ascending order with exact rounding."""
    if n < 1:
        raise ValueError("harmonic needs n >= 1")
    return math.fsum(1.0 / j for j in range(1, n + 1))
