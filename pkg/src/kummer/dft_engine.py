"""Planned discrete Fourier transforms of arbitrary length.

Forward convention::

    forward(u)_j = sum_k u_k e(-jk/n),      e(x) = exp(2 pi i x)
    inverse(u)_j = (1/n) sum_k u_k e(+jk/n)

Lengths whose prime factors are all <= 61 use a recursive mixed-radix
decimation in time (radix 4 and 2 butterflies, dense small DFTs for odd
radices).  Any other length goes through a chirp convolution whose inner
transform has power-of-two length.

Sequences are exchanged as complex128 arrays.  With ``precision="extended"``
(the default) every intermediate is carried in ``np.clongdouble``; the result
is rounded to complex128 once, at the end.  The error model in
:func:`roundtrip_report` always uses the unit roundoff of the exchanged
format.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

MAX_DENSE_RADIX = 61

_PI_LD = np.longdouble("3.14159265358979323846264338327950288")

#: unit roundoff of the exchanged sequence format (complex128)
UNIT_ROUNDOFF = float(np.finfo(np.float64).eps) / 2


class InvalidLengthError(ValueError):
    """Transform length is not a positive integer or does not match the plan."""


class PlanResourceError(MemoryError):
    """The plan would exceed the configured memory ceiling."""

    def __init__(self, n: int, predicted_bytes: int, limit: Optional[int]):
        self.n = n
        self.predicted_bytes = predicted_bytes
        self.limit = limit
        if limit is None:
            msg = f"allocation failed for a length-{n} plan (~{predicted_bytes} bytes)"
        else:
            msg = (
                f"a length-{n} plan needs ~{predicted_bytes} bytes, "
                f"above the ceiling of {limit} bytes"
            )
        super().__init__(msg)


def unit_roots(n: int, extended: bool = False) -> np.ndarray:
    """e(-k/n) for k = 0..n-1.

    The angle 2 pi k / n is reduced exactly (integer arithmetic) to an octant
    offset in [0, pi/4] before any trigonometric call, and the octant symmetry
    is applied by swapping and negating components, which is exact.
    """
    k = np.arange(n, dtype=np.int64)
    octant = (8 * k) // n
    rem = 8 * k - octant * n
    odd = (octant & 1).astype(bool)
    rem = np.where(odd, n - rem, rem)
    if extended:
        phi = (2 * _PI_LD / (8 * np.longdouble(n))) * rem.astype(np.longdouble)
    else:
        phi = (2 * math.pi / (8 * n)) * rem.astype(np.float64)
    c = np.cos(phi)
    s = np.sin(phi)
    s = np.where(odd, -s, s)
    quarter = np.where(odd, (octant + 1) // 2, octant // 2) % 4
    conds = [quarter == 0, quarter == 1, quarter == 2, quarter == 3]
    re = np.select(conds, [c, -s, -c, s])
    im = np.select(conds, [s, c, -s, -c])
    dtype = np.clongdouble if extended else np.complex128
    out = np.empty(n, dtype=dtype)
    out.real = re
    out.imag = -im
    return out


def factorize_length(n: int) -> tuple[int, ...]:
    """Radices used by the mixed-radix path: fours first, then 2, then odd primes."""
    factors = []
    while n % 4 == 0:
        factors.append(4)
        n //= 4
    while n % 2 == 0:
        factors.append(2)
        n //= 2
    p = 3
    while p * p <= n:
        while n % p == 0:
            factors.append(p)
            n //= p
        p += 2
    if n > 1:
        factors.append(n)
    return tuple(factors)


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


@dataclass
class _Stage:
    radix: int
    sub: int  # length of each sub-transform
    twiddle: np.ndarray  # shape (radix, sub)
    dense: Optional[np.ndarray]  # radix x radix DFT matrix for odd radices


@dataclass
class DftPlan:
    """Reusable transform descriptor for a fixed length.

    The immutable parts (twiddles, stages, chirp tables) may be shared;
    ``scratch`` may not.  Use :meth:`clone` to get an independent plan for
    another thread.
    """

    n: int
    strategy: str
    precision: str
    factors: tuple[int, ...]
    twiddles: np.ndarray = field(repr=False)
    scratch: Optional[np.ndarray] = field(default=None, repr=False)
    inner: Optional["DftPlan"] = field(default=None, repr=False)
    _stages: list = field(default_factory=list, repr=False)
    _chirp: Optional[np.ndarray] = field(default=None, repr=False)
    _kernel: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def compute_dtype(self):
        return np.clongdouble if self.precision == "extended" else np.complex128

    @property
    def inner_length(self) -> Optional[int]:
        return None if self.inner is None else self.inner.n

    def clone(self) -> "DftPlan":
        inner = None if self.inner is None else self.inner.clone()
        scratch = None if self.scratch is None else np.empty_like(self.scratch)
        return replace(self, inner=inner, scratch=scratch)

    def forward(self, u) -> np.ndarray:
        return forward(self, u)

    def inverse(self, u) -> np.ndarray:
        return inverse(self, u)

    # -- execution on compute-dtype arrays ---------------------------------

    def _execute(self, x: np.ndarray) -> np.ndarray:
        if self.strategy == "chirp-convolution":
            return self._chirp_forward(x)
        if not self._stages:
            return x.copy()
        return self._mixed(x.reshape(1, -1), 0).reshape(-1)

    def _mixed(self, x: np.ndarray, level: int) -> np.ndarray:
        if level == len(self._stages):
            return x
        st = self._stages[level]
        batch = x.shape[0]
        r, m = st.radix, st.sub
        # column j of the (m, r) view is the decimated subsequence x[j::r]
        y = np.ascontiguousarray(x.reshape(batch, m, r).transpose(0, 2, 1))
        y = self._mixed(y.reshape(batch * r, m), level + 1).reshape(batch, r, m)
        y = y * st.twiddle
        if r == 2:
            z = np.empty_like(y)
            np.add(y[:, 0], y[:, 1], out=z[:, 0])
            np.subtract(y[:, 0], y[:, 1], out=z[:, 1])
        elif r == 4:
            s02 = y[:, 0] + y[:, 2]
            d02 = y[:, 0] - y[:, 2]
            s13 = y[:, 1] + y[:, 3]
            d13 = y[:, 1] - y[:, 3]
            # -i * d13
            rot = np.empty_like(d13)
            rot.real = d13.imag
            rot.imag = -d13.real
            z = np.empty_like(y)
            z[:, 0] = s02 + s13
            z[:, 1] = d02 + rot
            z[:, 2] = s02 - s13
            z[:, 3] = d02 - rot
        else:
            z = np.matmul(st.dense, y)
        return z.reshape(batch, r * m)

    def _chirp_forward(self, x: np.ndarray) -> np.ndarray:
        n = self.n
        buf = self.scratch
        buf[:n] = x * self._chirp
        buf[n:] = 0
        spec = self.inner._execute(buf)
        spec *= self._kernel
        conv = np.conj(self.inner._execute(np.conj(spec)))
        return conv[:n] * self._chirp


def _estimate_bytes(n: int, extended: bool) -> int:
    item = 32 if extended else 16
    factors = factorize_length(n)
    if factors and max(factors) > MAX_DENSE_RADIX:
        m = _next_pow2(2 * n - 1)
        return _estimate_bytes(m, extended) + item * (3 * n + 4 * m)
    return item * 8 * n


def _build_mixed(n: int, extended: bool) -> DftPlan:
    factors = factorize_length(n)
    roots = unit_roots(n, extended)
    stages = []
    m = n
    for r in factors:
        sub = m // r
        stride = n // m
        tw = roots[(np.arange(r)[:, None] * np.arange(sub)[None, :]) * stride]
        dense = None
        if r not in (2, 4):
            dense = roots[(np.arange(r)[:, None] * np.arange(r)[None, :] % r) * (n // r)]
        stages.append(_Stage(r, sub, tw, dense))
        m = sub
    return DftPlan(
        n=n,
        strategy="mixed-radix",
        precision="extended" if extended else "double",
        factors=factors,
        twiddles=roots,
        _stages=stages,
    )


def _build_chirp(n: int, extended: bool) -> DftPlan:
    m = _next_pow2(2 * n - 1)
    inner = _build_mixed(m, extended)
    roots2 = unit_roots(2 * n, extended)
    j = np.arange(n, dtype=np.int64)
    chirp = roots2[(j * j) % (2 * n)]  # e(-j^2 / (2n))
    kernel = np.zeros(m, dtype=chirp.dtype)
    kernel[:n] = np.conj(chirp)
    kernel[m - n + 1 :] = np.conj(chirp[1:][::-1])
    kernel = inner._execute(kernel) / m
    return DftPlan(
        n=n,
        strategy="chirp-convolution",
        precision="extended" if extended else "double",
        factors=factorize_length(n),
        twiddles=roots2,
        scratch=np.empty(m, dtype=chirp.dtype),
        inner=inner,
        _chirp=chirp,
        _kernel=kernel,
    )


def plan_dft(n: int, precision: str = "extended", max_bytes: Optional[int] = None) -> DftPlan:
    """Plan a length-n transform.

    ``max_bytes`` caps the predicted allocation; exceeding it raises
    :class:`PlanResourceError` before anything is allocated.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidLengthError(f"transform length must be a positive integer, got {n!r}")
    if precision not in ("double", "extended"):
        raise ValueError(f"unknown precision {precision!r}")
    n = int(n)
    extended = precision == "extended"
    predicted = _estimate_bytes(n, extended)
    if max_bytes is not None and predicted > max_bytes:
        raise PlanResourceError(n, predicted, max_bytes)
    factors = factorize_length(n)
    try:
        if factors and max(factors) > MAX_DENSE_RADIX:
            return _build_chirp(n, extended)
        return _build_mixed(n, extended)
    except MemoryError as exc:
        raise PlanResourceError(n, predicted, max_bytes) from exc


def _as_input(plan, u) -> np.ndarray:
    arr = np.asarray(u)
    if arr.ndim != 1 or arr.shape[0] != plan.n:
        raise InvalidLengthError(f"plan has length {plan.n}, got input of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("input sequence has non-finite entries")
    return arr


def forward(plan: DftPlan, u) -> np.ndarray:
    """forward(u)_j = sum_k u_k e(-jk/n), as a new complex128 array."""
    x = _as_input(plan, u)
    if isinstance(plan, ExternalPlan):
        return np.fft.fft(x.astype(np.complex128))
    out = plan._execute(x.astype(plan.compute_dtype))
    return out.astype(np.complex128)


def inverse(plan: DftPlan, u) -> np.ndarray:
    """inverse(u)_j = (1/n) sum_k u_k e(+jk/n), as a new complex128 array."""
    x = _as_input(plan, u)
    if isinstance(plan, ExternalPlan):
        return np.fft.ifft(x.astype(np.complex128))
    y = np.conj(plan._execute(np.conj(x.astype(plan.compute_dtype))))
    return (y / plan.n).astype(np.complex128)


@dataclass
class ExternalPlan:
    """Same call surface as DftPlan, executed by numpy's pocketfft."""

    n: int
    strategy: str = "external"
    precision: str = "double"

    def clone(self) -> "ExternalPlan":
        return replace(self)

    def forward(self, u) -> np.ndarray:
        return forward(self, u)

    def inverse(self, u) -> np.ndarray:
        return inverse(self, u)


def plan_external(n: int) -> ExternalPlan:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidLengthError(f"transform length must be a positive integer, got {n!r}")
    return ExternalPlan(int(n))


def delta_bound(n: int, epsilon: float = UNIT_ROUNDOFF) -> float:
    """Predicted RMS relative FFT error 0.6 eps sqrt(log2 n)."""
    if n <= 1:
        return 0.0
    return 0.6 * epsilon * math.sqrt(math.log(n) / math.log(2))


@dataclass(frozen=True)
class AccuracyReport:
    """Predicted and (optionally) measured forward/inverse round-trip errors."""

    n: int
    epsilon: float
    delta: float
    l2_input_norm: float
    linf_input_norm: float
    predicted_e2: float
    predicted_einf: float
    predicted_forward_sup: float
    measured_e2: Optional[float] = None
    measured_einf: Optional[float] = None

    @property
    def measured_e2_rel(self) -> Optional[float]:
        if self.measured_e2 is None or self.l2_input_norm == 0:
            return None
        return self.measured_e2 / self.l2_input_norm

    @property
    def within_budget(self) -> bool:
        if self.measured_e2 is None or self.measured_einf is None:
            return True
        return self.measured_e2 <= self.predicted_e2 and self.measured_einf <= self.predicted_einf


def predicted_report(n: int, l2_norm: float, linf_norm: float, epsilon: float = UNIT_ROUNDOFF) -> AccuracyReport:
    """Error budget for a length-n input with the given norms.

    ``predicted_einf`` uses the sharper of ||.||_inf <= ||.||_2 applied to the
    l2 budget and the sqrt(n) ||u||_inf form.  ``predicted_forward_sup``
    bounds the sup-norm error of the unitary transform forward/sqrt(n).
    """
    delta = delta_bound(n, epsilon)
    growth = delta * (2 + delta)
    return AccuracyReport(
        n=n,
        epsilon=epsilon,
        delta=delta,
        l2_input_norm=l2_norm,
        linf_input_norm=linf_norm,
        predicted_e2=growth * l2_norm,
        predicted_einf=growth * min(l2_norm, math.sqrt(n) * linf_norm),
        predicted_forward_sup=delta * l2_norm,
    )


def roundtrip_report(plan, u, spectrum: Optional[np.ndarray] = None) -> AccuracyReport:
    """Measure ||inverse(forward(u)) - u|| against the predicted budget.

    ``spectrum`` may carry an already computed forward(u) to save a transform.
    """
    x = _as_input(plan, u).astype(np.complex128)
    if spectrum is None:
        spectrum = forward(plan, x)
    err = inverse(plan, spectrum) - x
    base = predicted_report(
        plan.n,
        float(np.linalg.norm(x)),
        float(np.max(np.abs(x))),
    )
    return replace(
        base,
        measured_e2=float(np.linalg.norm(err)),
        measured_einf=float(np.max(np.abs(err))),
    )
