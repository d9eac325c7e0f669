"""Kummer ratio R(q) = h1(q)/G(q) of the q-th cyclotomic field, for prime q."""

from .kummer_core import (
    KummerResult,
    kummer_r,
    kummer_r_digamma,
    kummer_r_direct,
    kummer_r_fft,
    log_G,
    maillet_h1,
)
from .nt_core import is_prime, primitive_root

__all__ = [
    "KummerResult",
    "is_prime",
    "kummer_r",
    "kummer_r_digamma",
    "kummer_r_direct",
    "kummer_r_fft",
    "log_G",
    "maillet_h1",
    "primitive_root",
]
