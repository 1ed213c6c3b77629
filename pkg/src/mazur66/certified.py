"""Outward-rounded interval helpers on top of ``mpmath.iv``.

``mpmath.iv`` keeps a single global precision, so every use goes through
:func:`ivprec`, which serialises access with a lock and restores the old
precision on exit.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from fractions import Fraction
from typing import Callable

from mpmath import iv
from mpmath.libmp import to_int

from .errors import CertificationError

START_BITS = 64
MAX_BITS = 1 << 13

_lock = threading.RLock()


@contextmanager
def ivprec(bits: int):
    with _lock:
        old = iv.prec
        iv.prec = bits
        try:
            yield iv
        finally:
            iv.prec = old


def to_iv(r) -> "iv.mpf":
    """Enclose a rational (or int) in an interval at the current precision."""
    r = Fraction(r)
    if r.denominator == 1:
        return iv.mpf(r.numerator)
    return iv.mpf(r.numerator) / iv.mpf(r.denominator)


def sign(build: Callable[[], "iv.mpf"], start: int = START_BITS, max_bits: int = MAX_BITS) -> int:
    """Certified sign of a quantity known to be nonzero.

    ``build`` is re-evaluated at doubling precision until the enclosing
    interval excludes zero.
    """
    bits = start
    while bits <= max_bits:
        with ivprec(bits):
            d = build()
            if d.a > 0:
                return 1
            if d.b < 0:
                return -1
        bits *= 2
    raise CertificationError(f"could not separate value from zero at {max_bits} bits")


def floor_of(build: Callable[[], "iv.mpf"], start: int = START_BITS, max_bits: int = MAX_BITS) -> int:
    """Certified floor of a positive non-integer quantity."""
    bits = start
    while bits <= max_bits:
        with ivprec(bits):
            x = build()
            a, b = x._mpi_
            lo = to_int(a, "f")
            hi = to_int(b, "f")
            if lo == hi:
                return int(lo)
        bits *= 2
    raise CertificationError(f"floor not determined at {max_bits} bits")
