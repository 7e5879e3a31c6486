"""Prime enumeration over windows and single-candidate primality."""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import RangeTooLarge

SIEVE_CEILING = 1 << 52
DEFAULT_SEGMENT_WIDTH = 1 << 20

# The first twelve primes are a complete witness set below 3.3e24 > 2**64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class PrimeSegment:
    lo: int
    hi: int
    primes: np.ndarray

    def __post_init__(self) -> None:
        self.primes.flags.writeable = False

    def __len__(self) -> int:
        return len(self.primes)

    def tolist(self) -> list[int]:
        return [int(q) for q in self.primes]


@njit(cache=True, nogil=True)
def _sieve_odd(lo, hi, base):
    """Primes in [lo, hi) from odd-only flags; ``base`` must cover sqrt(hi)."""
    out_two = lo <= 2 < hi
    start = max(lo, 3)
    if start % 2 == 0:
        start += 1
    count = (hi - start + 1) // 2 if hi > start else 0
    flags = np.ones(count, dtype=np.bool_)
    for q in base:
        if q == 2:
            continue
        qq = q * q
        if qq >= hi:
            break
        m0 = max(qq, ((start + q - 1) // q) * q)
        if m0 % 2 == 0:
            m0 += q
        for idx in range((m0 - start) // 2, count, q):
            flags[idx] = False
    n = np.count_nonzero(flags) + (1 if out_two else 0)
    out = np.empty(n, dtype=np.int64)
    k = 0
    if out_two:
        out[0] = 2
        k = 1
    for i in range(count):
        if flags[i]:
            out[k] = start + 2 * i
            k += 1
    return out


class _BasePrimes:
    """Grow-only table of primes up to some bound, shared by all sieving threads."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._bound = 1
        self._primes = np.empty(0, dtype=np.int64)

    def upto(self, bound: int) -> np.ndarray:
        if bound > self._bound:
            with self._lock:
                if bound > self._bound:
                    new_bound = max(bound, 2 * self._bound, 1 << 16)
                    flags = np.ones(new_bound + 1, dtype=bool)
                    flags[:2] = False
                    for q in range(2, math.isqrt(new_bound) + 1):
                        if flags[q]:
                            flags[q * q :: q] = False
                    self._primes = np.flatnonzero(flags).astype(np.int64)
                    self._bound = new_bound
        return self._primes


_base = _BasePrimes()


def primes_in_range(lo: int, hi: int, segment_width: int = DEFAULT_SEGMENT_WIDTH) -> PrimeSegment:
    """All primes q with lo <= q < hi, via a segmented sieve of Eratosthenes."""
    lo, hi = int(lo), int(hi)
    if hi > SIEVE_CEILING:
        raise RangeTooLarge(f"hi={hi} exceeds the sieve ceiling 2**52")
    if lo < 0 or lo >= hi:
        raise ValueError(f"need 0 <= lo < hi, got [{lo}, {hi})")
    base = _base.upto(math.isqrt(hi - 1) + 1)
    if hi - lo <= segment_width:
        return PrimeSegment(lo, hi, _sieve_odd(lo, hi, base))
    parts = [
        _sieve_odd(a, min(a + segment_width, hi), base) for a in range(lo, hi, segment_width)
    ]
    return PrimeSegment(lo, hi, np.concatenate(parts))


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 2**64."""
    n = int(n)
    if n >= 1 << 64:
        raise ValueError("is_prime is only certified below 2**64")
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
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
