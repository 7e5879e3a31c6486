"""Residues of H_floor(p/N) mod p, by direct summation and by Fermat quotients.

For N = 6 the harmonic sum satisfies

    H_floor(p/6) = -2 q_p(2) - (3/2) q_p(3)   (mod p, p > 5)

and multiplying by -2 gives 4 q_p(2) + 3 q_p(3) = q_p(2**4 * 3**3) = q_p(432),
so a single exponentiation mod p**2 decides whether p is a zero.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import _limbs
from .errors import (
    BaseNotCoprime,
    InvalidPrime,
    MethodUnavailable,
    NotPrime,
    QuotientOverflow,
    VacuousSum,
)
from .modmath import MODULUS_CEILING, Modulus, Residue, batch_inv_int, inv_mod, mul_mod, pow_mod
from .primes import is_prime

log = logging.getLogger(__name__)

DEFAULT_BLOCK = 4096
MAX_DIVISOR = 46
# products of two residues below 2**31 stay inside int64
WORD_PRIME_LIMIT = 1 << 31
COMBINED_BASE = 432  # 2**4 * 3**3


class MethodKind(str, enum.Enum):
    DirectSum = "DirectSum"
    LehmerFQ = "LehmerFQ"
    Base432FQ = "Base432FQ"

    @property
    def needs_n6(self) -> bool:
        return self is not MethodKind.DirectSum

    @classmethod
    def parse(cls, text: str | MethodKind) -> MethodKind:
        if isinstance(text, MethodKind):
            return text
        key = text.strip()
        alias = _METHOD_ALIASES.get(key.lower())
        if alias is not None:
            return alias
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown method {text!r}") from None

    def __str__(self) -> str:
        return self.value


_METHOD_ALIASES = {
    "direct": MethodKind.DirectSum,
    "lehmer": MethodKind.LehmerFQ,
    "fq432": MethodKind.Base432FQ,
}



@dataclass(frozen=True)
class HarmonicInstance:
    """The pair (p, N); ``m = p // N`` is the number of summed reciprocals."""

    p: int
    N: int

    def __post_init__(self) -> None:
        if not 2 <= self.N <= MAX_DIVISOR:
            raise ValueError(f"N={self.N} outside [2, {MAX_DIVISOR}]")
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if self.p <= self.N:
            raise VacuousSum(f"p={self.p} <= N={self.N}: the harmonic sum is empty")

    @property
    def m(self) -> int:
        return self.p // self.N


# ---------------------------------------------------------------------------
# direct summation kernels

_LANES = 8
_M32 = np.int64(0xFFFFFFFF)
_M16 = np.int64(0xFFFF)


@njit(cache=True, nogil=True, inline="always")
def _redc(t, p, pinv):
    # t / 2**32 mod p for 0 <= t < p * 2**32, pinv = p^-1 mod 2**32
    q = ((t & _M32) * pinv) & _M32
    u = (t >> 32) - ((q * p) >> 32)
    return u + (p & (u >> 63))


@njit(cache=True, nogil=True, inline="always")
def _mul_lo32(x, y):
    x0 = x & _M16
    x1 = x >> 16
    y0 = y & _M16
    y1 = y >> 16
    return (x0 * y0 + (((x1 * y0 + x0 * y1) & _M16) << 16)) & _M32


@njit(cache=True, nogil=True)
def _inv_word(a, p):
    r0, r1 = p, a
    s0, s1 = 0, 1
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s0 < 0:
        s0 += p
    return s0


@njit(cache=True, nogil=True)
def _harmonic_per_term(p, m):
    total = 0
    for j in range(1, m + 1):
        total += _inv_word(j, p)
        if total >= p:
            total -= p
    return total


@njit(cache=True, nogil=True)
def _harmonic_blocked(p, m, block):
    """Sum of j^-1 for 1 <= j <= m < p, p an odd prime below 2**31.

    Terms are dealt round-robin into eight independent prefix-product chains
    (for instruction-level parallelism) in Montgomery form with R = 2**32.
    Each block of ``block`` terms costs one extended gcd.
    """
    L = _LANES
    rows = max(1, (block + L - 1) // L)
    pinv = _limbs.inv_lo(p, _M32, _mul_lo32)
    r1 = (np.int64(1) << 32) % p
    r3 = r1 * r1 % p * r1 % p
    step = L * r1 % p
    prefix = np.empty(rows * L, np.int64)
    acc = np.empty(L, np.int64)
    inv = np.empty(L, np.int64)
    jm = np.empty(L, np.int64)
    total = np.int64(0)
    start = np.int64(1)
    while start <= m:
        nrows = min(rows, (m - start) // L + 1)
        for l in range(L):
            acc[l] = r1
            jm[l] = (start + l) % p * r1 % p
        for i in range(nrows):
            base = start + i * L
            for l in range(L):
                v = jm[l] if base + l <= m else r1
                a = _redc(acc[l] * v, p, pinv)
                acc[l] = a
                prefix[i * L + l] = a
                w = jm[l] + step - p
                jm[l] = w + (p & (w >> 63))
        run = r1
        for l in range(L):
            inv[l] = run
            run = _redc(run * acc[l], p, pinv)
        r = _redc(_inv_word(run, p) * r3, p, pinv)
        for l in range(L - 1, -1, -1):
            inv[l] = _redc(inv[l] * r, p, pinv)
            r = _redc(r * acc[l], p, pinv)
        for l in range(L):
            w = jm[l] - step
            jm[l] = w + (p & (w >> 63))
        part = np.int64(0)
        for i in range(nrows - 1, 0, -1):
            base = start + i * L
            for l in range(L):
                jv = jm[l]
                if base + l <= m:
                    part += _redc(inv[l] * prefix[(i - 1) * L + l], p, pinv)
                    inv[l] = _redc(inv[l] * jv, p, pinv)
                w = jv - step
                jm[l] = w + (p & (w >> 63))
        for l in range(L):
            if start + l <= m:
                part += inv[l]
        total = (total + part) % p
        start += nrows * L
    return _redc(total, p, pinv)


def _harmonic_python(p: int, m: int, block: int) -> int:
    total = 0
    for lo in range(1, m + 1, block):
        total += sum(batch_inv_int(range(lo, min(lo + block, m + 1)), p))
    return total % p


def harmonic_sum_int(p: int, m: int, block: int = DEFAULT_BLOCK, per_term: bool = False) -> int:
    """H_m mod p for prime p and 1 <= m < p, as a plain int."""
    if p < WORD_PRIME_LIMIT and p > 2:
        if per_term:
            return int(_harmonic_per_term(np.int64(p), np.int64(m)))
        return int(_harmonic_blocked(np.int64(p), np.int64(m), np.int64(block)))
    if per_term:
        return sum(pow(j, -1, p) for j in range(1, m + 1)) % p
    return _harmonic_python(p, m, block)


def harmonic_residue_direct(
    inst: HarmonicInstance, block: int = DEFAULT_BLOCK, per_term: bool = False
) -> Residue:
    """H_floor(p/N) mod p by summing the reciprocals 1/j, j = 1..floor(p/N).

    ``per_term=True`` inverts every j separately (one extended gcd per term),
    the way the sum was originally evaluated; the default inverts in blocks
    of ``block`` terms with a single gcd each.
    """
    if block < 1:
        raise ValueError("block must be positive")
    return Residue(harmonic_sum_int(inst.p, inst.m, block, per_term), inst.p)


# ---------------------------------------------------------------------------
# Fermat quotients

def _require_quotient_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p * p >= MODULUS_CEILING:
        raise QuotientOverflow(f"p**2 for p={p} does not fit below 2**104")


def fermat_quotient(p: int, b: int) -> Residue:
    """q_p(b) = (b**(p-1) - 1) / p, reduced mod p.

    b**(p-1) is taken mod p**2; it is 1 mod p, so (t - 1) / p is exact.
    """
    p, b = int(p), int(b)
    _require_quotient_prime(p)
    if b < 1:
        raise ValueError("quotient base must be positive")
    if b % p == 0:
        raise BaseNotCoprime(f"{p} divides the base {b}")
    sq = Modulus(p * p)
    t = pow_mod(b % sq.value, p - 1, sq)
    return Residue((t - 1) // p, p)


def _check_n6_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p <= 5:
        raise InvalidPrime(f"p={p}: the quotient formula needs p > 5")


def lehmer_residue(p: int) -> Residue:
    """-2 q_p(2) - (3/2) q_p(3) mod p, equal to H_floor(p/6) mod p."""
    _check_n6_prime(p)
    mod = Modulus(p)
    three_halves = mul_mod(3, inv_mod(2, mod), mod)
    rhs = -2 * fermat_quotient(p, 2) - mul_mod(three_halves, fermat_quotient(p, 3), mod)
    return mod.residue(rhs)


def scaled_zero_form(p: int) -> Residue:
    """4 q_p(2) + 3 q_p(3) mod p: -2 times the Lehmer residue, same zeros."""
    _check_n6_prime(p)
    return Modulus(p).residue(4 * fermat_quotient(p, 2) + 3 * fermat_quotient(p, 3))


def residue_432(p: int) -> Residue:
    """q_p(432), the consolidated fast path.

    Defined for every prime p > 3.  At p = 5 it vanishes, but 5 is below the
    range where it tracks H_floor(p/6), so callers scanning N = 6 start at 7.
    """
    p = int(p)
    if p <= 3:
        raise InvalidPrime(f"p={p} divides 432")
    if p == 5:
        log.debug("residue_432(5) requested: below the N=6 threshold")
    return fermat_quotient(p, COMBINED_BASE)


def eisenstein_product_check(p: int, a: int, b: int) -> bool:
    """q_p(ab) == q_p(a) + q_p(b) (mod p)."""
    if (a * b) % p == 0:
        raise BaseNotCoprime(f"{p} divides {a}*{b}")
    return fermat_quotient(p, a * b) == (fermat_quotient(p, a) + fermat_quotient(p, b)) % p


def eisenstein_power_check(p: int, b: int, k: int) -> bool:
    """q_p(b**k) == k q_p(b) (mod p).

    Raises QuotientOverflow when p**2 leaves the 2**104 window.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if b % p == 0:
        raise BaseNotCoprime(f"{p} divides {b}")
    _require_quotient_prime(p)
    # q_p only sees its base mod p**2, so b**k never has to exist in full
    sq = Modulus(p * p)
    power = pow_mod(b % sq.value, k, sq)
    return fermat_quotient(p, power) == k * fermat_quotient(p, b) % p


# ---------------------------------------------------------------------------
# dispatch

def check_method(N: int, method: MethodKind) -> None:
    if method.needs_n6 and N != 6:
        raise MethodUnavailable(f"{method} is only defined for N = 6 (got N = {N})")


def residue(inst: HarmonicInstance, method: MethodKind | str) -> Residue:
    """Evaluate the instance by one method.

    DirectSum and LehmerFQ return H_floor(p/N) itself; Base432FQ returns -2
    times it, which has the same zeros.
    """
    method = MethodKind.parse(method)
    check_method(inst.N, method)
    if method is MethodKind.DirectSum:
        return harmonic_residue_direct(inst)
    if method is MethodKind.LehmerFQ:
        return lehmer_residue(inst.p)
    _check_n6_prime(inst.p)
    return residue_432(inst.p)


def is_zero(inst: HarmonicInstance, method: MethodKind | str) -> bool:
    return residue(inst, method) == 0


# ---------------------------------------------------------------------------
# array kernels for range scans

@njit(cache=True, nogil=True)
def _fq432_many(primes):
    out = np.empty(len(primes), np.int64)
    for i in range(len(primes)):
        out[i] = _limbs.fermat_quotient_word(primes[i], 432)
    return out


@njit(cache=True, nogil=True)
def _lehmer_many(primes):
    out = np.empty(len(primes), np.int64)
    for i in range(len(primes)):
        p = primes[i]
        q2 = _limbs.fermat_quotient_word(p, 2)
        q3 = _limbs.fermat_quotient_word(p, 3)
        half = q3 >> 1 if q3 % 2 == 0 else (q3 + p) >> 1
        s = (2 * q2 + 3 * half) % p
        out[i] = (p - s) % p
    return out


@njit(cache=True, nogil=True)
def _direct_many(primes, N, block):
    out = np.empty(len(primes), np.int64)
    for i in range(len(primes)):
        out[i] = _harmonic_blocked(primes[i], primes[i] // N, block)
    return out


def residues_for_primes(primes: np.ndarray, N: int, method: MethodKind) -> np.ndarray:
    """Residues for an ascending array of primes, each > max(N, 5) for quotient methods.

    Returns an int64 array aligned with ``primes``; values agree with
    :func:`residue` element-wise.
    """
    primes = np.ascontiguousarray(primes, dtype=np.int64)
    if len(primes) == 0:
        return np.empty(0, np.int64)
    check_method(N, method)
    if method is MethodKind.Base432FQ:
        return _fq432_many(primes)
    if method is MethodKind.LehmerFQ:
        return _lehmer_many(primes)
    small = primes[primes < WORD_PRIME_LIMIT]
    out = _direct_many(small, np.int64(N), np.int64(DEFAULT_BLOCK))
    if len(small) < len(primes):
        rest = [harmonic_sum_int(int(p), int(p) // N) for p in primes[len(small):]]
        out = np.concatenate([out, np.array(rest, dtype=np.int64)])
    return out
