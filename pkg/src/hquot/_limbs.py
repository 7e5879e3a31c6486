"""Fixed-width Montgomery arithmetic on four 26-bit limbs (moduli below 2**104).

Numbers are passed around as 4-tuples of int64 limbs, least significant
first.  Limb products are at most 52 bits, so every accumulator in the
CIOS loop stays well inside int64 and no carry-save tricks are needed.
All kernels are compiled with ``nogil=True`` so threads can run them
concurrently.
"""
from __future__ import annotations

import numpy as np
from numba import njit

LIMB_BITS = 26
LIMB_COUNT = 4
MASK = (1 << LIMB_BITS) - 1
CAPACITY_BITS = LIMB_BITS * LIMB_COUNT  # R = 2**104

_M = np.int64(MASK)
_B = np.int64(LIMB_BITS)


def to_limbs(x: int) -> tuple[int, int, int, int]:
    return (x & MASK, (x >> 26) & MASK, (x >> 52) & MASK, (x >> 78) & MASK)


def from_limbs(t) -> int:
    return int(t[0]) | (int(t[1]) << 26) | (int(t[2]) << 52) | (int(t[3]) << 78)


@njit(cache=True, nogil=True, inline="always")
def geq(a, b):
    for i in range(3, -1, -1):
        if a[i] != b[i]:
            return a[i] > b[i]
    return True


@njit(cache=True, nogil=True, inline="always")
def sub(a, b):
    s = a[0] - b[0]
    r0 = s & _M
    c = s >> _B
    s = a[1] - b[1] + c
    r1 = s & _M
    c = s >> _B
    s = a[2] - b[2] + c
    r2 = s & _M
    c = s >> _B
    s = a[3] - b[3] + c
    r3 = s & _M
    return (r0, r1, r2, r3)


@njit(cache=True, nogil=True, inline="always")
def double_mod(a, n):
    """2a mod n for a < n < 2**104."""
    s = a[0] << 1
    r0 = s & _M
    c = s >> _B
    s = (a[1] << 1) + c
    r1 = s & _M
    c = s >> _B
    s = (a[2] << 1) + c
    r2 = s & _M
    c = s >> _B
    s = (a[3] << 1) + c
    r3 = s & _M
    top = s >> _B
    r = (r0, r1, r2, r3)
    if top != 0 or geq(r, n):
        r = sub(r, n)
    return r


@njit(cache=True, nogil=True)
def mont_mul(a, b, n, ninv):
    """a*b*R^-1 mod n (CIOS).  Requires n odd, a, b < n, ninv = -n^-1 mod 2**26."""
    a0, a1, a2, a3 = a
    n0, n1, n2, n3 = n
    t0 = np.int64(0)
    t1 = np.int64(0)
    t2 = np.int64(0)
    t3 = np.int64(0)
    t4 = np.int64(0)
    for i in range(4):
        bi = b[i]
        s = t0 + a0 * bi
        t0 = s & _M
        c = s >> _B
        s = t1 + a1 * bi + c
        t1 = s & _M
        c = s >> _B
        s = t2 + a2 * bi + c
        t2 = s & _M
        c = s >> _B
        s = t3 + a3 * bi + c
        t3 = s & _M
        c = s >> _B
        s = t4 + c
        t4 = s & _M
        t5 = s >> _B

        q = (t0 * ninv) & _M
        s = t0 + q * n0
        c = s >> _B
        s = t1 + q * n1 + c
        t0 = s & _M
        c = s >> _B
        s = t2 + q * n2 + c
        t1 = s & _M
        c = s >> _B
        s = t3 + q * n3 + c
        t2 = s & _M
        c = s >> _B
        s = t4 + c
        t3 = s & _M
        c = s >> _B
        t4 = t5 + c
    r = (t0, t1, t2, t3)
    if t4 != 0 or geq(r, n):
        r = sub(r, n)
    return r


@njit(cache=True, nogil=True)
def mont_pow(base_m, exp_words, n, ninv, one_m):
    """Left-to-right square-and-multiply in the Montgomery domain.

    ``exp_words`` holds the exponent as 31-bit words, most significant first.
    """
    x = one_m
    for w in exp_words:
        for k in range(30, -1, -1):
            x = mont_mul(x, x, n, ninv)
            if (w >> k) & 1:
                x = mont_mul(x, base_m, n, ninv)
    return x


@njit(cache=True, nogil=True)
def shift_mod(a, n, bits):
    """a * 2**bits mod n by repeated doubling."""
    for _ in range(bits):
        a = double_mod(a, n)
    return a


_M52 = np.int64((1 << 52) - 1)


@njit(cache=True, nogil=True, inline="always")
def mul_lo52(x, y):
    """x*y mod 2**52 for 0 <= x, y < 2**52."""
    x0 = x & _M
    x1 = x >> _B
    y0 = y & _M
    y1 = y >> _B
    mid = ((x1 * y0 + x0 * y1) & _M) << _B
    return (x0 * y0 + mid) & _M52


@njit(cache=True, nogil=True, inline="always")
def inv_lo(x, mask, mul):
    # Newton iteration for the inverse of odd x modulo a power of two
    y = x
    for _ in range(6):
        y = mul(y, (2 - mul(x, y)) & mask) & mask
    return y


@njit(cache=True, nogil=True, inline="always")
def _mul_lo26(x, y):
    return (x * y) & _M


@njit(cache=True, nogil=True)
def square_limbs(p):
    """Limbs of p*p for p < 2**52."""
    p0 = p & _M
    p1 = p >> _B
    s = p0 * p0
    r0 = s & _M
    c = s >> _B
    s = 2 * p0 * p1 + c
    r1 = s & _M
    c = s >> _B
    s = p1 * p1 + c
    r2 = s & _M
    r3 = s >> _B
    return (r0, r1, r2, r3)


@njit(cache=True, nogil=True)
def fermat_quotient_word(p, b):
    """((b**(p-1) - 1) / p) mod p for an odd prime p < 2**52 and p not dividing b.

    b**(p-1) is evaluated mod p**2 in Montgomery form; the exact division by p
    is done as a multiplication by p^-1 modulo 2**52, valid because the
    quotient is below p.
    """
    n = square_limbs(p)
    ninv = (-inv_lo(n[0], _M, _mul_lo26)) & _M
    zero = np.int64(0)
    if p < 3037000499:
        b = b % (p * p)
    x = shift_mod((b & _M, (b >> _B) & _M, zero, zero), n, 104)
    base_m = x
    e = p - 1
    top = 62
    while (e >> top) & 1 == 0:
        top -= 1
    for k in range(top - 1, -1, -1):
        x = mont_mul(x, x, n, ninv)
        if (e >> k) & 1:
            x = mont_mul(x, base_m, n, ninv)
    one = (np.int64(1), zero, zero, zero)
    t = mont_mul(x, one, n, ninv)
    low = ((t[1] << _B) | t[0]) - 1
    if low < 0:
        low += np.int64(1) << 52
    return mul_lo52(low, inv_lo(p, _M52, mul_lo52))
