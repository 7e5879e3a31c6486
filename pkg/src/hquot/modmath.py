"""Modular arithmetic for moduli below 2**104.

Odd moduli (every p and p**2 the search touches) go through a compiled
Montgomery engine on four 26-bit limbs; the 208-bit intermediate products
never exist as Python integers.  Even moduli fall back to plain division.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _limbs
from .errors import ModulusRangeError, NotInvertible

MODULUS_CEILING = 1 << 104
_R = 1 << _limbs.CAPACITY_BITS


@dataclass(frozen=True)
class MontgomeryConstants:
    limbs: tuple
    ninv: np.int64
    r2: tuple  # R**2 mod n, as limbs
    one: tuple  # R mod n, as limbs


def _as_limbs(x: int) -> tuple:
    return tuple(np.int64(v) for v in _limbs.to_limbs(x))


@dataclass(frozen=True)
class Modulus:
    """A reduction context.  Two instances with the same ``value`` behave identically."""

    value: int
    constants: MontgomeryConstants | None = field(
        default=None, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self) -> None:
        value = int(self.value)
        if not 2 <= value < MODULUS_CEILING:
            raise ModulusRangeError(f"modulus {value} outside [2, 2**104)")
        object.__setattr__(self, "value", value)
        if value & 1:
            ninv = (-pow(value, -1, 1 << _limbs.LIMB_BITS)) % (1 << _limbs.LIMB_BITS)
            consts = MontgomeryConstants(
                limbs=_as_limbs(value),
                ninv=np.int64(ninv),
                r2=_as_limbs(_R * _R % value),
                one=_as_limbs(_R % value),
            )
            object.__setattr__(self, "constants", consts)

    def __int__(self) -> int:
        return self.value

    def residue(self, x: int) -> Residue:
        """Fold any integer, negative included, to its least non-negative residue."""
        return Residue(int(x) % self.value, self)


class Residue(int):
    """An int in [0, modulus) that remembers its modulus.

    Compares and hashes as a plain int, so ``residue(...) == 0`` reads naturally.
    """

    modulus: Modulus

    def __new__(cls, value: int, modulus: Modulus | int) -> Residue:
        modulus = as_modulus(modulus)
        value = int(value)
        if not 0 <= value < modulus.value:
            raise ValueError(f"{value} is not reduced mod {modulus.value}")
        self = super().__new__(cls, value)
        self.modulus = modulus
        return self

    def __repr__(self) -> str:
        return f"Residue({int(self)} mod {self.modulus.value})"

    def __reduce__(self):
        return (Residue, (int(self), self.modulus.value))


def as_modulus(m: Modulus | int) -> Modulus:
    return m if isinstance(m, Modulus) else Modulus(int(m))


def _checked(x: int, m: Modulus, name: str) -> int:
    x = int(x)
    if not 0 <= x < m.value:
        raise ValueError(f"{name}={x} is not reduced mod {m.value}")
    return x


def _exponent_words(e: int) -> np.ndarray:
    words = []
    while True:
        words.append(e & 0x7FFFFFFF)
        e >>= 31
        if not e:
            break
    return np.array(words[::-1], dtype=np.int64)


def mul_mod(a: int, b: int, m: Modulus | int) -> Residue:
    """(a*b) mod m for reduced a, b."""
    m = as_modulus(m)
    a = _checked(a, m, "a")
    b = _checked(b, m, "b")
    c = m.constants
    if c is None:
        return Residue(a * b % m.value, m)
    t = _limbs.mont_mul(_as_limbs(a), _as_limbs(b), c.limbs, c.ninv)
    t = _limbs.mont_mul(t, c.r2, c.limbs, c.ninv)
    return Residue(_limbs.from_limbs(t), m)


def pow_mod(base: int, exponent: int, m: Modulus | int) -> Residue:
    """base**exponent mod m by square-and-multiply; O(log exponent) products."""
    m = as_modulus(m)
    base = _checked(base, m, "base")
    exponent = int(exponent)
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    c = m.constants
    if c is None:
        result = 1 % m.value
        for bit in bin(exponent)[2:]:
            result = result * result % m.value
            if bit == "1":
                result = result * base % m.value
        return Residue(result, m)
    base_m = _limbs.mont_mul(_as_limbs(base), c.r2, c.limbs, c.ninv)
    x = _limbs.mont_pow(base_m, _exponent_words(exponent), c.limbs, c.ninv, c.one)
    unit = _as_limbs(1)
    return Residue(_limbs.from_limbs(_limbs.mont_mul(x, unit, c.limbs, c.ninv)), m)


def inv_int(a: int, p: int) -> int:
    """Extended Euclid on plain ints; raises NotInvertible when gcd(a, p) != 1."""
    r0, r1 = p, a % p
    s0, s1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0 != 1:
        raise NotInvertible(a, p)
    return s0 % p


def inv_mod(a: int, p: Modulus | int) -> Residue:
    p = as_modulus(p)
    return Residue(inv_int(int(a), p.value), p)


def batch_inv_int(values: Sequence[int], p: int) -> list[int]:
    """Montgomery's trick: one extended gcd plus 3(k-1) products."""
    k = len(values)
    if k == 0:
        return []
    prefix = [0] * k
    acc = 1
    for i, v in enumerate(values):
        if v % p == 0:
            raise NotInvertible(v, p, index=i)
        acc = acc * v % p
        prefix[i] = acc
    try:
        inv = inv_int(acc, p)
    except NotInvertible:
        i = next(i for i, v in enumerate(values) if math.gcd(v, p) != 1)
        raise NotInvertible(values[i], p, index=i) from None
    out = [0] * k
    for i in range(k - 1, 0, -1):
        out[i] = inv * prefix[i - 1] % p
        inv = inv * values[i] % p
    out[0] = inv
    return out


def batch_inv_mod(values: Iterable[int], p: Modulus | int) -> list[Residue]:
    p = as_modulus(p)
    return [Residue(x, p) for x in batch_inv_int([int(v) for v in values], p.value)]
