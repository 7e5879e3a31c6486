from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hquot.congruence import (
    HarmonicInstance,
    MethodKind,
    eisenstein_power_check,
    eisenstein_product_check,
    fermat_quotient,
    harmonic_residue_direct,
    harmonic_sum_int,
    is_zero,
    lehmer_residue,
    residue,
    residue_432,
    residues_for_primes,
    scaled_zero_form,
)
from hquot.errors import (
    BaseNotCoprime,
    InvalidPrime,
    MethodUnavailable,
    NotPrime,
    QuotientOverflow,
    VacuousSum,
)
from hquot.primes import primes_in_range

D, L, Q = MethodKind.DirectSum, MethodKind.LehmerFQ, MethodKind.Base432FQ


def harmonic_oracle(p, m):
    """Exact rational H_m, reduced mod p at the end."""
    h = sum(Fraction(1, j) for j in range(1, m + 1))
    return h.numerator * pow(h.denominator, -1, p) % p


def quotient_oracle(p, b):
    return (b ** (p - 1) - 1) // p % p


def test_direct_examples():
    assert harmonic_residue_direct(HarmonicInstance(7, 6)) == 1
    assert harmonic_residue_direct(HarmonicInstance(61, 6)) == 0
    assert harmonic_residue_direct(HarmonicInstance(13, 6)) == 8


def test_h10_numerator_is_divisible_by_61():
    h = sum(Fraction(1, j) for j in range(1, 11))
    assert h == Fraction(7381, 2520)
    assert 7381 == 61 * 121


@pytest.mark.parametrize("N", [2, 3, 5, 6, 12, 43, 46])
def test_direct_matches_rational_oracle(N):
    for p in primes_in_range(N + 1, 3000).tolist():
        assert harmonic_residue_direct(HarmonicInstance(p, N)) == harmonic_oracle(p, p // N), p


@pytest.mark.parametrize("p", [1_000_003, 2_147_483_629])
def test_direct_kernel_matches_batch_python(p):
    # the compiled lane kernel against plain batch inversion on Python ints
    m = 50_000
    from hquot.congruence import _harmonic_python

    assert harmonic_sum_int(p, m) == _harmonic_python(p, m, 4096)


def test_direct_above_word_limit_uses_python_path():
    p = 2_147_483_659  # first prime above 2**31
    assert harmonic_sum_int(p, 3000) == sum(pow(j, -1, p) for j in range(1, 3001)) % p


@pytest.mark.parametrize("p", [7, 13, 61, 1009, 99_991, 1_680_023])
def test_block_size_does_not_matter(p):
    inst = HarmonicInstance(p, 6)
    values = {int(harmonic_residue_direct(inst, block=b)) for b in (1, 64, 4096)}
    values.add(int(harmonic_residue_direct(inst, per_term=True)))
    assert len(values) == 1


def test_instance_validation():
    assert HarmonicInstance(61, 6).m == 10
    with pytest.raises(VacuousSum):
        HarmonicInstance(5, 6)
    with pytest.raises(NotPrime):
        HarmonicInstance(60, 6)
    with pytest.raises(ValueError):
        HarmonicInstance(61, 47)


def test_fermat_quotient_examples():
    assert fermat_quotient(7, 1) == 0
    assert fermat_quotient(1_680_023, 1) == 0
    assert fermat_quotient(7, 2) == 2
    assert fermat_quotient(7, 3) == 6


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(primes_in_range(2, 2000).tolist()), st.integers(1, 500))
def test_fermat_quotient_matches_definition(p, b):
    if b % p == 0:
        with pytest.raises(BaseNotCoprime):
            fermat_quotient(p, b)
    else:
        assert fermat_quotient(p, b) == quotient_oracle(p, b)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(primes_in_range(3, 10**6).tolist()), st.integers(1, 2**16), st.integers(1, 50))
def test_fermat_quotient_depends_on_base_mod_p_squared(p, b, t):
    if b % p == 0:
        return
    sq = p * p
    assert fermat_quotient(p, b) == fermat_quotient(p, b % sq) == fermat_quotient(p, b + t * sq)


def test_fermat_quotient_errors():
    with pytest.raises(BaseNotCoprime):
        fermat_quotient(7, 14)
    with pytest.raises(NotPrime):
        fermat_quotient(9, 2)
    with pytest.raises(QuotientOverflow):
        fermat_quotient(2**52 + 21, 2)  # prime, but p**2 >= 2**104


def test_wide_prime_quotient():
    p = 2**52 - 47  # largest prime below 2**52
    assert fermat_quotient(p, 432) == quotient_oracle_powmod(p, 432)


def quotient_oracle_powmod(p, b):
    return (pow(b, p - 1, p * p) - 1) // p


def test_lehmer_examples():
    assert lehmer_residue(7) == 1
    assert lehmer_residue(61) == 0
    assert lehmer_residue(1_680_023) == 0


def test_scaled_examples():
    assert scaled_zero_form(7) == 5
    assert scaled_zero_form(61) == 0
    assert scaled_zero_form(11) == (-2 * lehmer_residue(11)) % 11


def test_residue_432_examples():
    assert 432 % 49 == 40 and 40**6 % 49 == 36 and (36 - 1) // 7 == 5
    assert residue_432(7) == 5
    assert residue_432(5) == 0
    assert (4 * quotient_oracle(5, 2) + 3 * quotient_oracle(5, 3)) % 5 == 0
    assert residue_432(7_308_036_881) == 0


@pytest.mark.parametrize("fn", [lehmer_residue, scaled_zero_form])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_small_primes_rejected(fn, p):
    with pytest.raises(InvalidPrime):
        fn(p)


@pytest.mark.parametrize("p", [2, 3])
def test_residue_432_rejects_factors(p):
    with pytest.raises(InvalidPrime):
        residue_432(p)


def test_eisenstein_examples():
    assert eisenstein_product_check(7, 2, 3)
    assert quotient_oracle(7, 6) == (2 + 6) % 7
    assert eisenstein_product_check(7, 1, 5)
    assert eisenstein_product_check(61, 16, 27)
    assert eisenstein_power_check(7, 2, 4)
    assert quotient_oracle(7, 16) == 4 * 2 % 7
    assert eisenstein_power_check(1009, 12345, 1)
    assert eisenstein_power_check(7, 3, 3)
    assert quotient_oracle(7, 27) == 3 * 6 % 7


def test_eisenstein_errors():
    with pytest.raises(BaseNotCoprime):
        eisenstein_product_check(7, 14, 3)
    with pytest.raises(BaseNotCoprime):
        eisenstein_power_check(7, 7, 2)
    with pytest.raises(QuotientOverflow):
        eisenstein_power_check(2**52 + 21, 3, 2)
    assert eisenstein_power_check(7, 2**40, 3)  # base power reduced mod p**2


def test_432_is_the_consolidated_base():
    # 4 q(2) + 3 q(3) = q(16) + q(27) = q(432) for the first few hundred primes
    for p in primes_in_range(7, 3000).tolist():
        four_three = (4 * quotient_oracle(p, 2) + 3 * quotient_oracle(p, 3)) % p
        assert residue_432(p) == four_three == scaled_zero_form(p)


def test_dispatch_examples():
    assert residue(HarmonicInstance(61, 6), Q) == 0
    assert residue(HarmonicInstance(7, 6), D) == 1
    assert residue(HarmonicInstance(7, 6), L) == 1
    for m in MethodKind:
        assert is_zero(HarmonicInstance(61, 6), m)
        assert not is_zero(HarmonicInstance(7, 6), m)
    assert is_zero(HarmonicInstance(1_680_023, 6), Q)


def test_dispatch_method_availability():
    with pytest.raises(MethodUnavailable):
        residue(HarmonicInstance(11, 5), L)
    with pytest.raises(MethodUnavailable):
        residue(HarmonicInstance(11, 5), "fq432")
    assert residue(HarmonicInstance(11, 5), "direct") == harmonic_oracle(11, 2)


def test_method_parsing():
    assert MethodKind.parse("fq432") is Q
    assert MethodKind.parse("Base432FQ") is Q
    assert MethodKind.parse("LEHMER") is L
    with pytest.raises(ValueError):
        MethodKind.parse("fast")


def test_method_equivalence_small():
    primes = primes_in_range(7, 20_000).primes
    d = residues_for_primes(primes, 6, D)
    assert np.array_equal(d, residues_for_primes(primes, 6, L))
    assert np.array_equal(residues_for_primes(primes, 6, Q), (-2 * d) % primes)
    for p, r in zip(primes[:300].tolist(), d[:300].tolist()):
        assert r == harmonic_oracle(p, p // 6)


def test_array_kernels_match_single_calls():
    primes = primes_in_range(10**9, 10**9 + 2000).primes
    for method in (L, Q):
        got = residues_for_primes(primes, 6, method).tolist()
        assert got == [int(residue(HarmonicInstance(p, 6), method)) for p in primes.tolist()]


def test_array_kernels_past_word_limit():
    primes = primes_in_range(2**51, 2**51 + 3000).primes
    got = residues_for_primes(primes, 6, Q).tolist()
    assert got == [quotient_oracle_powmod(p, 432) for p in primes.tolist()]
    got = residues_for_primes(primes, 6, L).tolist()
    for p, r in zip(primes.tolist(), got):
        q2, q3 = quotient_oracle_powmod(p, 2), quotient_oracle_powmod(p, 3)
        assert r == (-2 * q2 - 3 * q3 * pow(2, -1, p)) % p


@settings(max_examples=300, deadline=None)
@given(
    st.integers(3, 10**6),
    st.integers(1, 2**16),
    st.integers(1, 2**16),
    st.integers(1, 8),
)
def test_eisenstein_properties(n, a, b, k):
    from hquot.primes import is_prime

    while not is_prime(n):
        n += 1
    if a % n == 0 or b % n == 0:
        return
    assert eisenstein_product_check(n, a, b)
    assert eisenstein_power_check(n, a, k)
