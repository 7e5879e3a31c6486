import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import trial_division_is_prime
from hquot.errors import RangeTooLarge
from hquot.primes import SIEVE_CEILING, is_prime, primes_in_range

LIMIT = 10**6
_naive = np.array([trial_division_is_prime(n) for n in range(LIMIT)])


def naive_primes(lo, hi):
    return [int(n) for n in np.flatnonzero(_naive[lo:hi]) + lo]


def test_examples():
    assert primes_in_range(7, 20).tolist() == [7, 11, 13, 17, 19]
    assert primes_in_range(2, 3).tolist() == [2]
    # count from a trial-division sieve
    assert len(primes_in_range(2, 600_000)) == 49_098
    assert len(naive_primes(2, 600_000)) == 49_098


def test_full_range_matches_trial_division():
    assert primes_in_range(0, LIMIT).tolist() == naive_primes(0, LIMIT)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, LIMIT - 1), st.integers(1, 50_000), st.sampled_from([64, 1000, 1 << 20]))
def test_windows_match_trial_division(lo, width, seg):
    hi = min(lo + width, LIMIT)
    if hi <= lo:
        return
    assert primes_in_range(lo, hi, segment_width=seg).tolist() == naive_primes(lo, hi)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**12), st.integers(1, 20_000), st.integers(1, 20_000))
def test_adjacent_segments_concatenate(a, w1, w2):
    b, c = a + w1, a + w1 + w2
    joined = primes_in_range(a, b).tolist() + primes_in_range(b, c).tolist()
    assert joined == primes_in_range(a, c).tolist()


def test_segment_is_strictly_increasing_and_immutable():
    seg = primes_in_range(10**9, 10**9 + 10**5)
    assert np.all(np.diff(seg.primes) > 0)
    with pytest.raises(ValueError):
        seg.primes[0] = 4


def test_ceiling():
    with pytest.raises(RangeTooLarge):
        primes_in_range(SIEVE_CEILING - 10, SIEVE_CEILING + 1)
    near = primes_in_range(SIEVE_CEILING - 1000, SIEVE_CEILING)
    assert all(is_prime(q) for q in near.tolist())


def test_bad_range():
    with pytest.raises(ValueError):
        primes_in_range(10, 10)


def test_is_prime_examples():
    assert is_prime(61)
    assert is_prime(1_680_023)
    assert not is_prime(1_680_021)
    assert 1_680_021 % 3 == 0
    assert is_prime(7_308_036_881)


def test_is_prime_matches_trial_division():
    got = np.array([is_prime(n) for n in range(LIMIT)])
    assert np.array_equal(got, _naive)


def test_is_prime_matches_sieve_on_random_segments():
    rng = random.Random(7)
    for _ in range(20):
        lo = rng.randrange(0, SIEVE_CEILING - 5000)
        members = set(primes_in_range(lo, lo + 5000).tolist())
        for n in range(lo, lo + 5000):
            assert is_prime(n) == (n in members)


@pytest.mark.parametrize(
    "n,expected",
    [
        (3_215_031_751, False),  # strong pseudoprime to bases 2, 3, 5, 7
        (3_825_123_056_546_413_051, False),  # strong pseudoprime to bases up to 23
        (2**61 - 1, True),
        (2**64 - 59, True),
        (2**64 - 1, False),
    ],
)
def test_is_prime_hard_cases(n, expected):
    assert is_prime(n) is expected


def test_is_prime_rejects_beyond_64_bits():
    with pytest.raises(ValueError):
        is_prime(2**64)
