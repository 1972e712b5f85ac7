import math
from fractions import Fraction

import numpy as np
import pytest

from primedir import arith
from primedir.errors import ParseError, ResourceLimitError


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


class TestSieve:
    def test_small_examples(self):
        assert arith.sieve_primes(10).primes.tolist() == [2, 3, 5, 7]
        assert arith.sieve_primes(2).primes.tolist() == [2]

    def test_million_count_and_last_prime(self):
        t = arith.sieve_primes(10**6)
        assert len(t.primes) == 78498
        last = int(t.primes[-1])
        assert last == 999983 and trial_division_is_prime(last)

    def test_matches_simple_sieve(self):
        t = arith.sieve_primes(10**5)
        flags = np.ones(10**5 + 1, dtype=bool)
        flags[:2] = False
        for p in range(2, 318):
            if flags[p]:
                flags[p * p :: p] = False
        assert np.array_equal(t.primes, np.flatnonzero(flags))

    def test_log_weights(self):
        t = arith.sieve_primes(1000)
        rel = np.abs(t.log_weights - np.log(t.primes.astype(float))) / np.abs(t.log_weights)
        assert rel.max() < 1e-14

    def test_limit_below_two_rejected(self):
        with pytest.raises(ValueError):
            arith.sieve_primes(1)

    def test_cache_roundtrip(self, tmp_path):
        t = arith.sieve_primes(5000)
        path = tmp_path / "p.pdpt"
        arith.save_prime_table(t, path)
        t2 = arith.load_prime_table(path)
        assert t2.limit == t.limit
        assert np.array_equal(t2.primes, t.primes)

    def test_cache_bad_magic(self, tmp_path):
        path = tmp_path / "bad.pdpt"
        path.write_bytes(b"NOPE" + bytes(16))
        with pytest.raises(ParseError):
            arith.load_prime_table(path)

    def test_cache_corrupt_final_entry(self, tmp_path):
        t = arith.sieve_primes(100)
        path = tmp_path / "p.pdpt"
        arith.save_prime_table(t, path)
        raw = bytearray(path.read_bytes())
        raw[-8:] = (96).to_bytes(8, "little")  # 96 is composite
        path.write_bytes(bytes(raw))
        with pytest.raises(ValueError):
            arith.load_prime_table(path)


class TestMultiplicative:
    def test_mobius_examples(self):
        assert arith.mobius(1) == 1
        assert arith.mobius(12) == 0
        assert arith.mobius(30) == -1

    def test_totient_examples(self):
        assert arith.totient(1) == 1
        assert arith.totient(9) == 6
        # brute-force gcd count
        assert arith.totient(100) == sum(1 for a in range(1, 101) if math.gcd(a, 100) == 1) == 40

    def test_divisor_sum_identities_sample(self):
        for q in range(1, 2001):
            divs = [d for d in range(1, q + 1) if q % d == 0]
            assert sum(arith.mobius(d) for d in divs) == (1 if q == 1 else 0)
            assert sum(arith.totient(d) for d in divs) == q

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            arith.mobius(0)
        with pytest.raises(ValueError):
            arith.totient(0)


class TestFarey:
    def test_level_zero(self):
        assert arith.farey_level(0).fractions == [arith.ReducedFraction(0, 1)]

    def test_level_one(self):
        fracs = [(f.a, f.q) for f in arith.farey_level(1).fractions]
        assert fracs == [(1, 3), (1, 2), (2, 3)]

    def test_level_two_bruteforce(self):
        # brute-force enumeration oracle over q in [4, 8)
        expect = sorted(
            {Fraction(a, q) for q in range(4, 8) for a in range(1, q) if math.gcd(a, q) == 1}
        )
        got = [Fraction(f.a, f.q) for f in arith.farey_level(2).fractions]
        assert got == expect
        assert len(got) == sum(arith.totient(q) for q in range(4, 8)) == 14

    def test_cardinality_matches_totient_sum(self):
        for s in range(1, 9):
            lv = arith.farey_level(s)
            assert len(lv.fractions) == sum(arith.totient(q) for q in range(1 << s, 1 << (s + 1)))

    def test_sorted_and_reduced(self):
        fracs = arith.farey_level(3).fractions
        vals = [Fraction(f.a, f.q) for f in fracs]
        assert vals == sorted(vals)
        assert all(math.gcd(f.a, f.q) == 1 for f in fracs)

    def test_size_cap(self):
        with pytest.raises(ResourceLimitError):
            arith.farey_level(10, max_size=10)


class TestExponentialSums:
    def test_full_sum_examples(self):
        assert arith.full_exponential_sum(4, 8) == 4
        assert arith.full_exponential_sum(4, 3) == 0
        assert arith.full_exponential_sum(7, 21) == 7

    def test_full_sum_vs_floating(self):
        for q in range(1, 501, 7):
            a = np.arange(1, q + 1)
            for n in (0, 1, q // 2, q, 2 * q + 1, -3):
                direct = np.exp(2j * np.pi * n * a / q).sum()
                assert abs(direct - arith.full_exponential_sum(q, n)) < 1e-9

    def test_ramanujan_examples(self):
        assert arith.ramanujan_sum(3, 1) == -1
        for q in (1, 2, 5, 12, 30):
            assert arith.ramanujan_sum(q, 0) == arith.totient(q)
        assert arith.ramanujan_sum(4, 2) == -2

    def test_ramanujan_cross_validation(self):
        for q in range(1, 51):
            for n in range(-50, 51):
                assert abs(arith.ramanujan_sum(q, n) - arith.ramanujan_sum_bruteforce(q, n)) < 1e-9

    def test_gcd(self):
        assert arith.gcd(12, 18) == 6
        assert arith.gcd(0, 5) == 5
        assert arith.gcd(17, 31) == 1
        assert arith.gcd(0, 0) == 0


class TestPrimality:
    def test_known_values(self):
        assert arith.is_prime_certified(2**31 - 1)
        assert not arith.is_prime_certified(561)  # Carmichael composite

    def test_against_trial_division(self):
        n = 10**15 + 37
        assert arith.is_prime_certified(n) == trial_division_is_prime(n)

    def test_small_rejected(self):
        with pytest.raises(ValueError):
            arith.is_prime_certified(1)

    def test_probabilistic_flag(self):
        cert = []
        arith.is_prime_certified(10**30 + 57, cert)
        assert cert == [False]
        cert = []
        arith.is_prime_certified(97, cert)
        assert cert == [True]

    def test_random_band(self):
        for n in range(10_000, 10_100):
            assert arith.is_prime_certified(n) == trial_division_is_prime(n)


class TestConvergents:
    def test_fibonacci_denominators(self):
        # the terminating CF of 610/987 ends with quotient 2 (987 = 2*377 + 233)
        x = Fraction(610, 987)
        dens = [q for _, q in arith.convergents(x, 987)]
        assert dens == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 987]

    def test_close_fraction_is_convergent(self):
        # any a/q with |x - a/q| < 1/(2 q^2) must appear among the convergents
        rng = np.random.default_rng(1)
        for _ in range(50):
            x = Fraction(int(rng.integers(1, 10**6)), 10**6)
            convs = set(arith.convergents(x, 500))
            for q in range(2, 500, 13):
                a = round(x * q)
                if math.gcd(a, q) == 1 and abs(x - Fraction(a, q)) < Fraction(1, 2 * q * q):
                    assert (a, q) in convs
