"""Arithmetic substrate: primes, Mobius/totient, reduced fractions, exponential sums.

Everything downstream (multiplier weights mu(q)/phi(q), level sets of reduced
fractions, prime-indexed exponential sums) sits on this module.  The two
exponential-sum identities

    sum_{1<=a<=q} e(na/q)      = q  if q | n, else 0
    sum_{(a,q)=1} e(na/q)      = mu(q/g) phi(q) / phi(q/g),  g = gcd(n, q)

are evaluated symbolically so they can serve as exact oracles for the
floating-point paths.
"""

from __future__ import annotations

import cmath
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple

import numpy as np

from .errors import ParseError, ResourceLimitError

__all__ = [
    "PrimeTable",
    "sieve_primes",
    "save_prime_table",
    "load_prime_table",
    "mobius",
    "totient",
    "factorize",
    "ReducedFraction",
    "FareyLevel",
    "farey_level",
    "full_exponential_sum",
    "ramanujan_sum",
    "ramanujan_sum_bruteforce",
    "gcd",
    "is_prime_certified",
    "MR_DETERMINISTIC_BOUND",
    "convergents",
]

# Odd-only segment of ~256 KiB of bool flags (one flag per odd number).
_SEGMENT_FLAGS = 1 << 18


@dataclass(frozen=True)
class PrimeTable:
    """Immutable sieve artifact: all primes <= limit with their log weights.

    Attributes
    ----------
    limit : int
        Inclusive sieving bound.
    primes : np.ndarray
        Ascending int64 array of every prime <= limit.
    log_weights : np.ndarray
        float64 array, log_weights[i] = ln(primes[i]).
    """

    limit: int
    primes: np.ndarray
    log_weights: np.ndarray

    def slice_for_scale(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Primes (and log weights) in [2^k, 2^(k+1)], the support of a scale-k average."""
        if self.limit < 2 ** (k + 1):
            raise ValueError(
                f"prime table limit {self.limit} < 2^{k + 1}; re-sieve with a larger limit"
            )
        lo = np.searchsorted(self.primes, 2**k, side="left")
        hi = np.searchsorted(self.primes, 2 ** (k + 1), side="right")
        return self.primes[lo:hi], self.log_weights[lo:hi]


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_primes(limit: int) -> PrimeTable:
    """Segmented odd-only sieve of Eratosthenes up to ``limit`` (inclusive).

    Segments hold ~256 KiB of flags so the inner loops stay cache resident;
    this keeps limits up to 2^25 (needed for scale k = 24) cheap.

    Raises
    ------
    ValueError
        If limit < 2.
    """
    if limit < 2:
        raise ValueError("sieve limit must be >= 2")

    base = _simple_sieve(math.isqrt(limit))
    odd_base = base[base > 2]

    chunks = [np.array([2], dtype=np.int64)]
    # Sieve odd numbers in [low, high) per segment.
    low = 3
    while low <= limit:
        high = min(low + 2 * _SEGMENT_FLAGS, limit + 1)
        n_flags = (high - low + 1) // 2
        flags = np.ones(n_flags, dtype=bool)
        for p in odd_base:
            p = int(p)
            start = max(p * p, ((low + p - 1) // p) * p)
            if start >= high:
                continue
            if start % 2 == 0:
                start += p
            if start >= high:
                continue
            flags[(start - low) // 2 :: p] = False
        chunks.append(low + 2 * np.flatnonzero(flags).astype(np.int64))
        low = high

    primes = np.concatenate(chunks)
    primes = primes[primes <= limit]
    return PrimeTable(limit=limit, primes=primes, log_weights=np.log(primes.astype(np.float64)))


# -- cache file: magic "PDPT", version byte, u64-le limit, u64-le primes -----

_PT_MAGIC = b"PDPT"
_PT_VERSION = 1


def save_prime_table(table: PrimeTable, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_PT_MAGIC)
        fh.write(bytes([_PT_VERSION]))
        fh.write(struct.pack("<Q", table.limit))
        fh.write(table.primes.astype("<u8").tobytes())


def load_prime_table(path) -> PrimeTable:
    """Load a cached sieve, revalidating the header and the final entry.

    Raises ParseError on malformed headers and ValueError when the content
    fails revalidation (non-monotone entries, final entry composite or
    beyond the recorded limit).
    """
    with open(path, "rb") as fh:
        head = fh.read(4)
        if head != _PT_MAGIC:
            raise ParseError(f"{path}: bad magic {head!r} at offset 0")
        ver = fh.read(1)
        if ver != bytes([_PT_VERSION]):
            raise ParseError(f"{path}: unsupported version {ver!r} at offset 4")
        (limit,) = struct.unpack("<Q", fh.read(8))
        raw = fh.read()
    primes = np.frombuffer(raw, dtype="<u8").astype(np.int64)
    if primes.size == 0:
        raise ValueError(f"{path}: empty prime table")
    if not np.all(np.diff(primes) > 0):
        raise ValueError(f"{path}: prime entries not strictly increasing")
    last = int(primes[-1])
    if last > limit:
        raise ValueError(f"{path}: final entry {last} exceeds recorded limit {limit}")
    if not is_prime_certified(last):
        raise ValueError(f"{path}: final entry {last} is not prime; cache corrupt")
    return PrimeTable(limit=int(limit), primes=primes, log_weights=np.log(primes.astype(np.float64)))


# -- multiplicative functions -------------------------------------------------

def factorize(q: int) -> list[tuple[int, int]]:
    """Prime factorization of q >= 1 by trial division, as (p, exponent) pairs."""
    if q < 1:
        raise ValueError("factorize expects q >= 1")
    out = []
    for p in (2, 3):
        if q % p == 0:
            e = 0
            while q % p == 0:
                q //= p
                e += 1
            out.append((p, e))
    # wheel over 6k +- 1
    p = 5
    while p * p <= q:
        for cand in (p, p + 2):
            if q % cand == 0:
                e = 0
                while q % cand == 0:
                    q //= cand
                    e += 1
                out.append((cand, e))
        p += 6
    if q > 1:
        out.append((q, 1))
    return out


def mobius(q: int) -> int:
    """Mobius function mu(q): 0 on non-squarefree q, else (-1)^(#prime factors)."""
    if q < 1:
        raise ValueError("mobius expects q >= 1")
    if q == 1:
        return 1
    facs = factorize(q)
    if any(e > 1 for _, e in facs):
        return 0
    return -1 if len(facs) % 2 else 1


def totient(q: int) -> int:
    """Euler totient phi(q)."""
    if q < 1:
        raise ValueError("totient expects q >= 1")
    out = q
    for p, _ in factorize(q):
        out -= out // p
    return out


# -- reduced fractions and dyadic Farey levels --------------------------------

class ReducedFraction(NamedTuple):
    """A reduced fraction a/q on the torus, 0 <= a < q, gcd(a, q) = 1 (0 is 0/1)."""

    a: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.q)


def reduced_fraction(a: int, q: int) -> ReducedFraction:
    """Canonicalize a/q: reduce, fold into [0, 1), send 0 to 0/1."""
    if q <= 0:
        raise ValueError("denominator must be positive")
    a %= q
    g = gcd(a, q)
    a, q = a // g, q // g
    if a == 0:
        return ReducedFraction(0, 1)
    return ReducedFraction(a, q)


@dataclass(frozen=True)
class FareyLevel:
    """All reduced fractions with denominator in [2^s, 2^(s+1)); level 0 is {0/1}."""

    s: int
    fractions: list[ReducedFraction]


def farey_level(s: int, max_size: int = 20_000_000) -> FareyLevel:
    """Enumerate the dyadic Farey level s, sorted by value.

    Level 0 is the single fraction 0/1.  For s >= 1 the list holds every a/q
    with 2^s <= q < 2^(s+1) and gcd(a, q) = 1, so its cardinality is
    sum phi(q) over that denominator range.

    Raises ResourceLimitError when that cardinality exceeds ``max_size``
    (the count grows like 4^s; full enumeration stops being a desk-scale
    object well before s = 22).
    """
    if s < 0:
        raise ValueError("level must be >= 0")
    if s == 0:
        return FareyLevel(0, [ReducedFraction(0, 1)])
    q_lo, q_hi = 1 << s, 1 << (s + 1)
    total = sum(totient(q) for q in range(q_lo, q_hi))
    if total > max_size:
        raise ResourceLimitError(
            f"Farey level {s} holds {total} fractions, above the cap {max_size}"
        )
    fracs: list[ReducedFraction] = []
    for q in range(q_lo, q_hi):
        ks = np.arange(1, q, dtype=np.int64)
        for a in ks[np.gcd(ks, q) == 1]:
            fracs.append(ReducedFraction(int(a), q))
    fracs.sort(key=lambda f: Fraction(f.a, f.q))
    return FareyLevel(s, fracs)


# -- exponential sums ----------------------------------------------------------

def full_exponential_sum(q: int, n: int) -> int:
    """sum_{1<=a<=q} e(na/q), evaluated symbolically: q if q | n else 0.

    Kept exact (a divisibility test, never floating summation) so it can
    oracle the floating paths.
    """
    if q < 1:
        raise ValueError("modulus must be >= 1")
    return q if n % q == 0 else 0


def ramanujan_sum(q: int, n: int) -> int:
    """Ramanujan sum c_q(n) by the closed form mu(q/g) phi(q) / phi(q/g), g = gcd(n, q)."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    g = gcd(n, q)
    qg = q // g
    return mobius(qg) * totient(q) // totient(qg)


def ramanujan_sum_bruteforce(q: int, n: int) -> float:
    """c_q(n) by direct summation over coprime residues (cross-validation route)."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    total = 0.0 + 0.0j
    for a in range(1, q + 1):
        if gcd(a, q) == 1:
            total += cmath.exp(2j * cmath.pi * ((n * a) % q) / q)
    return total.real


# -- primality -----------------------------------------------------------------

# Smallest composite that fools the witness set below is > 3.3e24
# (Sorenson & Webster), so Miller-Rabin with these bases is deterministic there.
MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_PROBABILISTIC_ROUNDS = 64  # failure probability < 4^-64 = 2^-128


def _mr_witness(n: int, a: int) -> bool:
    """True if a witnesses n composite."""
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime_certified(n: int, certainty: list | None = None) -> bool:
    """Miller-Rabin primality test, deterministic below MR_DETERMINISTIC_BOUND.

    Above the bound the test runs 64 pseudo-random bases derived
    deterministically from n (failure probability < 2^-128); pass a list as
    ``certainty`` to receive a single boolean flag telling whether the answer
    was deterministic.

    Raises
    ------
    ValueError
        If n < 2.
    """
    if n < 2:
        raise ValueError("primality test expects n >= 2")
    deterministic = n < MR_DETERMINISTIC_BOUND
    if certainty is not None:
        certainty.append(deterministic)
    for p in _MR_WITNESSES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if deterministic:
        return not any(_mr_witness(n, a) for a in _MR_WITNESSES)
    import random

    rng = random.Random(n ^ 0x9E3779B97F4A7C15)
    bases = [rng.randrange(2, n - 1) for _ in range(_PROBABILISTIC_ROUNDS)]
    return not any(_mr_witness(n, a) for a in bases)


# -- continued fractions -------------------------------------------------------

def convergents(x: Fraction, max_den: int) -> list[tuple[int, int]]:
    """Continued-fraction convergents (p, q) of x with q <= max_den, in order.

    Exact for Fraction input.  Any fraction within 1/(2 q^2) of x is among
    these, which is what the multiplier module relies on: its cutoff supports
    are far narrower than that, so nearest-fraction searches reduce to a
    convergent walk.
    """
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    x = Fraction(x)
    out: list[tuple[int, int]] = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = math.floor(x), 1
    rem = x - math.floor(x)
    out.append((p_cur, q_cur))
    while rem != 0:
        x = 1 / rem
        a = math.floor(x)
        rem = x - a
        p_cur, p_prev = a * p_cur + p_prev, p_cur
        q_cur, q_prev = a * q_cur + q_prev, q_cur
        if q_cur > max_den:
            break
        out.append((p_cur, q_cur))
    return out
