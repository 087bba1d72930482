"""Primality testing, Legendre symbols, and Goldbach prime decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

# Witnesses making Miller-Rabin deterministic for all n < 3.3e24, far beyond
# any length this library handles.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality check for non-negative integers."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_upto(n: int) -> list[int]:
    """All primes <= n via a sieve of Eratosthenes."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def legendre(m: int, q: int) -> int:
    """Legendre symbol (m/q) via Euler's criterion.

    Returns 0 if q divides m, +1 if m is a quadratic residue mod q,
    -1 otherwise. q must be an odd prime.
    """
    if q == 2 or not is_prime(q):
        raise ValueError(f"q must be an odd prime, got {q}")
    m %= q
    if m == 0:
        return 0
    ls = pow(m, (q - 1) // 2, q)
    return -1 if ls == q - 1 else 1


class SplitPolicy(Enum):
    MAX_Q1 = "max_q1"
    BALANCED = "balanced"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class GoldbachSplit:
    """Primes summing to n, largest part first."""

    parts: tuple[int, ...]
    n: int

    def __post_init__(self):
        if len(self.parts) not in (2, 3):
            raise ValueError("split must have 2 or 3 parts")
        if sum(self.parts) != self.n:
            raise ValueError(f"parts {self.parts} do not sum to {self.n}")
        for p in self.parts:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        if self.parts[0] != max(self.parts):
            raise ValueError("parts[0] must be the largest prime")
        if len(self.parts) == 2 and (self.n % 2 or self.n <= 2):
            raise ValueError("2-part split requires even n > 2")
        if len(self.parts) == 3 and (self.n % 2 == 0 or self.n <= 5):
            raise ValueError("3-part split requires odd n > 5")


def _prev_prime(n: int) -> int:
    while n >= 2 and not is_prime(n):
        n -= 1
    return n


def goldbach_even(
    n: int,
    policy: SplitPolicy = SplitPolicy.MAX_Q1,
    explicit: tuple[int, int] | None = None,
) -> GoldbachSplit:
    """Two-prime decomposition of an even n > 2."""
    if n % 2 or n <= 2:
        raise ValueError(f"n must be even and > 2, got {n}")
    if policy is SplitPolicy.EXPLICIT:
        if explicit is None or len(explicit) != 2:
            raise ValueError("explicit policy requires a (q1, q2) pair")
        q1, q2 = sorted(explicit, reverse=True)
        return GoldbachSplit((q1, q2), n)
    if policy is SplitPolicy.MAX_Q1:
        q1 = _prev_prime(n - 2)
        while q1 >= 2:
            if is_prime(n - q1):
                return GoldbachSplit((q1, n - q1), n)
            q1 = _prev_prime(q1 - 1)
        raise ValueError(f"no two-prime split found for {n}")
    # Balanced: smallest gap; the gap determines the split uniquely.
    half = n // 2
    for d in range(half - 1):
        if is_prime(half + d) and is_prime(half - d):
            return GoldbachSplit((half + d, half - d), n)
    raise ValueError(f"no two-prime split found for {n}")


def goldbach_odd(
    n: int,
    policy: SplitPolicy = SplitPolicy.MAX_Q1,
    explicit: tuple[int, int, int] | None = None,
) -> GoldbachSplit:
    """Three-prime decomposition of an odd n > 5."""
    if n % 2 == 0 or n <= 5:
        raise ValueError(f"n must be odd and > 5, got {n}")
    if policy is SplitPolicy.EXPLICIT:
        if explicit is None or len(explicit) != 3:
            raise ValueError("explicit policy requires a (q1, q2, q3) triple")
        parts = tuple(sorted(explicit, reverse=True))
        return GoldbachSplit(parts, n)
    if policy is SplitPolicy.MAX_Q1:
        # Fix the largest prime leaving an even remainder > 2, then split
        # the remainder with the same policy.
        q1 = _prev_prime(n - 4)
        while q1 >= 2:
            rem = n - q1
            if rem % 2 == 0 and rem > 2:
                sub = goldbach_even(rem, SplitPolicy.MAX_Q1)
                return GoldbachSplit((q1,) + sub.parts, n)
            q1 = _prev_prime(q1 - 1)
        raise ValueError(f"no three-prime split found for {n}")
    # Balanced: minimize the spread max - min over all prime triples.
    # Ties broken toward the largest q1, then the largest q2.
    primes = primes_upto(n - 4)
    best = None
    for q3 in primes:
        if 3 * q3 > n:
            break
        for q2 in primes:
            if q2 < q3:
                continue
            q1 = n - q2 - q3
            if q1 < q2:
                break
            if not is_prime(q1):
                continue
            key = (q1 - q3, -q1, -q2)
            if best is None or key < best[0]:
                best = (key, (q1, q2, q3))
    if best is None:
        raise ValueError(f"no three-prime split found for {n}")
    return GoldbachSplit(best[1], n)
