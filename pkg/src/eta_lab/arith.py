"""Prime sieving, Kronecker symbols, fundamental discriminants, n_1(p).

Conventions used throughout the package:

  * Signs are plain ints restricted to {-1, 0, +1}.
  * D = 1 counts as a fundamental discriminant (the trivial character);
    statistics that are undefined at D = 1 exclude it explicitly.
  * The Kronecker symbol (D/n) is defined for every integer D and every
    n >= 1; n = 0 is rejected rather than given a convention.
  * Discriminant tables are ordered by increasing |D| with the negative
    discriminant first on ties, so every derived report is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

__all__ = [
    "PrimeTable",
    "DiscriminantTable",
    "sieve_primes",
    "iter_primes",
    "is_prime",
    "kronecker",
    "legendre_oracle",
    "is_fundamental",
    "sieve_fundamental",
    "least_nonresidue",
]


# ---------------------------------------------------------------------------
# Primes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeTable:
    """All primes <= limit, 1-based: p(1) = 2, p(2) = 3, ...

    Immutable after construction; safe for concurrent readers.
    """

    limit: int
    primes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def p(self, k: int) -> int:
        """The kth prime (1-based)."""
        if k < 1:
            raise ValueError(f"prime index must be >= 1, got {k}")
        if k > len(self.primes):
            raise ValueError(
                f"prime table up to {self.limit} holds only "
                f"{len(self.primes)} primes, index {k} requested"
            )
        return self.primes[k - 1]


def _prime_sieve(limit: int) -> bytearray:
    """Boolean sieve: sieve[i] == 1 iff i is prime, 0 <= i <= limit."""
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            start = p * p
            sieve[start :: p] = bytearray(len(range(start, limit + 1, p)))
    return sieve


def sieve_primes(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes up to `limit` inclusive.

    Raises ValueError for limit < 2.
    """
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    sieve = _prime_sieve(limit)
    return PrimeTable(limit=limit, primes=tuple(i for i, v in enumerate(sieve) if v))


def iter_primes(limit: int):
    """Yield primes <= limit in increasing order, sieving in growing blocks.

    Stateless; cheap when the consumer stops early (block sizes double
    starting at 256), which is the normal case for first-sign scans.
    """
    lo = 2
    size = 256
    while lo <= limit:
        hi = min(limit, lo + size - 1)
        block = sieve_primes(hi).primes if lo == 2 else _segment(lo, hi)
        yield from block
        lo = hi + 1
        size *= 2


def _segment(lo: int, hi: int) -> list[int]:
    """Primes in [lo, hi] via a segmented sieve."""
    base = sieve_primes(isqrt(hi)).primes if hi >= 4 else ()
    seg = bytearray([1]) * (hi - lo + 1)
    for p in base:
        start = max(p * p, ((lo + p - 1) // p) * p)
        for m in range(start, hi + 1, p):
            seg[m - lo] = 0
    return [lo + i for i, v in enumerate(seg) if v and lo + i >= 2]


def is_prime(n: int) -> bool:
    """Trial-division primality; adequate for the scan ranges used here."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------------------
# Kronecker symbol and its independent oracle
# ---------------------------------------------------------------------------

def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for any integer d and n >= 1.

    For a fundamental discriminant d this evaluates the primitive real
    character chi_d(n) of conductor |d|. Completely multiplicative in n;
    (d/1) = +1 for every d. n = 0 is rejected: the value at 0 is a pure
    convention this package never needs.
    """
    if n < 0:
        raise ValueError(f"lower argument must be >= 1, got {n}")
    if n == 0:
        raise ValueError("kronecker(d, 0) is rejected (convention-dependent)")
    result = 1
    if n % 2 == 0:
        if d % 2 == 0:
            return 0
        # (d/2) = +1 if d = +-1 mod 8, -1 if d = +-3 mod 8
        two = 1 if d % 8 in (1, 7) else -1
        e = 0
        while n % 2 == 0:
            n //= 2
            e += 1
        if e % 2 == 1:
            result = two
    # Jacobi symbol (d/n) for odd n >= 1
    a = d % n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre_oracle(a: int, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion: a^((p-1)/2) mod p.

    Independent test oracle for `kronecker`: modular exponentiation only,
    no shared code. p must be an odd prime.
    """
    if p < 3 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    r = pow(a, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


# ---------------------------------------------------------------------------
# Fundamental discriminants
# ---------------------------------------------------------------------------

def _is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    f = 2
    while f * f <= n:
        if n % (f * f) == 0:
            return False
        f += 1
    return True


def is_fundamental(d: int) -> bool:
    """True iff d is a fundamental discriminant.

    Either d = 1 mod 4 and squarefree, or d = 4m with m squarefree and
    m = 2 or 3 mod 4. Admits d = 1 (trivial character); rejects d = 0.
    """
    if d == 0:
        return False
    if d % 4 == 1:
        return _is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _is_squarefree(m)
    return False


def check_fundamental(d: int) -> int:
    """Validate d as a fundamental discriminant, returning it unchanged."""
    if not is_fundamental(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    return d


@dataclass(frozen=True, eq=False)
class DiscriminantTable:
    """All fundamental discriminants D with |D| <= bound.

    `entries` is ordered by increasing |D|, negative member first on ties.
    `abs_values` is the parallel array of |D| (non-decreasing), which makes
    prefix counts a binary search.
    """

    bound: int
    entries: np.ndarray        # int64, canonical order
    abs_values: np.ndarray     # int64, |entries|, non-decreasing

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(int(d) for d in self.entries)

    def count_upto(self, y: int) -> int:
        """#{D fundamental : |D| <= y} for any y <= bound, O(log) time."""
        if y > self.bound:
            raise ValueError(f"count_upto({y}) exceeds table bound {self.bound}")
        if y < 1:
            return 0
        return int(np.searchsorted(self.abs_values, y, side="right"))


def sieve_fundamental(bound: int) -> DiscriminantTable:
    """Enumerate fundamental discriminants with |D| <= bound.

    Squarefree sieve (multiples of p^2 struck), no per-element trial
    factorization; one byte per integer up to `bound`.
    """
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    sf = np.ones(bound + 1, dtype=bool)
    sf[0] = False
    for p in sieve_primes(max(2, isqrt(bound))).primes:
        if p * p > bound:
            break
        sf[p * p :: p * p] = False

    y = np.arange(bound + 1, dtype=np.int64)
    r4 = y & 3
    m = y >> 2
    mr4 = m & 3
    sf_m = sf[m]
    # D = +y: y = 1 mod 4 squarefree, or y = 4m with m = 2,3 mod 4 squarefree
    plus = ((r4 == 1) & sf) | ((r4 == 0) & ((mr4 == 2) | (mr4 == 3)) & sf_m)
    # D = -y: -y = 1 mod 4 means y = 3 mod 4; -y = 4(-m) needs -m = 2,3 mod 4,
    # i.e. m = 1,2 mod 4
    minus = ((r4 == 3) & sf) | ((r4 == 0) & ((mr4 == 1) | (mr4 == 2)) & sf_m)
    plus[0] = minus[0] = False

    pos = y[plus]
    neg = -y[minus]
    entries = np.concatenate([pos, neg])
    # increasing |D|, negative first on ties
    order = np.argsort(2 * np.abs(entries) + (entries > 0), kind="stable")
    entries = entries[order]
    return DiscriminantTable(
        bound=bound, entries=entries, abs_values=np.abs(entries)
    )


# ---------------------------------------------------------------------------
# Least quadratic non-residue
# ---------------------------------------------------------------------------

def least_nonresidue(p: int) -> int:
    """n_1(p): least n >= 1 coprime to p with x^2 = n mod p insoluble.

    Defined for odd primes only (every residue is a square mod 2). Scans
    n = 2, 3, ... with the Euler criterion; the result is always prime.
    """
    if p == 2 or p < 3 or not is_prime(p):
        raise ValueError(f"least_nonresidue needs an odd prime, got {p}")
    e = (p - 1) // 2
    for n in range(2, p):
        if pow(n, e, p) == p - 1:
            assert is_prime(n), f"least non-residue {n} of {p} is not prime"
            return n
    raise AssertionError(f"no non-residue found mod {p}")  # unreachable for odd primes
