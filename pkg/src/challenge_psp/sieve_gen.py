"""Prime generation with factorization support.

Segmented numpy sieving supplies primes in [lo, hi] together with the full
factorizations of p-1 and p+1, which downstream order/rank computations need.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IncompleteFactorizationError, ResourceLimitError

DEFAULT_SEGMENT = 1 << 22
TABLE_ENTRY_BUDGET = 1 << 26

Factorization = tuple[tuple[int, int], ...]


def smallest_factor_table(limit: int, *, max_entries: int = TABLE_ENTRY_BUDGET) -> np.ndarray:
    """Array t with t[i] = least prime factor of i, for 2 <= i <= limit."""
    if limit < 2:
        raise DomainError(f"table limit must be >= 2, got {limit}")
    if limit + 1 > max_entries:
        raise ResourceLimitError(
            f"table of {limit + 1} entries exceeds the budget of {max_entries}"
        )
    spf = np.arange(limit + 1, dtype=np.int64)
    for i in range(2, math.isqrt(limit) + 1):
        if spf[i] == i:
            seg = spf[i * i :: i]
            seg[seg == np.arange(i * i, limit + 1, i, dtype=np.int64)] = i
    return spf


def factorize(n: int, table: np.ndarray) -> Factorization:
    """Complete factorization of n by repeated smallest-factor division."""
    if n < 2:
        raise DomainError(f"cannot factorize {n}")
    if n >= len(table):
        raise DomainError(f"{n} is beyond the table limit {len(table) - 1}")
    out = []
    while n > 1:
        p = int(table[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return tuple(out)


# Deterministic Miller-Rabin base sets (threshold, bases); valid strictly
# below each threshold.  The last set is exact for all n < 2^64.
_MR_TIERS = (
    (2_047, (2,)),
    (1_373_653, (2, 3)),
    (9_080_191, (31, 73)),
    (25_326_001, (2, 3, 5)),
    (3_215_031_751, (2, 3, 5, 7)),
    (4_759_123_141, (2, 7, 61)),
    (1_122_004_669_633, (2, 13, 23, 1662803)),
    (2_152_302_898_747, (2, 3, 5, 7, 11)),
    (3_474_749_660_383, (2, 3, 5, 7, 11, 13)),
    (341_550_071_728_321, (2, 3, 5, 7, 11, 13, 17)),
    (1 << 64, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _mr_round(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime_64(n: int) -> bool:
    """Exact primality verdict for 0 <= n < 2^64."""
    if n >= 1 << 64:
        raise DomainError(f"{n} is out of the supported range (< 2^64)")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for threshold, bases in _MR_TIERS:
        if n < threshold:
            return all(_mr_round(n, a, d, s) for a in bases)
    raise AssertionError("unreachable")


def _brent(n: int, rng: random.Random, max_iterations: int) -> int | None:
    """One nontrivial factor of composite n via Brent's cycle finding."""
    if n % 2 == 0:
        return 2
    spent = 0
    while spent < max_iterations:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1 and spent < max_iterations:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                spent += min(m, r - k)
                k += m
                g = math.gcd(q, n)
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factor_word(n: int, *, seed: int = 0) -> Factorization:
    """Full factorization of 1 <= n < 2^64."""
    if n < 1:
        raise DomainError(f"cannot factorize {n}")
    if n >= 1 << 64:
        raise DomainError(f"{n} is out of the supported range (< 2^64)")
    fac: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            fac[p] = fac.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    rng = random.Random((seed, n))
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime_64(m):
            fac[m] = fac.get(m, 0) + 1
            continue
        d = _brent(m, rng, 1 << 24)
        if d is None:  # pragma: no cover - never observed below 2^64
            raise IncompleteFactorizationError(f"could not split {m}")
        stack.append(d)
        stack.append(m // d)
    return tuple(sorted(fac.items()))


@dataclass(frozen=True)
class FactoredPrime:
    """A prime p with the factorizations of its two neighbors."""

    p: int
    factors_p_minus_1: Factorization
    factors_p_plus_1: Factorization


def _simple_primes(limit: int) -> list[int]:
    if limit < 2:
        return []
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve).tolist()


def _composite_mask(lo_val: int, length: int, base_primes: list[int]) -> np.ndarray:
    """Boolean mask over values lo_val .. lo_val+length-1; True = not prime."""
    mask = np.zeros(length, dtype=bool)
    for v in (0, 1):
        if lo_val <= v < lo_val + length:
            mask[v - lo_val] = True
    for q in base_primes:
        first = max(q * q, ((lo_val + q - 1) // q) * q)
        if first < lo_val + length:
            mask[first - lo_val :: q] = True
    return mask


def _factor_pairs(
    lo_val: int, length: int, base_primes: list[int], needed: np.ndarray
) -> tuple[list[int], list[int]]:
    """(offset, prime) pairs, sorted by offset, for every base prime dividing a
    needed value."""
    pos_chunks, q_chunks = [], []
    for q in base_primes:
        start = (-lo_val) % q
        rel = np.flatnonzero(needed[start::q])
        if rel.size:
            pos_chunks.append(start + rel * q)
            q_chunks.append(np.full(rel.size, q, dtype=np.int64))
    if not pos_chunks:
        return [], []
    pos = np.concatenate(pos_chunks)
    qs = np.concatenate(q_chunks)
    order = np.argsort(pos, kind="stable")
    return pos[order].tolist(), qs[order].tolist()


def _group_pairs(pos: list[int], qs: list[int]) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    i = 0
    n = len(pos)
    while i < n:
        o = pos[i]
        j = i
        while j < n and pos[j] == o:
            j += 1
        out[o] = qs[i:j]
        i = j
    return out


def _unpack(value: int, qs: list[int]) -> Factorization:
    """Expand small-prime divisor list into (prime, exponent) pairs; any
    leftover cofactor is a single prime above the base-prime bound."""
    fac = []
    v = value
    for q in qs:
        e = 0
        while v % q == 0:
            v //= q
            e += 1
        fac.append((q, e))
    if v > 1:
        fac.append((v, 1))
    return tuple(fac)


def _blocks(lo: int, hi: int, size: int):
    s = lo
    while s <= hi:
        e = min(s + size - 1, hi)
        yield s, e
        s = e + 1


def primes_range(lo: int, hi: int, *, segment_size: int = DEFAULT_SEGMENT):
    """Plain primes in [lo, hi], ascending, O(segment) memory."""
    if lo < 2 or lo > hi:
        raise DomainError(f"need 2 <= lo <= hi, got [{lo}, {hi}]")
    base = _simple_primes(math.isqrt(hi) + 1)
    for s, e in _blocks(lo, hi, segment_size):
        mask = _composite_mask(s, e - s + 1, base)
        vals = (np.flatnonzero(~mask) + s).tolist()
        yield from vals


def prime_stream(lo: int, hi: int, *, segment_size: int = DEFAULT_SEGMENT):
    """Every prime in [lo, hi] with fully factored p-1 and p+1.

    Each segment is extended by one value on both sides so neighbor
    factorizations never straddle a boundary.
    """
    if lo < 2 or lo > hi:
        raise DomainError(f"need 2 <= lo <= hi, got [{lo}, {hi}]")
    base = _simple_primes(math.isqrt(hi + 1) + 1)
    for s, e in _blocks(lo, hi, segment_size):
        lo_val = s - 1
        length = e - s + 3  # covers s-1 .. e+1
        mask = _composite_mask(lo_val, length, base)
        prime_off = (np.flatnonzero(~mask[1 : length - 1]) + 1).tolist()
        needed = np.zeros(length, dtype=bool)
        for off in prime_off:
            needed[off - 1] = True
            needed[off + 1] = True
        fac_of = _group_pairs(*_factor_pairs(lo_val, length, base, needed))
        for off in prime_off:
            p = lo_val + off
            yield FactoredPrime(
                p=p,
                factors_p_minus_1=_unpack(p - 1, fac_of.get(off - 1, [])) if p > 2 else (),
                factors_p_plus_1=_unpack(p + 1, fac_of.get(off + 1, [])),
            )
