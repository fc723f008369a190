"""Per-prime invariants: epsilon, multiplicative order, rank of apparition.

A prime p enters the search only when gcd(ell_b(p), omega(p)) <= 2.  For
epsilon(p) = -1 that holds automatically (ell divides p-1, omega divides p+1,
and gcd(p-1, p+1) = 2), so the expensive rank computation is only needed for
the rare admissible epsilon(p) = +1 primes, which a single Lucas evaluation
can preselect exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import LucasParams, jacobi
from .errors import DomainError
from .sieve_gen import (
    DEFAULT_SEGMENT,
    FactoredPrime,
    Factorization,
    _blocks,
    _composite_mask,
    _factor_pairs,
    _group_pairs,
    _simple_primes,
    _unpack,
    factor_word,
)

# Above this modulus size the vectorized epsilon table is not worth building.
_EPS_TABLE_LIMIT = 1 << 20


@dataclass(frozen=True)
class PrimeProfile:
    """A prime with the data the pre-product search needs."""

    p: int
    epsilon: int
    ell: int
    omega: int
    admissible: bool


def _u_mod(P: int, Q: int, n: int, m: int) -> int:
    """U_n mod m; unchecked fast path of arith.lucas_uv_mod."""
    if n == 0:
        return 0
    a, b = 0, 1
    for bit in bin(n)[2:]:
        if bit == "0":
            a, b = a * (2 * b - P * a) % m, (b * b - Q * a * a) % m
        else:
            a, b = (b * b - Q * a * a) % m, b * (P * b - 2 * Q * a) % m
    return a


def epsilon_of(params: LucasParams, n: int) -> int:
    """epsilon(n) = (D | n), defined only for n coprime to D."""
    e = jacobi(params.D, n)
    if e == 0:
        raise DomainError(f"gcd({n}, D={params.D}) > 1; epsilon is undefined here")
    return e


def _product(factors: Factorization) -> int:
    v = 1
    for q, e in factors:
        v *= q**e
    return v


def _order_descent(b: int, p: int, e: int, factors) -> int:
    for q, _ in factors:
        while e % q == 0 and pow(b, e // q, p) == 1:
            e //= q
    return e


def _rank_descent(P: int, Q: int, p: int, w: int, factors) -> int:
    for q, _ in factors:
        while w % q == 0 and _u_mod(P, Q, w // q, p) == 0:
            w //= q
    return w


def multiplicative_order(b: int, p: int, factors_p_minus_1: Factorization) -> int:
    """Least e >= 1 with b^e = 1 (mod p), given the factorization of p-1."""
    if math.gcd(b, p) != 1:
        raise DomainError(f"gcd({b}, {p}) > 1; no multiplicative order exists")
    e = _product(factors_p_minus_1)
    if pow(b, e, p) != 1:
        raise DomainError(f"{factors_p_minus_1} is not a factorization of a multiple of the order")
    return _order_descent(b, p, e, factors_p_minus_1)


def rank_of_apparition(params: LucasParams, p: int, factors_p_minus_eps: Factorization) -> int:
    """Least m >= 1 with U_m = 0 (mod p), given the factorization of p - epsilon(p).

    Valid because for p not dividing 2QD the indices with U_m = 0 (mod p) are
    exactly the multiples of the rank.
    """
    if p <= 2 or (2 * params.Q * params.D) % p == 0:
        raise DomainError(f"{p} divides 2QD; the rank descent does not apply")
    w = _product(factors_p_minus_eps)
    if _u_mod(params.P, params.Q, w, p) != 0:
        raise DomainError(
            f"{factors_p_minus_eps} is not a factorization of a multiple of the rank"
        )
    return _rank_descent(params.P, params.Q, p, w, factors_p_minus_eps)


def _skippable(params: LucasParams, p: int) -> bool:
    return p == 2 or params.b % p == 0 or params.Q % p == 0 or params.D % p == 0


def prime_profile(params: LucasParams, fp: FactoredPrime) -> PrimeProfile | None:
    """Assemble (epsilon, ell, omega, admissible) for one prime.

    Returns None for primes dividing 2*b*Q*D, which the search must skip.
    """
    p = fp.p
    if _skippable(params, p):
        return None
    eps = jacobi(params.D, p)
    ell = _order_descent(params.b, p, p - 1, fp.factors_p_minus_1)
    fac_w = fp.factors_p_minus_1 if eps == 1 else fp.factors_p_plus_1
    omega = _rank_descent(params.P, params.Q, p, p - eps, fac_w)
    return PrimeProfile(
        p=p, epsilon=eps, ell=ell, omega=omega, admissible=math.gcd(ell, omega) <= 2
    )


def _rank_bound(factors_p_minus_1, ell: int) -> tuple[int, list[tuple[int, int]]]:
    """Largest divisor m of p-1 such that (omega | m) <=> gcd(ell, omega) <= 2.

    Odd primes shared with ell are excluded entirely; the 2-part is capped at
    2 when 4 divides ell.
    """
    m = 1
    fac = []
    for q, e in factors_p_minus_1:
        if q == 2:
            c = e if ell % 4 != 0 else 1
            m <<= c
            fac.append((2, c))
        elif ell % q != 0:
            m *= q**e
            fac.append((q, e))
    return m, fac


def _skip_primes(params: LucasParams) -> frozenset[int]:
    skip = {2}
    for v in (params.b, abs(params.Q), abs(params.D)):
        skip.update(q for q, _ in factor_word(v))
    return frozenset(skip)


def _eps_table(params: LucasParams) -> np.ndarray | None:
    """(D | n) for odd n depends only on n mod 8|D|; tabulate when small."""
    period = 8 * abs(params.D)
    if period > _EPS_TABLE_LIMIT:
        return None
    tab = np.zeros(period, dtype=np.int8)
    for r in range(1, period, 2):
        tab[r] = jacobi(params.D, r)
    return tab


def _scan_segment(params: LucasParams, s: int, e: int, base: list[int], epsilon, skip, etab):
    """Admissible profiles with s <= p <= e, ascending."""
    b, P, Q = params.b, params.P, params.Q
    lo_val = s - 1
    length = e - s + 3
    mask = _composite_mask(lo_val, length, base)
    offs = np.flatnonzero(~mask[1 : length - 1]) + 1
    pvals = offs + lo_val
    if etab is not None:
        evals = etab[pvals % len(etab)]
    else:
        evals = np.array([jacobi(params.D, int(v)) if v % 2 else 0 for v in pvals], dtype=np.int8)
    keep = evals == epsilon if epsilon is not None else evals != 0
    offs, pvals, evals = offs[keep], pvals[keep], evals[keep]

    needed = np.zeros(length, dtype=bool)
    needed[offs - 1] = True  # p-1 feeds the order for every prime
    minus_offs = offs[evals == -1]
    if minus_offs.size:
        needed[minus_offs + 1] = True  # p+1 feeds the rank when epsilon = -1
    fac_of = _group_pairs(*_factor_pairs(lo_val, length, base, needed))

    out = []
    for off, p, eps in zip(offs.tolist(), pvals.tolist(), evals.tolist()):
        if p in skip:
            continue
        fac_m1 = _unpack(p - 1, fac_of.get(off - 1, []))
        ell = _order_descent(b, p, p - 1, fac_m1)
        if eps == 1:
            bound, fac_b = _rank_bound(fac_m1, ell)
            if bound == 2:
                if P % p != 0:
                    continue
            elif _u_mod(P, Q, bound, p) != 0:
                continue  # rank shares an odd factor (or too much 2) with ell
            omega = _rank_descent(P, Q, p, bound, fac_b)
        else:
            fac_p1 = _unpack(p + 1, fac_of.get(off + 1, []))
            omega = _rank_descent(P, Q, p, p + 1, fac_p1)
        out.append(PrimeProfile(p=p, epsilon=eps, ell=ell, omega=omega, admissible=True))
    return out


def admissible_profiles(
    params: LucasParams,
    lo: int,
    hi: int,
    *,
    epsilon: int | None = None,
    segment_size: int = DEFAULT_SEGMENT,
):
    """Stream every admissible prime profile with lo <= p <= hi, ascending.

    epsilon restricts the scan to one sign of (D | p); None keeps both.
    """
    if epsilon not in (None, 1, -1):
        raise DomainError(f"epsilon filter must be +1, -1 or None, got {epsilon}")
    if lo < 2 or lo > hi:
        raise DomainError(f"need 2 <= lo <= hi, got [{lo}, {hi}]")
    base = _simple_primes(math.isqrt(hi + 1) + 1)
    skip = _skip_primes(params)
    etab = _eps_table(params)
    for s, e in _blocks(lo, hi, segment_size):
        yield from _scan_segment(params, s, e, base, epsilon, skip, etab)


def collect_profiles(params: LucasParams, bound: int) -> list[PrimeProfile]:
    """All admissible profiles with p <= bound, materialized for reuse."""
    if bound < 2:
        return []
    return list(admissible_profiles(params, 2, bound))
