"""Exact and modular arithmetic: Jacobi symbols, modular powers, Lucas sequences, gcd."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, ResourceLimitError

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

# Exact values (b^e - 1, U_n) grow linearly in bits with the index; this cap
# keeps a single value under a couple of MB.
EXACT_INDEX_LIMIT = 1 << 24


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


@dataclass(frozen=True)
class LucasParams:
    """A Fermat base b together with Lucas sequence parameters (P, Q).

    The discriminant D = P^2 - 4Q is derived.  Square (or zero) D is
    rejected: (D | n) = -1 is then impossible and the whole search would be
    vacuous.
    """

    b: int
    P: int
    Q: int
    D: int = field(init=False)

    def __post_init__(self):
        if self.b < 2:
            raise DomainError(f"Fermat base must be >= 2, got {self.b}")
        if self.Q == 0:
            raise DomainError("Q must be nonzero")
        d = self.P * self.P - 4 * self.Q
        if d == 0 or _is_square(d):
            raise DomainError(f"discriminant {d} is a perfect square; no valid targets exist")
        object.__setattr__(self, "D", d)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a | n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs odd positive n, got {n}")
    if gmpy2 is not None:
        return int(gmpy2.jacobi(a, n))
    a %= n
    result = 1
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


def modexp(base: int, exponent: int, modulus: int) -> int:
    """base^exponent mod modulus by square-and-multiply."""
    if modulus < 2:
        raise DomainError(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise DomainError(f"exponent must be nonnegative, got {exponent}")
    return pow(base, exponent, modulus)


def _uv_from_pair(P: int, u, u_next, m: int) -> tuple[int, int]:
    # V_n = 2*U_{n+1} - P*U_n
    return u % m, (2 * u_next - P * u) % m


def lucas_uv_mod(params: LucasParams, n: int, m: int) -> tuple[int, int]:
    """(U_n mod m, V_n mod m) in O(log n) multiplications.

    Uses the index-doubling identities on the pair (U_j, U_{j+1}):
    U_2j = U_j*(2*U_{j+1} - P*U_j), U_{2j+1} = U_{j+1}^2 - Q*U_j^2.
    Avoids division by 2, so any modulus m >= 2 works.
    """
    if m < 2:
        raise DomainError(f"modulus must be >= 2, got {m}")
    if n < 0:
        raise DomainError(f"index must be nonnegative, got {n}")
    P, Q = params.P, params.Q
    if n == 0:
        return 0, 2 % m
    a, b = 0, 1  # (U_0, U_1)
    for bit in bin(n)[2:]:
        if bit == "0":
            a, b = a * (2 * b - P * a) % m, (b * b - Q * a * a) % m
        else:
            a, b = (b * b - Q * a * a) % m, b * (P * b - 2 * Q * a) % m
    return _uv_from_pair(P, a, b, m)


def lucas_u_exact(params: LucasParams, n: int, *, max_index: int = EXACT_INDEX_LIMIT) -> int:
    """Exact (signed) U_n; the magnitude grows exponentially in n."""
    if n < 0:
        raise DomainError(f"index must be nonnegative, got {n}")
    if n > max_index:
        raise ResourceLimitError(
            f"exact Lucas index {n} exceeds the configured limit {max_index}"
        )
    P, Q = params.P, params.Q
    if n == 0:
        return 0
    a, b = 0, 1
    for bit in bin(n)[2:]:
        if bit == "0":
            a, b = a * (2 * b - P * a), b * b - Q * a * a
        else:
            a, b = b * b - Q * a * a, b * (P * b - 2 * Q * a)
    return a


def pow_minus_one_exact(b: int, e: int, *, max_exponent: int = EXACT_INDEX_LIMIT) -> int:
    """Exact b^e - 1."""
    if e < 0:
        raise DomainError(f"exponent must be nonnegative, got {e}")
    if e > max_exponent:
        raise ResourceLimitError(
            f"exact exponent {e} exceeds the configured limit {max_exponent}"
        )
    return b**e - 1


def big_gcd(a: int, b: int) -> int:
    """gcd of arbitrary-precision integers.

    Delegates to gmpy2 (subquadratic for large operands) when available;
    callers never notice the substitution.
    """
    if gmpy2 is not None:
        return int(gmpy2.gcd(a, b))
    return math.gcd(a, b)
