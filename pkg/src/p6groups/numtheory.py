"""Arithmetic modulo a small prime and the distinguished residues nu, omega."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt

from .errors import InvalidArgument, UnsupportedPrime

MAX_PRIME = 10**6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def _require_prime(p: int, minimum: int = 2) -> None:
    if not isinstance(p, int) or isinstance(p, bool):
        raise InvalidArgument(f"expected an integer prime, got {p!r}")
    if p > MAX_PRIME:
        raise InvalidArgument(f"p={p} exceeds supported range (<= {MAX_PRIME})")
    if not is_prime(p):
        raise InvalidArgument(f"{p} is not prime")
    if p < minimum:
        raise InvalidArgument(f"p={p} is below the minimum {minimum}")


def mod_pow(a: int, k: int, p: int) -> int:
    if k < 0:
        return pow(mod_inverse(a % p, p), -k, p)
    return pow(a, k, p)


def mod_inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise InvalidArgument("0 has no inverse modulo p")
    return pow(a, p - 2, p)


def multiplicative_order(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise InvalidArgument("0 has no multiplicative order")
    k, x = 1, a
    while x != 1:
        x = x * a % p
        k += 1
    return k


def smallest_nonresidue(p: int) -> int:
    """Least a >= 2 with a^((p-1)/2) = -1 mod p."""
    _require_prime(p, minimum=3)
    half = (p - 1) // 2
    for a in range(2, p):
        if pow(a, half, p) == p - 1:
            return a
    raise AssertionError("unreachable: every odd prime has a non-residue")


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def smallest_primitive_root(p: int) -> int:
    _require_prime(p, minimum=3)
    qs = _prime_factors(p - 1)
    for a in range(2, p):
        if all(pow(a, (p - 1) // q, p) != 1 for q in qs):
            return a
    raise AssertionError("unreachable: primitive roots exist mod p")


def group_count_terms(p: int) -> dict[str, int]:
    """The individual summands of the order-p^6 group count."""
    _require_prime(p)
    if p < 7:
        raise UnsupportedPrime(f"the count formula is only asserted for p >= 7, got {p}")
    return {
        "3p^2": 3 * p * p,
        "39p": 39 * p,
        "344": 344,
        "24gcd(p-1,3)": 24 * gcd(p - 1, 3),
        "11gcd(p-1,4)": 11 * gcd(p - 1, 4),
        "2gcd(p-1,5)": 2 * gcd(p - 1, 5),
    }


def group_count(p: int) -> int:
    return sum(group_count_terms(p).values())


@dataclass(frozen=True)
class PrimeContext:
    """A prime together with its smallest non-residue and primitive root."""

    p: int
    nu: int = field(init=False)
    omega: int = field(init=False)

    def __post_init__(self):
        _require_prime(self.p, minimum=5)
        object.__setattr__(self, "nu", smallest_nonresidue(self.p))
        object.__setattr__(self, "omega", smallest_primitive_root(self.p))

    def inv(self, a: int) -> int:
        return mod_inverse(a, self.p)

    def pow(self, a: int, k: int) -> int:
        return mod_pow(a % self.p, k, self.p)

    def is_square(self, a: int) -> bool:
        """True for nonzero quadratic residues and for 0."""
        a %= self.p
        return a == 0 or pow(a, (self.p - 1) // 2, self.p) == 1

    @property
    def squares(self) -> frozenset[int]:
        return frozenset(x * x % self.p for x in range(self.p))
