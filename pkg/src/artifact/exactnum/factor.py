"""Integer factorization and multiplicative utilities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import sympy

from ..errors import DomainError


def primes_up_to(limit: int) -> list[int]:
    """All primes p <= limit."""
    return list(sympy.primerange(2, limit + 1)) if limit >= 2 else []


def is_prime(n: int) -> bool:
    return n >= 2 and bool(sympy.isprime(n))


@dataclass(frozen=True)
class FactoredInt:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        for p, e in self.factors:
            prod *= p**e
        sign = -1 if self.value < 0 else 1
        if sign * prod != self.value:
            raise AssertionError(f"bad factorization of {self.value}")

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def __str__(self) -> str:
        if not self.factors:
            return str(self.value)
        body = " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)
        return ("-" if self.value < 0 else "") + body


@lru_cache(maxsize=65536)
def factorize(n: int) -> FactoredInt:
    """Prime factorization of a nonzero integer (sign kept in ``value``)."""
    if n == 0:
        raise DomainError("cannot factor 0")
    out = sympy.factorint(abs(n))
    return FactoredInt(n, tuple(sorted(out.items())))


def mult_parts(n: int) -> tuple[int, int, int]:
    """(rad(n), sq(n), cub(n)): radical, square-full and cube-full parts."""
    if n < 1:
        raise DomainError("mult_parts needs n >= 1")
    rad = sq = cub = 1
    for p, e in factorize(n).factors:
        rad *= p
        if e >= 2:
            sq *= p**e
        if e >= 3:
            cub *= p**e
    return rad, sq, cub


def omega(n: int) -> int:
    return len(factorize(n).factors)


def mobius(n: int) -> int:
    f = factorize(n).factors
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n).factors:
        out = out // p * (p - 1)
    return out


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).factors:
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def squarefree_part(n: int) -> int:
    """Signed square-free kernel s with n = s * k^2."""
    if n == 0:
        raise DomainError("square-free part of 0")
    s = -1 if n < 0 else 1
    for p, e in factorize(n).factors:
        if e % 2:
            s *= p
    return s


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def is_prime_power(n: int) -> tuple[int, int] | None:
    """(p, l) with n = p^l, or None."""
    if n < 2:
        return None
    f = factorize(n).factors
    return f[0] if len(f) == 1 else None


def phi_sieve(limit: int):
    """numpy array of Euler phi(n) for 0 <= n < limit."""
    import numpy as np

    phi = np.arange(limit, dtype=np.int64)
    for p in range(2, limit):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi
