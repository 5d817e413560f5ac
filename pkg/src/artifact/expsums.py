"""Complete exponential sums S_c(n) of diagonal cubic forms, and point-count errors.

S_c(n) = sum_{a in (Z/n)^*} sum_{x in (Z/n)^m} e_n(a F(x) + c.x)
       = sum_{a} prod_i g(a F_i, c_i; n),     g(a, b; n) = sum_x e_n(a x^3 + b x).

Two exact engines for prime powers q = p^l:

* ``cyclotomic``: g values as elements of Z[zeta_q]; the final sum is reduced
  modulo Phi_q and certified to be a rational integer.
* ``modular``: the same sum evaluated in F_ell for several primes ell = 1 mod q
  (zeta_q mapped to an element of order q), recombined by CRT. A second
  embedding zeta_q -> zeta_q^k is evaluated as a Galois-invariance check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import cache
from .counting import affine_count, affine_section_count, projectivize
from .errors import DomainError, ResourceLimit, SectionDegenerates
from .exactnum import (
    CyclotomicElement,
    HalfPower,
    cyclotomic_is_rational,
    euler_phi,
    factorize,
    field,
    is_prime,
)
from .forms import DiagonalCubicForm

PRIME_POWER_BOUND = 2048
CYCLOTOMIC_BOUND = 64


@dataclass(frozen=True)
class ExpSumValue:
    n: int
    m: int
    value: int

    @property
    def normalized(self) -> HalfPower:
        """S~_c(n) = S_c(n) n^{-(m+1)/2}."""
        return HalfPower(Fraction(self.value), self.n, -(self.m + 1))

    def __float__(self) -> float:
        return float(self.normalized)


# ----------------------------------------------------------------- 1-D factors


def _units(n: int) -> np.ndarray:
    a = np.arange(n, dtype=np.int64)
    return a[np.gcd(a, n) == 1] if n > 1 else np.array([0], dtype=np.int64)


def g_histogram(a: int, b: int, n: int) -> np.ndarray:
    """Exponent histogram of a x^3 + b x over x mod n."""
    x = np.arange(n, dtype=np.int64)
    e = (a * (x * x % n * x % n) + b * x) % n
    return np.bincount(e, minlength=n)


class GTable:
    """All g(a, c; n) as exact elements of Z[zeta_n], rows a and columns c mod n."""

    def __init__(self, n: int):
        self.n = n
        key = (n,)
        rows, _ = cache.cached("gtable", key, lambda: self._build())
        self._coeffs = rows

    def _build(self) -> list:
        n = self.n
        out = []
        for a in range(n):
            out.append([list(CyclotomicElement.from_exponents(n, g_histogram(a, c, n)).coeffs) for c in range(n)])
        return out

    def __getitem__(self, ac: tuple[int, int]) -> CyclotomicElement:
        a, c = ac
        return CyclotomicElement(self.n, self._coeffs[a % self.n][c % self.n])


@lru_cache(maxsize=64)
def gtable(n: int) -> GTable:
    return GTable(n)


def g_value(a: int, b: int, n: int) -> CyclotomicElement:
    return CyclotomicElement.from_exponents(n, g_histogram(a % n, b % n, n))


def g_row_complex(a: int, n: int) -> np.ndarray:
    """g(a, c; n) for c = 0..n-1 as complex numbers (one FFT)."""
    x = np.arange(n, dtype=np.int64)
    f = np.exp(2j * np.pi * ((a * (x * x % n * x % n)) % n) / n)
    return np.fft.ifft(f) * n


# ----------------------------------------------------------------- engines


def _cyclotomic_prime_power(coeffs: Sequence[int], c: Sequence[int], q: int) -> int:
    table = gtable(q) if q <= CYCLOTOMIC_BOUND else None
    total = CyclotomicElement.integer(q, 0)
    for a in _units(q).tolist():
        prod = CyclotomicElement.integer(q, 1)
        for Fi, ci in zip(coeffs, c):
            g = table[a * Fi, ci] if table else g_value(a * Fi, ci, q)
            prod = prod * g
        total = total + prod
    val = cyclotomic_is_rational(total)
    if val is None:
        raise AssertionError(f"S_c({q}) failed the integrality certificate")
    return val


@lru_cache(maxsize=None)
def _crt_primes(q: int, count: int) -> tuple[tuple[int, int], ...]:
    """Primes ell = 1 mod q below 2^31 with an element of exact order q."""
    out = []
    k = (2**31 - 1) // q
    qprimes = [r for r, _ in factorize(q).factors] if q > 1 else []
    while len(out) < count:
        ell = k * q + 1
        k -= 1
        if not is_prime(ell):
            continue
        for h in range(2, 200):
            w = pow(h, (ell - 1) // q, ell)
            if all(pow(w, q // r, ell) != 1 for r in qprimes):
                out.append((ell, w))
                break
    return tuple(out)


def _modular_sum(coeffs, c, q: int, ell: int, w: int) -> int:
    pw = np.array([pow(w, e, ell) for e in range(q)], dtype=np.int64)
    units = _units(q)
    x = np.arange(q, dtype=np.int64)
    x3 = x * x % q * x % q
    acc = np.ones(len(units), dtype=np.int64)
    for Fi, ci in zip(coeffs, c):
        e = ((units[:, None] * (Fi % q)) % q * x3[None, :] + (ci % q) * x[None, :]) % q
        g = pw[e].sum(axis=1) % ell
        acc = acc * g % ell
    return int(acc.sum() % ell)


def _modular_prime_power(coeffs: Sequence[int], c: Sequence[int], q: int) -> int:
    m = len(coeffs)
    bound = euler_phi(q) * q**m
    primes = []
    prod = 1
    k = 0
    while prod <= 2 * bound:
        k += 1
        primes = _crt_primes(q, k)
        prod = math.prod(ell for ell, _ in primes)
    residues = [_modular_sum(coeffs, c, q, ell, w) for ell, w in primes]
    # Galois check: zeta -> zeta^k for a unit k != 1 must give the same residue
    units = _units(q)
    if len(units) > 1:
        ell, w = primes[0]
        kk = int(units[-1])
        if _modular_sum(coeffs, c, q, ell, pow(w, kk, ell)) != residues[0]:
            raise AssertionError(f"S_c({q}) failed the Galois-invariance check")
    val = 0
    for (ell, _), r in zip(primes, residues):
        Mi = prod // ell
        val = (val + r * Mi * pow(Mi, -1, ell)) % prod
    if val > prod // 2:
        val -= prod
    return val


def brute_force_expsum(F: DiagonalCubicForm, c: Sequence[int], n: int) -> int:
    """Definitional oracle: the full double loop, evaluated in Z[zeta_n]."""
    import itertools

    c = F.check_pair(c)
    hist = np.zeros(n, dtype=np.int64)
    grids = np.array(list(itertools.product(range(n), repeat=F.m)), dtype=np.int64).reshape(-1, F.m)
    Fx = (grids**3 % n) @ (np.array(F.coeffs) % n) % n
    cx = grids @ (np.array(c) % n) % n
    for a in _units(n).tolist():
        hist += np.bincount((a * Fx + cx) % n, minlength=n)
    val = cyclotomic_is_rational(CyclotomicElement.from_exponents(n, hist))
    if val is None:
        raise AssertionError("oracle sum is not rational")
    return val


# ----------------------------------------------------------------- public API


def expsum_prime_power(
    F: DiagonalCubicForm, c: Sequence[int], p: int, l: int, engine: str = "auto", bound: int = PRIME_POWER_BOUND
) -> ExpSumValue:
    c = F.check_pair(c)
    if not is_prime(p) or l < 0:
        raise DomainError("need a prime p and l >= 0")
    q = p**l
    if q == 1:
        return ExpSumValue(1, F.m, 1)
    if q > bound:
        raise ResourceLimit(f"prime power {q} exceeds bound {bound}")
    key = (F.coeffs, tuple(ci % q for ci in c), q)
    return ExpSumValue(q, F.m, _prime_power_cached(key, engine))


@lru_cache(maxsize=200_000)
def _prime_power_cached(key, engine: str) -> int:
    coeffs, c, q = key
    if engine == "auto":
        engine = "modular"
    if engine == "cyclotomic":
        return _cyclotomic_prime_power(coeffs, c, q)
    if engine == "modular":
        return _modular_prime_power(coeffs, c, q)
    raise DomainError(f"unknown engine {engine!r}")


def expsum(F: DiagonalCubicForm, c: Sequence[int], n: int, engine: str = "auto") -> ExpSumValue:
    """S_c(n) by multiplicativity over prime powers."""
    if n < 1:
        raise DomainError("n must be positive")
    val = 1
    for p, l in factorize(n).factors if n > 1 else ():
        val *= expsum_prime_power(F, c, p, l, engine=engine).value
        if val == 0:
            break
    return ExpSumValue(n, F.m, val)


def _valuation(n: int, p: int) -> int:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


def pointwise_bound_ratio(F: DiagonalCubicForm, c: Sequence[int], n: int, K: float = 2.0) -> float:
    """|S~_c(n)| / (n^{1/2} K^{omega(n)} prod_j gcd(cub(n)^{1/6}, gcd(cub(n), sq(c_j))^{1/4})).

    gcd of rational powers is read prime by prime on exponents; sq(0) is taken as 0,
    so gcd(cub(n), sq(0)) = cub(n).
    """
    c = F.check_pair(c)
    log_shape = 0.5 * math.log(n)
    for p, e in factorize(n).factors if n > 1 else ():
        log_shape += math.log(K)
        if e < 3:
            continue
        for cj in c:
            v = _valuation(cj, p) if cj else e
            v_sq = v if v >= 2 else 0
            log_shape += min(Fraction(e, 6), Fraction(min(e, v_sq), 4)) * math.log(p)
    return abs(float(expsum(F, c, n))) / math.exp(log_shape)


def ramanujan_sum(n: int, t: int) -> int:
    """c_n(t) = sum_{d | gcd(n, t)} d mu(n/d)."""
    from .exactnum import divisors, mobius

    g = math.gcd(n, t)
    return sum(d * mobius(n // d) for d in divisors(g))


# ----------------------------------------------------------------- point-count errors


@dataclass(frozen=True)
class CountErrors:
    q: int
    m: int
    rho: int | None = None
    rho_c: int | None = None

    @property
    def m_star(self) -> int:
        return self.m - 3

    @property
    def E(self) -> int:
        return self.rho - (self.q ** (self.m - 1) - 1) // (self.q - 1)

    @property
    def E_c(self) -> int:
        return self.rho_c - (self.q ** (self.m - 2) - 1) // (self.q - 1)

    @property
    def E_tilde(self) -> HalfPower:
        return HalfPower(Fraction(self.E), self.q, -(1 + self.m_star))

    @property
    def E_c_tilde(self) -> HalfPower:
        return HalfPower(Fraction(self.E_c), self.q, -self.m_star)


def _field_of(q: int):
    f = factorize(q).factors
    if len(f) != 1:
        raise DomainError(f"{q} is not a prime power")
    p, r = f[0]
    return field(p, r)


@lru_cache(maxsize=4096)
def count_hypersurface(F: DiagonalCubicForm, q: int) -> CountErrors:
    """Projective count of {F = 0} in P^{m-1}(F_q)."""
    K = _field_of(q)
    return CountErrors(q, F.m, rho=projectivize(affine_count(F.coeffs, K), q))


@lru_cache(maxsize=4096)
def count_section(F: DiagonalCubicForm, c: tuple[int, ...], q: int) -> CountErrors:
    """Projective count of {F = 0, c.x = 0}."""
    c = F.check_pair(c)
    K = _field_of(q)
    if all(ci % K.p == 0 for ci in c):
        raise SectionDegenerates("c = 0 mod p; use count_hypersurface")
    rho_c = projectivize(affine_section_count(F.coeffs, c, K), q)
    return CountErrors(q, F.m, rho=count_hypersurface(F, q).rho, rho_c=rho_c)
