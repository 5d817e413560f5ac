"""Finite fields F_{p^r} with table-driven vectorized arithmetic.

Elements are encoded as integers 0 <= a < q whose base-p digits are the
coefficients (lowest first) in the polynomial basis F_p[x]/(modulus).
"""
from __future__ import annotations

import threading
from functools import cached_property, lru_cache

import numpy as np

from ..errors import DomainError, ResourceLimit
from .factor import factorize, is_prime

MAX_TABLE_Q = 1 << 22


# ---------------------------------------------------------------- F_p[x] helpers


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _trim(a)
    inv = pow(m[-1], -1, p)
    while len(a) >= len(m):
        t = a[-1] * inv % p
        shift = len(a) - len(m)
        for j, b in enumerate(m):
            a[shift + j] = (a[shift + j] - t * b) % p
        _trim(a)
    return a


def _pmulmod(a, b, m, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _pmod(out, m, p)


def _pgcd(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowx(k: int, m: list[int], p: int) -> list[int]:
    """x^k mod m over F_p."""
    result, base = [1], [0, 1]
    while k:
        if k & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        k >>= 1
    return result


def is_irreducible_mod_p(m: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial given lowest-first."""
    r = len(m) - 1
    if r == 1:
        return True
    if _ppowx(p**r, m, p) != [0, 1]:
        return False
    for ell, _ in factorize(r).factors:
        h = _ppowx(p ** (r // ell), m, p)
        h = h + [0] * (2 - len(h)) if len(h) < 2 else h
        diff = list(h)
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(m, diff, p)) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def first_irreducible(p: int, r: int) -> tuple[int, ...]:
    """First monic irreducible of degree r, lower coefficients in lexicographic order."""
    for k in range(p**r):
        low = [(k // p**j) % p for j in range(r)]
        if r > 1 and low[0] == 0:
            continue
        m = low + [1]
        if is_irreducible_mod_p(m, p):
            return tuple(m)
    raise AssertionError("no irreducible polynomial found")


# ---------------------------------------------------------------- the field


class FiniteField:
    """F_q with q = p^r; use :func:`field` to get a shared instance."""

    def __init__(self, p: int, r: int = 1):
        if not is_prime(p) or r < 1:
            raise DomainError(f"F_{p}^{r} is not a field")
        self.p, self.r, self.q = p, r, p**r
        if self.q > MAX_TABLE_Q:
            raise ResourceLimit(f"q = {self.q} exceeds table bound {MAX_TABLE_Q}")
        self.modulus = first_irreducible(p, r)
        self._lock = threading.Lock()

    def __repr__(self):
        return f"FiniteField({self.p}, {self.r})"

    # digit encoding
    @cached_property
    def digits(self) -> np.ndarray:
        idx = np.arange(self.q, dtype=np.int64)
        return np.stack([(idx // self.p**j) % self.p for j in range(self.r)], axis=1)

    @cached_property
    def _place(self) -> np.ndarray:
        return self.p ** np.arange(self.r, dtype=np.int64)

    def encode(self, digits: np.ndarray) -> np.ndarray:
        return (np.asarray(digits) % self.p) @ self._place

    def _mul_digits(self, A: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Products of rows of A (N x r digits) with one element b (r digits)."""
        p, r = self.p, self.r
        N = A.shape[0]
        out = np.zeros((N, 2 * r - 1), dtype=np.int64)
        for j in range(r):
            if b[j]:
                out[:, j : j + r] += A * int(b[j])
        out %= p
        m = self.modulus
        for k in range(2 * r - 2, r - 1, -1):
            t = out[:, k].copy()
            for j in range(r + 1):
                out[:, k - r + j] -= t * m[j]
            out %= p
        return out[:, :r]

    @cached_property
    def _tables(self):
        with self._lock:
            q, p = self.q, self.p
            if q == 2:
                return np.array([1]), np.array([0, 0])
            order = q - 1
            primes = [ell for ell, _ in factorize(order).factors]
            digits = self.digits
            for g in range(2 if self.r == 1 else p, q):
                ok = True
                for ell in primes:
                    if self._pow_scalar(g, order // ell) == 1:
                        ok = False
                        break
                if ok:
                    break
            block = digits[[1]]
            gd = digits[g]
            while block.shape[0] < order:
                last = self.encode(block[-1:])[0]
                step = self._pow_scalar_digits(last, gd)
                block = np.concatenate([block, self._mul_digits(block, step)])
            exp = self.encode(block[:order])
            log = np.zeros(q, dtype=np.int64)
            log[exp] = np.arange(order)
            if len(set(exp.tolist())) != order:
                raise AssertionError("generator search failed")
            return exp, log

    def _pow_scalar_digits(self, a: int, gd: np.ndarray) -> np.ndarray:
        return self._mul_digits(self.digits[[a]], gd)[0]

    def _pow_scalar(self, a: int, k: int) -> int:
        result = 1
        base = a
        while k:
            if k & 1:
                result = int(self.encode(self._mul_digits(self.digits[[result]], self.digits[base]))[0])
            base = int(self.encode(self._mul_digits(self.digits[[base]], self.digits[base]))[0])
            k >>= 1
        return result

    @property
    def exp_table(self) -> np.ndarray:
        return self._tables[0]

    @property
    def log_table(self) -> np.ndarray:
        return self._tables[1]

    # vectorized arithmetic on encoded elements
    def add(self, a, b):
        return self.encode(self.digits[a] + self.digits[b])

    def sub(self, a, b):
        return self.encode(self.digits[a] - self.digits[b])

    def neg(self, a):
        return self.encode(-self.digits[a])

    def mul(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        if self.q == 2:
            return a * b
        exp, log = self._tables
        res = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, res)

    def pow(self, a, k: int):
        a = np.asarray(a)
        if k == 0:
            return np.ones_like(a)
        if self.q == 2:
            return a
        exp, log = self._tables
        res = exp[(log[a] * k) % (self.q - 1)]
        return np.where(a == 0, 0, res)

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of 0")
        return self.pow(a, self.q - 2)

    def from_int(self, k: int) -> int:
        """Image of the rational integer k."""
        return k % self.p

    @cached_property
    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    @cached_property
    def traces(self) -> np.ndarray:
        """Tr_{F_q/F_p}(a) for every element a, as integers mod p."""
        acc = np.zeros((self.q, self.r), dtype=np.int64)
        x = self.elements
        for j in range(self.r):
            acc += self.digits[self.pow(x, self.p**j)]
        acc %= self.p
        if self.r > 1 and np.any(acc[:, 1:]):
            raise AssertionError("trace left F_p")
        return acc[:, 0]

    def frobenius(self, a):
        return self.pow(a, self.p)

    def poly_eval(self, coeffs, x):
        """Evaluate sum_k coeffs[k] x^k (coeffs lowest first) at the array x."""
        x = np.asarray(x)
        acc = np.zeros_like(x)
        for c in reversed(list(coeffs)):
            acc = self.add(self.mul(acc, x), np.full_like(x, c))
        return acc


@lru_cache(maxsize=64)
def field(p: int, r: int = 1) -> FiniteField:
    return FiniteField(p, r)


# ---------------------------------------------------------------- root counting

DIRECT_ROOT_BOUND = 4096


def _fpoly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _fpoly_mod(K: FiniteField, a: list[int], m: list[int]) -> list[int]:
    a = _fpoly_trim(list(a))
    inv = int(K.inv(m[-1]))
    while len(a) >= len(m):
        t = int(K.mul(a[-1], inv))
        shift = len(a) - len(m)
        for j, b in enumerate(m):
            a[shift + j] = int(K.sub(a[shift + j], K.mul(t, b)))
        _fpoly_trim(a)
    return a


def _fpoly_mulmod(K, a, b, m):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = int(K.add(out[i + j], K.mul(x, y)))
    return _fpoly_mod(K, out, m)


def _fpoly_gcd(K, a, b):
    a, b = _fpoly_trim(list(a)), _fpoly_trim(list(b))
    while b:
        a, b = b, _fpoly_mod(K, a, b)
    return a


def cubic_root_count(a3: int, a2: int, a1: int, a0: int, K: FiniteField) -> int:
    """Number of roots in K of a3 x^3 + a2 x^2 + a1 x + a0 (q if identically zero).

    The coefficients are encoded elements of K (use K.from_int for integers).
    """
    coeffs = _fpoly_trim([int(a0), int(a1), int(a2), int(a3)])
    if not coeffs:
        return K.q
    if len(coeffs) == 1:
        return 0
    if K.q <= DIRECT_ROOT_BOUND:
        vals = K.poly_eval(coeffs, K.elements)
        return int(np.count_nonzero(vals == 0))
    # distinct roots = deg gcd(f, x^q - x)
    result, base, k = [1], [0, 1], K.q
    while k:
        if k & 1:
            result = _fpoly_mulmod(K, result, base, coeffs)
        base = _fpoly_mulmod(K, base, base, coeffs)
        k >>= 1
    xq = result + [0] * max(0, 2 - len(result))
    xq[1] = int(K.sub(xq[1], 1))
    g = _fpoly_gcd(K, coeffs, xq)
    return len(g) - 1
