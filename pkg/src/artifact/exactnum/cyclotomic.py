"""Exact arithmetic in Z[zeta_n] using the power basis modulo Phi_n."""
from __future__ import annotations

import cmath
import threading
from functools import lru_cache

import numpy as np

from .factor import divisors, euler_phi, mobius
from .poly import IntPolynomial

_lock = threading.Lock()


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> IntPolynomial:
    """Phi_n as the product over d | n of (x^d - 1)^mu(n/d)."""
    num = IntPolynomial((1,))
    den = IntPolynomial((1,))
    for d in divisors(n):
        mu = mobius(n // d)
        xd = IntPolynomial((-1,) + (0,) * (d - 1) + (1,))
        if mu == 1:
            num = num * xd
        elif mu == -1:
            den = den * xd
    q, r = num.divmod_monic(den)
    assert r.is_zero()
    return q


@lru_cache(maxsize=None)
def _reduction_table(n: int) -> np.ndarray:
    """Row e holds the power-basis coordinates of zeta_n^e, 0 <= e < n."""
    with _lock:
        phi = euler_phi(n)
        poly = cyclotomic_poly(n).coeffs  # monic, degree phi
        table = np.zeros((n, phi), dtype=object)
        cur = [0] * phi
        cur[0] = 1
        for e in range(n):
            table[e] = cur
            # multiply by zeta: shift, then fold the top coefficient back
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [c - top * poly[k] for k, c in enumerate(cur)]
        table.setflags(write=False)
        return table


class CyclotomicElement:
    """Element of Z[zeta_n] with canonical power-basis coordinates."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs):
        self.n = n
        phi = euler_phi(n)
        c = [int(x) for x in coeffs]
        if len(c) != phi:
            raise ValueError(f"need {phi} coordinates for conductor {n}")
        self.coeffs = tuple(c)

    @classmethod
    def from_exponents(cls, n: int, hist) -> "CyclotomicElement":
        """sum_e hist[e] zeta^e for an exponent histogram of length n."""
        h = np.asarray(hist, dtype=object)
        if len(h) != n:
            h = _fold(h, n)
        vec = h.dot(_reduction_table(n)) if n > 1 else np.array([h.sum()], dtype=object)
        return cls(n, vec)

    @classmethod
    def root(cls, n: int, e: int = 1) -> "CyclotomicElement":
        hist = [0] * n
        hist[e % n] = 1
        return cls.from_exponents(n, hist)

    @classmethod
    def integer(cls, n: int, k: int) -> "CyclotomicElement":
        c = [0] * euler_phi(n)
        c[0] = k
        return cls(n, c)

    def _check(self, other: "CyclotomicElement") -> None:
        if self.n != other.n:
            raise ValueError("conductor mismatch")

    def __add__(self, other):
        if isinstance(other, int):
            other = CyclotomicElement.integer(self.n, other)
        self._check(other)
        return CyclotomicElement(self.n, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.n, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicElement(self.n, [a * other for a in self.coeffs])
        self._check(other)
        n = self.n
        prod = np.convolve(np.array(self.coeffs, dtype=object), np.array(other.coeffs, dtype=object))
        return CyclotomicElement.from_exponents(n, _fold(prod, n))

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_rational() == other
        return isinstance(other, CyclotomicElement) and self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, self.coeffs))

    def is_rational(self) -> int | None:
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def conj(self) -> "CyclotomicElement":
        """Complex conjugation zeta -> zeta^{-1}."""
        n = self.n
        hist = [0] * n
        for k, a in enumerate(self.coeffs):
            hist[(-k) % n] += a
        return CyclotomicElement.from_exponents(n, hist)

    def galois(self, k: int) -> "CyclotomicElement":
        """The automorphism zeta -> zeta^k, gcd(k, n) = 1."""
        n = self.n
        hist = [0] * n
        for j, a in enumerate(self.coeffs):
            hist[(j * k) % n] += a
        return CyclotomicElement.from_exponents(n, hist)

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.n)
        return complex(sum(a * z**k for k, a in enumerate(self.coeffs)))

    def __repr__(self):
        return f"CyclotomicElement({self.n}, {list(self.coeffs)})"


def _fold(vec, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=object)
    for e, a in enumerate(vec):
        if a:
            out[e % n] += a
    return out


def cyclotomic_is_rational(x: CyclotomicElement) -> int | None:
    """The integer value of x if x lies in Z, else None."""
    return x.is_rational()
