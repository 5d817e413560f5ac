"""Univariate integer polynomials (coefficients lowest degree first)."""
from __future__ import annotations

from fractions import Fraction
from itertools import zip_longest


class IntPolynomial:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __add__(self, other):
        return IntPolynomial([a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0)])

    def __neg__(self):
        return IntPolynomial([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial([a * other for a in self.coeffs])
        if self.is_zero() or other.is_zero():
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = IntPolynomial((1,))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def divmod_monic(self, d: "IntPolynomial"):
        """Division by a polynomial with leading coefficient +-1."""
        lead = d.coeffs[-1]
        if lead not in (1, -1):
            raise ValueError("divisor must have unit leading coefficient")
        r = list(self.coeffs)
        q = [0] * max(len(r) - len(d.coeffs) + 1, 0)
        for k in range(len(q) - 1, -1, -1):
            t = r[k + d.degree] * lead
            q[k] = t
            if t:
                for j, b in enumerate(d.coeffs):
                    r[k + j] -= t * b
        return IntPolynomial(q), IntPolynomial(r)

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def reverse(self, degree: int | None = None) -> "IntPolynomial":
        d = self.degree if degree is None else degree
        return IntPolynomial([self[d - k] for k in range(d + 1)])

    def roots(self):
        import numpy as np

        return np.roots(list(reversed(self.coeffs)))

    def to_sympy(self, var: str = "t"):
        import sympy

        t = sympy.Symbol(var)
        return sympy.Poly(list(reversed(self.coeffs)), t)

    def factor(self) -> list[tuple["IntPolynomial", int]]:
        """Irreducible factorization over Z (content folded into the first factor)."""
        content, facs = self.to_sympy().factor_list()
        out = [(IntPolynomial(reversed([int(c) for c in f.all_coeffs()])), int(e)) for f, e in facs]
        content = int(content)
        if content != 1:
            out.insert(0, (IntPolynomial((content,)), 1))
        return out

    def __str__(self) -> str:
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[k]
            if not a:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if k and abs(a) == 1:
                s = ("-" if a < 0 else "") + mono
            else:
                s = f"{a}*{mono}" if mono else str(a)
            terms.append(s)
        return " + ".join(terms).replace("+ -", "- ") or "0"

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"


def rational_poly_mul_trunc(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    """Product of two power series truncated to n terms."""
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j in range(min(len(b), n - i)):
                out[i + j] += x * b[j]
    return out
