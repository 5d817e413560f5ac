"""Exact numbers of the form coef * base^(k/2) with rational coef."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class HalfPower:
    """coef * base ** (twice_exp / 2); e.g. S(n) n^{-(m+1)/2} is (S, n, -(m+1))."""

    coef: Fraction
    base: int
    twice_exp: int

    def __post_init__(self):
        object.__setattr__(self, "coef", Fraction(self.coef))

    def normalized(self) -> "HalfPower":
        """Fold whole powers of base into coef, leaving twice_exp in {0, -1}."""
        k = self.twice_exp
        whole = k // 2 if k >= 0 else -((-k + 1) // 2)
        rest = k - 2 * whole
        c = self.coef * Fraction(self.base) ** whole
        if rest == 1:
            c, rest = c * self.base, -1
        return HalfPower(c, self.base, rest)

    def __float__(self) -> float:
        return float(self.coef) * math.pow(self.base, self.twice_exp / 2)

    def __mul__(self, other: "HalfPower") -> "HalfPower":
        if isinstance(other, (int, Fraction)):
            return HalfPower(self.coef * other, self.base, self.twice_exp)
        if other.base != self.base:
            raise ValueError("HalfPower bases differ")
        return HalfPower(self.coef * other.coef, self.base, self.twice_exp + other.twice_exp)

    def __neg__(self):
        return HalfPower(-self.coef, self.base, self.twice_exp)

    def square(self) -> Fraction:
        return self.coef**2 * Fraction(self.base) ** self.twice_exp

    def __eq__(self, other):
        if not isinstance(other, HalfPower):
            return NotImplemented
        sa, sb = (self.coef > 0) - (self.coef < 0), (other.coef > 0) - (other.coef < 0)
        return sa == sb and self.square() == other.square()

    def __hash__(self):
        return hash((self.coef > 0, self.square()))

    def as_tuple(self) -> tuple[str, int, int]:
        return (str(self.coef), self.base, self.twice_exp)



class SurdSum:
    """Exact finite sum  sum_s r_s sqrt(s)  over square-free s >= 1, r_s rational."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Fraction] | None = None):
        self.terms = {s: Fraction(r) for s, r in (terms or {}).items() if r}

    @classmethod
    def sqrt_of(cls, n: int, coef: Fraction | int = 1) -> "SurdSum":
        """coef * sqrt(n) for a positive integer n."""
        from .factor import factorize

        out, kernel = 1, 1
        for p, e in factorize(n).factors:
            out *= p ** (e // 2)
            if e % 2:
                kernel *= p
        return cls({kernel: Fraction(coef) * out})

    @classmethod
    def from_half_power(cls, h: HalfPower) -> "SurdSum":
        k = h.twice_exp
        if k % 2 == 0:
            return cls({1: h.coef * Fraction(h.base) ** (k // 2)})
        # base^(k/2) = base^((k-1)/2) * sqrt(base)
        return cls.sqrt_of(h.base, h.coef * Fraction(h.base) ** ((k - 1) // 2))

    def __add__(self, other: "SurdSum") -> "SurdSum":
        out = dict(self.terms)
        for s, r in other.terms.items():
            out[s] = out.get(s, 0) + r
        return SurdSum(out)

    def __mul__(self, other: "SurdSum") -> "SurdSum":
        import math

        out: dict[int, Fraction] = {}
        for s, r in self.terms.items():
            for t, u in other.terms.items():
                g = math.gcd(s, t)
                kernel = (s // g) * (t // g)
                out[kernel] = out.get(kernel, 0) + r * u * g
        return SurdSum(out)

    def abs_value(self) -> "SurdSum":
        return self if float(self) >= 0 else SurdSum({s: -r for s, r in self.terms.items()})

    def __float__(self) -> float:
        import math

        return math.fsum(float(r) * math.sqrt(s) for s, r in sorted(self.terms.items()))

    def __eq__(self, other):
        return isinstance(other, SurdSum) and self.terms == other.terms

    def is_rational(self) -> bool:
        return set(self.terms) <= {1}

    def to_json(self) -> dict[str, str]:
        return {str(s): str(r) for s, r in sorted(self.terms.items())}
