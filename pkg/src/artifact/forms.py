"""Diagonal cubic forms, the discriminant Delta(F, c), and the singular locus."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, SingularSection
from .exactnum import factorize, is_prime, squarefree_part

NORMALIZATIONS = ("definition", "appendix-code")


@dataclass(frozen=True)
class DiagonalCubicForm:
    """F(x) = sum_i F_i x_i^3 with nonzero integer coefficients."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(a) for a in self.coeffs))
        if len(self.coeffs) < 1 or any(a == 0 for a in self.coeffs):
            raise DomainError(f"invalid diagonal cubic coefficients {self.coeffs}")

    @classmethod
    def fermat(cls, m: int) -> "DiagonalCubicForm":
        return cls((1,) * m)

    @property
    def m(self) -> int:
        return len(self.coeffs)

    @property
    def m_star(self) -> int:
        return self.m - 3

    def __call__(self, x: Sequence[int]) -> int:
        return sum(a * t**3 for a, t in zip(self.coeffs, x))

    def __len__(self):
        return self.m

    def product(self) -> int:
        return math.prod(self.coeffs)

    def check_pair(self, c: Sequence[int]) -> tuple[int, ...]:
        c = tuple(int(t) for t in c)
        if len(c) != self.m:
            raise DomainError(f"c has length {len(c)}, form has m = {self.m}")
        return c

    def __str__(self):
        return " + ".join(f"{a}*x{i + 1}^3" for i, a in enumerate(self.coeffs)).replace("+ -", "- ")


def e_exponent(m: int) -> int:
    """The exponent of 3 in the diagonal discriminant normalization."""
    if m < 3:
        raise DomainError("e_m needs m >= 3")
    num = (-1) ** (m - 1) - 2 ** (m - 1)
    assert num % 3 == 0
    return num // 3 + (m - 1) * 2 ** (m - 2)


def dim_middle(m: int) -> int:
    """Dimension of primitive middle cohomology of a smooth section (degree of the charpoly)."""
    return (2 ** (m - 1) + 2 * (-1) ** (m - 3)) // 3


# ------------------------------------------------------------------ multiquadratic algebra


def _mq_times_linear(vec: dict, eps: Sequence[int], squares: Sequence) -> dict:
    """Multiply sum_S v_S s_S by sum_i eps_i s_i, where s_i^2 = squares[i]."""
    out: dict[int, Fraction] = {}
    for S, v in vec.items():
        for i, e in enumerate(eps):
            bit = 1 << i
            if S & bit:
                coef = v * e * squares[i]
                if not coef:
                    continue
                T = S ^ bit
            else:
                coef = v * e
                T = S | bit
            out[T] = out.get(T, 0) + coef
    return {S: v for S, v in out.items() if v}


def _sign_product(squares: Sequence[Fraction]) -> Fraction:
    """prod over eps in {1} x {+-1}^{m-1} of sum_i eps_i sqrt(squares[i]); must be rational."""
    m = len(squares)
    # rescale s_i -> D s_i so that all squares are integers; the product is
    # homogeneous of degree 2^(m-1), so it scales by D^(2^(m-1))
    D = math.lcm(*(x.denominator for x in squares))
    ints = [int(x * D * D) for x in squares]
    vec: dict[int, int] = {0: 1}
    for tail in itertools.product((1, -1), repeat=m - 1):
        vec = _mq_times_linear(vec, (1,) + tail, ints)
        if not vec:
            return Fraction(0)
    radical = {S: v for S, v in vec.items() if S}
    if radical:
        raise AssertionError("sign-pattern product left the base field")
    return Fraction(vec.get(0, 0), D ** (2 ** (m - 1)))


def disc_delta(F: DiagonalCubicForm, c: Sequence[int], norm: str = "definition") -> int:
    """Delta(F, c) evaluated exactly in Q[s_1..s_m]/(s_i^2 - c_i^3/F_i)."""
    c = F.check_pair(c)
    if norm not in NORMALIZATIONS:
        raise DomainError(f"unknown normalization {norm!r}")
    squares = [Fraction(ci**3, Fi) for ci, Fi in zip(c, F.coeffs)]
    core = _sign_product(squares)
    if norm == "definition":
        val = 3 ** e_exponent(F.m) * F.product() ** (2 ** (F.m - 2)) * core
    else:
        val = 3 * core
    if val.denominator != 1:
        raise AssertionError(f"non-integral discriminant {val}")
    return int(val)


def is_smooth_section(F: DiagonalCubicForm, c: Sequence[int], p: int) -> bool:
    """True iff p does not divide Delta(F, c) (definition normalization)."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    d = disc_delta(F, c)
    if d == 0:
        raise SingularSection(f"Delta(F, c) = 0 for c = {tuple(c)}")
    return d % p != 0


# ------------------------------------------------------------------ square classes


@dataclass(frozen=True)
class SquareClass:
    g: int
    indices: tuple[int, ...]
    e: tuple[int, ...]

    def cubic_sum(self, F: DiagonalCubicForm) -> Fraction:
        return sum((Fraction(ei**3, F.coeffs[i] ** 2) for i, ei in zip(self.indices, self.e)), Fraction(0))


@dataclass(frozen=True)
class SquareClassDecomposition:
    classes: tuple[SquareClass, ...]
    vanishing: bool = field(default=False)

    def c_vector(self, F: DiagonalCubicForm) -> tuple[int, ...]:
        c = [0] * F.m
        for cl in self.classes:
            for i, ei in zip(cl.indices, cl.e):
                val = Fraction(cl.g * ei * ei, F.coeffs[i])
                assert val.denominator == 1
                c[i] = int(val)
        return tuple(c)


def _signed_zero_sum(values: Sequence[Fraction]) -> tuple[int, ...] | None:
    """Signs (first fixed +) making sum eps_i v_i = 0, or None."""
    if len(values) < 2:
        return None
    for tail in itertools.product((1, -1), repeat=len(values) - 1):
        eps = (1,) + tail
        if sum(e * v for e, v in zip(eps, values)) == 0:
            return eps
    return None


def square_class_decompose(F: DiagonalCubicForm, c: Sequence[int]) -> SquareClassDecomposition:
    """Partition indices by the square class of F_i c_i and write c_i = g F_i^{-1} e_i^2."""
    c = F.check_pair(c)
    if any(ci == 0 for ci in c):
        raise DomainError("square-class decomposition needs every c_i != 0")
    groups: dict[int, list[int]] = {}
    for i, (ci, Fi) in enumerate(zip(c, F.coeffs)):
        groups.setdefault(squarefree_part(ci * Fi), []).append(i)
    classes = []
    vanishing = True
    for g in sorted(groups, key=lambda t: (abs(t), t)):
        idx = tuple(groups[g])
        e = []
        for i in idx:
            k2 = c[i] * F.coeffs[i] // g
            k = math.isqrt(k2)
            assert k * k == k2 and Fraction(g * k2, F.coeffs[i]) == c[i]
            e.append(k)
        signs = _signed_zero_sum([Fraction(k**3, F.coeffs[i] ** 2) for i, k in zip(idx, e)])
        if signs is None:
            vanishing = False
        else:
            e = [s * k for s, k in zip(signs, e)]
        classes.append(SquareClass(g, idx, tuple(e)))
    return SquareClassDecomposition(tuple(classes), vanishing)


def is_singular_c(F: DiagonalCubicForm, c: Sequence[int]) -> bool:
    """F^vee(c) = 0, decided on the nonzero support by square classes."""
    c = F.check_pair(c)
    support = [i for i, ci in enumerate(c) if ci]
    if not support:
        return True
    sub = DiagonalCubicForm(tuple(F.coeffs[i] for i in support))
    return square_class_decompose(sub, [c[i] for i in support]).vanishing


def _squarefree_upto(bound: int) -> list[int]:
    out = []
    for g in range(1, bound + 1):
        if all(e == 1 for _, e in factorize(g).factors):
            out += [g, -g]
    return out


def enumerate_singular_c(F: DiagonalCubicForm, Z: int) -> list[tuple[int, ...]]:
    """All c with 0 < ||c||_inf <= Z and Delta(F, c) = 0, sorted lexicographically."""
    if Z < 1:
        raise DomainError("Z must be positive")
    m = F.m
    # vanishing blocks: (g, {index: c_i}) with |block| >= 2 and a signed cubic sum zero
    blocks: list[tuple[int, dict[int, int]]] = []
    gmax = max(abs(a) for a in F.coeffs) * Z
    for g in _squarefree_upto(gmax):
        options: dict[int, list[int]] = {}
        for i, Fi in enumerate(F.coeffs):
            es = []
            e = 1
            while abs(g) * e * e <= abs(Fi) * Z:
                if (g * e * e) % Fi == 0 and abs(g * e * e // Fi) <= Z:
                    es.append(e)
                e += 1
            if es:
                options[i] = es
        idx = sorted(options)
        for size in range(2, len(idx) + 1):
            for subset in itertools.combinations(idx, size):
                for es in itertools.product(*(options[i] for i in subset)):
                    vals = [Fraction(e**3, F.coeffs[i] ** 2) for i, e in zip(subset, es)]
                    if _signed_zero_sum(vals) is not None:
                        blocks.append((g, {i: g * e * e // F.coeffs[i] for i, e in zip(subset, es)}))
    found: set[tuple[int, ...]] = set()

    def combine(start: int, used_idx: frozenset, used_g: frozenset, acc: dict[int, int]):
        for b in range(start, len(blocks)):
            g, blk = blocks[b]
            if g in used_g or used_idx & blk.keys():
                continue
            new = {**acc, **blk}
            found.add(tuple(new.get(i, 0) for i in range(m)))
            combine(b + 1, used_idx | blk.keys(), used_g | {g}, new)

    combine(0, frozenset(), frozenset(), {})
    return sorted(found)


def singular_c_bruteforce(F: DiagonalCubicForm, Z: int) -> list[tuple[int, ...]]:
    """Oracle: every nonzero c in the box with Delta(F, c) = 0."""
    out = []
    for c in itertools.product(range(-Z, Z + 1), repeat=F.m):
        if any(c) and disc_delta(F, c) == 0:
            out.append(c)
    return out


def parse_vector(text: str | Iterable[int]) -> tuple[int, ...]:
    if isinstance(text, str):
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    return tuple(int(t) for t in text)
