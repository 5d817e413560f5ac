"""Point counts of hyperplane sections over F_{p^r} and their Frobenius polynomials.

Normalization: ``charpoly`` is P(t) = prod_j (1 - beta_j t) with |beta_j| = sqrt(p),
so that the normalized eigenvalues are beta_j / sqrt(p). For m = 6 the middle
cohomology is Tate-twisted once (beta = alpha / p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import cache
from .counting import (
    affine_section_count,
    projectivize,
    section_count_character,
)
from .errors import BadPrime, DataInconsistent, DomainError, SectionDegenerates
from .exactnum import HalfPower, IntPolynomial, cubic_root_count, field, is_prime
from .forms import DiagonalCubicForm, dim_middle, disc_delta

SUPPORTED_M = (4, 6)


def _check_good(F: DiagonalCubicForm, c: Sequence[int], p: int, need_disc: bool) -> None:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if (3 * F.product()) % p == 0:
        raise BadPrime(f"p = {p} divides 3 F_1...F_m")
    if all(ci % p == 0 for ci in c):
        raise BadPrime(f"c vanishes mod {p}")
    if need_disc:
        d = disc_delta(F, c)
        if d % p == 0:
            raise BadPrime(f"p = {p} divides Delta(F, c)")


# ----------------------------------------------------------------- counting


def _pivot_count(F: DiagonalCubicForm, c: Sequence[int], K, i0: int, i1: int) -> int:
    """Affine count of {F = 0, c.x = 0} by eliminating x_{i0} and root counting in x_{i1}."""
    q = K.q
    rest = [j for j in range(F.m) if j not in (i0, i1)]
    x = K.elements
    cubes = K.pow(x, 3)
    joint = np.zeros((q, q), dtype=np.int64)
    joint[0, 0] = 1
    for j in rest:
        u = K.mul(np.full(q, K.from_int(F.coeffs[j])), cubes)
        v = K.mul(np.full(q, K.from_int(c[j])), x)
        new = np.zeros_like(joint)
        for a, b in zip(u.tolist(), v.tolist()):
            pa = K.encode(K.digits + K.digits[a])
            pb = K.encode(K.digits + K.digits[b])
            new[np.ix_(pa, pb)] += joint
        joint = new
    k = int(K.neg(K.inv(K.from_int(c[i0]))))
    Fa, Fb, cb = K.from_int(F.coeffs[i0]), K.from_int(F.coeffs[i1]), K.from_int(c[i1])
    k3 = int(K.pow(k, 3))
    Fk3 = int(K.mul(Fa, k3))
    a3 = int(K.add(Fb, K.mul(Fk3, K.pow(cb, 3))))
    three = K.from_int(3)
    total = 0
    for A, B in zip(*np.nonzero(joint)):
        A, B = int(A), int(B)
        a2 = int(K.mul(K.mul(three, Fk3), K.mul(B, K.pow(cb, 2))))
        a1 = int(K.mul(K.mul(three, Fk3), K.mul(K.pow(B, 2), cb)))
        a0 = int(K.add(K.mul(Fk3, K.pow(B, 3)), A))
        total += int(joint[A, B]) * cubic_root_count(a3, a2, a1, a0, K)
    return total


def count_section_ext(
    F: DiagonalCubicForm, c: Sequence[int], p: int, r: int, method: str = "auto", pivot: int | None = None
) -> int:
    """Projective F_{p^r}-point count of V_c = {F = 0, c.x = 0}."""
    c = F.check_pair(c)
    _check_good(F, c, p, need_disc=False)
    K = field(p, r)
    if method == "auto":
        method = "character"
    if method == "pivot":
        units = [i for i, ci in enumerate(c) if ci % p]
        i0 = units[0] if pivot is None else pivot
        if c[i0] % p == 0:
            raise DomainError("pivot index must have c_i invertible mod p")
        i1 = next(j for j in range(F.m) if j != i0)
        n_aff = _pivot_count(F, c, K, i0, i1)
    elif method == "character":
        # the deviation q^(m-2) - N_aff equals (q - 1) times the trace, and for
        # m = 6 the trace is divisible by q, so we can round at that scale
        scale = (K.q - 1) * (K.q if F.m == 6 else 1)
        key = (F.coeffs, tuple(c), p, r)
        n_aff, _ = cache.cached(
            "section-count", key, lambda: section_count_character(F.coeffs, c, K, scale=scale)
        )
    else:
        n_aff = affine_section_count(F.coeffs, c, K, method=method)
    return projectivize(n_aff, K.q)


# ----------------------------------------------------------------- charpoly assembly


@dataclass
class SectionZetaData:
    F: DiagonalCubicForm
    c: tuple[int, ...]
    p: int
    counts: list[int]
    charpoly: IntPolynomial
    complete: bool
    degree: int
    notes: list[str] = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "F": list(self.F.coeffs),
            "c": list(self.c),
            "p": self.p,
            "counts": self.counts,
            "charpoly": list(self.charpoly.coeffs),
            "charpoly_str": str(self.charpoly),
            "complete": self.complete,
            "degree": self.degree,
            "notes": self.notes,
        }


def _twist(m: int) -> int:
    return {4: 0, 6: 1}[m]


def power_sums_from_counts(F: DiagonalCubicForm, p: int, counts: Sequence[int]) -> list[int]:
    """s_r = sum_j beta_j^r from rho_c(p^r), r = 1..len(counts)."""
    out = []
    tw = _twist(F.m)
    for r, rho in enumerate(counts, start=1):
        Q = p**r
        E = rho - (Q ** (F.m - 2) - 1) // (Q - 1)
        tr = (-1) ** F.m_star * E  # trace of Frobenius on primitive middle cohomology
        if tr % Q**tw:
            raise DataInconsistent(f"trace {tr} not divisible by {Q}^{tw}")
        out.append(tr // Q**tw)
    return out


def _newton_to_coeffs(s: Sequence[int], n: int) -> list[int]:
    """Coefficients of prod (1 - beta t) = exp(-sum s_r t^r / r) up to t^n."""
    c = [Fraction(1)]
    for k in range(1, n + 1):
        acc = sum((s[j - 1] * c[k - j] for j in range(1, k + 1)), Fraction(0))
        c.append(-acc / k)
    if any(x.denominator != 1 for x in c):
        raise DataInconsistent("non-integral characteristic polynomial coefficient")
    return [int(x) for x in c]


def _coeffs_to_power_sums(coeffs: Sequence[int], n: int) -> list[int]:
    """Newton's identities: power sums s_1..s_n of the reciprocal roots."""
    e = [(-1) ** k * coeffs[k] if k < len(coeffs) else 0 for k in range(n + 1)]  # elementary symmetric
    s: list[int] = []
    for k in range(1, n + 1):
        acc = (-1) ** (k - 1) * k * e[k]
        for i in range(1, k):
            acc += (-1) ** (i - 1) * e[i] * s[k - i - 1]
        s.append(acc)
    return s


def frobenius_charpoly(
    F: DiagonalCubicForm, c: Sequence[int], p: int, depth: int | None = None, method: str = "auto"
) -> SectionZetaData:
    """Frobenius polynomial of V_c mod p from counts over F_{p^r}, r = 1..depth."""
    c = F.check_pair(c)
    if F.m not in SUPPORTED_M:
        raise DomainError("charpoly assembly is implemented for m in {4, 6}")
    _check_good(F, c, p, need_disc=True)
    d = dim_middle(F.m)
    half = d // 2
    depth = half if depth is None else depth
    if depth < 1:
        raise DomainError("depth must be positive")
    counts = [count_section_ext(F, c, p, r, method=method) for r in range(1, depth + 1)]
    s = power_sums_from_counts(F, p, counts)
    known = min(depth, half)
    low = _newton_to_coeffs(s, known)
    notes = []
    if depth >= half:
        full = low + [0] * (d - half)
        # functional equation: coeff(t^{d-j}) = p^{d/2 - j} coeff(t^j)
        for j in range(0, half):
            full[d - j] = p ** (half - j) * full[j]
        poly = IntPolynomial(full)
        complete = True
        if depth > half:
            predicted = _coeffs_to_power_sums(poly.coeffs, depth)
            if predicted != s:
                raise DataInconsistent(f"counts beyond r = {half} disagree with the functional equation")
            notes.append(f"functional equation verified against r = {half + 1}..{depth}")
    else:
        poly = IntPolynomial(low)
        complete = False
        notes.append(f"partial: coefficients t^0..t^{depth} only")
    return SectionZetaData(F, tuple(c), p, counts, poly, complete, d, notes)


def predict_count(data: SectionZetaData, r: int) -> int:
    """rho_c(p^r) predicted by a complete charpoly."""
    if not data.complete:
        raise DomainError("prediction needs a complete charpoly")
    s = _coeffs_to_power_sums(data.charpoly.coeffs, r)[r - 1]
    Q = data.p**r
    F = data.F
    tr = s * Q ** _twist(F.m)
    E = (-1) ** F.m_star * tr
    return (Q ** (F.m - 2) - 1) // (Q - 1) + E


def charpoly_factor(data: SectionZetaData) -> list[tuple[IntPolynomial, int]]:
    if not data.complete:
        raise DomainError("factorization needs a complete charpoly")
    return data.charpoly.factor()


@dataclass(frozen=True)
class LocalFactorCoeffs:
    p: int
    values: tuple[HalfPower, ...]  # lambda~(p^l), l = 0..L

    def as_floats(self) -> list[float]:
        return [float(v) for v in self.values]


def local_factor_coeffs(data: SectionZetaData, L: int) -> LocalFactorCoeffs:
    """lambda~_c(p^l) = h_l(beta) p^{-l/2}, where 1/P(t) = sum h_l t^l."""
    if not data.complete:
        raise DomainError("local factor needs a complete charpoly")
    P = data.charpoly.coeffs
    h = [1]
    for l in range(1, L + 1):
        h.append(-sum(P[k] * h[l - k] for k in range(1, min(l, len(P) - 1) + 1)))
    return LocalFactorCoeffs(data.p, tuple(HalfPower(Fraction(v), data.p, -l) for l, v in enumerate(h)))


def fe_residual(poly: IntPolynomial, p: int, d: int) -> int:
    """max_j |coeff(t^{d-j}) - p^{d/2-j} coeff(t^j)| (exact)."""
    return max(abs(poly[d - j] - p ** (d // 2 - j) * poly[j]) for j in range(0, d // 2 + 1))


def weil_report(data: SectionZetaData) -> dict:
    if not data.complete:
        raise DomainError("Weil report needs a complete charpoly")
    # roots per irreducible factor: repeated factors make np.roots inaccurate
    roots = np.concatenate([f.roots() for f, _mult in data.charpoly.factor() for _ in range(_mult) if f.degree > 0])
    beta = 1 / roots
    dev = float(np.max(np.abs(np.abs(beta) - math.sqrt(data.p))))
    return {
        "p": data.p,
        "reciprocal_root_moduli": sorted(float(x) for x in np.abs(beta)),
        "max_modulus_deviation": dev,
        "fe_residual": fe_residual(data.charpoly, data.p, data.degree),
    }
