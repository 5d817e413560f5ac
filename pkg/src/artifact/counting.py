"""Affine point counts of diagonal cubic hypersurfaces and their hyperplane sections over F_q.

Two engines:

* ``convolution``: exact integer convolution of the value distributions of
  F_i x^3 (and of the pairs (F_i x^3, c_i x) for sections) over the additive
  group of F_q. Cost about q^2 per fold (q^3 for sections).
* ``character``: the additive-character expansion
  N = q^-k sum_{s,t} prod_i G(s F_i, t c_i),  G(s, t) = sum_x psi(s x^3 + t x),
  where the s-sum collapses to cube-coset representatives and each row of G is
  one FFT over (Z/p)^r. The s = 0 part is exact; the rest is a float sum that
  is rounded and certified to lie within a small distance of an integer.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import NumericalFailure, ResourceLimit, SectionDegenerates
from .exactnum import FiniteField, field

ROUNDING_SLACK = 0.05


# ----------------------------------------------------------------- exact convolution


def _add_perm(K: FiniteField, a: int) -> np.ndarray:
    """Index array b -> a + b."""
    return K.encode(K.digits + K.digits[a])


def cube_distribution(K: FiniteField, coef: int) -> np.ndarray:
    """Histogram over F_q of coef * x^3 as x runs over F_q."""
    vals = K.mul(np.full(K.q, K.from_int(coef)), K.pow(K.elements, 3))
    return np.bincount(vals, minlength=K.q).astype(object)


def _convolve_group(K: FiniteField, h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    out = np.zeros(K.q, dtype=object)
    for a in np.nonzero(h1)[0]:
        out[_add_perm(K, int(a))] += h1[a] * h2
    return out


def affine_count_convolution(coeffs: Sequence[int], K: FiniteField) -> int:
    """#{x in F_q^m : sum F_i x_i^3 = 0}, exactly."""
    if K.q > 4096:
        raise ResourceLimit("convolution engine is limited to q <= 4096")
    h = cube_distribution(K, coeffs[0])
    for a in coeffs[1:]:
        h = _convolve_group(K, h, cube_distribution(K, a))
    return int(h[0])


def section_count_convolution(coeffs: Sequence[int], c: Sequence[int], K: FiniteField) -> int:
    """#{x in F_q^m : F(x) = 0, c.x = 0} by joint histograms over F_q^2."""
    q = K.q
    if q > 128:
        raise ResourceLimit("joint-histogram engine is limited to q <= 128")
    x = K.elements
    cubes = K.pow(x, 3)
    joint = np.zeros((q, q), dtype=object)
    joint[0, 0] = 1
    for Fi, ci in zip(coeffs, c):
        u = K.mul(np.full(q, K.from_int(Fi)), cubes)
        v = K.mul(np.full(q, K.from_int(ci)), x)
        new = np.zeros((q, q), dtype=object)
        for a, b in zip(u.tolist(), v.tolist()):
            pa, pb = _add_perm(K, a), _add_perm(K, b)
            new[np.ix_(pa, pb)] += joint
        joint = new
    return int(joint[0, 0])


# ----------------------------------------------------------------- character sums


@lru_cache(maxsize=16)
def _trace_form(p: int, r: int):
    """Index map x -> y with Tr(t x) = <t, y> (digit pairing), for the field F_{p^r}."""
    K = field(p, r)
    basis = [p**j for j in range(r)]
    M = np.zeros((r, r), dtype=np.int64)
    for j in range(r):
        for k in range(r):
            M[j, k] = K.traces[int(K.mul(basis[j], basis[k]))]
    y = (K.digits @ M.T) % p
    return K.encode(y)


def _gauss_rows(K: FiniteField, s: int) -> np.ndarray:
    """G(s, t) = sum_x psi(s x^3 + t x) for all t (complex array indexed by t)."""
    q, p, r = K.q, K.p, K.r
    x = K.elements
    arg = K.traces[K.mul(np.full(q, s), K.pow(x, 3))]
    f = np.exp(2j * np.pi * arg / p)
    A = np.zeros(q, dtype=complex)
    A[_trace_form(p, r)] = f
    G = np.fft.ifftn(A.reshape((p,) * r)).reshape(q) * q
    return G


def _scale_index(K: FiniteField, a: int) -> np.ndarray:
    """Index array t -> a t for a rational integer a."""
    return K.encode(K.digits * (a % K.p))


def _cube_cosets(K: FiniteField) -> list[tuple[int, int]]:
    """(representative, size) for the cosets of the cubes in F_q^*."""
    q = K.q
    if (q - 1) % 3:
        return [(1, q - 1)]
    return [(int(K.exp_table[k]), (q - 1) // 3) for k in range(3)]


def _round_certified(x: float, what: str) -> int:
    n = round(x)
    if abs(x - n) > ROUNDING_SLACK:
        raise NumericalFailure(f"{what}: {x!r} is not within {ROUNDING_SLACK} of an integer")
    return int(n)


def affine_count_character(coeffs: Sequence[int], K: FiniteField) -> int:
    q = K.q
    total = 0.0
    for s, size in _cube_cosets(K):
        prod = 1.0 + 0j
        for Fi in coeffs:
            a = K.from_int(Fi)
            prod *= _gauss_rows(K, int(K.mul(s, a)))[0] if a else q
        total += size * prod.real
    m = len(coeffs)
    dev = _round_certified(total / q, "hypersurface deviation")
    return q ** (m - 1) + dev


def section_deviation_character(coeffs: Sequence[int], c: Sequence[int], K: FiniteField) -> float:
    """D = N_aff - q^(m-2) for the section, as an (uncertified) float."""
    q = K.q
    if all(K.from_int(ci) == 0 for ci in c):
        raise SectionDegenerates("c vanishes in F_p")
    total = 0.0
    rows: dict[int, np.ndarray | None] = {}
    for s, size in _cube_cosets(K):
        prod = np.ones(q, dtype=complex)
        for Fi, ci in zip(coeffs, c):
            a = K.from_int(Fi)
            key = int(K.mul(s, a)) if a else 0
            if key not in rows:
                rows[key] = _gauss_rows(K, key) if key else None
            row = rows[key]
            if row is None:
                # F_i = 0 in F_p: G(0, t c_i) = q [t c_i = 0]
                row_vals = np.where(_scale_index(K, ci) == 0, q, 0).astype(complex)
            else:
                row_vals = row[_scale_index(K, ci)]
            prod *= row_vals
        total += size * math.fsum(prod.real)
    return total / q**2


def section_count_character(coeffs: Sequence[int], c: Sequence[int], K: FiniteField, scale: int = 1) -> int:
    """Exact affine section count; ``scale`` is a known divisor of the deviation."""
    D = section_deviation_character(coeffs, c, K)
    dev = _round_certified(D / scale, "section deviation") * scale
    return K.q ** (len(coeffs) - 2) + dev


# ----------------------------------------------------------------- front doors


def affine_count(coeffs: Sequence[int], K: FiniteField, method: str = "auto") -> int:
    if method == "auto":
        method = "convolution" if K.q <= 64 else "character"
    if method == "convolution":
        return affine_count_convolution(coeffs, K)
    return affine_count_character(coeffs, K)


def affine_section_count(coeffs: Sequence[int], c: Sequence[int], K: FiniteField, method: str = "auto") -> int:
    if all(K.from_int(ci) == 0 for ci in c):
        raise SectionDegenerates("c vanishes in F_p")
    if method == "auto":
        method = "convolution" if K.q <= 13 else "character"
    if method == "convolution":
        return section_count_convolution(coeffs, c, K)
    return section_count_character(coeffs, c, K)


def projectivize(n_aff: int, q: int) -> int:
    num = n_aff - 1
    if num % (q - 1):
        raise AssertionError(f"affine count {n_aff} is not 1 mod {q - 1}")
    return num // (q - 1)


def naive_affine_count(coeffs: Sequence[int], c: Sequence[int] | None, K: FiniteField) -> int:
    """Oracle: enumerate F_q^m directly (tiny q and m only)."""
    import itertools

    q = K.q
    cubes = K.pow(K.elements, 3)
    count = 0
    for x in itertools.product(range(q), repeat=len(coeffs)):
        acc = 0
        for Fi, xi in zip(coeffs, x):
            acc = int(K.add(acc, K.mul(K.from_int(Fi), int(cubes[xi]))))
        if acc:
            continue
        if c is not None:
            acc = 0
            for ci, xi in zip(c, x):
                acc = int(K.add(acc, K.mul(K.from_int(ci), xi)))
            if acc:
                continue
        count += 1
    return count
