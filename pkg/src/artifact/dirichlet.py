"""Coefficient sequences b_c, a_c, a'_c, their Dirichlet algebra, and sieve statistics.

Every sequence is stored as exact rational numerators r(n) together with a
half-exponent flag: value(n) = r(n) n^{-1/2} when ``half`` is set, else r(n).
For even m all of S~_c, b_c, a_c, a'_c have this shape, and the shape is
closed under Dirichlet convolution, so nothing is ever rounded.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import DataUnavailable, DomainError, ResourceLimit, SingularSection
from .exactnum import HalfPower, SurdSum, factorize, mobius
from .expsums import count_section, expsum
from .forms import DiagonalCubicForm, disc_delta
from .zeta import SUPPORTED_M, frobenius_charpoly

CHOICES = (1, 2, 3)
MAX_FIELD_Q = 2**22  # largest F_{p^r} the zeta module builds tables for


# ----------------------------------------------------------------- sequences


@dataclass(frozen=True)
class CoefficientSequence:
    """Exact values at n = 1..N."""

    num: tuple[Fraction, ...]
    half: bool
    tag: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "num", tuple(Fraction(x) for x in self.num))

    @property
    def N(self) -> int:
        return len(self.num)

    def __getitem__(self, n: int) -> Fraction:
        """The rational numerator r(n)."""
        if not 1 <= n <= self.N:
            raise IndexError(n)
        return self.num[n - 1]

    def value(self, n: int) -> HalfPower:
        return HalfPower(self[n], n, -1 if self.half else 0)

    def floats(self) -> np.ndarray:
        scale = 1 / np.sqrt(np.arange(1, self.N + 1)) if self.half else np.ones(self.N)
        return np.array([float(x) for x in self.num]) * scale

    def truncate(self, N: int) -> "CoefficientSequence":
        if N > self.N:
            raise DomainError(f"cannot extend a sequence of length {self.N} to {N}")
        return CoefficientSequence(self.num[:N], self.half, self.tag)

    def mask(self, keep: Callable[[int], bool], tag: str | None = None) -> "CoefficientSequence":
        """Pointwise product with an indicator."""
        return CoefficientSequence(
            [x if keep(n) else 0 for n, x in enumerate(self.num, start=1)], self.half, tag or self.tag
        )

    def scale(self, f: Callable[[int], int], tag: str | None = None) -> "CoefficientSequence":
        """Pointwise product with an integer-valued arithmetic function."""
        return CoefficientSequence([x * f(n) for n, x in enumerate(self.num, start=1)], self.half, tag or self.tag)

    def interval_sum(self, lo: float, hi: float) -> SurdSum:
        """sum_{lo <= n <= hi} value(n), exactly."""
        out = SurdSum()
        for n in range(max(1, math.ceil(lo)), min(self.N, math.floor(hi)) + 1):
            out = out + self._surd(n, self[n])
        return out

    def abs_interval_sum(self, lo: float, hi: float) -> SurdSum:
        out = SurdSum()
        for n in range(max(1, math.ceil(lo)), min(self.N, math.floor(hi)) + 1):
            out = out + self._surd(n, abs(self[n]))
        return out

    def _surd(self, n: int, r: Fraction) -> SurdSum:
        if not r:
            return SurdSum()
        if not self.half:
            return SurdSum({1: r})
        return SurdSum.sqrt_of(n, r / n)

    def to_json(self) -> dict:
        return {"tag": self.tag, "half": self.half, "num": [str(x) for x in self.num]}


def delta_sequence(N: int, half: bool) -> CoefficientSequence:
    return CoefficientSequence([1] + [0] * (N - 1), half, "delta")


def dirichlet_convolve(s: CoefficientSequence, t: CoefficientSequence, tag: str = "custom") -> CoefficientSequence:
    if s.half != t.half:
        raise DomainError("cannot convolve sequences of different half-exponent type")
    N = min(s.N, t.N)
    out = [Fraction(0)] * N
    for d in range(1, N + 1):
        x = s.num[d - 1]
        if not x:
            continue
        for k in range(1, N // d + 1):
            y = t.num[k - 1]
            if y:
                out[d * k - 1] += x * y
    return CoefficientSequence(out, s.half, tag)


def dirichlet_inverse(seq: CoefficientSequence, tag: str = "custom") -> CoefficientSequence:
    if seq.N < 1 or seq.num[0] != 1:
        raise DomainError("Dirichlet inverse needs seq(1) = 1")
    N = seq.N
    inv = [Fraction(0)] * N
    inv[0] = Fraction(1)
    divs = _divisor_lists(N)
    for n in range(2, N + 1):
        total = Fraction(0)
        for d in divs[n]:
            if d > 1:
                x = seq.num[d - 1]
                if x:
                    total += x * inv[n // d - 1]
        inv[n - 1] = -total
    return CoefficientSequence(inv, seq.half, tag)


@lru_cache(maxsize=8)
def _divisor_lists(N: int) -> tuple[tuple[int, ...], ...]:
    lists: list[list[int]] = [[] for _ in range(N + 1)]
    for d in range(1, N + 1):
        for k in range(d, N + 1, d):
            lists[k].append(d)
    return tuple(tuple(x) for x in lists)


def multiplicative_sequence(N: int, local: Callable[[int, int], Fraction], half: bool, tag: str) -> CoefficientSequence:
    """Sequence with r(prod p^l) = prod local(p, l)."""
    out = []
    for n in range(1, N + 1):
        v = Fraction(1)
        for p, l in factorize(n).factors if n > 1 else ():
            v *= local(p, l)
            if not v:
                break
        out.append(v)
    return CoefficientSequence(out, half, tag)


# ----------------------------------------------------------------- S~, b, a, a'


@lru_cache(maxsize=4096)
def _delta(F: DiagonalCubicForm, c: tuple[int, ...]) -> int:
    return disc_delta(F, c)


def bad_modulus(F: DiagonalCubicForm, c: tuple[int, ...]) -> int:
    """3 F_1...F_m Delta(F, c): its prime divisors are the bad primes."""
    return 3 * F.product() * _delta(F, c)


def _require_smooth(F: DiagonalCubicForm, c: Sequence[int]) -> tuple[int, ...]:
    c = F.check_pair(c)
    if _delta(F, c) == 0:
        raise SingularSection(f"Delta(F, c) = 0 for c = {c}")
    return c


def _half(F: DiagonalCubicForm) -> bool:
    return F.m % 2 == 0


def sequence_S(F: DiagonalCubicForm, c: Sequence[int], N: int) -> CoefficientSequence:
    """S~_c(n) = S_c(n) n^{-(m+1)/2}, n = 1..N."""
    return _sequence_S(F, F.check_pair(c), N)


@lru_cache(maxsize=4096)
def _sequence_S(F: DiagonalCubicForm, c: tuple[int, ...], N: int) -> CoefficientSequence:
    half = _half(F)
    shift = F.m // 2 if half else (F.m + 1) // 2  # value = S n^{-shift} (n^{-1/2})^{half}

    def local(p: int, l: int) -> Fraction:
        q = p**l
        return Fraction(expsum(F, c, q).value, q**shift)

    return multiplicative_sequence(N, local, half, "S~")


def _choice3_local(F: DiagonalCubicForm, c: tuple[int, ...], N: int) -> Callable[[int, int], Fraction]:
    """b(p^l) = P_l p^{-l/2} at good p, with P the Frobenius polynomial; 0 at bad p."""
    delta = bad_modulus(F, c)
    table: dict[int, list[int]] = {}

    def coeffs(p: int) -> list[int]:
        if p not in table:
            L = int(math.log(N, p) + 1e-9)
            while p ** (L + 1) <= N:
                L += 1
            if L == 1:
                # one count suffices: P_1 = E_c(p) / p^twist
                E = count_section(F, c, p).E_c
                tw = 1 if F.m == 6 else 0
                assert E % p**tw == 0
                table[p] = [1, E // p**tw]
            else:
                from .forms import dim_middle

                depth = min(L, dim_middle(F.m))
                if p**depth > MAX_FIELD_Q:
                    raise DataUnavailable(f"zeta data for p = {p} needs F_(p^{depth})")
                data = frobenius_charpoly(F, c, p, depth=depth)
                table[p] = list(data.charpoly.coeffs)
        return table[p]

    def local(p: int, l: int) -> Fraction:
        if delta % p == 0:
            return Fraction(0)
        P = coeffs(p)
        return Fraction(P[l]) if l < len(P) else Fraction(0)

    return local


def sequence_b(choice: int, F: DiagonalCubicForm, c: Sequence[int], N: int) -> CoefficientSequence:
    """b_c(n), n = 1..N, for the three standard choices of Psi_1."""
    c = _require_smooth(F, c)
    if choice == 1:
        return CoefficientSequence(sequence_S(F, c, N).num, _half(F), "b-choice-1")
    if choice == 2:
        delta = bad_modulus(F, c)
        S = sequence_S(F, c, N)
        return S.mask(lambda n: math.gcd(n, delta) == 1, "b-choice-2")
    if choice == 3:
        if F.m not in SUPPORTED_M:
            raise DataUnavailable(f"Frobenius data is only available for m in {SUPPORTED_M}")
        return multiplicative_sequence(N, _choice3_local(F, c, N), True, "b-choice-3")
    raise DomainError(f"choice must be one of {CHOICES}")


@dataclass(frozen=True)
class SequenceFamily:
    S: CoefficientSequence
    b: CoefficientSequence
    a: CoefficientSequence
    a_prime: CoefficientSequence


@lru_cache(maxsize=2048)
def sequences(choice: int, F: DiagonalCubicForm, c: tuple[int, ...], N: int) -> SequenceFamily:
    """(S~, b, a = b^{-1}, a' = S~ * a) for one c."""
    b = sequence_b(choice, F, c, N)
    S = sequence_S(F, c, N)
    a = dirichlet_inverse(b, "a")
    return SequenceFamily(S, b, a, dirichlet_convolve(S, a, "a'"))


# ----------------------------------------------------------------- restriction identities


def _is_squarefull(n: int) -> bool:
    return all(e >= 2 for _, e in factorize(n).factors) if n > 1 else True


@dataclass(frozen=True)
class IdentityCheck:
    ok: bool
    identity: str | None = None
    first_failure: int | None = None

    def __bool__(self):
        return self.ok


def restriction_identity_check(
    F: DiagonalCubicForm, c: Sequence[int], d: int, N: int, choice: int = 2
) -> IdentityCheck:
    """Check the square-free restriction identities coefficientwise up to N.

    (i)   b(n) = sum_{n1 e = n} 1[e square-full] 1[e coprime n1] mu(n1) a(n1) b(e)
    (ii)  1[d coprime n] mu(n) a(n) = 1[d coprime n] mu(n)^2 b(n) = (b * [a * (1[d coprime .] mu^2 b)])(n)
    (iii) a * (1[d coprime .] mu^2 b) vanishes at square-free n > 1 coprime to d
    """
    fam = sequences(choice, F, F.check_pair(c), N)
    a, b = fam.a, fam.b
    for n in range(1, N + 1):
        rhs = Fraction(0)
        for n1 in _divisor_lists(N)[n]:
            e = n // n1
            if _is_squarefull(e) and math.gcd(e, n1) == 1:
                rhs += mobius(n1) * a[n1] * b[e]
        if rhs != b[n]:
            return IdentityCheck(False, "b-expansion", n)
    restricted = b.scale(lambda n: mobius(n) ** 2).mask(lambda n: math.gcd(n, d) == 1)
    inner = dirichlet_convolve(a, restricted)
    outer = dirichlet_convolve(b, inner)
    for n in range(1, N + 1):
        lhs = mobius(n) * a[n] if math.gcd(n, d) == 1 else 0
        if lhs != restricted[n] or restricted[n] != outer[n]:
            return IdentityCheck(False, "mu-a-expansion", n)
        if n > 1 and mobius(n) and math.gcd(n, d) == 1 and inner[n] != 0:
            return IdentityCheck(False, "vanishing", n)
    return IdentityCheck(True)


# ----------------------------------------------------------------- boxes


@dataclass(frozen=True)
class DeletedBox:
    """c_j in [-Z, Z] minus {0} for j in the index set, c_j = 0 otherwise."""

    indices: tuple[int, ...]
    Z: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(sorted(set(self.indices))))
        if self.Z < 1 or any(not 0 <= i < self.m for i in self.indices):
            raise DomainError("invalid deleted box")

    @property
    def r(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        side = [t for t in range(-self.Z, self.Z + 1) if t]
        for vals in itertools.product(side, repeat=self.r):
            c = [0] * self.m
            for i, v in zip(self.indices, vals):
                c[i] = v
            yield tuple(c)

    def __len__(self) -> int:
        return (2 * self.Z) ** self.r


def full_box(m: int, Z: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(-Z, Z + 1), repeat=m)


def smooth_points(F: DiagonalCubicForm, cs: Iterable[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """The c with Delta(F, c) != 0, in iteration order."""
    return [c for c in cs if _delta(F, c) != 0]


# ----------------------------------------------------------------- reports


@dataclass
class StatReport:
    kind: str
    params: dict
    value: SurdSum | float
    baseline: float
    notes: list[str] = dc_field(default_factory=list)

    @property
    def value_float(self) -> float:
        return float(self.value)

    @property
    def ratio(self) -> float:
        return self.value_float / self.baseline if self.baseline else math.inf

    @property
    def exact(self) -> dict | None:
        return self.value.to_json() if isinstance(self.value, SurdSum) else None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "value": self.value_float,
            "value_exact": self.exact,
            "baseline": self.baseline,
            "ratio": self.ratio,
            "notes": self.notes,
        }


def reports_to_csv(reports: Sequence[StatReport]) -> str:
    keys = sorted({k for r in reports for k in r.params})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", *keys, "value", "baseline", "ratio"])
    for r in reports:
        w.writerow([r.kind, *(json.dumps(r.params.get(k)) for k in keys), repr(r.value_float), repr(r.baseline), repr(r.ratio)])
    return buf.getvalue()


# ----------------------------------------------------------------- statistics


def second_moment_stat(
    F: DiagonalCubicForm,
    Z: int,
    Y: float,
    N: float,
    I: tuple[float, float],
    choice: int = 2,
    beta: float = 1.0,
) -> StatReport:
    """sum' over c in [-Z, Z]^m of |sum_{n in I} b_c(n)|^2, exactly."""
    lo, hi = I
    if N > beta * Y:
        raise DomainError("need N <= beta Y")
    if lo > hi:
        value = SurdSum()
        cs: list = []
    else:
        if lo < N / 2 or hi > 2 * N:
            raise DomainError("need I inside [N/2, 2N]")
        length = math.floor(hi)
        cs = smooth_points(F, full_box(F.m, Z))
        value = SurdSum()
        for c in cs:
            B = sequence_b(choice, F, c, max(length, 1)).interval_sum(lo, hi)
            value = value + B * B
    baseline = max(Z**F.m, Y) * N
    params = {"F": list(F.coeffs), "Z": Z, "Y": Y, "N": N, "I": [lo, hi], "choice": choice, "beta": beta}
    return StatReport("second-moment", params, value, float(baseline), [f"{len(cs)} smooth c"])


def second_moment_trend(F: DiagonalCubicForm, Z: int, Y: float, N: float, choice: int = 2) -> dict:
    """sum' over c of max_{I in J} |sum_{n in I} b_c(n)|^2 for nested windows J = [N/2, t] up to 2N.

    Reported only: nothing is asserted about the trend.
    """
    lo, top = math.ceil(N / 2), math.floor(2 * N)
    cs = smooth_points(F, full_box(F.m, Z))
    ends = list(range(lo, top + 1))
    totals = np.zeros(len(ends))
    for c in cs:
        b = sequence_b(choice, F, c, top).floats()
        prefix = np.concatenate([[0.0], np.cumsum(b[lo - 1 : top])])
        best = 0.0
        for k in range(len(ends)):
            # new subintervals are those ending at ends[k]
            best = max(best, float(np.max((prefix[k + 1] - prefix[: k + 1]) ** 2)))
            totals[k] += best
    vals = totals.tolist()
    return {
        "params": {"F": list(F.coeffs), "Z": Z, "Y": Y, "N": N, "choice": choice},
        "window_ends": ends,
        "values": vals,
        "nondecreasing": all(a <= b for a, b in zip(vals, vals[1:])),
    }


NORM_TOL = 1e-10
NORM_MAX_ITER = 500


def gamma_matrix(F: DiagonalCubicForm, Z: int, Q: int, gamma: str, choice: int = 2) -> np.ndarray:
    """Rows gamma_c(1..Q) for the smooth c in [-Z, Z]^m."""
    rows = []
    for c in smooth_points(F, full_box(F.m, Z)):
        fam = sequences(choice, F, c, Q)
        if gamma == "sqfree-a":
            seq = fam.a.mask(lambda n: mobius(n) != 0)
        elif gamma == "b":
            seq = fam.b
        else:
            raise DomainError(f"unknown gamma {gamma!r}")
        rows.append(seq.floats())
    return np.array(rows).reshape(-1, Q)


def power_iteration_norm(M: np.ndarray) -> tuple[float, int]:
    """Largest eigenvalue of M^T M from the seed (1, ..., 1)/sqrt(Q)."""
    G = M.T @ M
    Q = G.shape[0]
    v = np.ones(Q) / math.sqrt(Q)
    lam = 0.0
    for it in range(1, NORM_MAX_ITER + 1):
        w = G @ v
        nrm = float(np.linalg.norm(w))
        if nrm == 0:
            return 0.0, it
        new = float(v @ w)
        v = w / nrm
        if it > 1 and abs(new - lam) <= NORM_TOL * abs(new):
            return new, it
        lam = new
    return lam, NORM_MAX_ITER


def large_sieve_norm(
    F: DiagonalCubicForm, Z: int, Q: int, gamma: str = "sqfree-a", choice: int = 2, Y: float | None = None
) -> StatReport:
    """Operator norm^2 of (gamma_c(n))_{c, n <= Q}."""
    M = gamma_matrix(F, Z, Q, gamma, choice)
    lam, iters = power_iteration_norm(M)
    col = float(np.max(np.sum(M * M, axis=0))) if M.size else 0.0
    frob = float(np.sum(M * M))
    # the Rayleigh quotient sandwich
    if not (col * (1 - 1e-9) - 1e-12 <= lam <= frob * (1 + 1e-9) + 1e-12):
        raise AssertionError(f"power iteration left the sandwich: {col} <= {lam} <= {frob}")
    Y = Q / 2 if Y is None else Y
    params = {"F": list(F.coeffs), "Z": Z, "Q": Q, "Y": Y, "gamma": gamma, "choice": choice}
    notes = [f"{M.shape[0]} rows", f"{iters} iterations", f"max column^2 {col!r}", f"frobenius^2 {frob!r}"]
    return StatReport("large-sieve", params, lam, float(max(Z**F.m, Y)), notes)


def _baseline_product(box: DeletedBox) -> float:
    return float(box.Z**box.r)


def dyadic_moment_stat(
    kind: str,
    F: DiagonalCubicForm,
    box: DeletedBox | int,
    N: float,
    choice: int = 2,
    include_one: bool = True,
) -> StatReport:
    """Dyadic second moments.

    ``abs-a'`` and ``abs-b``: sum' over c in a deleted box of (sum_{N <= n < 2N} |x_c(n)|)^2.
    ``bad-sum``: sum' over c in [-C, C]^m and cube-full n <= N of n^{-1} |S~_c(n)|^2 (box = C).
    """
    m = F.m
    if kind in ("abs-a'", "abs-b"):
        if not isinstance(box, DeletedBox) or box.m != m:
            raise DomainError("dyadic moments of |a'| and |b| need a deleted box")
        cs = smooth_points(F, box)
        value = SurdSum()
        hi = math.ceil(2 * N) - 1 if N > 0 else 0
        for c in cs if hi >= max(1, math.ceil(N)) else ():
            fam = sequences(choice, F, c, hi)
            seq = fam.a_prime if kind == "abs-a'" else fam.b
            s = seq.abs_interval_sum(N, hi)
            value = value + s * s
        r = box.r
        expo = 1 + (m - r) / 3 if kind == "abs-a'" else max(2.0, 1 + (m - r) / 3)
        baseline = N**expo * _baseline_product(box) if N > 0 else 0.0
        params = {"F": list(F.coeffs), "indices": list(box.indices), "Z": box.Z, "N": N, "choice": choice}
    elif kind == "bad-sum":
        C = box if isinstance(box, int) else box.Z
        cs = smooth_points(F, full_box(m, C))
        ns = [n for n in range(1 if include_one else 2, math.floor(N) + 1) if _is_cubefull(n)]
        value = SurdSum()
        for n in ns:
            for c in cs:
                S = expsum(F, c, n).value
                value = value + SurdSum({1: Fraction(S * S, n ** (m + 2))})
        baseline = float(C**m + N ** (m / 3))
        params = {"F": list(F.coeffs), "C": C, "N": N, "include_one": include_one}
    else:
        raise DomainError(f"unknown statistic {kind!r}")
    return StatReport(kind, params, value, float(baseline), [f"{len(cs)} smooth c"])


def _is_cubefull(n: int) -> bool:
    return all(e >= 3 for _, e in factorize(n).factors) if n > 1 else True


def check_bounds(N: int, limit: int = 5000) -> None:
    if N > limit:
        raise ResourceLimit(f"sequence length {N} exceeds {limit}")
