"""Experiments around cubic differencing: ternary quadratic counts, the square locus,
exact algebraic identities, Dirichlet-arc coverings, Weyl sums and a totient search."""
from __future__ import annotations

import bisect
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Sequence

import numpy as np

from .dirichlet import StatReport
from .errors import DomainError, ResourceLimit
from .exactnum import CyclotomicElement, euler_phi, factorize, is_square, phi_sieve

# ----------------------------------------------------------------- ternary quadratic forms


def Q_form(h: Sequence[int], y: Sequence[int]) -> int:
    return sum(a * t * t for a, t in zip(h, y))


def F0(y: Sequence[int]) -> int:
    return sum(t**3 for t in y)


def is_rational_square(q: Fraction | int) -> bool:
    q = Fraction(q)
    return q >= 0 and is_square(q.numerator) and is_square(q.denominator)


@dataclass(frozen=True)
class TernaryInstance:
    h: tuple[int, int, int]
    k: int
    X: int

    @property
    def admissible(self) -> bool:
        """-h1 h2 h3 k is neither 0 nor a rational square."""
        t = -math.prod(self.h) * self.k
        return t != 0 and not is_rational_square(t)


def _isqrt_vec(t: np.ndarray) -> np.ndarray:
    s = np.floor(np.sqrt(np.maximum(t, 0).astype(float))).astype(np.int64)
    s -= (s * s > t).astype(np.int64)
    s += ((s + 1) * (s + 1) <= t).astype(np.int64)
    return s


def ternary_count(h: Sequence[int], k: int, X: int) -> int:
    """#{y in [-X, X]^3 : h1 y1^2 + h2 y2^2 + h3 y3^2 = k}, in O(X^2)."""
    h = tuple(int(a) for a in h)
    if len(h) != 3 or not any(h):
        raise DomainError("need a nonzero triple h")
    j = next(i for i in range(3) if h[i])  # the coordinate solved for
    others = [i for i in range(3) if i != j]
    r = np.arange(-X, X + 1, dtype=np.int64)
    a, b = np.meshgrid(r, r, indexing="ij")
    rest = k - h[others[0]] * a * a - h[others[1]] * b * b
    hj = h[j]
    ok = rest % hj == 0
    t = np.where(ok, rest // hj, -1)
    s = _isqrt_vec(t)
    good = ok & (t >= 0) & (s * s == t) & (s <= X)
    return int(np.sum(np.where(good, np.where(s == 0, 1, 2), 0)))


def naive_ternary_count(h: Sequence[int], k: int, X: int) -> int:
    """O(X^3) oracle over the full cube."""
    r = np.arange(-X, X + 1, dtype=np.int64)
    a, b, c = np.meshgrid(r, r, r, indexing="ij")
    return int(np.sum(h[0] * a * a + h[1] * b * b + h[2] * c * c == k))


def trivial_family(h: Sequence[int], t: int) -> tuple[int, int, int]:
    """(t + 3 h2, t - 3 h1, t): a solution of Q_h(y) = -9 h1 h2 h3 when h1 + h2 + h3 = 0."""
    return (t + 3 * h[1], t - 3 * h[0], t)


def ternary_bound(h: Sequence[int], X: int, H: float) -> float:
    return X / abs(math.prod(h)) ** (1 / 3) + (X * X * H) ** 0.25


def ternary_conjecture_scan(
    H: int, X: int, sample_size: int, seed: int = 0, k_mode: Literal["cubic", "uniform"] = "cubic"
) -> tuple[StatReport, list[dict]]:
    """Ratios count / (X |h1h2h3|^(-1/3) + (X^2 H)^(1/4)) over admissible random instances.

    ``cubic`` takes k = -3 F0(h) (the differencing instance); ``uniform`` draws k
    from [-3 H X^2, 3 H X^2].
    """
    rng = random.Random(seed)
    rows = []
    tries = 0
    while len(rows) < sample_size:
        tries += 1
        if tries > 100 * sample_size:
            break
        h = tuple(rng.choice([-1, 1]) * rng.randint(1, 2 * H) for _ in range(3))
        if not H <= max(map(abs, h)) <= 2 * H:
            continue
        k = -3 * F0(h) if k_mode == "cubic" else rng.randint(-3 * H * X * X, 3 * H * X * X)
        inst = TernaryInstance(h, k, X)
        if not inst.admissible:
            continue
        count = ternary_count(h, k, X)
        base = ternary_bound(h, X, H)
        rows.append({"h": list(h), "k": k, "X": X, "count": count, "bound": base, "ratio": count / base})
    ratios = np.array([r["ratio"] for r in rows]) if rows else np.zeros(1)
    q = np.quantile(ratios, [0.5, 0.9, 1.0])
    report = StatReport(
        "ternary-scan",
        {"H": H, "X": X, "samples": len(rows), "seed": seed, "k_mode": k_mode},
        float(q[2]),
        1.0,
        [f"median ratio {float(q[0])!r}", f"90% quantile {float(q[1])!r}"],
    )
    return report, rows


# ----------------------------------------------------------------- the square locus


def square_locus(H: int) -> list[tuple[tuple[int, int, int], int]]:
    """All (h, z) with 0 < ||h|| <= H and 3 h1 h2 h3 F0(h) = z^2."""
    out = []
    r = range(-H, H + 1)
    for h in itertools.product(r, repeat=3):
        if not any(h):
            continue
        t = 3 * math.prod(h) * F0(h)
        if t < 0:
            continue
        z = math.isqrt(t)
        if z * z == t:
            out.append((h, z))
            if z:
                out.append((h, -z))
    return out


def square_locus_count(H: int) -> int:
    if H < 1:
        raise DomainError("H must be positive")
    return len(square_locus(H))


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


@dataclass(frozen=True)
class MordellPoint:
    x: Fraction
    y: Fraction
    on_curve: bool


def mordell_transform(h1: int, h2: int, h3: int, z: int) -> MordellPoint:
    """(x, y) = (1/h3, z/h3^2) on y^2 = 3 h1 h2 ((h1^3 + h2^3) x^3 + 1)."""
    if h3 == 0:
        raise DomainError("h3 must be nonzero")
    x = Fraction(1, h3)
    y = Fraction(z, h3 * h3)
    on = y * y == 3 * h1 * h2 * ((h1**3 + h2**3) * x**3 + 1)
    return MordellPoint(x, y, on)


def mordell_inverse(h1: int, h2: int, x: Fraction, y: Fraction) -> tuple[int, int, int, int]:
    if x == 0:
        raise DomainError("x = 0 has no preimage")
    h3 = Fraction(1) / x
    z = y * h3 * h3
    if h3.denominator != 1 or z.denominator != 1:
        raise DomainError("point is not the image of an integral (h, z)")
    return (h1, h2, int(h3), int(z))


# ----------------------------------------------------------------- exact identities


def vdc_identity_check(hp: Sequence[int], y: Sequence[int]) -> bool:
    """F0(y + 6h') - F0(y) = 18 Q_{h'}(y + 3h') + 54 F0(h')."""
    lhs = F0([a + 6 * b for a, b in zip(y, hp)]) - F0(y)
    rhs = 18 * Q_form(hp, [a + 3 * b for a, b in zip(y, hp)]) + 54 * F0(hp)
    return lhs == rhs


def vdc_identity_symbolic() -> bool:
    """Both sides of the differencing identity as polynomials (sympy expansion)."""
    import sympy as sp

    h = sp.symbols("h1:4")
    y = sp.symbols("y1:4")
    lhs = sum((y[i] + 6 * h[i]) ** 3 - y[i] ** 3 for i in range(3))
    rhs = 18 * sum(h[i] * (y[i] + 3 * h[i]) ** 2 for i in range(3)) + 54 * sum(t**3 for t in h)
    return sp.expand(lhs - rhs) == 0


@dataclass(frozen=True)
class DifferencingConfig:
    X: int
    theta: float = 10 / 13
    c: float = 0.01

    @property
    def K(self) -> float:
        return self.c * self.X**self.theta

    def H_ranges(self) -> tuple[int, int]:
        """Largest multiples of 6 in [0, cX] and [0, cK]."""
        return (int(self.c * self.X) // 6 * 6, int(self.c * self.K) // 6 * 6)

    def contains(self, d: Sequence[int]) -> bool:
        a, b = self.H_ranges()
        return all(t % 6 == 0 for t in d) and 0 <= d[0] <= a and all(0 <= t <= b for t in d[1:])


def vdc_keypoint_check(config: DifferencingConfig, samples: int, seed: int = 0) -> dict:
    """Sample h in H - H with |h1| >= K and y in [X, (1+c)X]^3; F_h(y) must satisfy |F_h(y)| >= |h1| X^2."""
    rng = random.Random(seed)
    a, b = config.H_ranges()
    X = config.X
    top = int((1 + config.c) * X)
    if a < config.K:
        raise DomainError("no h in H - H reaches |h1| >= K for this configuration")
    violations = []
    done = 0
    while done < samples:
        d1 = [6 * rng.randint(0, a // 6)] + [6 * rng.randint(0, b // 6) for _ in range(2)]
        d2 = [6 * rng.randint(0, a // 6)] + [6 * rng.randint(0, b // 6) for _ in range(2)]
        h = [u - v for u, v in zip(d2, d1)]
        if abs(h[0]) < config.K:
            continue
        # y and y + h must both lie in the box
        lo = [max(X, X - t) for t in h]
        hi = [min(top, top - t) for t in h]
        if any(l > u for l, u in zip(lo, hi)):
            continue
        y = [rng.randint(l, u) for l, u in zip(lo, hi)]
        Fh = F0([s + t for s, t in zip(y, h)]) - F0(y)
        if Fh == 0 or abs(Fh) < abs(h[0]) * X * X:
            violations.append({"h": h, "y": y, "F_h": Fh})
        done += 1
    return {"X": X, "theta": config.theta, "c": config.c, "K": config.K, "samples": done, "violations": violations}


def mahler_check(u: int, v: int) -> bool:
    """(9u^4)^3 + (3uv^3 - 9u^4)^3 + (v^4 - 9u^3 v)^3 = v^12."""
    return (9 * u**4) ** 3 + (3 * u * v**3 - 9 * u**4) ** 3 + (v**4 - 9 * u**3 * v) ** 3 == v**12


# ----------------------------------------------------------------- binary quadratic counts


def binary_quadratic_count(a: int, b: int, t: int, X: int) -> int:
    """#{(u, v) in [-2X, 2X]^2 : a u^2 + b v^2 = t}."""
    if a * b == 0:
        raise DomainError("need a, b nonzero")
    u = np.arange(-2 * X, 2 * X + 1, dtype=np.int64)
    rest = t - a * u * u
    ok = rest % b == 0
    s2 = np.where(ok, rest // b, -1)
    s = _isqrt_vec(s2)
    good = ok & (s2 >= 0) & (s * s == s2) & (s <= 2 * X)
    return int(np.sum(np.where(good, np.where(s == 0, 1, 2), 0)))


def naive_binary_quadratic_count(a: int, b: int, t: int, X: int) -> int:
    r = np.arange(-2 * X, 2 * X + 1, dtype=np.int64)
    U, V = np.meshgrid(r, r, indexing="ij")
    return int(np.sum(a * U * U + b * V * V == t))


# ----------------------------------------------------------------- Dirichlet-arc coverings


def _smooth(q: int, B: float) -> bool:
    return all(p <= B for p, _ in factorize(q).factors) if q > 1 else True


def moduli(Y: int, Q_filter: str | tuple = "all") -> list[int]:
    """q in [Y/2, Y] passing the filter: "all" or ("smooth", B)."""
    qs = [q for q in range(math.ceil(Fraction(Y, 2)), Y + 1) if q >= 1]
    if Q_filter == "all":
        return qs
    if isinstance(Q_filter, (tuple, list)) and Q_filter[0] == "smooth":
        return [q for q in qs if _smooth(q, Q_filter[1])]
    raise DomainError(f"unknown filter {Q_filter!r}")


def _arcs(centers: Iterable[Fraction], radius: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Closed arcs on R/Z, split at 0 into pieces of [0, 1]."""
    out = []
    for c in centers:
        lo, hi = c - radius, c + radius
        if hi - lo >= 1:
            out.append((Fraction(0), Fraction(1)))
        elif lo < 0:
            out += [(lo + 1, Fraction(1)), (Fraction(0), hi)]
        elif hi > 1:
            out += [(lo, Fraction(1)), (Fraction(0), hi - 1)]
        else:
            out.append((lo, hi))
    return out


def _reduced(q: int) -> list[Fraction]:
    return [Fraction(b, q) for b in range(q) if math.gcd(b, q) == 1]


def _merge(intervals: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    out: list[tuple[Fraction, Fraction]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def covering_infimum(Y: int, qs: Sequence[int], A: Fraction) -> int:
    """min over theta in m' of #{(q, b) : q in qs, ||theta - b/q|| <= A / Y^2}, by an exact sweep.

    The multiplicity is piecewise constant between arc endpoints, so it is
    evaluated at every endpoint and at every gap midpoint that lies in m'.
    """
    Yf = Fraction(Y)
    rad = Fraction(A) / (Yf * Yf)
    centers = [c for q in qs for c in _reduced(q)]
    cover = _arcs(centers, rad)
    target = _merge([piece for n in moduli(Y) for piece in _arcs(_reduced(n), 1 / (n * Yf))])
    starts = sorted(a for a, _ in cover)
    ends = sorted(b for _, b in cover)
    tstarts = [a for a, _ in target]

    def in_target(x: Fraction) -> bool:
        i = bisect.bisect_right(tstarts, x) - 1
        return i >= 0 and x <= target[i][1]

    def count_at(x: Fraction) -> int:
        if x == 0:
            # the wrap point: count arcs directly by circular distance
            return sum(1 for c in centers if min(c, 1 - c) <= rad)
        return bisect.bisect_right(starts, x) - bisect.bisect_left(ends, x)

    points = sorted({p for a in cover for p in a} | {p for a in target for p in a} | {Fraction(0), Fraction(1)})
    samples = [p for p in points if p < 1] + [(a + b) / 2 for a, b in zip(points, points[1:])]
    best = None
    for x in samples:
        if in_target(x) or (x == 0 and in_target(Fraction(1))):
            c = count_at(x)
            best = c if best is None else min(best, c)
            if best == 0:
                break
    return best or 0


def jutila_covering_ratio(Y: int, Q_filter: str | tuple = "all", A: float | Fraction = 4) -> StatReport:
    """rho = (A L / Y^2) / inf_{theta in m'} (covering multiplicity)."""
    qs = moduli(Y, Q_filter)
    if not qs:
        raise DomainError("empty modulus set")
    L = sum(euler_phi(q) for q in qs)
    A = Fraction(A).limit_denominator(10**6) if not isinstance(A, Fraction) else A
    inf = covering_infimum(Y, qs, A)
    num = float(A) * L / Y**2
    params = {"Y": Y, "Q_filter": list(Q_filter) if not isinstance(Q_filter, str) else Q_filter, "A": str(A), "L": L}
    notes = [f"infimum {inf}", "asymp read as [Y/2, Y]"]
    if inf == 0:
        notes.append("uncovered point in m': ratio infinite")
        return StatReport("jutila-covering", params, math.inf, 1.0, notes)
    return StatReport("jutila-covering", params, num / inf, 1.0, notes)


# ----------------------------------------------------------------- Weyl sums


def weyl_sum(theta: float | Fraction, X: int, exact: bool = False) -> complex | CyclotomicElement:
    """T(theta) = sum_{|x| <= X} e(theta x^3)."""
    if exact:
        theta = Fraction(theta)
        n, a = theta.denominator, theta.numerator
        x = np.arange(-X, X + 1, dtype=object)
        hist = np.bincount(np.array([(a * t**3) % n for t in x], dtype=np.int64), minlength=n)
        return CyclotomicElement.from_exponents(n, hist)
    if isinstance(theta, Fraction):
        n, a = theta.denominator, theta.numerator
        x = np.arange(-X, X + 1, dtype=np.int64)
        # reduce the phase exactly before going to floating point
        ph = np.array([(a * int(t) ** 3) % n for t in x], dtype=float) / n
    else:
        x = np.arange(-X, X + 1, dtype=float)
        ph = np.mod(theta * x**3, 1.0)
    return complex(np.exp(2j * np.pi * ph).sum())


# ----------------------------------------------------------------- totient search


def phi_divisibility_search(limit: int, d_max: int, multiplier: int) -> tuple[int, int]:
    """(limit - 1, max{n < limit : phi(n) | multiplier * d for some 1 <= d <= d_max})."""
    if limit < 2:
        raise DomainError("limit must be at least 2")
    phi = phi_sieve(limit)
    best = 0
    targets = [multiplier * d for d in range(1, d_max + 1)]
    for n in range(1, limit):
        f = int(phi[n])
        if any(t % f == 0 for t in targets):
            best = n
    return limit - 1, best


def phi_divisibility_oracle(limit: int, d_max: int, multiplier: int) -> tuple[int, int]:
    best = 0
    for n in range(1, limit):
        if any((multiplier * d) % euler_phi(n) == 0 for d in range(1, d_max + 1)):
            best = n
    return limit - 1, best


def check_budget(count: int, limit: int = 10**8) -> None:
    if count > limit:
        raise ResourceLimit(f"{count} exceeds the enumeration budget {limit}")
