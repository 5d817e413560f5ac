"""The smooth delta method for diagonal cubic forms: weights, oscillatory integrals, identity checks.

Conventions. X is the box size, Y = X^(3/2) so that Y^2 = X^3, and

    N_{F,w}(X) = sum_{x in Z^m} w(x/X) 1[F(x) = 0]
               ~ Y^-2 sum_{n >= 1} n^-m sum_{c in Z^m} S_c(n) I_c(n),
    I_c(n)     = int w(x/X) h(n/Y, F(x)/Y^2) e_n(-c.x) dx,   I~_c(n) = X^-m I_c(n).

After the change of variables x = X u every integral lives on the v = F(u)
line: each coordinate pushes eta_i(u) (times any phase) forward under
u -> F_i u^3, the m push-forwards are convolved by FFT on a common grid, and
the result is integrated against h(n/Y, v). For the dual sum the c_i-sums are
done per coordinate before the convolution (the sum over c factorizes once it
is truncated to a box), so the cost is linear in the number of c_i values.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalFailure, ResourceLimit
from .exactnum import euler_phi
from .expsums import expsum, ramanujan_sum
from .forms import DiagonalCubicForm

LATTICE_BUDGET = 5_000_000


# ----------------------------------------------------------------- bumps


def _bump(s: np.ndarray) -> np.ndarray:
    """exp(-1/(1 - s^2)) on |s| < 1, zero elsewhere."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@lru_cache(maxsize=1)
def _omega_constant() -> float:
    val, _ = integrate.quad(lambda u: float(_bump(np.array(4 * u - 3))), 0.5, 1.0, epsabs=0.0, epsrel=1e-12)
    return 1.0 / val


def omega(u) -> np.ndarray:
    """The delta-method bump: supported on [1/2, 1], unit mass."""
    return _omega_constant() * _bump(4 * np.asarray(u, dtype=float) - 3)


def h_weight(x: float, y) -> np.ndarray | float:
    """h(x, y) = sum_{j >= 1} (xj)^-1 [omega(xj) - omega(|y|/(xj))]."""
    if x <= 0:
        raise DomainError("h(x, y) needs x > 0")
    scalar = np.ndim(y) == 0
    ay = np.abs(np.atleast_1d(np.asarray(y, dtype=float)))
    out = np.zeros_like(ay)
    # first family: xj in (1/2, 1); second: xj in (|y|, 2|y|)
    jmax = int(max(1.0, 2.0 * float(ay.max(initial=0.0))) / x) + 1
    for j in range(1, jmax + 1):
        xj = x * j
        if xj < 1:
            out += omega(xj) / xj
        lo, hi = xj / 2, xj  # |y| / (xj) in (1/2, 1)
        sel = (ay > lo) & (ay < hi)
        if sel.any():
            out[sel] -= omega(ay[sel] / xj) / xj
    return float(out[0]) if scalar else out


def h_support_bound(y_max: float) -> float:
    """h(x, y) = 0 for x > max(1, 2 |y|) whenever |y| <= y_max."""
    return max(1.0, 2.0 * y_max)


# ----------------------------------------------------------------- weights and parameters


@dataclass(frozen=True)
class SmoothWeight:
    """w(x) = prod_i eta(x_i), eta an even bump supported on a <= |t| <= b."""

    a: float = 0.5
    b: float = 2.0

    def __post_init__(self):
        if not 0 < self.a < self.b:
            raise DomainError("need 0 < a < b")

    def eta(self, t) -> np.ndarray:
        t = np.abs(np.asarray(t, dtype=float))
        mid, half = (self.a + self.b) / 2, (self.b - self.a) / 2
        return _bump((t - mid) / half)

    def __call__(self, x: Sequence[float]) -> float:
        return float(np.prod(self.eta(np.asarray(x, dtype=float))))

    def mass(self) -> float:
        """int eta over R."""
        val, _ = integrate.quad(lambda t: float(self.eta(t)), self.a, self.b, epsabs=0.0, epsrel=1e-12)
        return 2 * val


@dataclass(frozen=True)
class DeltaParams:
    X: float
    eps0: float = 0.1
    n_mult: float | None = None  # n <= n_mult * Y; None: from the support of h
    c_mult: float = 100.0  # c_i cutoff = ceil(c_mult * max(Y, n) / X)
    pts_per_cycle: float = 6.0
    min_grid: int = 2048

    def __post_init__(self):
        if self.X < 1:
            raise DomainError("X must be at least 1")

    @property
    def Y(self) -> float:
        return self.X**1.5

    @property
    def Z(self) -> float:
        return self.X ** (0.5 + self.eps0)


# ----------------------------------------------------------------- the v-line engine


def _support_max(F: DiagonalCubicForm, w: SmoothWeight) -> float:
    return sum(abs(a) for a in F.coeffs) * w.b**3


@dataclass
class _Grid:
    dv: float
    P: int  # FFT length
    v: np.ndarray  # v-values of the circular grid, index k <-> v = k dv (k taken mod P, centered)


def _density_freq(F: DiagonalCubicForm, w: SmoothWeight) -> float:
    """Frequency scale (in v) that resolves the sharpest coordinate density."""
    return 8.0 / (3 * min(abs(a) for a in F.coeffs) * w.a**2 * (w.b - w.a))


def _make_grid(F: DiagonalCubicForm, w: SmoothWeight, max_freq: float, params: DeltaParams) -> _Grid:
    vmax = _support_max(F, w)
    max_freq = max(max_freq, _density_freq(F, w))
    dv = 1.0 / (params.pts_per_cycle * max_freq)
    need = 2 * int(math.ceil(vmax / dv)) + 8
    P = max(params.min_grid, 1 << (need - 1).bit_length())
    if P > 1 << 22:
        raise ResourceLimit(f"v-grid of {P} points is too large")
    k = np.fft.fftfreq(P, d=1.0 / P)  # 0, 1, ..., -1
    return _Grid(dv, P, k * dv)


def _coordinate_density(Fi: int, w: SmoothWeight, grid: _Grid) -> tuple[np.ndarray, np.ndarray]:
    """(u(v), eta(u) / |dv/du|) on the grid, for v = Fi u^3."""
    u = np.cbrt(grid.v / Fi)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = np.where(u != 0, w.eta(u) / (3 * abs(Fi) * u * u), 0.0)
    return u, dens


def _h_on_grid(r: float, grid: _Grid) -> np.ndarray:
    return h_weight(r, grid.v)


def _h_freq(r: float) -> float:
    """Frequency scale (in v) that resolves h(r, .)."""
    return 8.0 / min(r, 1.0)


def _sum_density_fft(F: DiagonalCubicForm, w: SmoothWeight, grid: _Grid, phases: Sequence[np.ndarray] | None = None):
    """FFT of the density of v = F(u) (times optional per-coordinate phases), including dv^m."""
    out = np.ones(grid.P, dtype=complex)
    for i, Fi in enumerate(F.coeffs):
        u, dens = _coordinate_density(Fi, w, grid)
        f = dens * (phases[i] if phases is not None else 1.0)
        out *= np.fft.fft(f * grid.dv)
    return out


def _pair_with(hvals: np.ndarray, spectrum: np.ndarray) -> complex:
    """sum_v h(v) g(v) where spectrum = FFT(g)."""
    P = len(hvals)
    return complex(np.vdot(np.fft.fft(hvals), spectrum) / P)


def real_density(F: DiagonalCubicForm, w: SmoothWeight, method: str = "fourier", params: DeltaParams | None = None) -> float:
    """sigma_{infinity, w}: the density of F(u) at 0 under w(u) du."""
    if method == "fourier":
        return _real_density_fourier(F, w)
    if method == "slab":
        return _real_density_slab(F, w, params or DeltaParams(X=1.0))
    raise DomainError(f"unknown method {method!r}")


def _J0(Fi: int, w: SmoothWeight, t: np.ndarray, nodes: int = 400) -> np.ndarray:
    """J(t) = int eta(x) e(t Fi x^3) dx by Gauss-Legendre on [a, b] (both signs)."""
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    x = w.a + (xs + 1) * (w.b - w.a) / 2
    wt = ws * (w.b - w.a) / 2 * w.eta(x)
    # eta is even: the negative half contributes the conjugate phase
    return 2 * np.cos(2 * np.pi * np.outer(t, Fi * x**3)) @ wt


def _real_density_fourier(F: DiagonalCubicForm, w: SmoothWeight, tol: float = 1e-13) -> float:
    def integrand(t):
        return float(np.prod([_J0(Fi, w, np.array([t]))[0] for Fi in F.coeffs]))

    # find a t cutoff beyond which the product is negligible
    T = 1.0
    scale = abs(integrand(0.0))
    while T < 1e4 and max(abs(integrand(T * s)) for s in (1.0, 1.1, 1.3, 1.6, 2.0)) > tol * max(scale, 1e-300):
        T *= 2
    ts = np.linspace(0.0, 2 * T, 20001)
    vals = np.prod([_J0(Fi, w, ts) for Fi in F.coeffs], axis=0)
    # smooth, rapidly decaying integrand: composite Simpson on [0, 2T], doubled by evenness
    return float(2 * integrate.simpson(vals, x=ts))


def _real_density_slab(F: DiagonalCubicForm, w: SmoothWeight, params: DeltaParams, eps: Sequence[float] = (1e-2, 1e-3)) -> float:
    """(2 eps)^-1 int_{|F| <= eps} w, on the v-grid, Richardson-extrapolated in eps^2."""
    vmax = _support_max(F, w)
    max_freq = 40.0 / min(eps) + 2.0 / w.a
    grid = _make_grid(F, w, max_freq / 4, params)
    spec = _sum_density_fft(F, w, grid)
    dens = np.real(np.fft.ifft(spec)) / grid.dv  # density of F(u) at grid.v
    vals = []
    for e in eps:
        sel = np.abs(grid.v) <= e
        wts = np.where(np.isclose(np.abs(grid.v), e, atol=grid.dv / 2), 0.5, 1.0)[sel]
        vals.append(float(np.sum(dens[sel] * wts) * grid.dv / (2 * e)))
    # sigma(eps) = sigma + A eps^2 + O(eps^4)
    e1, e2 = eps[0], eps[1]
    s1, s2 = vals
    _ = vmax
    return (s2 * e1**2 - s1 * e2**2) / (e1**2 - e2**2)


def integral_Ic(F: DiagonalCubicForm, w: SmoothWeight, params: DeltaParams, c: Sequence[int], n: int) -> float:
    """I~_c(n) = int w(u) h(n/Y, F(u)) e(-(X/n) c.u) du."""
    c = F.check_pair(c)
    if n < 1:
        raise DomainError("n must be positive")
    r = n / params.Y
    xi = [ci * params.X / n for ci in c]
    phase_freq = max((abs(x) / (3 * abs(Fi) * w.a**2) for x, Fi in zip(xi, F.coeffs)), default=0.0)
    out = []
    for ppc in (params.pts_per_cycle, 2 * params.pts_per_cycle):
        p2 = DeltaParams(params.X, params.eps0, params.n_mult, params.c_mult, ppc, params.min_grid)
        grid = _make_grid(F, w, max(phase_freq, _h_freq(r)), p2)
        phases = []
        for Fi, x in zip(F.coeffs, xi):
            u = np.cbrt(grid.v / Fi)
            phases.append(np.exp(-2j * np.pi * x * u))
        spec = _sum_density_fft(F, w, grid, phases)
        out.append(_pair_with(_h_on_grid(r, grid), spec))
    val, check = out[1], out[0]
    # spectral convergence: the coarse-vs-fine gap bounds the fine error by orders of magnitude
    if abs(val - check) > 1e-3 * abs(val) + 1e-12:
        raise NumericalFailure(f"I~_c(n) quadrature did not converge: {check} vs {val}")
    return float(val.real)


# ----------------------------------------------------------------- lattice side


def _axis_points(w: SmoothWeight, X: float) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(math.ceil(w.a * X), math.floor(w.b * X) + 1)
    k = np.concatenate([-k[::-1], k])
    wt = w.eta(k / X)
    keep = wt > 0
    return k[keep], wt[keep]


def brute_force_count(F: DiagonalCubicForm, w: SmoothWeight, X: float, method: str = "split") -> float:
    """N_{F,w}(X) by lattice enumeration over the support of w(x/X)."""
    pts, wts = _axis_points(w, X)
    if len(pts) ** F.m > LATTICE_BUDGET and method == "direct":
        raise ResourceLimit("lattice budget exceeded")
    if method == "direct":
        total = []
        for idx in itertools.product(range(len(pts)), repeat=F.m):
            x = [int(pts[i]) for i in idx]
            if F(x) == 0:
                total.append(float(np.prod([wts[i] for i in idx])))
        return math.fsum(sorted(total))
    if method != "split":
        raise DomainError(f"unknown method {method!r}")
    # meet in the middle: first half values against minus second half values
    h = F.m // 2
    cubes = pts.astype(object) ** 3

    def half(coeffs):
        acc: dict[int, list[float]] = {}
        for idx in itertools.product(range(len(pts)), repeat=len(coeffs)):
            val = sum(a * cubes[i] for a, i in zip(coeffs, idx))
            acc.setdefault(int(val), []).append(float(np.prod([wts[i] for i in idx])))
        return {k: math.fsum(v) for k, v in acc.items()}

    left, right = half(F.coeffs[:h]), half(F.coeffs[h:])
    return math.fsum(sorted(wl * right[-k] for k, wl in left.items() if -k in right))


def primal_term(F: DiagonalCubicForm, w: SmoothWeight, params: DeltaParams, n: int) -> float:
    """sum_x w(x/X) c_n(F(x)) h(n/Y, F(x)/Y^2): the n-th term before Poisson summation."""
    pts, wts = _axis_points(w, params.X)
    grids = np.meshgrid(*([pts] * F.m), indexing="ij")
    Fx = sum(int(a) * g.astype(np.int64) ** 3 for a, g in zip(F.coeffs, grids)).ravel()
    W = np.ones_like(Fx, dtype=float)
    for g in np.meshgrid(*([wts] * F.m), indexing="ij"):
        W = W * g.ravel()
    r = n / params.Y
    hv = h_weight(r, Fx / params.Y**2)
    cn = np.array([ramanujan_sum(n, int(t)) for t in Fx], dtype=float)
    return math.fsum((W * cn * hv).tolist())


# ----------------------------------------------------------------- dual side


def _dirichlet_kernel(theta: np.ndarray, C: int) -> np.ndarray:
    """sum_{|c| <= C} e(c theta)."""
    s = np.sin(np.pi * theta)
    k = 2 * C + 1
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(k * np.pi * theta) / s
    near = np.abs(s) < 1e-9
    out[near] = k * np.cos(k * np.pi * theta[near]) / np.cos(np.pi * theta[near])
    return out


def dual_term(F: DiagonalCubicForm, w: SmoothWeight, params: DeltaParams, n: int, C: int | None = None) -> float:
    """X^m sum_{|c_i| <= C} S_c(n) I~_c(n), by per-coordinate c-sums and FFT convolution."""
    X, Y = params.X, params.Y
    r = n / Y
    if C is None:
        C = c_cutoff(params, n)
    # K_b(u) = sum_{|c| <= C} g(b, c; n) e(-c X u / n) = sum_x e_n(b x^3) D_C((x - X u)/n)
    freq_u = C * X / n
    max_freq = max(freq_u / (3 * min(abs(a) for a in F.coeffs) * w.a**2), _h_freq(r))
    grid = _make_grid(F, w, max_freq, params)
    hhat = np.fft.fft(_h_on_grid(r, grid))
    units = [a for a in range(1, n + 1) if math.gcd(a, n) == 1] if n > 1 else [1]
    x = np.arange(n)
    # coordinates with equal F_i share their spectra
    spectra: dict[tuple[int, int], np.ndarray] = {}
    for Fi in sorted(set(F.coeffs)):
        u, dens = _coordinate_density(Fi, w, grid)
        live = dens != 0
        theta = (x[None, :] - X * u[live][:, None]) / n
        D = _dirichlet_kernel(theta, C)  # (points, x)
        bs = sorted({(a * Fi) % n for a in units})
        E = np.exp(2j * np.pi * ((np.outer(x**3 % n, bs)) % n) / n)  # (x, b)
        K = D @ E  # (points, b)
        for j, b in enumerate(bs):
            f = np.zeros(grid.P, dtype=complex)
            f[live] = dens[live] * K[:, j] * grid.dv
            spectra[(Fi, b)] = np.fft.fft(f)
    total = np.zeros(grid.P, dtype=complex)
    for a in units:
        prod = np.ones(grid.P, dtype=complex)
        for Fi in F.coeffs:
            prod = prod * spectra[(Fi, (a * Fi) % n)]
        total += prod
    val = np.vdot(hhat, total) / grid.P
    return float(val.real) * X**F.m


def c_cutoff(params: DeltaParams, n: int) -> int:
    return int(math.ceil(params.c_mult * max(params.Y, n) / params.X))


def n_cutoff(F: DiagonalCubicForm, w: SmoothWeight, params: DeltaParams) -> int:
    mult = params.n_mult if params.n_mult is not None else h_support_bound(_support_max(F, w))
    return int(math.floor(mult * params.Y))


def c_normalizer(Y: float) -> float:
    """c_Q from the k = 0 case of the delta identity: 1 = c_Q Q^-2 sum_q phi(q) h(q/Q, 0)."""
    total = math.fsum(euler_phi(q) * h_weight(q / Y, 0.0) for q in range(1, int(Y) + 1))
    if total == 0:
        raise DomainError(f"Y = {Y} is too small: every h(q/Y, 0) vanishes, so c_Q is undefined")
    return Y**2 / total


@dataclass
class DeltaIdentityReport:
    F: tuple[int, ...]
    weight: tuple[float, float]
    X: float
    Y: float
    lhs: float
    rhs: float
    rel_error: float
    c_Q: float
    n_max: int
    per_n: list[dict] = dc_field(default_factory=list)
    c_tail_rel: float | None = None
    n_tail: float = 0.0

    @property
    def rel_error_normalized(self) -> float:
        """Relative error once the right side carries the normalizer c_Q."""
        return abs(self.c_Q * self.rhs - self.lhs) / abs(self.lhs) if self.lhs else abs(self.c_Q * self.rhs)

    def to_json(self) -> dict:
        return {
            "params": {"F": list(self.F), "weight": list(self.weight), "X": self.X, "Y": self.Y},
            "lhs": self.lhs,
            "rhs": self.rhs,
            "rel_error": self.rel_error,
            "c_Q": self.c_Q,
            "rel_error_normalized": self.rel_error_normalized,
            "n_max": self.n_max,
            "c_tail_rel": self.c_tail_rel,
            "n_tail": self.n_tail,
            "per_n": self.per_n,
        }


def delta_identity_report(
    F: DiagonalCubicForm, w: SmoothWeight, params: DeltaParams, check_tail: bool = True, with_primal: bool = False
) -> DeltaIdentityReport:
    """Both sides of the delta-method identity at one X."""
    if F.m != 4:
        # allowed, but the dual sum costs grow quickly with m
        pass
    X, Y = params.X, params.Y
    lhs = brute_force_count(F, w, X)
    n_max = n_cutoff(F, w, params)
    per_n = []
    terms = []
    tail_terms = []
    for n in range(1, n_max + 1):
        C = c_cutoff(params, n)
        d = dual_term(F, w, params, n, C) / n**F.m
        rec = {"n": n, "C": C, "term": d / Y**2}
        if check_tail:
            d2 = dual_term(F, w, params, n, 2 * C) / n**F.m
            rec["tail"] = (d2 - d) / Y**2
            tail_terms.append(d2 - d)
        if with_primal:
            rec["primal"] = primal_term(F, w, params, n) / Y**2
        per_n.append(rec)
        terms.append(d)
    rhs = math.fsum(terms) / Y**2
    # beyond the h-support every term vanishes identically
    n_tail = abs(primal_term(F, w, params, n_max + 1)) / Y**2
    c_tail = abs(math.fsum(tail_terms)) / Y**2 / abs(rhs) if check_tail and rhs else None
    rel = abs(rhs - lhs) / abs(lhs) if lhs else abs(rhs)
    return DeltaIdentityReport(F.coeffs, (w.a, w.b), X, Y, lhs, rhs, rel, c_normalizer(Y), n_max, per_n, c_tail, n_tail)


# ----------------------------------------------------------------- singular series


@dataclass
class SingularSeriesReport:
    m: int
    partial: dict[int, Fraction]
    increments: dict[int, float]
    slope: float | None

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "partial": {str(k): float(v) for k, v in self.partial.items()},
            "partial_exact": {str(k): str(v) for k, v in self.partial.items()},
            "dyadic_increments": {str(k): v for k, v in self.increments.items()},
            "tail_slope": self.slope,
        }


def singular_series(F: DiagonalCubicForm, N_max: int) -> SingularSeriesReport:
    """Partial sums of sum_n n^-m S_0(n) at N = 1, 2, 4, ..., N_max (exact)."""
    if F.m < 4:
        raise DomainError("singular series needs m >= 4")
    zero = (0,) * F.m
    acc = Fraction(0)
    partial: dict[int, Fraction] = {}
    terms = []
    N = 1
    for n in range(1, N_max + 1):
        t = Fraction(expsum(F, zero, n).value, n**F.m)
        acc += t
        if t:
            terms.append((n, abs(float(t))))
        if n == N:
            partial[N] = acc
            N *= 2
    if N_max not in partial:
        partial[N_max] = acc
    keys = sorted(partial)
    increments = {a: abs(float(partial[b] - partial[a])) for a, b in zip(keys, keys[1:])}
    slope = None
    tail = [(n, t) for n, t in terms if n >= max(2, N_max // 8)]
    if len(tail) >= 3:
        ln = np.log([n for n, _ in tail])
        lt = np.log([t for _, t in tail])
        slope = float(np.polyfit(ln, lt, 1)[0])
    return SingularSeriesReport(F.m, partial, increments, slope)
