"""Invariant batteries behind ``artifact selftest``."""
from __future__ import annotations

import random
import math
import time
from fractions import Fraction

from .errors import ArtifactError, ResourceLimit
from .parallel import pmap

P5_REFERENCE = (1, 0, 9, 0, 20, 0, 100, 0, 1125, 0, 3125)
DISC_REFERENCE = 3**13 * 996001 * 1898591 * 107541241 * 1722583559


def check_disc() -> str:
    from .forms import DiagonalCubicForm, disc_delta, e_exponent

    F6 = DiagonalCubicForm.fermat(6)
    assert disc_delta(F6, (1, 2, 3, 4, 5, 6), norm="appendix-code") == DISC_REFERENCE
    assert [e_exponent(m) for m in (3, 4, 5, 6)] == [3, 9, 27, 69]
    for m in (4, 5):
        F = DiagonalCubicForm.fermat(m)
        e_last = (0,) * (m - 1) + (1,)
        assert disc_delta(F, e_last) == 3 ** e_exponent(m)
    return "discriminant anchors"


def check_expsums() -> str:
    from math import gcd

    from .expsums import brute_force_expsum, count_hypersurface, count_section, expsum
    from .forms import DiagonalCubicForm

    rng = random.Random(1)
    for m in (4, 6):
        F = DiagonalCubicForm.fermat(m)
        for _ in range(3):
            c = tuple(rng.randint(-9, 9) or 1 for _ in range(m))
            for n1 in range(2, 8):
                for n2 in range(2, 8):
                    if gcd(n1, n2) == 1:
                        assert expsum(F, c, n1 * n2).value == expsum(F, c, n1).value * expsum(F, c, n2).value
            for p in (5, 7, 11):
                if all(ci % p for ci in c):
                    cs = count_section(F, c, p)
                    ch = count_hypersurface(F, p)
                    assert expsum(F, c, p).value == p * p * cs.E_c - p * ch.E
    F4 = DiagonalCubicForm.fermat(4)
    for _ in range(5):
        c = tuple(rng.randint(-5, 5) for _ in range(4))
        for n in range(1, 8):
            assert expsum(F4, c, n).value == brute_force_expsum(F4, c, n)
    return "exponential-sum identities"


def check_zeta_fast() -> str:
    from .forms import DiagonalCubicForm
    from .zeta import frobenius_charpoly

    d = frobenius_charpoly(DiagonalCubicForm.fermat(6), (1, 2, 3, 4, 5, 6), 7, depth=2)
    assert d.charpoly.coeffs[:3] == (1, 17, 147)
    return "zeta low-order coefficients at p = 7"


def check_zeta_full() -> str:
    from .forms import DiagonalCubicForm
    from .zeta import frobenius_charpoly, predict_count, count_section_ext, weil_report

    F = DiagonalCubicForm.fermat(6)
    d = frobenius_charpoly(F, (1, 2, 3, 4, 5, 6), 5, depth=5)
    assert tuple(d.charpoly.coeffs) == P5_REFERENCE
    w = weil_report(d)
    assert w["fe_residual"] == 0 and w["max_modulus_deviation"] < 1e-9
    assert predict_count(d, 6) == count_section_ext(F, (1, 2, 3, 4, 5, 6), 5, 6)
    return "zeta reproduction at p = 5"


def check_dirichlet() -> str:
    from .dirichlet import delta_sequence, dirichlet_convolve, restriction_identity_check, sequences
    from .forms import DiagonalCubicForm

    for F, c in ((DiagonalCubicForm((1, 2, 3, 5)), (1, 2, 3, 5)), (DiagonalCubicForm.fermat(6), (1, 2, 3, 4, 5, 6))):
        for choice in (1, 2, 3):
            fam = sequences(choice, F, c, 100)
            assert dirichlet_convolve(fam.a, fam.b).num == delta_sequence(100, fam.b.half).num
            assert dirichlet_convolve(fam.a_prime, fam.b).num == fam.S.num
    F = DiagonalCubicForm((1, 2, 3, 5))
    for d in (1, 4, 12):
        assert restriction_identity_check(F, (1, 2, 3, 5), d, 60).ok
    return "Dirichlet framework"


def check_lab() -> str:
    from .lab import (
        binary_quadratic_count,
        mahler_check,
        naive_binary_quadratic_count,
        naive_ternary_count,
        phi_divisibility_search,
        ternary_count,
        vdc_identity_check,
        vdc_identity_symbolic,
    )

    rng = random.Random(2)
    for _ in range(2000):
        assert mahler_check(rng.randint(-10**4, 10**4), rng.randint(-10**4, 10**4))
        assert vdc_identity_check([rng.randint(-50, 50) for _ in range(3)], [rng.randint(-50, 50) for _ in range(3)])
    assert vdc_identity_symbolic()
    for _ in range(20):
        h = [rng.randint(-5, 5) for _ in range(3)]
        k, X = rng.randint(-200, 200), rng.randint(1, 12)
        assert ternary_count(h, k, X) == naive_ternary_count(h, k, X)
        a, b, t = rng.randint(1, 5), rng.choice([-5, -4, -3, -2, -1, 1, 2, 3, 4, 5]), rng.randint(-30, 30)
        assert binary_quadratic_count(a, b, t, 15) == naive_binary_quadratic_count(a, b, t, 15)
    assert phi_divisibility_search(2 * 100**2, 9, 10) == (19999, 330)
    return "lab identities"


def check_delta_full() -> str:
    from .delta import SmoothWeight, real_density, singular_series
    from .expsums import expsum
    from .forms import DiagonalCubicForm

    F = DiagonalCubicForm((1, 1, -1, -1))
    w = SmoothWeight(0.3, 1.0)
    a, b = real_density(F, w, "fourier"), real_density(F, w, "slab")
    assert abs(a - b) <= 5e-3 * abs(a)
    rep = singular_series(DiagonalCubicForm.fermat(7), 256)
    assert rep.partial[1] == 1
    # n = 9: the cubic Gauss sum mod 9 is 3 + 6 cos(2 pi a / 9)
    t9 = sum((3 + 6 * math.cos(2 * math.pi * a / 9)) ** 7 for a in (1, 2, 4, 5, 7, 8)) / 9**7
    assert abs(float(expsum(DiagonalCubicForm.fermat(7), (0,) * 7, 9).value) / 9**7 - t9) < 1e-12
    assert max(rep.increments[N] for N in (64, 128)) < 0.03
    return "real density and singular series"


FAST = (check_disc, check_expsums, check_zeta_fast, check_dirichlet, check_lab)
FULL = FAST + (check_zeta_full, check_delta_full)


def _run_one(check) -> dict:
    t0 = time.perf_counter()
    try:
        name = check()
        return {"check": check.__name__, "ok": True, "what": name, "seconds": time.perf_counter() - t0}
    except ResourceLimit as exc:
        return {"check": check.__name__, "ok": False, "resource_limit": True, "error": str(exc)}
    except (AssertionError, ArtifactError) as exc:
        return {"check": check.__name__, "ok": False, "error": f"{type(exc).__name__}: {exc}"}


def run_selftest(level: str = "fast") -> dict:
    checks = FAST if level == "fast" else FULL
    results = pmap(_run_one, checks)
    return {"level": level, "ok": all(r["ok"] for r in results), "checks": results}
