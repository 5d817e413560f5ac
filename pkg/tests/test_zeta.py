import itertools
import math
from fractions import Fraction

import pytest

from artifact.errors import BadPrime, DomainError
from artifact.exactnum import HalfPower, IntPolynomial
from artifact.expsums import count_hypersurface, count_section, expsum
from artifact.forms import DiagonalCubicForm, dim_middle
from artifact.zeta import (
    SectionZetaData,
    charpoly_factor,
    count_section_ext,
    fe_residual,
    frobenius_charpoly,
    local_factor_coeffs,
    predict_count,
    weil_report,
)

F6 = DiagonalCubicForm.fermat(6)
C6 = (1, 2, 3, 4, 5, 6)

P = {
    5: (1, 0, 9, 0, 20, 0, 100, 0, 1125, 0, 3125),
    7: (1, 17, 147, 828, 3354, 10182, 23478, 40572, 50421, 40817, 16807),
    11: (1, 1, 3, 20, 49, 14, 539, 2420, 3993, 14641, 161051),
    13: (1, 19, 197, 1388, 7286, 29666, 94718, 234572, 432809, 542659, 371293),
}


def test_dim_middle():
    assert [dim_middle(m) for m in (4, 5, 6)] == [2, 6, 10]


def test_p5_full_depth():
    d = frobenius_charpoly(F6, C6, 5, depth=5)
    assert d.complete and d.charpoly.coeffs == P[5]
    assert [(str(f), e) for f, e in charpoly_factor(d)] == [("5*t^2 + 1", 1), ("625*t^8 + 100*t^6 + 4*t^2 + 1", 1)]


@pytest.mark.parametrize("p", [7, 11, 13])
def test_partial_depth_three(p):
    d = frobenius_charpoly(F6, C6, p, depth=3)
    assert not d.complete
    assert d.charpoly.coeffs == P[p][:4]


@pytest.mark.parametrize("p", [7, 11, 13])
def test_full_depth_larger_primes(p):
    d = frobenius_charpoly(F6, C6, p, depth=5)
    assert d.charpoly.coeffs == P[p]


def test_published_factorizations():
    f7 = {str(f): e for f, e in charpoly_factor(frobenius_charpoly(F6, C6, 7, depth=5))}
    assert f7 == {"7*t^2 + t + 1": 1, "7*t^2 + 4*t + 1": 4}
    f13 = {str(f): e for f, e in charpoly_factor(frobenius_charpoly(F6, C6, 13, depth=5))}
    assert f13 == {"13*t^2 + 1": 1, "13*t^2 + 7*t + 1": 1, "13*t^2 + 4*t + 1": 3}


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_weil_and_functional_equation(p):
    d = frobenius_charpoly(F6, C6, p, depth=5)
    rep = weil_report(d)
    assert rep["max_modulus_deviation"] < 1e-9
    assert rep["fe_residual"] == 0


def test_corrupted_polynomial_flagged():
    bad = list(P[7])
    bad[9] += 1
    assert fe_residual(IntPolynomial(bad), 7, 10) != 0


def test_prediction_of_sixth_count():
    d = frobenius_charpoly(F6, C6, 5, depth=5)
    assert predict_count(d, 6) == count_section_ext(F6, C6, 5, 6)


def test_overdetermined_depth_checks_functional_equation():
    d = frobenius_charpoly(F6, C6, 5, depth=6)
    assert d.charpoly.coeffs == P[5]
    assert any("verified" in note for note in d.notes)


def test_m4_section_is_elliptic_curve():
    F = DiagonalCubicForm((1, 2, -3, 5))
    c = (1, 1, 1, 1)
    for p in (7, 11, 13):
        d = frobenius_charpoly(F, c, p)
        assert d.degree == 2 and d.complete
        a_p = p + 1 - count_section_ext(F, c, p, 1)
        assert d.charpoly.coeffs == (1, -a_p, p)
        assert weil_report(d)["max_modulus_deviation"] < 1e-9


def test_coordinate_section_counts():
    F4 = DiagonalCubicForm.fermat(4)
    for p in (5, 7):
        assert count_section_ext(F4, (0, 0, 0, 1), p, 2) == count_hypersurface(DiagonalCubicForm.fermat(3), p * p).rho


@pytest.mark.parametrize("p,r", [(5, 1), (5, 2), (7, 1), (7, 2), (11, 2)])
def test_count_methods_agree(p, r):
    F = DiagonalCubicForm((1, 2, -1, 3, 1, 1))
    c = (1, 2, 3, 4, 5, 6)
    counts = {count_section_ext(F, c, p, r, method=mth) for mth in ("character", "pivot", "convolution")}
    assert len(counts) == 1
    pivots = {count_section_ext(F, c, p, r, method="pivot", pivot=i) for i in (0, 2)}
    assert pivots == counts


def test_counts_match_naive_enumeration():
    F = DiagonalCubicForm((1, 2, -1, 3))
    c = (1, 3, 2, 1)
    for p in (5, 7):
        assert count_section_ext(F, c, p, 1) == count_section(F, c, p).rho_c


def test_local_factor_coefficients():
    d = frobenius_charpoly(F6, C6, 5, depth=5)
    lam = local_factor_coeffs(d, 3)
    assert lam.values[0] == HalfPower(Fraction(1), 5, 0)
    assert lam.values[1].coef == 0
    d7 = frobenius_charpoly(F6, C6, 7, depth=5)
    lam7 = local_factor_coeffs(d7, 2)
    assert float(lam7.values[1]) == pytest.approx(-17 / math.sqrt(7))
    # lambda~(p) = (-1)^{m*} E~_c(p)
    E = count_section(F6, C6, 7).E_c_tilde
    assert lam7.values[1] == HalfPower(E.coef * (-1) ** F6.m_star, 7, E.twice_exp)


def test_good_reduction_consistency():
    for p in (5, 7, 11, 13):
        d = frobenius_charpoly(F6, C6, p, depth=1)
        # the t-coefficient is -trace / p and E_c(p) = (-1)^{m*} trace with m* = 3
        E_c = d.charpoly[1] * p
        S = expsum(F6, C6, p).value
        E = count_hypersurface(F6, p).E
        assert S == p * p * E_c - p * E


def test_bad_primes_rejected():
    with pytest.raises(BadPrime):
        frobenius_charpoly(F6, C6, 3)
    with pytest.raises(BadPrime):
        count_section_ext(F6, (5, 10, 15, 20, 25, 30), 5, 1)
    with pytest.raises(DomainError):
        frobenius_charpoly(DiagonalCubicForm.fermat(5), (1, 2, 3, 4, 5), 7)
