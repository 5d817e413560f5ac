import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from artifact.dirichlet import (
    CoefficientSequence,
    DeletedBox,
    bad_modulus,
    delta_sequence,
    dirichlet_convolve,
    dirichlet_inverse,
    dyadic_moment_stat,
    full_box,
    gamma_matrix,
    large_sieve_norm,
    multiplicative_sequence,
    reports_to_csv,
    restriction_identity_check,
    second_moment_stat,
    second_moment_trend,
    sequence_b,
    sequence_S,
    sequences,
    smooth_points,
)
from artifact.errors import DataUnavailable, DomainError, SingularSection
from artifact.exactnum import SurdSum, factorize, mobius
from artifact.expsums import count_hypersurface, expsum
from artifact.forms import DiagonalCubicForm, disc_delta

F4 = DiagonalCubicForm.fermat(4)
F6 = DiagonalCubicForm.fermat(6)
C6 = (1, 2, 3, 4, 5, 6)


def test_mobius_inversion():
    ones = CoefficientSequence([1] * 100, False, "ones")
    mu = dirichlet_inverse(ones)
    assert list(mu.num) == [mobius(n) for n in range(1, 101)]
    assert dirichlet_convolve(ones, mu).num == delta_sequence(100, False).num
    with pytest.raises(DomainError):
        dirichlet_inverse(CoefficientSequence([2, 1], False))


def test_half_type_mismatch_rejected():
    with pytest.raises(DomainError):
        dirichlet_convolve(delta_sequence(5, True), delta_sequence(5, False))


def test_sequence_values_are_normalized_sums():
    S = sequence_S(F4, (1, 2, 3, 5), 30)
    for n in range(1, 31):
        assert float(S.value(n)) == pytest.approx(expsum(F4, (1, 2, 3, 5), n).value / n**2.5, abs=1e-15)
    assert S[1] == 1


@pytest.mark.parametrize("choice", [1, 2, 3])
@pytest.mark.parametrize("F,c", [(DiagonalCubicForm((1, 2, 3, 5)), (1, 2, 3, 5)), (F6, C6), (DiagonalCubicForm((1, -2, 3, 5)), (2, 1, -1, 3))])
def test_inverse_and_factorization_identities(choice, F, c):
    fam = sequences(choice, F, c, 200)
    assert fam.b[1] == fam.a[1] == fam.a_prime[1] == 1
    assert dirichlet_convolve(fam.a, fam.b).num == delta_sequence(200, fam.b.half).num
    assert dirichlet_convolve(fam.a_prime, fam.b).num == fam.S.num


def test_choice1_is_S():
    fam = sequences(1, F4, (1, 2, 3, 5), 60)
    assert fam.b.num == fam.S.num
    assert fam.a_prime.num == delta_sequence(60, True).num


def test_choice2_structure():
    c = (1, 2, 3, 5)
    F = DiagonalCubicForm((1, 2, 3, 5))
    fam = sequences(2, F, c, 200)
    D = bad_modulus(F, c)
    bad = {p for p, _ in factorize(D).factors}
    for n in range(1, 201):
        primes = {p for p, _ in factorize(n).factors} if n > 1 else set()
        if primes & bad:
            assert fam.b[n] == 0
        if not primes <= bad:
            assert fam.a_prime[n] == 0  # a' is supported on n | D^infinity
    for p in (7, 11, 13, 17, 19, 23, 29, 31):
        if D % p:
            assert fam.a_prime[p] == 0


def test_choice3_anchor_and_a_prime_at_primes():
    fam = sequences(3, F6, C6, 40)
    assert fam.b[5] == 0
    for p in (7, 11, 13, 17, 19, 23, 29, 31):
        E = count_hypersurface(F6, p).E
        # a'(p) = -p^{-1/2} E~(p) with E~(p) = E(p) p^{-(m-2)/2}; numerator over p^{-1/2}
        assert fam.a_prime[p] == Fraction(-E, p ** ((F6.m - 2) // 2))


def test_choice3_unavailable_for_odd_m():
    with pytest.raises(DataUnavailable):
        sequence_b(3, DiagonalCubicForm.fermat(5), (1, 2, 3, 4, 5), 10)


def test_singular_section_rejected():
    with pytest.raises(SingularSection):
        sequence_b(2, F4, (1, 1, 1, 1), 10)


def test_a_prime_multiplicative():
    for choice in (2, 3):
        fam = sequences(choice, F6, C6, 200)
        for n1 in range(2, 201):
            for n2 in range(2, 200 // n1 + 1):
                if math.gcd(n1, n2) == 1:
                    assert fam.a_prime[n1 * n2] == fam.a_prime[n1] * fam.a_prime[n2]


@pytest.mark.parametrize("d", [1, 4, 12])
def test_restriction_identities(d):
    rng = random.Random(9)
    F = DiagonalCubicForm((1, 2, 3, 5))
    done = 0
    while done < 3:
        c = tuple(rng.randint(-6, 6) for _ in range(4))
        if disc_delta(F, c) == 0:
            continue
        assert restriction_identity_check(F, c, d, 150).ok
        done += 1


def test_restriction_identity_detects_corruption(monkeypatch):
    import artifact.dirichlet as dmod

    real = dmod.sequences

    def corrupted(choice, F, c, N):
        fam = real(choice, F, c, N)
        num = list(fam.b.num)
        num[6] += 1
        b = CoefficientSequence(num, fam.b.half, "b")
        return dmod.SequenceFamily(fam.S, b, fam.a, fam.a_prime)

    monkeypatch.setattr(dmod, "sequences", corrupted)
    res = restriction_identity_check(DiagonalCubicForm((1, 2, 3, 5)), (1, 2, 3, 5), 1, 30)
    assert not res.ok and res.first_failure == 7


def test_deleted_box():
    box = DeletedBox((0, 2), 2, 4)
    pts = list(box)
    assert len(pts) == len(box) == 16
    assert all(c[1] == 0 and c[3] == 0 and c[0] and c[2] for c in pts)


# ----------------------------------------------------------------- statistics


def b_choice2_float(F, c, n):
    if math.gcd(n, bad_modulus(F, c)) != 1:
        return 0.0
    return expsum(F, c, n).value / n ** ((F.m + 1) / 2)


def test_second_moment_fixture_and_oracle():
    rep = second_moment_stat(F4, 2, 8, 4, (2, 8))
    assert rep.value == SurdSum({1: Fraction(15488, 35), 35: Fraction(192, 35)})
    assert rep.baseline == 64.0
    oracle = 0.0
    for c in full_box(4, 2):
        if disc_delta(F4, c):
            oracle += sum(b_choice2_float(F4, c, n) for n in range(2, 9)) ** 2
    assert rep.value_float == pytest.approx(oracle, rel=1e-12)
    assert rep.ratio == pytest.approx(rep.value_float / 64)


def test_second_moment_empty_interval():
    assert second_moment_stat(F4, 1, 8, 4, (5, 4)).value_float == 0.0
    with pytest.raises(DomainError):
        second_moment_stat(F4, 1, 8, 4, (1, 8))


def test_second_moment_trend_report():
    rep = second_moment_trend(F4, 2, 8, 4)
    assert rep["window_ends"] == list(range(2, 9))
    assert len(rep["values"]) == 7 and isinstance(rep["nondecreasing"], bool)
    # the full window's best subinterval is at least the plain interval sum
    assert rep["values"][-1] >= second_moment_stat(F4, 2, 8, 4, (2, 8)).value_float - 1e-9


def test_large_sieve_fixture_and_svd_oracle():
    rep = large_sieve_norm(F4, 3, 10)
    M = gamma_matrix(F4, 3, 10, "sqfree-a")
    sv = np.linalg.svd(M, compute_uv=False)[0] ** 2
    assert rep.value_float == pytest.approx(sv, rel=1e-9)
    assert rep.value_float == pytest.approx(2824.9259585563573, rel=1e-12)
    assert np.all(M[:, [3, 7, 8]] == 0)  # n = 4, 8, 9 are not square-free


def test_large_sieve_single_column():
    rep = large_sieve_norm(F4, 2, 1)
    assert rep.value_float == pytest.approx(len(smooth_points(F4, full_box(4, 2))))


def test_dyadic_fixtures():
    box = DeletedBox((0, 1, 2, 3), 2, 4)
    rep = dyadic_moment_stat("abs-a'", F4, box, 2)
    assert rep.value == SurdSum({1: Fraction(496)})
    oracle = 0.0
    for c in box:
        if disc_delta(F4, c):
            fam = sequences(2, F4, c, 3)
            oracle += (abs(fam.a_prime.floats()[1]) + abs(fam.a_prime.floats()[2])) ** 2
    assert rep.value_float == pytest.approx(oracle)
    assert dyadic_moment_stat("abs-b", F4, box, 0).value_float == 0.0


def test_bad_sum():
    rep = dyadic_moment_stat("bad-sum", F4, 2, 30)
    assert rep.value == SurdSum({1: Fraction(560)})
    assert dyadic_moment_stat("bad-sum", F4, 2, 7, include_one=False).value_float == 0.0
    with_n8 = dyadic_moment_stat("bad-sum", F4, 1, 8, include_one=False)
    oracle = sum(expsum(F4, c, 8).value ** 2 / 8**6 for c in full_box(4, 1) if disc_delta(F4, c))
    assert with_n8.value_float == pytest.approx(oracle)


def test_reports_csv():
    reps = [second_moment_stat(F4, 1, 8, 4, (2, 8)), dyadic_moment_stat("bad-sum", F4, 1, 8)]
    lines = reports_to_csv(reps).splitlines()
    assert lines[0].startswith("kind,") and lines[0].endswith("value,baseline,ratio")
    assert len(lines) == 3
