import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.delta import (
    DeltaParams,
    SmoothWeight,
    brute_force_count,
    c_cutoff,
    delta_identity_report,
    dual_term,
    h_weight,
    integral_Ic,
    n_cutoff,
    omega,
    primal_term,
    real_density,
    singular_series,
)
from artifact.errors import DomainError, NumericalFailure
from artifact.forms import DiagonalCubicForm

F4 = DiagonalCubicForm((1, 1, -1, -1))
W = SmoothWeight(0.3, 1.0)


def test_omega_unit_mass_and_support():
    u = np.linspace(0, 1.5, 300001)
    vals = omega(u)
    assert abs(vals.sum() * (u[1] - u[0]) - 1) < 1e-9
    assert not vals[(u <= 0.5) | (u >= 1)].any()


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 2.0), st.floats(-3.0, 3.0))
def test_h_is_even_in_y(x, y):
    assert h_weight(x, y) == h_weight(x, -y)


def test_h_examples():
    assert h_weight(0.9, 0.0) == pytest.approx(float(omega(0.9)) / 0.9, rel=1e-14)
    ys = np.linspace(-1, 1, 201)
    assert not np.any(h_weight(3.0, ys))
    with pytest.raises(DomainError):
        h_weight(0.0, 1.0)


def test_real_density_two_methods():
    for F, w in ((F4, W), (DiagonalCubicForm((1, 2, -3, 1)), W)):
        a = real_density(F, w)
        b = real_density(F, w, "slab")
        assert a > 0
        assert abs(a - b) / a < 5e-3


def test_real_density_scaling():
    # u -> 2u turns (8F, w(2u)) into (F, w) with Jacobian 2^-m
    F8 = DiagonalCubicForm(tuple(8 * a for a in F4.coeffs))
    half = SmoothWeight(W.a / 2, W.b / 2)
    assert real_density(F8, half) == pytest.approx(real_density(F4, W) / 16, rel=1e-6)


def test_brute_force_split_matches_direct():
    F = DiagonalCubicForm((1, 1, 1, -1))
    w = SmoothWeight()
    for X in (4.0, 10.0):
        assert brute_force_count(F, w, X) == pytest.approx(brute_force_count(F, w, X, "direct"), rel=1e-12)
    assert brute_force_count(F, w, 10.0) > 0


def test_integral_zero_mode_approaches_density():
    sigma = real_density(F4, W)
    devs = []
    for r in (0.01, 0.005, 0.003):
        X = (1 / r) ** (2 / 3)
        devs.append(abs(integral_Ic(F4, W, DeltaParams(X), (0, 0, 0, 0), 1) / sigma - 1))
    assert devs[0] < 1e-3
    assert devs[2] < 1e-5


def test_integral_symmetry_and_decay():
    p = DeltaParams(10.0)
    for c in ((1, 0, 0, 0), (1, 2, 0, -1), (3, -1, 2, 2)):
        a = integral_Ic(F4, W, p, c, 1)
        assert a == pytest.approx(integral_Ic(F4, W, p, tuple(-x for x in c), 1), rel=1e-9, abs=1e-18)
    scale = abs(integral_Ic(F4, W, p, (0, 0, 0, 0), 1))
    for c in ((8, 0, 0, 0), (8, 8, 0, 0), (12, 5, 3, 1)):
        assert abs(integral_Ic(F4, W, p, c, 1)) < 1e-6 * scale


def test_integral_domain():
    with pytest.raises(DomainError):
        integral_Ic(F4, W, DeltaParams(6.0), (0, 0, 0, 0), 0)
    with pytest.raises(DomainError):
        DeltaParams(0.5)


def test_primal_equals_dual_per_modulus():
    p = DeltaParams(6.0)
    for n in (1, 2, 5, 12):
        prim = primal_term(F4, W, p, n)
        dual = dual_term(F4, W, p, n, c_cutoff(p, n)) / n**4
        assert dual == pytest.approx(prim, rel=1e-3)


def test_terms_vanish_beyond_modulus_cutoff():
    p = DeltaParams(6.0)
    n_max = n_cutoff(F4, W, p)
    for n in range(n_max + 1, n_max + 4):
        assert primal_term(F4, W, p, n) == 0.0


def test_delta_identity_small_x():
    rep = delta_identity_report(F4, W, DeltaParams(4.0))
    assert rep.lhs > 0
    # at Y = 8 the raw error is the normalizer c_Q = 0.992..., which the normalized form removes
    assert rep.rel_error == pytest.approx(abs(1 / rep.c_Q - 1), rel=0.05)
    assert rep.rel_error_normalized < 1e-4
    assert rep.c_tail_rel < 1e-4
    assert rep.n_tail == 0.0
    js = rep.to_json()
    assert js["params"]["X"] == 4.0
    assert js["rel_error_normalized"] == rep.rel_error_normalized


def test_singular_series_first_term_and_exactness():
    rep = singular_series(DiagonalCubicForm((1,) * 7), 64)
    assert rep.partial[1] == 1
    assert all(v.denominator > 0 for v in rep.partial.values())
    with pytest.raises(DomainError):
        singular_series(DiagonalCubicForm((1, 1, 1)), 8)


def test_numerical_failure_is_an_artifact_error():
    assert NumericalFailure("x").exit_code == 4
