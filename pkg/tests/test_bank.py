import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xxzthermo.bank import (
    applicable_estimate,
    bank_profile,
    decay_span,
    omega,
    omega_extension,
    sharpened_floor,
    tail_estimates,
    tail_gap,
    tail_integral,
)
from xxzthermo.errors import DomainError
from xxzthermo.fermi import solve_fermi_rapidity
from xxzthermo.kernels import ModelParams
from xxzthermo.special import G_function, R_infinite

PI = math.pi


def fermi(g, h, J=1.0):
    return solve_fermi_rapidity(ModelParams(g, J, h))


def test_estimates():
    est = tail_estimates(PI / 4, 1.0)
    assert est["est_low_gamma"] == pytest.approx(-1 / 6, rel=1e-15)
    assert est["est_high_gamma"] == pytest.approx(-1 / 6, rel=1e-15)
    assert tail_estimates(1e-9, 0.8)["est_low_gamma"] == pytest.approx(-0.2, rel=1e-8)
    assert applicable_estimate(PI / 6, 1.0) == tail_estimates(PI / 6, 1.0)["est_low_gamma"]
    assert applicable_estimate(PI / 3, 1.0) == tail_estimates(PI / 3, 1.0)["est_high_gamma"]


def test_regime_rejected():
    for g in (PI / 2, 2 * PI / 3):
        with pytest.raises(DomainError):
            tail_estimates(g, 0.3)
        with pytest.raises(DomainError):
            omega(0.0, fermi(g, 0.3))
    p = ModelParams(PI / 6, 1.0, 0.0)
    with pytest.raises(DomainError):
        omega(0.0, solve_fermi_rapidity(p.with_h(p.saturation_field)))


def test_omega_at_origin():
    assert omega(0.0, fermi(PI / 6, 0.2)) > 0.05


def test_omega_far_limit_is_field():
    # far from the Fermi zone G + R decays, eps -> h and omega -> h
    for g, h in ((PI / 6, 0.2), (0.4 * PI, 0.05)):
        assert omega(20.0, fermi(g, h)) == pytest.approx(h, rel=1e-8)


@pytest.mark.parametrize("g,h", [(PI / 8, 0.05), (PI / 6, 0.3), (0.4 * PI, 0.3)])
def test_matches_complex_extension(g, h):
    f = fermi(g, h)
    lam = np.array([f.QF + 1.0, f.QF + 2.5, 6.0, -(f.QF + 1.5)])
    assert np.max(np.abs(omega(lam, f) - omega_extension(lam, f))) < 1e-10


def test_shifted_extension_is_close():
    # off the cut the line gamma - 0.05 is a small displacement of the bank
    f = fermi(PI / 6, 0.2)
    lam = np.array([-8.0, -(f.QF + 1.5), f.QF + 1.5, 3.0, 8.0])
    assert np.max(np.abs(omega(lam, f) - omega_extension(lam, f, 0.05))) < 1e-2 * f.params.h


@pytest.mark.parametrize("g,h", [(PI / 8, 0.05), (PI / 6, 0.3), (PI / 4, 0.3), (0.4 * PI, 0.05)])
def test_tail_above_estimate(g, h):
    f = fermi(g, h)
    lam = np.linspace(-15, 15, 61)
    gap = tail_gap(lam, f)
    assert np.all(gap > 0)
    # the plain difference carries ~1e-12 cancellation noise
    direct = tail_integral(lam, f) - applicable_estimate(g, h)
    np.testing.assert_allclose(gap, direct, rtol=1e-6, atol=5e-12)


@pytest.mark.parametrize("g", [PI / 8, PI / 6, PI / 4])
def test_sharpened_floor(g):
    f = fermi(g, 0.3)
    lam = np.linspace(-15, 15, 201)
    # omega - floor = tail - est_low_gamma, strictly positive even where it
    # is far below the rounding of omega itself (large |lambda| at pi/4)
    assert np.all(tail_gap(lam, f) > 0)
    np.testing.assert_allclose(omega(lam, f) - sharpened_floor(lam, f), tail_gap(lam, f), rtol=1e-6, atol=5e-12)


def test_continuity_across_quarter_pi():
    # the jump across pi/4 is only the smooth drift of omega with gamma
    lam = np.linspace(-15, 15, 201)
    for h in (0.05, 0.3):
        w = [omega(lam, fermi(PI / 4 + d, h)) for d in (-3e-3, -1e-3, 1e-3, 3e-3)]
        jump = w[2] - w[1]
        trend = (w[3] - w[0]) / 3
        assert np.max(np.abs(jump - trend)) < 1e-2 * h


@pytest.mark.parametrize("g,h", [(PI / 8, 0.05), (PI / 6, 0.3), (PI / 4, 0.05), (0.4 * PI, 0.3)])
def test_profile_above_floor(g, h):
    prof = bank_profile(ModelParams(g, 1.0, h))
    assert prof.lambdas.size == 201
    assert prof.floor == 0.25 * h
    assert prof.holds() and prof.margin() > 0


def test_profile_symmetric():
    prof = bank_profile(ModelParams(PI / 5, 1.0, 0.2))
    np.testing.assert_allclose(prof.omega, prof.omega[::-1], rtol=1e-12)


@pytest.mark.parametrize("g", [PI / 8, PI / 4, 0.45 * PI])
def test_decay_span(g):
    L = decay_span(g, 0.3)
    x = np.array([L, L + 1.0, L + 5.0])
    R = R_infinite(x, g)
    size = (np.abs(G_function(x, g)) + np.abs(R)) * 0.3
    assert L >= 1 and np.all(size < 1e-13)
    assert decay_span(g, 3.0) >= L


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05 * PI, 0.48 * PI), st.floats(0.01, 1.5), st.floats(0.5, 2.0))
def test_floor_property(g, h, J):
    p = ModelParams(g, J, h)
    if h >= 0.99 * p.saturation_field:
        return
    f = solve_fermi_rapidity(p)
    lam = np.linspace(-12, 12, 49)
    assert np.all(omega(lam, f) > 0.25 * h)
    assert np.all(tail_gap(lam, f) > 0)
