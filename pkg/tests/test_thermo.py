import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xxzthermo.errors import DomainError
from xxzthermo.fermi import solve_fermi_rapidity
from xxzthermo.kernels import (
    ModelParams,
    bare_energy,
    bare_energy_prime,
    bare_momentum,
    closed_forms,
    kernel_K,
)
from xxzthermo.linsolve import resolvent_kernel
from xxzthermo.thermo import (
    deviation_from_infinite,
    dressed_charge,
    dressed_energy,
    dressed_momentum,
    dressed_set,
    excitation_energy,
    fermi_velocity,
    kernel_action,
    low_lying_energy,
    magnetization,
    momentum_equation_residual,
    root_density,
)
from xxzthermo.verify import richardson_derivative

PI = math.pi

# Composite Gauss-Legendre Nystrom (8 and 16 panels x 32/40 nodes, agreeing to
# 1e-16) at gamma = pi/3, Q = 1, J = 1, h = 0.5; lambda = 0, 0.5, 1, 2.5
LAMS = np.array([0.0, 0.5, 1.0, 2.5])
Z_REF = [0.7869704322568652, 0.8082846247340675, 0.8677129964101005, 0.989164236464855]
RHO_REF = [0.4783952478539142, 0.20434073096667132, 0.04971240708373125, 0.001352772919719968]
EPS_REF = [-4.812792762332171, -1.819656215119989, -0.10715349597309592, 0.47986016626197936]


def test_reference_values():
    g = PI / 3
    np.testing.assert_allclose(dressed_charge(g, 1.0)(LAMS), Z_REF, rtol=1e-13)
    np.testing.assert_allclose(root_density(g, 1.0)(LAMS), RHO_REF, rtol=1e-12)
    np.testing.assert_allclose(dressed_energy(ModelParams(g, 1.0, 0.5), 1.0)(LAMS), EPS_REF, rtol=1e-12)


def test_empty_zone_is_undressed():
    g = PI / 3
    p = ModelParams(g, 1.0, 0.4)
    lam = np.linspace(-3, 3, 7)
    assert np.all(dressed_charge(g, 0.0)(lam) == 1.0)
    np.testing.assert_allclose(root_density(g, 0.0)(lam), kernel_K(lam, g / 2), rtol=1e-15)
    np.testing.assert_allclose(dressed_energy(p, 0.0)(lam), bare_energy(lam, p), rtol=1e-15)


def test_free_fermion_energy():
    p = ModelParams(PI / 2, 1.0, 0.7)
    eps = dressed_energy(p, 3.0)
    np.testing.assert_allclose(eps.values, bare_energy(eps.grid.nodes, p), atol=1e-14)


def test_charge_bounds_examples():
    Z = dressed_charge(PI / 3, 2.0)
    assert np.all((Z.values > 0.75) & (Z.values < 1.0))
    Z = dressed_charge(2 * PI / 3, 2.0)
    assert np.all((Z.values > 1.0) & (Z.values < 1.5))


def test_density_bounds_example():
    rho0 = float(root_density(PI / 3, 1.0)(0.0))
    assert 3 / (2 * PI) < rho0 < 1 / (math.tan(PI / 6) * PI)


def test_density_converges_to_infinite_interval():
    g = PI / 3
    lam = np.linspace(-4, 4, 81)
    rho = root_density(g, 8.0)
    inf = closed_forms(ModelParams(g)).rho_inf(lam)
    assert np.max(np.abs(rho(lam) - inf)) < 1e-4


@pytest.mark.parametrize("g", [PI / 3, 2 * PI / 3])
def test_deviation_route_matches_difference(g):
    # where the difference is resolvable, both routes agree
    Q = 1.0
    lam = np.linspace(0, 2, 9)
    dev = deviation_from_infinite("density", g, Q)
    direct = root_density(g, Q)(lam) - closed_forms(ModelParams(g)).rho_inf(lam)
    np.testing.assert_allclose(dev(lam), direct, atol=1e-13)
    dev = deviation_from_infinite("charge", g, Q)
    direct = dressed_charge(g, Q)(lam) - PI / (2 * (PI - g))
    np.testing.assert_allclose(dev(lam), direct, atol=1e-13)


def test_kernel_action_matches_driving_minus_solution():
    Z = dressed_charge(PI / 4, 1.5)
    lam = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(kernel_action(Z, lam), 1.0 - Z(lam), atol=1e-15)


def test_energy_bounds_below_Q0():
    p = ModelParams(PI / 3, 1.0, 0.5)
    cf = closed_forms(p)
    eps = dressed_energy(p, 0.9 * cf.Q0)
    x = eps.grid.nodes
    assert np.all(bare_energy(x, p) < eps.values)
    assert np.all(eps.values < cf.eps_tilde(x))


def test_momentum_basics():
    rho = root_density(PI / 3, 1.0)
    assert dressed_momentum(rho, 0.0) == 0.0
    lam = np.array([0.3, 0.9, 2.0])
    np.testing.assert_allclose(dressed_momentum(rho, -lam), -dressed_momentum(rho, lam), rtol=1e-15)
    free = root_density(PI / 2, 1.0)
    lam = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(dressed_momentum(free, lam), bare_momentum(lam, PI / 2), atol=1e-13)


def test_momentum_derivative_is_density():
    rho = root_density(PI / 3, 1.0)
    for lam in (0.2, 0.7, 1.4):
        fd = richardson_derivative(lambda x: dressed_momentum(rho, x), lam)
        assert abs(fd / (2 * PI * float(rho(lam))) - 1) < 1e-7


@pytest.mark.parametrize("g,Q", [(PI / 3, 1.0), (2 * PI / 3, 0.7), (PI / 5, 2.0)])
def test_momentum_integral_equation(g, Q):
    rho = root_density(g, Q)
    res = momentum_equation_residual(rho, np.array([-2.0, -0.4, 0.0, 0.6, Q, 3.0]))
    assert np.max(np.abs(res)) < 1e-9


def test_magnetization_examples():
    assert magnetization(PI / 3, 0.0) == 1.0
    assert abs(magnetization(PI / 3, 10.0)) < 1e-3
    a = magnetization(PI / 3, 1.0, form="charge")
    b = magnetization(PI / 3, 1.0, form="density")
    assert abs(a - b) < 1e-10
    assert 0.0 <= a <= 1.0
    with pytest.raises(ValueError):
        magnetization(PI / 3, 1.0, form="spin")


def test_fermi_velocity_free_fermions():
    p = ModelParams(PI / 2, 1.0, 0.8)
    QF = closed_forms(p).Q0
    expected = bare_energy_prime(QF, p) / (2 * PI * kernel_K(QF, PI / 4))
    assert fermi_velocity(p, QF) == pytest.approx(float(expected), rel=1e-12)


def test_fermi_velocity_grid_stable():
    p = ModelParams(PI / 3, 1.0, 0.3)
    QF = solve_fermi_rapidity(p).QF
    assert abs(fermi_velocity(p, QF, 128) - fermi_velocity(p, QF, 256)) < 1e-8


def test_fermi_velocity_rejects_empty_zone():
    with pytest.raises(DomainError):
        fermi_velocity(ModelParams(PI / 3, 1.0, 0.3), 0.0)


def test_fermi_velocity_positive_random(rng):
    for _ in range(10):
        g = rng.uniform(0.2, PI - 0.2)
        p = ModelParams(g, 1.0, rng.uniform(0.05, 0.9) * 4 * (1 + math.cos(g)))
        assert solve_fermi_rapidity(p).vF > 0


def test_low_lying_energy():
    assert low_lying_energy(0.8, 1.3, 10, 0, 0, 0) == 0.0
    assert low_lying_energy(1.0, 1.3, 10, 1, 0, 0) == pytest.approx(2 * PI * 1.3 / 10)
    Z = 0.8
    assert low_lying_energy(Z, 1.3, 10, 0, 2, 1) == pytest.approx(2 * PI * 1.3 / 10 * (1 / Z ** 2 + 1))
    with pytest.raises(DomainError):
        low_lying_energy(0.8, 1.0, 0, 0, 0, 0)
    with pytest.raises(DomainError):
        low_lying_energy(0.0, 1.0, 4, 0, 0, 0)


def test_excitation_energy():
    p = ModelParams(PI / 3, 1.0, 0.3)
    QF = solve_fermi_rapidity(p).QF
    eps = dressed_energy(p, QF)
    assert excitation_energy(eps) == 0.0
    hole = excitation_energy(eps, holes=[0.0])
    assert hole == pytest.approx(-float(eps(0.0)), rel=1e-15) and hole > 0
    # a particle far out costs the bare field: eps -> h at large rapidity
    assert excitation_energy(eps, particles=[30.0]) == pytest.approx(p.h, rel=1e-10)
    assert excitation_energy(eps, particles=[QF + 0.5, -QF - 1.0], holes=[0.2, -0.9 * QF]) > 0
    with pytest.raises(DomainError):
        excitation_energy(eps, particles=[0.5 * QF])
    with pytest.raises(DomainError):
        excitation_energy(eps, holes=[2 * QF])


def test_dressed_set():
    s = dressed_set(ModelParams(PI / 3, 1.0, 0.5), 1.2)
    assert s.identity_residual() < 1e-11
    assert 0 < s.pF < PI
    x = s.grid.nodes
    np.testing.assert_allclose(s.Z.values, s.Z.values[::-1], rtol=1e-13)
    assert np.all(np.diff(s.p(x)) > 0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, PI - 0.1), st.floats(0.01, 3.0), st.floats(0.05, 4.0))
def test_energy_identity_property(g, h, Q):
    s = dressed_set(ModelParams(g, 1.0, h), Q)
    assert s.identity_residual() < 1e-11


@settings(max_examples=20, deadline=None)
@given(st.floats(0.15, PI - 0.15), st.floats(0.1, 4.0))
def test_charge_monotone_property(g, Q):
    if abs(g - PI / 2) < 1e-3:
        return
    lam = np.linspace(0.0, 2 * Q + 2, 200)
    d = np.diff(dressed_charge(g, Q)(lam))
    # flat tails sit at rounding level; demand strictness where the step is resolvable
    live = np.abs(d) > 1e-14
    assert np.all(d[live] > 0) if g < PI / 2 else np.all(d[live] < 0)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, PI - 0.1), st.floats(0.05, 5.0))
def test_fermi_momentum_in_range(g, Q):
    s = root_density(g, Q)
    assert 0 < dressed_momentum(s, Q) < PI


@pytest.mark.parametrize("g", [PI / 3, 2 * PI / 3])
def test_charge_derivative_resolvent_identity(g):
    Q = 1.0
    Z = dressed_charge(g, Q)
    for lam in (0.3, 0.8, 1.6):
        fd = richardson_derivative(lambda x: float(Z(x)), lam)
        R = resolvent_kernel(Z.grid, g, lam, [Q, -Q])[0]
        rhs = (R[0] - R[1]) * float(Z(Q))
        assert abs(fd - rhs) < 1e-7


@pytest.mark.parametrize("g", [PI / 3, 2 * PI / 3])
def test_density_Q_derivative_resolvent_identity(g):
    Q = 1.0
    rho = root_density(g, Q)
    for lam in (0.0, 0.5, 1.3):
        fd = richardson_derivative(lambda q: float(root_density(g, q)(lam)), Q)
        R = resolvent_kernel(rho.grid, g, lam, [Q, -Q])[0]
        rhs = -float(rho(Q)) * (R[0] + R[1])
        assert abs(fd / rhs - 1) < 1e-6
