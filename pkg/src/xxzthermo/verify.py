"""Numbered acceptance criteria and invariant checks, shared by the CLI and the tests.

Every check returns :class:`CheckResult` with the measured quantity and the
threshold it was held to, so a report can show how close each check came.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .asympt import asympt_fermi_rapidity, asympt_rho_at_Q, asympt_Z_at_Q, rho_amplitude
from .bank import bank_profile, tail_gap
from .fermi import (
    filling,
    fermi_rapidity_derivative,
    magnetic_rapidity_derivative,
    solve_fermi_rapidity,
    solve_magnetic_rapidity,
)
from .kernels import ModelParams, bare_energy, closed_forms, kernel_K
from .linsolve import build_grid, neumann_oracle, resolvent, solve_lie
from .special import R_convolution, R_infinite, alpha
from .thermo import (
    deviation_from_infinite,
    dressed_charge,
    dressed_energy,
    dressed_momentum,
    dressed_set,
    kernel_action,
    magnetization,
    root_density,
)

PI = math.pi


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: {self.value:.3e} (limit {self.tolerance:.1e}) {self.detail}".rstrip()


def _below(name, value, tol, detail=""):
    value = float(value)
    return CheckResult(name, bool(value < tol), value, tol, detail)


def _all(name, results):
    worst = max(results, key=lambda r: (not r.passed, r.value / r.tolerance if r.tolerance else r.value))
    return CheckResult(name, all(r.passed for r in results), worst.value, worst.tolerance, worst.detail)


def _grid(Q, points=201):
    return np.linspace(-Q, Q, points)


# Strict bounds.  The lower gaps f - f_inf are solved for directly and the
# upper gaps (driving - f) are the kernel action, so neither is a difference of
# nearly equal floats.

def charge_bound_violations(gamma, Q, points=201):
    """Points on a grid of [-Q, Q] where the strict dressed-charge bounds fail."""
    lam = _grid(Q, points)
    Z = dressed_charge(gamma, Q)
    upper_gap = kernel_action(Z, lam)                 # 1 - Z
    lower_gap = deviation_from_infinite("charge", gamma, Q)(lam)   # Z - Z_inf
    if gamma < 0.5 * PI:
        bad = (upper_gap <= 0.0) | (lower_gap <= 0.0)
    else:
        bad = (upper_gap >= 0.0) | (lower_gap >= 0.0)
    return int(np.count_nonzero(bad))


def density_bound_violations(gamma, Q, points=201):
    lam = _grid(Q, points)
    rho = root_density(gamma, Q)
    upper_gap = kernel_action(rho, lam)               # K(.|gamma/2) - rho
    lower_gap = deviation_from_infinite("density", gamma, Q)(lam)  # rho - rho_inf
    if gamma < 0.5 * PI:
        bad = (upper_gap <= 0.0) | (lower_gap <= 0.0)
    else:
        bad = (upper_gap >= 0.0) | (lower_gap >= 0.0)
    return int(np.count_nonzero(bad))


def _central(func, x, step):
    return (func(x + step) - func(x - step)) / (2.0 * step)


def richardson_derivative(func, x, step=1e-5):
    """Central difference at ``step`` and ``step/2``, combined by Richardson."""
    coarse = _central(func, x, step)
    fine = _central(func, x, 0.5 * step)
    return (4.0 * fine - coarse) / 3.0


# -- acceptance criteria ------------------------------------------------------

def criterion_1():
    start = time.perf_counter()
    g = 0.5 * PI
    params = ModelParams(g, 1.0, 0.5)
    worst = 0.0
    for Q in (0.5, 2.0):
        Z = dressed_charge(g, Q)
        rho = root_density(g, Q)
        eps = dressed_energy(params, Q)
        x = Z.grid.nodes
        worst = max(worst, np.max(np.abs(Z.values - 1.0)),
                    np.max(np.abs(rho.values - kernel_K(x, 0.25 * PI))),
                    np.max(np.abs(eps.values - bare_energy(x, params))))
    elapsed = time.perf_counter() - start
    r = _below("1 free-fermion degeneration", worst, 1e-12, f"runtime {elapsed:.2f}s")
    return CheckResult(r.name, r.passed and elapsed < 1.0, r.value, r.tolerance, r.detail)


def criterion_2():
    bad = 0
    for g in (PI / 6, PI / 3, 0.45 * PI, 0.55 * PI, 2 * PI / 3, 5 * PI / 6):
        for Q in (0.1, 1.0, 5.0):
            bad += charge_bound_violations(g, Q)
    return CheckResult("2 dressed-charge bounds", bad == 0, bad, 1, "violations")


def criterion_3():
    start = time.perf_counter()
    g = PI / 3
    Z = dressed_charge(g, 2.0)
    err = abs(float(Z(2.0)) - math.sqrt(3.0) / 2.0)
    elapsed = time.perf_counter() - start
    r = _below("3 large-Q dressed charge", err, 1e-4, f"runtime {elapsed:.2f}s")
    return CheckResult(r.name, r.passed and elapsed < 1.0, r.value, r.tolerance, r.detail)


def criterion_4():
    bad = 0
    for g in (PI / 6, PI / 3, 0.45 * PI, 0.55 * PI, 2 * PI / 3, 5 * PI / 6):
        for Q in (0.1, 1.0, 5.0):
            bad += density_bound_violations(g, Q)
    g, Q = PI / 3, 3.0
    num = float(root_density(g, Q)(Q))
    rel = abs(num / asympt_rho_at_Q(g, Q) - 1.0)
    ok = bad == 0 and rel < 1e-3
    return CheckResult("4 density bounds and large-Q density", ok, rel, 1e-3, f"{bad} bound violations")


def criterion_5():
    worst = max(abs(rho_amplitude(g, "gamma") - rho_amplitude(g, "alpha"))
                for g in (0.3 * PI, 0.4 * PI, 0.5 * PI, 0.7 * PI))
    return _below("5 Gamma/alpha amplitude identity", worst, 1e-10)


def criterion_6():
    results = []
    for g, m in ((PI / 3, 0.3), (PI / 4, 0.1), (2 * PI / 3, 0.4)):
        Q = solve_magnetic_rapidity(g, m)
        fd = richardson_derivative(lambda x: solve_magnetic_rapidity(g, x), m)
        exact = magnetic_rapidity_derivative(g, Q)
        results.append(_below(f"dQm/dm g={g:.4f} m={m}", abs(fd / exact - 1.0), 1e-5))
    for g, h in ((PI / 3, 0.3), (PI / 4, 1.0), (2 * PI / 3, 0.5)):
        base = ModelParams(g, 1.0, h)
        point = solve_fermi_rapidity(base)
        fd = richardson_derivative(lambda x: solve_fermi_rapidity(base.with_h(x)).QF, h)
        exact = fermi_rapidity_derivative(point)
        results.append(_below(f"dQF/dh g={g:.4f} h={h}", abs(fd / exact - 1.0), 1e-5))
    r = _all("6 derivative identities", results)
    return CheckResult(r.name, r.passed, r.value, r.tolerance, "max relative error")


def random_points(count=10, seed=20240601):
    rng = np.random.default_rng(seed)
    gam = rng.uniform(0.2, PI - 0.2, count)
    h = rng.uniform(0.01, 2.0, count)
    Q = rng.uniform(0.1, 3.0, count)
    return [(float(a), float(b), float(c)) for a, b, c in zip(gam, h, Q)]


def criterion_7():
    worst = 0.0
    for g, h, Q in random_points():
        worst = max(worst, dressed_set(ModelParams(g, 1.0, h), Q).identity_residual())
    return _below("7 eps = hZ - 4 pi J sin(gamma) rho", worst, 1e-11)


def resolvent_sign_violations(gamma, Q):
    table = resolvent(build_grid(Q, 128), gamma)
    x = table.grid.nodes
    R_inf = R_infinite(x[:, None] - x[None, :], gamma)
    e = table.entries
    if gamma < 0.5 * PI:
        bad = e <= R_inf
    else:
        bad = (e <= R_inf) | (e >= 0.0)
    return int(np.count_nonzero(bad)), float(np.max(np.abs(e - e.T)))


def criterion_8():
    bad, asym = 0, 0.0
    for g in (PI / 3, 2 * PI / 3):
        b, a = resolvent_sign_violations(g, 1.0)
        bad, asym = bad + b, max(asym, a)
    ok = bad == 0 and asym < 1e-12
    return CheckResult("8 resolvent symmetry and sign bounds", ok, asym, 1e-12, f"{bad} sign violations")


def criterion_9():
    g = PI / 3
    grid = build_grid(1.0, 128)
    one = lambda lam: np.ones(np.shape(lam))  # noqa: E731
    direct = solve_lie(grid, g, one)
    series = neumann_oracle(g, grid, one, 60)
    return _below("9 Nystrom vs Neumann series", np.max(np.abs(direct.values - series.values)), 1e-10)


MAGNETIZATION_POINTS = ((PI / 3, 1.0), (PI / 6, 0.5), (0.45 * PI, 2.0), (2 * PI / 3, 1.5), (5 * PI / 6, 0.8))


def criterion_10():
    worst = max(abs(magnetization(g, Q, form="charge") - magnetization(g, Q, form="density"))
                for g, Q in MAGNETIZATION_POINTS)
    g, m = PI / 3, 0.3
    roundtrip = abs(filling(g, solve_magnetic_rapidity(g, m)) - m)
    value = max(worst, roundtrip)
    return _below("10 magnetization forms and m roundtrip", value, 1e-10,
                  f"forms {worst:.1e}, roundtrip {roundtrip:.1e}")


BANK_POINTS = tuple((g, h) for g in (PI / 8, PI / 6, PI / 4, 0.4 * PI) for h in (0.05, 0.3))


def criterion_11():
    start = time.perf_counter()
    margins = [bank_profile(ModelParams(g, 1.0, h)).margin() for g, h in BANK_POINTS]
    elapsed = time.perf_counter() - start
    worst = min(margins)
    ok = worst > 0.0 and elapsed < 30.0
    return CheckResult("11 other-bank floor h/4", ok, worst, 0.0,
                       f"min margin, runtime {elapsed:.2f}s")


def criterion_12():
    p = ModelParams(PI / 3, 1.0, 1e-3)
    diff = abs(solve_fermi_rapidity(p).QF - asympt_fermi_rapidity(p))
    free = ModelParams(0.5 * PI, 1.0, 1e-4)
    ratio = math.exp(2.0 * asympt_fermi_rapidity(free)) / math.exp(2.0 * closed_forms(free).Q0)
    ok = diff < 0.05 and abs(ratio - 1.0) < 0.02
    return CheckResult("12 small-h Fermi rapidity", ok, diff, 0.05, f"free-fermion ratio {ratio:.6f}")


def criterion_13():
    g, h = PI / 3, 0.3
    coarse = solve_fermi_rapidity(ModelParams(g, 1.0, h), n=128)
    fine = solve_fermi_rapidity(ModelParams(g, 1.0, h), n=256)
    Q = coarse.QF
    dz = abs(float(dressed_charge(g, Q, 128)(Q)) - float(dressed_charge(g, Q, 256)(Q)))
    dr = abs(float(root_density(g, Q, 128)(Q)) - float(root_density(g, Q, 256)(Q)))
    dq = abs(coarse.QF - fine.QF)
    return _below("13 grid convergence 128 -> 256", max(dz, dr, dq), 1e-9,
                  f"Z {dz:.1e}, rho {dr:.1e}, QF {dq:.1e}")


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12,
            criterion_13)


def run_acceptance():
    return [c() for c in CRITERIA]


# -- invariants over a gamma grid ---------------------------------------------

def gamma_grid(count):
    """``count`` equally spaced anisotropies strictly inside (0, pi)."""
    if count < 1:
        raise ValueError("gamma grid needs at least one point")
    return [PI * (k + 1) / (count + 1) for k in range(count)]


def _kernel_invariants(g):
    rng = np.random.default_rng(1)
    lam = rng.uniform(-3, 3, 200) + 1j * rng.uniform(-0.5, 0.5, 200) * min(g, PI - g)
    sym = np.max(np.abs(kernel_K(lam, g) - kernel_K(-lam, g)))
    per = np.max(np.abs(kernel_K(lam, g) - kernel_K(lam + 1j * PI, g)))
    total, _ = integrate.quad(lambda x: 2.0 * float(kernel_K(x, g)), 0.0, np.inf, epsabs=1e-14)
    yield _below(f"K symmetry/periodicity g={g:.4f}", max(sym, per), 1e-13)
    yield _below(f"int K = 1 - 2g/pi g={g:.4f}", abs(total - (1.0 - 2.0 * g / PI)), 1e-10)


def _solver_invariants(g):
    Z = dressed_charge(g, 1.5, 128)
    yield _below(f"Nystrom residual g={g:.4f}", Z.residual(), 1e-12)
    yield _below(f"evenness g={g:.4f}", np.max(np.abs(Z.values - Z.values[::-1])), 1e-12)
    lam = np.linspace(-1.5, 1.5, 50)
    rho = root_density(g, 1.5, 128)
    change = max(np.max(np.abs(Z(lam) - dressed_charge(g, 1.5, 256)(lam))),
                 np.max(np.abs(rho(lam) - root_density(g, 1.5, 256)(lam))))
    yield _below(f"grid doubling g={g:.4f}", change, 1e-10)
    lam = np.linspace(0.0, 1.5, 200)
    steps = np.diff(Z(lam))
    mono = np.all(steps > 0) if g < 0.5 * PI else np.all(steps < 0)
    if abs(g - 0.5 * PI) > 1e-12:
        yield CheckResult(f"Z monotone on R+ g={g:.4f}", bool(mono), 0.0, 0.0)
    pF = dressed_momentum(rho, 1.5)
    yield CheckResult(f"0 < p_F < pi g={g:.4f}", bool(0.0 < pF < PI), pF, PI)


def _fermi_invariants(g):
    p = ModelParams(g, 1.0, 0.3)
    fp = solve_fermi_rapidity(p)
    yield _below(f"Fermi residual g={g:.4f}", abs(fp.residual), 1e-10)
    lo, hi = sorted((closed_forms(p).Q0, closed_forms(p).Q_tilde)) if 0.3 < 2 * PI * math.sin(g) / g \
        else (0.0, closed_forms(p).Q0)
    inside = lo < fp.QF < hi or abs(g - 0.5 * PI) < 1e-12
    yield CheckResult(f"Q_F bracket g={g:.4f}", bool(inside), fp.QF, hi)
    yield CheckResult(f"v_F > 0 g={g:.4f}", fp.vF > 0.0, fp.vF, 0.0)
    yield _below(f"Q_F grid shift g={g:.4f}", fp.grid_shift, 1e-9)


def _special_invariants(g):
    rng = np.random.default_rng(2)
    pts = rng.uniform(-4, 4, 20) - 1j * rng.uniform(0.05, 3, 20)
    worst = max(abs(alpha(z, g).value * alpha(-z, g).value - 1.0) for z in pts)
    yield _below(f"alpha(l) alpha(-l) = 1 g={g:.4f}", worst, 1e-12)
    if g < 0.5 * PI:
        lam = np.linspace(0.0, 6.0, 7)
        yield _below(f"R Fourier vs convolution g={g:.4f}",
                     np.max(np.abs(R_infinite(lam, g) - R_convolution(lam, g))), 1e-9)
    if g > 0.2 * PI:
        yield _below(f"amplitude identity g={g:.4f}",
                     abs(rho_amplitude(g) - rho_amplitude(g, "alpha")), 1e-10)
        yield _below(f"Z(Q|Q) limit g={g:.4f}",
                     abs(float(dressed_charge(g, 6.0)(6.0)) - asympt_Z_at_Q(g)), 1e-6)


def _bank_invariants(g):
    if not g < 0.5 * PI:
        return
    for h in (0.05, 0.3):
        fp = solve_fermi_rapidity(ModelParams(g, 1.0, h))
        lam = np.linspace(-15.0, 15.0, 201)
        yield CheckResult(f"tail >= estimate g={g:.4f} h={h}", bool(np.min(tail_gap(lam, fp)) > 0.0),
                          float(np.min(tail_gap(lam, fp))), 0.0)
        yield CheckResult(f"omega > h/4 g={g:.4f} h={h}",
                          bank_profile(fp.params, lam, fp).holds(), 0.0, 0.0)


INVARIANT_GROUPS = (_kernel_invariants, _solver_invariants, _fermi_invariants,
                    _special_invariants, _bank_invariants)


def run_invariants(count=5):
    out = []
    for g in gamma_grid(count):
        for group in INVARIANT_GROUPS:
            out.extend(group(g))
    return out


SUITES = ("acceptance", "invariants", "all")


def run_suite(suite="all", count=5):
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}, expected one of {SUITES}")
    results = []
    if suite in ("acceptance", "all"):
        results.extend(run_acceptance())
    if suite in ("invariants", "all"):
        results.extend(run_invariants(count))
    return results
