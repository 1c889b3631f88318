"""Fermi rapidities: Q_m from the filling m = int rho, and Q_F from eps(Q_F|Q_F) = 0."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize

from .errors import AccuracyError, BracketError, DomainError
from .kernels import ModelParams, _check_gamma, bare_energy, closed_forms
from .linsolve import auto_nodes
from .thermo import dressed_charge, dressed_energy, dressed_momentum, root_density

RESIDUAL_TOL = 1e-10
Q_LIMIT = 200.0
_XTOL = 1e-15
_RTOL = 4.0 * 2.220446049250313e-16


def filling(gamma, Q, n=None):
    """int_{-Q}^{Q} rho(lambda|Q) d lambda; strictly increasing from 0 to 1/2."""
    if Q == 0.0:
        return 0.0
    return root_density(gamma, Q, n).integral()


def _expand_upper(func, start, limit=Q_LIMIT):
    hi = start
    while func(hi) <= 0.0:
        hi *= 2.0
        if hi > limit:
            raise BracketError(f"no sign change found below Q = {limit:g}")
    return hi


def solve_magnetic_rapidity(gamma, m, n=None):
    """Unique Q with int_{-Q}^{Q} rho(.|Q) = m, for 0 <= m < 1/2."""
    _check_gamma(gamma)
    if m == 0.5:
        raise DomainError("m = 1/2 corresponds to Q = +infinity")
    if not 0.0 <= m < 0.5:
        raise DomainError(f"m must lie in [0, 1/2), got {m!r}")
    if m == 0.0:
        return 0.0

    def f(Q):
        return filling(gamma, Q, n) - m

    hi = _expand_upper(f, 1.0)
    lo = 0.5 * hi if hi > 1.0 else 0.0
    Q = optimize.brentq(f, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=200)
    if abs(f(Q)) > RESIDUAL_TOL:
        raise AccuracyError(f"filling residual {f(Q):.3e} above {RESIDUAL_TOL:g}")
    return Q


def magnetic_rapidity_derivative(gamma, Q, n=None):
    """dQ_m/dm = 1 / (2 rho(Q|Q) Z(Q|Q)) at Q = Q_m."""
    rho = float(root_density(gamma, Q, n)(Q))
    Z = float(dressed_charge(gamma, Q, n)(Q))
    return 1.0 / (2.0 * rho * Z)


@dataclass(frozen=True)
class FermiPoint:
    """Solved Fermi rapidity and the derived low-energy data.

    ``polarized`` marks h >= 4J(1 + cos gamma), where the Fermi zone is empty.
    ``grid_shift`` estimates how far Q_F moves when the node count is doubled.
    """

    params: ModelParams
    QF: float
    ZF: float
    pF: float
    vF: float
    residual: float
    polarized: bool = False
    n: int = 0
    grid_shift: float = 0.0

    def as_dict(self):
        return {"q_f": self.QF, "z_f": self.ZF, "p_f": self.pF, "v_f": self.vF,
                "residual": self.residual}


def fermi_residual(params, Q, n=None):
    """eps(Q|Q), the map whose zero is Q_F."""
    if Q == 0.0:
        return float(bare_energy(0.0, params))
    return float(dressed_energy(params, Q, n)(Q))


def fermi_bracket(params):
    """(lo, hi) around Q_F built from the closed-form zeros of eps_0 and eps_tilde."""
    cf = closed_forms(params)
    Q0 = cf.Q0
    try:
        Qt = cf.Q_tilde
    except DomainError:
        Qt = 0.0
    return min(Q0, Qt), max(Q0, Qt)


def solve_fermi_rapidity(params, n=None):
    """Q_F > 0 with eps(Q_F|Q_F) = 0, plus Z, p, v at the Fermi point."""
    if not params.h > 0.0:
        raise DomainError(f"the Fermi rapidity needs h > 0, got {params.h!r}")
    if params.h >= params.saturation_field:
        # fully polarised: empty Fermi zone, Z = 1 and eps_0'(0) = 0
        return FermiPoint(params, 0.0, 1.0, 0.0, 0.0, fermi_residual(params, 0.0), True)

    def f(Q):
        return fermi_residual(params, Q, n)

    lo, hi = fermi_bracket(params)
    lo *= 1.0 - 1e-6
    hi = hi * (1.0 + 1e-6) + 1e-12
    if f(lo) > 0.0:
        lo = 0.0
    if f(hi) <= 0.0:
        hi = _expand_upper(f, hi)
    QF = optimize.brentq(f, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=200)

    nodes = n or auto_nodes(params.gamma, QF)
    eps = dressed_energy(params, QF, nodes)
    residual = float(eps(QF))
    if abs(residual) > RESIDUAL_TOL:
        raise AccuracyError(f"Fermi residual {residual:.3e} above {RESIDUAL_TOL:g}")
    slope = float(eps.derivative(QF))
    rho = root_density(params.gamma, QF, nodes)
    r = float(rho(QF))
    ZF = float(dressed_charge(params.gamma, QF, nodes)(QF))
    pF = float(dressed_momentum(rho, QF))
    vF = slope / (2.0 * math.pi * r)
    shift = abs(fermi_residual(params, QF, 2 * nodes)) / abs(slope)
    return FermiPoint(params, QF, ZF, pF, vF, residual, False, nodes, shift)


def fermi_rapidity_derivative(point, n=None):
    """dQ_F/dh = -Z(Q_F|Q_F) / eps'(Q_F|Q_F)."""
    if point.polarized:
        raise DomainError("no Fermi zone at or above the saturation field")
    eps = dressed_energy(point.params, point.QF, n or point.n)
    return -point.ZF / float(eps.derivative(point.QF))
