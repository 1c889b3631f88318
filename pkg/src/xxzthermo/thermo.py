"""Dressed charge, root density, dressed energy and momentum of the XXZ chain.

Every dressed function solves (I + K) f = g on [-Q, Q] with the Lieb kernel
K(.|gamma) and a driving term g:

    charge   Z   : g = 1
    density  rho : g = K(.|gamma/2)
    energy   eps : g = h - 4 pi J sin(gamma) K(.|gamma/2)

The momentum is p(lambda) = 2 pi int_0^lambda rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import DomainError
from .kernels import (
    ModelParams,
    _check_gamma,
    _sech,
    bare_energy,
    bare_energy_prime,
    bare_momentum,
    bare_phase,
    kernel_K,
    kernel_K_prime,
)
from .linsolve import DiscreteSolution, auto_nodes, build_grid, solve_lie
from .special import _gl


def _constant(value, lam):
    return np.full(np.shape(lam), value)


def _zero(lam):
    return np.zeros(np.shape(lam))


def _half_kernel(gamma, lam):
    return kernel_K(lam, 0.5 * gamma)


def _half_kernel_prime(gamma, lam):
    return kernel_K_prime(lam, 0.5 * gamma)


def _energy(params, lam):
    return bare_energy(lam, params)


def _energy_prime(params, lam):
    return bare_energy_prime(lam, params)


def kernel_action(sol, lam):
    """sum_j w_j K(lam - x_j) f(x_j), i.e. driving(lam) - f(lam) without cancellation."""
    lam = np.asarray(lam)
    x, w = sol.grid.nodes, sol.grid.weights
    out = kernel_K(lam[..., None] - x, sol.gamma) @ (w * sol.values)
    return out[()] if np.ndim(out) == 0 else out


def dressed_charge(gamma, Q, n=None):
    """Z(.|Q): driving term 1."""
    _check_gamma(gamma)
    return solve_lie(build_grid(Q, n or auto_nodes(gamma, Q)), gamma, partial(_constant, 1.0), "charge", _zero)


def root_density(gamma, Q, n=None):
    """rho(.|Q): driving term K(.|gamma/2)."""
    _check_gamma(gamma)
    return solve_lie(build_grid(Q, n or auto_nodes(gamma, Q)), gamma, partial(_half_kernel, gamma), "density",
                     partial(_half_kernel_prime, gamma))


def dressed_energy(params, Q, n=None):
    """eps(.|Q): driving term the bare energy."""
    return solve_lie(build_grid(Q, n or auto_nodes(params.gamma, Q)), params.gamma, partial(_energy, params), "energy",
                     partial(_energy_prime, params))


def _panel_rule(a, b, width, m=32):
    """Composite Gauss-Legendre nodes/weights on [a, b]."""
    if b <= a:
        return np.empty(0), np.empty(0)
    panels = max(1, int(math.ceil((b - a) / width)))
    x, w = _gl(m)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    nodes = (edges[:-1, None] + half[:, None] * (x + 1.0)).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def dressed_momentum(rho, lam):
    """p(lam|Q) = 2 pi int_0^lam rho(mu|Q) dmu, on the Nystrom extension of ``rho``."""
    lam = np.asarray(lam, dtype=float)
    width = min(1.0, 0.5 * rho.gamma)
    out = np.empty(lam.size)
    for i, x in enumerate(lam.ravel()):
        nodes, weights = _panel_rule(0.0, abs(x), width)
        out[i] = math.copysign(2.0 * math.pi * float(weights @ rho(nodes)), x) if nodes.size else 0.0
    out = out.reshape(lam.shape)
    return out[()] if out.ndim == 0 else out


def momentum_equation_residual(rho, lam):
    """Residual of the integral-equation characterisation of p.

    p + int_{-Q}^{Q} K(. - mu) p(mu) dmu = p_0 - (p(Q)/2pi) [theta(. - Q) + theta(. + Q)],
    with theta the bare phase (theta' = 2 pi K).
    """
    gamma, grid = rho.gamma, rho.grid
    Q = grid.Q
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    p_nodes = dressed_momentum(rho, grid.nodes)
    pQ = dressed_momentum(rho, Q)
    lhs = dressed_momentum(rho, lam) + kernel_K(lam[:, None] - grid.nodes, gamma) @ (grid.weights * p_nodes)
    rhs = bare_momentum(lam, gamma) - pQ / (2.0 * math.pi) * (bare_phase(lam - Q, gamma) + bare_phase(lam + Q, gamma))
    return lhs - rhs


def magnetization(gamma, Q, n=None, form="charge"):
    """<sigma^z> = 1 - 2 int Z K(.|gamma/2)  (``form="charge"``) or 1 - 2 int rho (``"density"``)."""
    if form == "charge":
        Z = dressed_charge(gamma, Q, n)
        return 1.0 - 2.0 * Z.grid.integrate(Z.values * kernel_K(Z.grid.nodes, 0.5 * gamma))
    if form == "density":
        return 1.0 - 2.0 * root_density(gamma, Q, n).integral()
    raise ValueError(f"unknown form {form!r}")


def fermi_velocity(params, QF, n=None):
    """v_F = eps'(Q_F|Q_F) / (2 pi rho(Q_F|Q_F))."""
    if not QF > 0.0:
        raise DomainError(f"Fermi velocity needs QF > 0, got {QF!r}")
    eps = dressed_energy(params, QF, n)
    rho = root_density(params.gamma, QF, n)
    r = float(rho(QF))
    if r < 1e-14:
        raise DomainError(f"rho(QF|QF) = {r:.3e} is degenerate")
    return float(eps.derivative(QF)) / (2.0 * math.pi * r)


def low_lying_energy(ZF, vF, L, ell, s, n):
    """(2 pi / L) v_F [(ell Z)^2 + (s / (2 Z))^2 + n]."""
    if L < 1:
        raise DomainError(f"L must be >= 1, got {L!r}")
    if not ZF > 0.0:
        raise DomainError(f"ZF must be positive, got {ZF!r}")
    return 2.0 * math.pi / L * vF * ((ell * ZF) ** 2 + (s / (2.0 * ZF)) ** 2 + n)


def excitation_energy(eps, particles=(), holes=()):
    """sum eps(particles) - sum eps(holes), with eps solved at Q = Q_F."""
    QF = eps.grid.Q
    particles = np.asarray(particles, dtype=float)
    holes = np.asarray(holes, dtype=float)
    if np.any(np.abs(particles) <= QF):
        raise DomainError("particle rapidities must lie outside [-QF, QF]")
    if np.any(np.abs(holes) > QF):
        raise DomainError("hole rapidities must lie inside [-QF, QF]")
    total = 0.0
    if particles.size:
        total += float(np.sum(eps(particles)))
    if holes.size:
        total -= float(np.sum(eps(holes)))
    return total


@dataclass(frozen=True, eq=False)
class DressedSet:
    params: ModelParams
    Z: DiscreteSolution
    rho: DiscreteSolution
    eps: DiscreteSolution

    @property
    def grid(self):
        return self.Z.grid

    def p(self, lam):
        return dressed_momentum(self.rho, lam)

    @property
    def pF(self):
        return float(self.p(self.grid.Q))

    def identity_residual(self):
        """max_i |eps - (h Z - 4 pi J sin(gamma) rho)| at the nodes."""
        p = self.params
        combo = p.h * self.Z.values - 4.0 * math.pi * p.J * math.sin(p.gamma) * self.rho.values
        return float(np.max(np.abs(self.eps.values - combo), initial=0.0))


def dressed_set(params, Q, n=None):
    return DressedSet(params, dressed_charge(params.gamma, Q, n),
                      root_density(params.gamma, Q, n), dressed_energy(params, Q, n))


# Deviations from the Q = infinity solutions.  Near the centre of a wide
# interval Z and rho agree with their Q = infinity limits to far below double
# precision, so the sign of the difference is resolved by solving for it
# directly: (I + K_Q)(f - f_inf) = int_{|mu|>Q} K(. - mu) f_inf(mu) dmu.

def _charge_tail(gamma, Q, lam):
    c = math.pi / (2.0 * (math.pi - gamma))
    top = math.pi - 2.0 * gamma
    lam = np.asarray(lam)
    return c * (2.0 * top + bare_phase(lam - Q, gamma) - bare_phase(lam + Q, gamma)) / (2.0 * math.pi)


def _density_tail(gamma, Q, lam):
    span = 40.0 * gamma / math.pi + 2.0
    nodes, weights = _panel_rule(Q, Q + span, min(0.25, 0.5 * gamma))
    rho_inf = _sech(math.pi * nodes / gamma) / (2.0 * gamma)
    lam = np.asarray(lam, dtype=float)
    k = kernel_K(lam[..., None] - nodes, gamma) + kernel_K(lam[..., None] + nodes, gamma)
    out = k @ (weights * rho_inf)
    return out[()] if np.ndim(out) == 0 else out


def deviation_from_infinite(kind, gamma, Q, n=None):
    """f(.|Q) - f(.|infinity) for ``kind`` in {"charge", "density"}, solved directly."""
    grid = build_grid(Q, n or auto_nodes(gamma, Q))
    if kind == "charge":
        return solve_lie(grid, gamma, partial(_charge_tail, gamma, Q), "charge-deviation")
    if kind == "density":
        return solve_lie(grid, gamma, partial(_density_tail, gamma, Q), "density-deviation")
    raise ValueError(f"unknown kind {kind!r}")
