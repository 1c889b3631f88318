"""The dressed energy on the other bank R - i gamma, for 0 < gamma < pi/2.

omega(lambda) = Re eps_+(lambda - i gamma | Q_F) is evaluated from its real-line
representation

    omega = h pi / (2 (pi - gamma)) + (2 pi J sin(gamma)/gamma) sech(pi lambda/gamma)
            + eps_c(lambda)/2 + 1/2 int_{|mu| > Q_F} (G - R)(lambda - mu) eps(mu|Q_F) dmu

with eps_c = eps(.|Q_F) outside the Fermi zone and 0 inside.  It stays above h/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, DomainError
from .fermi import FermiPoint, solve_fermi_rapidity
from .kernels import ModelParams, _sech, kernel_K
from .linsolve import nystrom_extend
from .special import EvenTable, G_function, R_infinite, _gl, gamma_third
from .thermo import dressed_energy

TAIL_TOL = 1e-14
MAX_SPAN = 200.0
_TABLE_STEPS = 150
_NODES_PER_PANEL = 16


def _check_regime(gamma):
    if not 0.0 < gamma < 0.5 * math.pi:
        raise DomainError(f"the other-bank bound is stated for 0 < gamma < pi/2, got {gamma!r}")


def _identity_part(x, gamma):
    # G + R = K(x/r | gamma''')/r; vanishes identically when gamma''' = pi/2
    r = 1.0 - gamma / math.pi
    return kernel_K(np.asarray(x, dtype=float) / r, gamma_third(gamma)) / r


def decay_span(gamma, h):
    """Smallest integer L with (|G| + |R|)(x) h < TAIL_TOL at x = L and L + 1."""
    _check_regime(gamma)
    L = 1.0
    while L <= MAX_SPAN:
        x = np.array([L, L + 1.0])
        R = R_infinite(x, gamma)
        size = (np.abs(_identity_part(x, gamma) - R) + np.abs(R)) * h
        if np.all(size < TAIL_TOL):
            return L
        L += 1.0
    raise AccuracyError(f"G - R has not decayed below {TAIL_TOL:g}/h within {MAX_SPAN:g}")


@lru_cache(maxsize=16)
def _r_table(gamma, span):
    return EvenTable(lambda x: R_infinite(x, gamma), span, gamma / _TABLE_STEPS)


@lru_cache(maxsize=16)
def _g_table(gamma, span):
    return EvenTable(lambda x: G_function(x, gamma), span, gamma / _TABLE_STEPS)


def difference_kernel(x, gamma, span):
    """(G - R)(x) = K(x/r | gamma''')/r - 2 R(x), set to 0 for |x| > span."""
    x = np.asarray(x, dtype=float)
    out = _identity_part(x, gamma) - 2.0 * _r_table(gamma, span)(x)
    return np.where(np.abs(x) <= span, out, 0.0)


def _outer_rule(QF, top, width):
    """Composite Gauss-Legendre on [-top, -QF] U [QF, top]."""
    panels = max(1, int(math.ceil((top - QF) / width)))
    x, w = _gl(_NODES_PER_PANEL)
    edges = np.linspace(QF, top, panels + 1)
    half = 0.5 * np.diff(edges)
    nodes = (edges[:-1, None] + half[:, None] * (x + 1.0)).ravel()
    weights = (half[:, None] * w).ravel()
    return np.concatenate([-nodes[::-1], nodes]), np.concatenate([weights[::-1], weights])


@dataclass(frozen=True)
class _BankSetup:
    fermi: FermiPoint
    eps: object
    span: float

    @property
    def params(self):
        return self.fermi.params


def _setup(fermi):
    p = fermi.params
    _check_regime(p.gamma)
    if fermi.polarized:
        raise DomainError("the other-bank profile needs a non-empty Fermi zone")
    eps = dressed_energy(p, fermi.QF, fermi.n or None)
    return _BankSetup(fermi, eps, decay_span(p.gamma, p.h))


def _eps_outside(setup, lam):
    lam = np.asarray(lam, dtype=float)
    QF = setup.fermi.QF
    vals = setup.eps(lam)
    return np.where(np.abs(lam) > QF, vals, 0.0)


def _tail(setup, lam):
    g = setup.params.gamma
    QF = setup.fermi.QF
    top = float(np.max(np.abs(lam), initial=0.0)) + setup.span + QF
    mu, w = _outer_rule(QF, top, min(1.0, 0.5 * g))
    weighted = w * setup.eps(mu)
    out = np.empty(lam.size)
    for i, x in enumerate(lam.ravel()):
        out[i] = 0.5 * difference_kernel(x - mu, g, setup.span) @ weighted
    return out.reshape(lam.shape)


def tail_integral(lam, fermi):
    """1/2 int_{|mu|>Q_F} (G - R)(lambda - mu) eps(mu|Q_F) dmu."""
    lam = np.asarray(lam, dtype=float)
    out = _tail(_setup(fermi), lam)
    return out[()] if out.ndim == 0 else out


def _explicit_part(setup, lam):
    p = setup.params
    g = p.gamma
    return (p.h * math.pi / (2.0 * (math.pi - g))
            + 2.0 * math.pi * p.J * math.sin(g) / g * _sech(math.pi * lam / g)
            + 0.5 * _eps_outside(setup, lam))


def omega(lam, fermi):
    """Re eps_+(lambda - i gamma | Q_F) on real ``lam``."""
    setup = _setup(fermi)
    lam = np.asarray(lam, dtype=float)
    out = _explicit_part(setup, lam) + _tail(setup, lam)
    return out[()] if out.ndim == 0 else out


def omega_extension(lam, fermi, shift=0.0):
    """Re eps(lambda - i (gamma - shift) | Q_F) from the complex Nystrom extension.

    Off the cut [-Q_F, Q_F] - i gamma this is an independent route to ``omega``;
    it loses accuracy as |lambda| approaches Q_F.
    """
    setup = _setup(fermi)
    lam = np.asarray(lam, dtype=float)
    z = lam - 1j * (setup.params.gamma - shift)
    return np.real(nystrom_extend(setup.eps, z))


def tail_estimates(gamma, h):
    """Lower bounds for the tail integral: est1 (gamma <= pi/4) and est2 (gamma >= pi/4)."""
    _check_regime(gamma)
    q = gamma / math.pi
    return {"est_low_gamma": -0.5 * h * (0.5 - q) / (1.0 - q),
            "est_high_gamma": -0.5 * h * q / (1.0 - q)}


def applicable_estimate(gamma, h):
    est = tail_estimates(gamma, h)
    return est["est_low_gamma"] if gamma <= 0.25 * math.pi else est["est_high_gamma"]


def tail_gap(lam, fermi):
    """Tail integral minus its applicable estimate, summed from positive pieces.

    With D = G - R, e = eps(.|Q_F) and h - e > 0 outside the Fermi zone:

      gamma <= pi/4:  1/2 int_out G e + 1/2 int_out R (h - e) + h/2 int_in R
      gamma >= pi/4: -1/2 int_out D (h - e) - h/2 int_in D

    Each piece is non-negative, so the gap keeps full relative accuracy even
    where it is far below the size of the terms it separates.
    """
    setup = _setup(fermi)
    p = setup.params
    g, QF = p.gamma, fermi.QF
    lam = np.asarray(lam, dtype=float)
    top = float(np.max(np.abs(lam), initial=0.0)) + setup.span + QF
    mu, w = _outer_rule(QF, top, min(1.0, 0.5 * g))
    x_in, w_in = _gl(max(32, 2 * int(math.ceil(QF / min(1.0, 0.5 * g))) * _NODES_PER_PANEL))
    mu_in, w_in = QF * x_in, QF * w_in
    e = setup.eps(mu)
    # h - e = 4 pi J sin(gamma) K(.|gamma/2) + sum_j w_j K(. - x_j) e_j
    deficit = (4.0 * math.pi * p.J * math.sin(g) * kernel_K(mu, 0.5 * g)
               + kernel_K(mu[:, None] - setup.eps.grid.nodes, g)
               @ (setup.eps.grid.weights * setup.eps.values))
    # G from its own Fourier table: single-signed, and exactly 0 at gamma = pi/4
    r_tab, g_tab = _r_table(g, setup.span), _g_table(g, setup.span)
    out = np.empty(lam.size)
    for i, x in enumerate(lam.ravel()):
        near = np.abs(x - mu) <= setup.span
        R_out = np.where(near, r_tab(x - mu), 0.0)
        G_out = np.where(near, g_tab(x - mu), 0.0)
        R_in = r_tab(x - mu_in)
        if g <= 0.25 * math.pi:
            out[i] = 0.5 * (w * G_out) @ e + 0.5 * (w * R_out) @ deficit + 0.5 * p.h * w_in @ R_in
        else:
            D_in = g_tab(x - mu_in) - R_in
            out[i] = -0.5 * (w * (G_out - R_out)) @ deficit - 0.5 * p.h * w_in @ D_in
    out = out.reshape(lam.shape)
    return out[()] if out.ndim == 0 else out


def sharpened_floor(lam, fermi):
    """(2 pi J sin(gamma)/gamma) sech(pi lambda/gamma) + eps_c/2 + (h/2) c(gamma),
    with c = (1/2 + gamma/pi)/(1 - gamma/pi) for gamma <= pi/4 and 1 above."""
    setup = _setup(fermi)
    p = setup.params
    q = p.gamma / math.pi
    c = (0.5 + q) / (1.0 - q) if p.gamma <= 0.25 * math.pi else 1.0
    lam = np.asarray(lam, dtype=float)
    out = (2.0 * math.pi * p.J * math.sin(p.gamma) / p.gamma * _sech(math.pi * lam / p.gamma)
           + 0.5 * _eps_outside(setup, lam) + 0.5 * p.h * c)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class BankProfile:
    params: ModelParams
    fermi: FermiPoint
    lambdas: np.ndarray
    omega: np.ndarray

    @property
    def floor(self):
        return 0.25 * self.params.h

    def margin(self):
        """min over the grid of omega - h/4."""
        return float(np.min(self.omega - self.floor))

    def holds(self):
        return self.margin() > 0.0


def bank_profile(params, lambdas=None, fermi=None):
    """omega on a grid (default: 201 points on [-15, 15])."""
    if lambdas is None:
        lambdas = np.linspace(-15.0, 15.0, 201)
    fermi = fermi or solve_fermi_rapidity(params)
    lambdas = np.asarray(lambdas, dtype=float)
    return BankProfile(params, fermi, lambdas, np.asarray(omega(lambdas, fermi)))
