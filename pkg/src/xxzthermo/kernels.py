"""Closed-form kernels, driving terms and auxiliary functions.

All functions accept scalars or numpy arrays and broadcast.  Conventions:

* ``K(lambda|gamma) = sin(2 gamma) / (2 pi sinh(lambda + i gamma) sinh(lambda - i gamma))``
* Fourier transform ``F[g](k) = int g(lambda) exp(i k lambda) d lambda``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError

POLE_FLOOR = 1e-12
SERIES_CUTOFF = 1e-4
# sinh(lambda +- i gamma) overflows long before this; K is below 1e-260 here
_FAR = 300.0


def _check_gamma(gamma):
    if not 0.0 < gamma < math.pi:
        raise DomainError(f"gamma must lie in (0, pi), got {gamma!r}")


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs of the XXZ chain: anisotropy ``gamma`` (radians),
    exchange ``J`` and magnetic field ``h``."""

    gamma: float
    J: float = 1.0
    h: float = 0.0

    def __post_init__(self):
        _check_gamma(self.gamma)
        if not self.J > 0.0:
            raise DomainError(f"J must be positive, got {self.J!r}")
        if not self.h >= 0.0:
            raise DomainError(f"h must be non-negative, got {self.h!r}")

    @classmethod
    def from_delta(cls, delta, J=1.0, h=0.0):
        if not -1.0 < delta < 1.0:
            raise DomainError(f"delta must lie in (-1, 1), got {delta!r}")
        return cls(math.acos(delta), J, h)

    def delta(self):
        return math.cos(self.gamma)

    @property
    def saturation_field(self):
        """Field above which the chain is fully polarised, 4J(1 + cos gamma)."""
        return 4.0 * self.J * (1.0 + math.cos(self.gamma))

    def with_h(self, h):
        return ModelParams(self.gamma, self.J, h)


def _sech(x):
    x = np.abs(np.asarray(x, dtype=float))
    return 2.0 * np.exp(-x) / (1.0 + np.exp(-2.0 * x))


def kernel_K(lam, gamma, floor=POLE_FLOOR):
    """Lieb kernel K(lambda|gamma); real for real ``lam``, complex otherwise.

    Uses sinh(x+iy) sinh(x-iy) = (cosh 2x - cos 2y)/2, valid for complex x.
    Raises :class:`PoleError` when that product is smaller than ``floor``.
    """
    _check_gamma(gamma)
    lam = np.asarray(lam)
    far = np.abs(lam.real) > _FAR
    safe = np.where(far, 0.0, lam)
    with np.errstate(over="ignore", invalid="ignore"):
        denom = 0.5 * (np.cosh(2.0 * safe) - math.cos(2.0 * gamma))
    if np.any(np.abs(np.where(far, 1.0, denom)) < floor):
        raise PoleError(f"kernel evaluated within {floor:g} of a pole at +-i*{gamma:g}")
    out = math.sin(2.0 * gamma) / (2.0 * math.pi * denom)
    out = np.where(far, 0.0, out)
    return out[()] if out.ndim == 0 else out


def kernel_K_prime(lam, gamma):
    """d/dlambda K(lambda|gamma) for real ``lam``."""
    _check_gamma(gamma)
    lam = np.asarray(lam, dtype=float)
    x = np.clip(2.0 * lam, -2.0 * _FAR, 2.0 * _FAR)
    c = np.cosh(x) - math.cos(2.0 * gamma)
    out = -2.0 * math.sin(2.0 * gamma) * np.sinh(x) / (math.pi * c * c)
    out = np.where(np.abs(lam) > _FAR, 0.0, out)
    return out[()] if out.ndim == 0 else out


def _sinh_ratio(a, b, k):
    """sinh(a k) / sinh(b k) for b > 0 and |a| <= b, overflow free."""
    s = np.abs(np.asarray(k, dtype=float))
    small = s < SERIES_CUTOFF
    s_big = np.where(small, 1.0, s)
    big = (np.sign(a) * np.exp((abs(a) - b) * s_big)
           * np.expm1(-2.0 * abs(a) * s_big) / np.expm1(-2.0 * b * s_big))
    s2 = s * s
    series = (a / b) * (1.0 + a * a * s2 / 6.0 + a ** 4 * s2 * s2 / 120.0) \
        / (1.0 + b * b * s2 / 6.0 + b ** 4 * s2 * s2 / 120.0)
    out = np.where(small, series, big)
    return out[()] if out.ndim == 0 else out


def fourier_K(k, gamma):
    """F[K](k) = sinh((pi/2 - gamma) k) / sinh(pi k / 2); equals 1 - 2 gamma/pi at k = 0."""
    _check_gamma(gamma)
    return _sinh_ratio(0.5 * math.pi - gamma, 0.5 * math.pi, k)


def one_plus_fourier_K(k, gamma):
    """1 + F[K](k) in the product form 2 cosh(gamma k/2) sinh((pi-gamma)k/2) / sinh(pi k/2)."""
    _check_gamma(gamma)
    s = np.abs(np.asarray(k, dtype=float))
    small = s < SERIES_CUTOFF
    s_big = np.where(small, 1.0, s)
    # exponentials of cosh and the sinh ratio cancel exactly
    big = (1.0 + np.exp(-gamma * s_big)) * np.expm1(-(math.pi - gamma) * s_big) \
        / np.expm1(-math.pi * s_big)
    series = 2.0 * np.cosh(0.5 * gamma * s) * _sinh_ratio(0.5 * (math.pi - gamma), 0.5 * math.pi, s)
    out = np.where(small, series, big)
    return out[()] if out.ndim == 0 else out


def bare_energy(lam, params):
    """epsilon_0(lambda) = h - 4 pi J sin(gamma) K(lambda|gamma/2)."""
    g = params.gamma
    return params.h - 4.0 * math.pi * params.J * math.sin(g) * kernel_K(lam, 0.5 * g)


def bare_energy_prime(lam, params):
    g = params.gamma
    return -4.0 * math.pi * params.J * math.sin(g) * kernel_K_prime(lam, 0.5 * g)


def bare_phase(lam, gamma):
    """theta(lambda) = i ln[sinh(i gamma + lambda) / sinh(i gamma - lambda)].

    The branch is the one that is odd and continuous on the real line, which
    reduces to 2 arctan(tanh(lambda) cot(gamma)).  theta' = 2 pi K(.|gamma).
    """
    _check_gamma(gamma)
    return 2.0 * np.arctan(np.tanh(lam) * math.cos(gamma) / math.sin(gamma))


def bare_momentum(lam, gamma):
    """p_0(lambda) = theta(lambda) at gamma/2; tends to pi - gamma at +infinity."""
    return bare_phase(lam, 0.5 * gamma)


@dataclass(frozen=True)
class ClosedForms:
    """Explicit functions bounding or limiting the dressed quantities."""

    params: ModelParams

    def rho_inf(self, lam):
        g = self.params.gamma
        return _sech(math.pi * np.asarray(lam) / g) / (2.0 * g)

    def eps_tilde(self, lam):
        p = self.params
        g = p.gamma
        return p.h - 2.0 * math.pi * p.J * math.sin(g) / g * _sech(math.pi * np.asarray(lam) / g)

    def eps_inf(self, lam):
        p = self.params
        g = p.gamma
        return (p.h * math.pi / (2.0 * (math.pi - g))
                - 2.0 * math.pi * p.J * math.sin(g) / g * _sech(math.pi * np.asarray(lam) / g))

    @property
    def Q0(self):
        """Positive zero of the bare energy."""
        p = self.params
        if not 0.0 < p.h < p.saturation_field:
            raise DomainError(
                f"bare energy has no positive zero for h={p.h!r} "
                f"(need 0 < h < {p.saturation_field:.17g})")
        g = p.gamma
        return math.asinh(math.sqrt(2.0 * p.J * math.sin(g) ** 2 / p.h - math.sin(0.5 * g) ** 2))

    @property
    def Q_tilde(self):
        """Positive zero of eps_tilde."""
        p = self.params
        g = p.gamma
        top = 2.0 * math.pi * p.J * math.sin(g) / g
        if not 0.0 < p.h < top:
            raise DomainError(f"eps_tilde has no positive zero for h={p.h!r} (need 0 < h < {top:.17g})")
        return (g / math.pi) * math.acosh(top / p.h)


def closed_forms(params):
    return ClosedForms(params)
