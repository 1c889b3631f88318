"""Fourier-integral special functions, complex log-Gamma and the Wiener-Hopf factor.

R is the kernel of the Q = infinity resolvent of I + K,

    R(lambda) = int sinh[(pi/2 - gamma) k] exp(-i k lambda)
                / (cosh(gamma k/2) sinh[(pi/2 - gamma/2) k]) dk / (4 pi),

and G is the same integral with sinh[(pi/2 - 2 gamma) k] in the numerator.
Both are evaluated by composite Gauss-Legendre quadrature of the cosine
transform, truncated where the integrand envelope drops below 1e-16.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate

from .errors import AccuracyError, DomainError, PoleError
from .kernels import SERIES_CUTOFF, _check_gamma, _sech, kernel_K

ENVELOPE_TOL = 1e-16
MAX_KMAX = 4000.0
_PANEL_WIDTH = 1.0
_CHUNK = 4_000_000


@lru_cache(maxsize=None)
def _gl(m):
    x, w = np.polynomial.legendre.leggauss(m)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _ratio_sech(a, b, c, k):
    """sinh(a k) / (sinh(b k) cosh(c k)) for b, c > 0 and |a| < b + c.

    Written with decaying exponentials only, so it never overflows.
    """
    s = np.abs(np.asarray(k, dtype=float))
    small = s < SERIES_CUTOFF
    sb = np.where(small, 1.0, s)
    big = (np.sign(a) * 2.0 * np.exp((abs(a) - b - c) * sb)
           * np.expm1(-2.0 * abs(a) * sb) / np.expm1(-2.0 * b * sb)
           / (1.0 + np.exp(-2.0 * c * sb)))
    s2 = s * s
    series = (a / b) * (1.0 + a * a * s2 / 6.0 + a ** 4 * s2 * s2 / 120.0) \
        / (1.0 + b * b * s2 / 6.0 + b ** 4 * s2 * s2 / 120.0) / np.cosh(c * s)
    return np.where(small, series, big)


@dataclass(frozen=True)
class _CosineTransform:
    """(1/2pi) int_0^kmax F(k) cos(k lambda) dk for an even, exponentially decaying F."""

    a: float
    b: float
    c: float

    @property
    def decay(self):
        return self.b + self.c - abs(self.a)

    def integrand(self, k):
        return _ratio_sech(self.a, self.b, self.c, k)

    def kmax(self):
        if self.a == 0.0:
            return 0.0
        peak = float(np.max(np.abs(self.integrand(np.linspace(0.0, 5.0, 201)))))
        # |integrand| <= 4 exp(-decay k) once b k is of order one
        kmax = (math.log(1.0 / ENVELOPE_TOL) + math.log(4.0 / peak)) / self.decay
        kmax = _PANEL_WIDTH * math.ceil(kmax / _PANEL_WIDTH)
        if kmax > MAX_KMAX:
            raise AccuracyError(f"Fourier truncation needs kmax={kmax:.1f} > {MAX_KMAX}")
        tail = abs(float(self.integrand(kmax)))
        if tail > ENVELOPE_TOL * peak:
            raise AccuracyError(f"integrand at kmax={kmax} is {tail:.3e}, peak {peak:.3e}")
        return kmax

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        flat = np.abs(lam).ravel()
        if self.a == 0.0 or flat.size == 0:
            return np.zeros_like(lam)[()] if lam.ndim == 0 else np.zeros_like(lam)
        kmax = self.kmax()
        m = max(24, int(math.ceil(float(flat.max()) * _PANEL_WIDTH)) + 8)
        x, w = _gl(m)
        lefts = np.arange(0.0, kmax, _PANEL_WIDTH)
        k = (lefts[:, None] + 0.5 * _PANEL_WIDTH * (x + 1.0)).ravel()
        wk = np.tile(0.5 * _PANEL_WIDTH * w, lefts.size) * self.integrand(k)
        out = np.empty_like(flat)
        step = max(1, _CHUNK // k.size)
        for i in range(0, flat.size, step):
            out[i:i + step] = np.cos(np.outer(flat[i:i + step], k)) @ wk
        out /= 2.0 * math.pi
        out = out.reshape(lam.shape)
        return out[()] if out.ndim == 0 else out


def _R_transform(gamma):
    _check_gamma(gamma)
    return _CosineTransform(0.5 * math.pi - gamma, 0.5 * (math.pi - gamma), 0.5 * gamma)


def _G_transform(gamma):
    if not 0.0 < gamma < 0.5 * math.pi:
        raise DomainError(f"G is defined here for gamma in (0, pi/2), got {gamma!r}")
    return _CosineTransform(0.5 * math.pi - 2.0 * gamma, 0.5 * (math.pi - gamma), 0.5 * gamma)


def R_infinite(lam, gamma):
    """Resolvent kernel of I + K on the whole line, by its Fourier integral."""
    return _R_transform(gamma)(lam)


def R_integral(gamma):
    """int_R R = 1 - pi / (2 (pi - gamma))."""
    _check_gamma(gamma)
    return 1.0 - math.pi / (2.0 * (math.pi - gamma))


def gamma_prime(gamma):
    return 0.5 * gamma / (1.0 - gamma / math.pi)


def gamma_second(gamma):
    return 1.5 * gamma / (1.0 - gamma / math.pi)


def gamma_third(gamma):
    return 2.0 * gamma_prime(gamma)


def R_convolution(lam, gamma):
    """R as a positive convolution of K(.|gamma') with a sech, for 0 < gamma < pi/2.

    Independent of :func:`R_infinite`; evaluated with adaptive quadrature.
    """
    if not 0.0 < gamma < 0.5 * math.pi:
        raise DomainError(f"convolution form of R needs 0 < gamma < pi/2, got {gamma!r}")
    r = 1.0 - gamma / math.pi
    gp = gamma_prime(gamma)
    pref = math.pi / (2.0 * gamma * (math.pi - gamma))

    def one(x):
        def f(mu):
            return float(kernel_K(mu / r, gp)) * float(_sech(math.pi * (x - mu) / gamma))

        span = abs(x) + 40.0
        pts = sorted({-span, 0.0, x, span})
        total = 0.0
        for lo, hi in zip(pts[:-1], pts[1:]):
            if hi > lo:
                val, _ = integrate.quad(f, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=400)
                total += val
        return pref * total

    lam = np.asarray(lam, dtype=float)
    out = np.array([one(float(x)) for x in lam.ravel()]).reshape(lam.shape)
    return out[()] if out.ndim == 0 else out


def G_function(lam, gamma, method="fourier"):
    """The auxiliary function G of the other-bank estimate, for 0 < gamma < pi/2.

    ``method="fourier"`` integrates its Fourier representation directly;
    ``method="identity"`` uses G = (1 - gamma/pi)^-1 K(lambda pi/(pi - gamma)|gamma''') - R.
    """
    if method == "fourier":
        return _G_transform(gamma)(lam)
    if method == "identity":
        if not 0.0 < gamma < 0.5 * math.pi:
            raise DomainError(f"G is defined here for gamma in (0, pi/2), got {gamma!r}")
        lam = np.asarray(lam, dtype=float)
        r = 1.0 - gamma / math.pi
        g3 = gamma_third(gamma)
        first = 0.0 if g3 == 0.5 * math.pi else kernel_K(lam / r, g3) / r
        return first - R_infinite(lam, gamma)
    raise ValueError(f"unknown method {method!r}")


def G_integral(gamma):
    """int_R G = (pi - 4 gamma) / (2 (pi - gamma))."""
    return (math.pi - 4.0 * gamma) / (2.0 * (math.pi - gamma))


class EvenTable:
    """Cubic-spline table of an even function decaying to zero, for fast repeated lookup."""

    def __init__(self, func, x_max, step):
        n = int(math.ceil(x_max / step))
        self.x_max = n * step
        x = np.linspace(0.0, self.x_max, n + 1)
        y = np.asarray(func(x), dtype=float)
        self.tail = abs(float(y[-1]))
        self._spline = interpolate.CubicSpline(x, y, bc_type=((1, 0.0), "not-a-knot"))

    def __call__(self, lam):
        a = np.abs(np.asarray(lam, dtype=float))
        return np.where(a <= self.x_max, self._spline(np.minimum(a, self.x_max)), 0.0)


# Lanczos coefficients for g = 607/128 (15 terms), good to ~1e-15 relative
_LANCZOS_G = 607.0 / 128.0
_LANCZOS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _log_gamma_right(z):
    zm = z - 1.0
    series = np.full_like(zm, _LANCZOS[0])
    for i in range(1, len(_LANCZOS)):
        series = series + _LANCZOS[i] / (zm + i)
    base = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(base) - base + np.log(series)


def log_gamma(z):
    """log Gamma(z) by the Lanczos approximation, with reflection for Re z < 1/2.

    For Re z >= 1/2 this is the analytic continuation of the real log-Gamma
    (scipy's ``loggamma`` branch); in the reflected region it may differ from
    that branch by a multiple of 2 pi i, which leaves exp(log_gamma) intact.
    """
    z = np.asarray(z, dtype=complex)
    near_int = np.abs(z - np.round(z.real)) < 1e-14
    if np.any(near_int & (np.round(z.real) <= 0)):
        raise PoleError("log_gamma evaluated at a non-positive integer")
    left = z.real < 0.5
    out = _log_gamma_right(np.where(left, 1.0 - z, z))
    if np.any(left):
        refl = math.log(math.pi) - np.log(np.sin(math.pi * z)) - out
        out = np.where(left, refl, out)
    return out[()] if out.ndim == 0 else out


def _alpha_lower(lam, gamma):
    """alpha on the closed lower half-plane (boundary value alpha_- on R)."""
    lam = np.asarray(lam, dtype=complex)
    q = gamma / math.pi
    r = 1.0 - q
    il = 1j * lam
    log_a = (0.5 * math.log(2.0 * (math.pi - gamma))
             + 0.5 * il * r * math.log(r) + 0.5 * il * q * math.log(q)
             + log_gamma(1.0 + 0.5 * il)
             - log_gamma(0.5 * (1.0 + il * q))
             - log_gamma(1.0 + 0.5 * il * r))
    return np.exp(log_a)


HALF_PLANES = ("upper", "lower", "boundary-from-upper", "boundary-from-lower")


@dataclass(frozen=True)
class AlphaValue:
    point: complex
    value: complex
    half_plane: str


def alpha(lam, gamma, side=None):
    """Wiener-Hopf factor alpha of 1 + F[K] at a single point.

    Off the real axis the half-plane follows from Im(lam).  On the real axis
    ``side`` must be ``"+"`` (limit from above) or ``"-"`` (from below).
    """
    _check_gamma(gamma)
    lam = complex(lam)
    if lam.imag < 0.0:
        tag, value = "lower", complex(_alpha_lower(lam, gamma))
    elif lam.imag > 0.0:
        tag, value = "upper", 1.0 / complex(_alpha_lower(-lam, gamma))
    elif side == "-":
        tag, value = "boundary-from-lower", complex(_alpha_lower(lam, gamma))
    elif side == "+":
        tag, value = "boundary-from-upper", 1.0 / complex(_alpha_lower(-lam, gamma))
    else:
        raise DomainError("alpha on the real axis needs side='+' or side='-'")
    if not (cmath.isfinite(value) and value != 0):
        raise PoleError(f"alpha({lam}) is not finite and non-zero")
    return AlphaValue(lam, value, tag)


def alpha_plus(xi, gamma):
    """Boundary values alpha_+ on the real axis (vectorised)."""
    _check_gamma(gamma)
    return 1.0 / _alpha_lower(-np.asarray(xi, dtype=float), gamma)


def alpha_minus(xi, gamma):
    """Boundary values alpha_- on the real axis (vectorised)."""
    _check_gamma(gamma)
    return _alpha_lower(np.asarray(xi, dtype=float), gamma)
