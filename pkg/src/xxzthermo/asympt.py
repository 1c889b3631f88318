"""Leading large-Q and small-h asymptotics of the dressed quantities.

Two closed forms are kept for each amplitude: one written with real Gamma
functions and one written with the Wiener-Hopf factor alpha.  They are
algebraically equal and serve as cross-checks of each other.
"""

from __future__ import annotations

import math

from .errors import DomainError
from .kernels import ModelParams, _check_gamma
from .special import alpha

FORMS = ("gamma", "alpha")


def epsilon_gamma(gamma):
    """Decay exponent min(2 pi/(pi - gamma), pi/gamma) of the first correction."""
    _check_gamma(gamma)
    return min(2.0 * math.pi / (math.pi - gamma), math.pi / gamma)


def asympt_Z_at_Q(gamma):
    """lim_{Q -> inf} Z(Q|Q) = sqrt(pi / (2 (pi - gamma)))."""
    _check_gamma(gamma)
    return math.sqrt(math.pi / (2.0 * (math.pi - gamma)))


def _check_wide(gamma):
    _check_gamma(gamma)
    if gamma <= math.pi / 5.0:
        raise DomainError(f"large-Q formulas need gamma > pi/5, got {gamma!r}")


def _log_gamma_ratio(gamma):
    # log[(1 - gamma/pi)^(pi/2gamma) Gamma(1 + pi/2gamma) / Gamma((1 + pi/gamma)/2)]
    t = math.pi / gamma
    return (0.5 * t * math.log1p(-1.0 / t) + math.lgamma(1.0 + 0.5 * t)
            - math.lgamma(0.5 * (1.0 + t)))


def _alpha_at_pole(gamma):
    # alpha(-i pi/gamma) is real and positive
    return alpha(-1j * math.pi / gamma, gamma).value.real


def rho_amplitude(gamma, form="gamma"):
    """A(gamma) with rho(Q|Q) ~ A e^{-pi Q/gamma}; gamma > pi/5."""
    _check_wide(gamma)
    if form == "gamma":
        return math.sqrt(2.0 / gamma) * math.exp(_log_gamma_ratio(gamma))
    if form == "alpha":
        return _alpha_at_pole(gamma) / gamma
    raise ValueError(f"unknown form {form!r}, expected one of {FORMS}")


def asympt_rho_at_Q(gamma, Q, form="gamma"):
    """Leading term of rho(Q|Q) as Q -> inf."""
    return rho_amplitude(gamma, form) * math.exp(-math.pi * Q / gamma)


def asympt_fermi_rapidity(params: ModelParams, form="gamma"):
    """Leading small-h Fermi rapidity, from
    exp(pi Q_F/gamma) = 8 pi J sin(gamma) / (sqrt(gamma) h) (1 - gamma/pi)^((pi+gamma)/2gamma)
                        Gamma(1 + pi/2gamma) / Gamma((1 + pi/gamma)/2).
    """
    g, J, h = params.gamma, params.J, params.h
    _check_wide(g)
    if not h > 0.0:
        raise DomainError(f"h must be positive, got {h!r}")
    if form == "gamma":
        log_rhs = (math.log(8.0 * math.pi * J * math.sin(g) / (math.sqrt(g) * h))
                   + 0.5 * math.log1p(-g / math.pi) + _log_gamma_ratio(g))
    elif form == "alpha":
        # h alpha_+(0) = 4 pi J sin(gamma)/gamma e^{-pi Q_F/gamma} alpha(-i pi/gamma)
        a_plus0 = alpha(0.0, g, side="+").value.real
        log_rhs = math.log(4.0 * math.pi * J * math.sin(g) * _alpha_at_pole(g) / (g * h * a_plus0))
    else:
        raise ValueError(f"unknown form {form!r}, expected one of {FORMS}")
    return g / math.pi * log_rhs
