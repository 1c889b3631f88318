"""Nystrom discretisation of f + int_{-Q}^{Q} K(. - mu) f(mu) dmu = g.

A single Gauss-Legendre panel on [-Q, Q] is used.  K is analytic in a strip
of half-width gamma around the real axis, so node values converge
geometrically in the number of nodes.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import linalg

from .errors import DomainError, SingularSystemError
from .kernels import _check_gamma, kernel_K, kernel_K_prime

DEFAULT_N = 128
MAX_AUTO_N = 4096


def min_nodes():
    """Smallest default node count; overridden by the XXZ_THERMO_N variable."""
    raw = os.environ.get("XXZ_THERMO_N")
    return int(raw) if raw else DEFAULT_N


def auto_nodes(gamma, Q, n_min=None):
    """Even node count giving ~1e-16 Nystrom error on [-Q, Q].

    Dressed functions have their nearest singularities at distance
    d = min(gamma/2, pi - gamma) from the real axis, and the single-panel
    error behaves like (1 + d/Q)^(-2n).
    """
    n_min = min_nodes() if n_min is None else n_min
    if Q <= 0.0:
        return n_min
    d = min(0.5 * gamma, math.pi - gamma)
    need = int(math.ceil(20.0 / math.log1p(d / Q)))
    n = max(n_min, min(need, MAX_AUTO_N))
    return n + (n % 2)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    Q: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self):
        return self.nodes.size

    def integrate(self, values):
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=64)
def _legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    # symmetrise exactly so that the node set equals its negation
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


def build_grid(Q, n=DEFAULT_N):
    """Gauss-Legendre nodes and weights on [-Q, Q]; ``n`` must be even."""
    if not (isinstance(n, (int, np.integer)) and n >= 2 and n % 2 == 0):
        raise DomainError(f"node count must be an even integer >= 2, got {n!r}")
    if not Q >= 0.0:
        raise DomainError(f"endpoint Q must be non-negative, got {Q!r}")
    x, w = _legendre(int(n))
    nodes = Q * x
    weights = Q * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureGrid(float(Q), nodes, weights)


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    """Node values of a dressed function together with its driving term.

    Calling the object evaluates the Nystrom extension
    ``f(lam) = g(lam) - sum_j w_j K(lam - x_j) f(x_j)`` at arbitrary points.
    """

    grid: QuadratureGrid
    gamma: float
    values: np.ndarray
    driving: Callable
    name: str = "f"
    driving_prime: Callable | None = field(default=None, repr=False)

    def __call__(self, lam):
        return nystrom_extend(self, lam)

    def derivative(self, lam):
        """d/dlambda of the Nystrom extension, for real ``lam``."""
        if self.driving_prime is None:
            raise ValueError(f"no derivative of the driving term attached to {self.name!r}")
        lam = np.asarray(lam, dtype=float)
        x, w = self.grid.nodes, self.grid.weights
        kp = kernel_K_prime(lam[..., None] - x, self.gamma)
        out = self.driving_prime(lam) - kp @ (w * self.values)
        return out[()] if np.ndim(out) == 0 else out

    def residual(self):
        """Max-norm residual of the discrete equations at the nodes."""
        op = nystrom_operator(self.grid, self.gamma)
        g = _eval_driving(self.driving, self.grid.nodes)
        return float(np.max(np.abs(self.values + op.apply_kernel(self.values) - g), initial=0.0))

    def integral(self):
        """int_{-Q}^{Q} f by the grid quadrature."""
        return self.grid.integrate(self.values)


def _eval_driving(g, lam):
    out = np.asarray(g(lam))
    return np.broadcast_to(out, np.shape(lam)) if out.shape != np.shape(lam) else out


class NystromOperator:
    """I + K W on a grid, LU-factorised once and reused for every right-hand side."""

    def __init__(self, grid, gamma):
        _check_gamma(gamma)
        self.grid = grid
        self.gamma = gamma
        x, w = grid.nodes, grid.weights
        self.kmat = kernel_K(x[:, None] - x[None, :], gamma)
        a = np.eye(x.size) + self.kmat * w[None, :]
        if not np.all(np.isfinite(a)):
            raise SingularSystemError("non-finite entries in the Nystrom matrix")
        self._lu = linalg.lu_factor(a, check_finite=False)
        piv = np.abs(np.diag(self._lu[0]))
        if piv.min() < 1e-13 * piv.max():
            raise SingularSystemError("Nystrom matrix is numerically singular")

    def solve(self, rhs):
        return linalg.lu_solve(self._lu, rhs, check_finite=False)

    def apply_kernel(self, values):
        """(K W f)(x_i) = sum_j w_j K(x_i - x_j) f_j."""
        return self.kmat @ (self.grid.weights[:, None] * values if np.ndim(values) == 2
                            else self.grid.weights * values)


@lru_cache(maxsize=32)
def _cached_operator(Q, n, gamma):
    return NystromOperator(build_grid(Q, n), gamma)


def nystrom_operator(grid, gamma):
    op = _cached_operator(grid.Q, grid.n, float(gamma))
    if op.grid is grid or (np.array_equal(op.grid.nodes, grid.nodes)
                           and np.array_equal(op.grid.weights, grid.weights)):
        return op
    return NystromOperator(grid, gamma)


def solve_lie(grid, gamma, g, name="f", g_prime=None):
    """Solve (I + K) f = g on [-Q, Q] by dense LU of the Nystrom system."""
    op = nystrom_operator(grid, gamma)
    rhs = np.asarray(_eval_driving(g, grid.nodes), dtype=float)
    values = op.solve(rhs)
    if not np.all(np.isfinite(values)):
        raise SingularSystemError("Nystrom solve produced non-finite values")
    values.setflags(write=False)
    return DiscreteSolution(grid, float(gamma), values, g, name, g_prime)


def nystrom_extend(sol, lam):
    lam = np.asarray(lam)
    x, w = sol.grid.nodes, sol.grid.weights
    k = kernel_K(lam[..., None] - x, sol.gamma)
    out = _eval_driving(sol.driving, lam) - k @ (w * sol.values)
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class ResolventTable:
    grid: QuadratureGrid
    gamma: float
    entries: np.ndarray


def resolvent(grid, gamma):
    """R_Q(x_i, x_j) on the grid: columns solve (I + K) r = K(. - x_j)."""
    op = nystrom_operator(grid, gamma)
    entries = op.solve(op.kmat)
    entries.setflags(write=False)
    return ResolventTable(grid, float(gamma), entries)


def resolvent_kernel(grid, gamma, lam, mu):
    """R_Q(lam, mu) at arbitrary real points, as a len(lam) x len(mu) array."""
    op = nystrom_operator(grid, gamma)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    x, w = grid.nodes, grid.weights
    cols = op.solve(kernel_K(x[:, None] - mu[None, :], gamma))
    return kernel_K(lam[:, None] - mu[None, :], gamma) - kernel_K(lam[:, None] - x[None, :], gamma) @ (w[:, None] * cols)


def neumann_oracle(gamma, grid, g, terms):
    """Partial sum sum_{n=0}^{terms} (-K)^n g, by repeated quadrature."""
    if terms < 1:
        raise DomainError(f"terms must be >= 1, got {terms!r}")
    _check_gamma(gamma)
    x, w = grid.nodes, grid.weights
    kw = kernel_K(x[:, None] - x[None, :], gamma) * w[None, :]
    g_nodes = np.asarray(_eval_driving(g, x), dtype=float)
    f = g_nodes.copy()
    for _ in range(terms):
        f = g_nodes - kw @ f
    f.setflags(write=False)
    return DiscreteSolution(grid, float(gamma), f, g, "neumann")


def neumann_error_bound(gamma, g_norm, terms):
    """Geometric tail bound |1 - 2 gamma/pi|^(terms+1) ||g|| / (1 - |1 - 2 gamma/pi|)."""
    q = abs(1.0 - 2.0 * gamma / math.pi)
    return q ** (terms + 1) * g_norm / (1.0 - q)
