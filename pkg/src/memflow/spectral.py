"""Hermite-spectral solver for the memory OU equation in one dimension.

With h_n(x) = He_n(sqrt(alpha) x) / sqrt(n!), the Ornstein-Uhlenbeck
operator acts as L h_n = -alpha n h_n, so each coefficient of the solution
evolves as c_n(t) = c_n(0) s_{alpha n}(t), where s_mu is the scalar
relaxation function. Mode 0 has mu = 0 and stays constant (conservation of
mass).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from memflow import volterra
from memflow.errors import DomainError, ValidationError


@dataclass(frozen=True)
class HermiteBasis:
    alpha: float
    max_degree: int = 16
    window: float | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if self.max_degree < 0:
            raise ValidationError("max_degree must be >= 0")

    @property
    def size(self):
        return self.max_degree + 1

    @property
    def half_width(self):
        """Half-width of the evaluation window, 6/sqrt(alpha) unless set."""
        return self.window if self.window is not None else 6.0 / math.sqrt(self.alpha)

    def values(self, x):
        """Matrix H[n, i] = h_n(x_i) from the normalized three-term recurrence."""
        y = np.sqrt(self.alpha) * np.atleast_1d(np.asarray(x, dtype=np.float64))
        out = np.empty((self.size, y.size))
        out[0] = 1.0
        if self.max_degree >= 1:
            out[1] = y
        for n in range(1, self.max_degree):
            out[n + 1] = (y * out[n] - math.sqrt(n) * out[n - 1]) / math.sqrt(n + 1)
        return out

    def derivatives(self, x, order=1):
        """d^order h_n / dx^order, using He_n' = n He_{n-1}."""
        h = self.values(x)
        out = np.zeros_like(h)
        n = np.arange(self.size)
        # h_n^{(m)} = alpha^{m/2} sqrt(n!/(n-m)!) h_{n-m}
        fall = np.ones(self.size)
        for m in range(order):
            fall = fall * np.maximum(n - m, 0)
        scale = self.alpha ** (order / 2.0) * np.sqrt(fall)
        out[order:] = scale[order:, None] * h[: self.size - order]
        return out

    def apply_ou(self, x):
        """(L_alpha h_n)(x) = h_n'' - alpha x h_n', evaluated directly."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return self.derivatives(x, 2) - self.alpha * x * self.derivatives(x, 1)


@dataclass(frozen=True, eq=False)
class Snapshot:
    """The field u(t, .) at one time, as Hermite coefficients."""

    basis: HermiteBasis
    coeffs: np.ndarray

    def __call__(self, x):
        return self.coeffs @ self.basis.values(x)

    def derivative(self, x):
        return self.coeffs @ self.basis.derivatives(x, 1)


@dataclass(frozen=True, eq=False)
class SpectralState:
    basis: HermiteBasis
    grid: volterra.TimeGrid
    coeffs: np.ndarray  # shape (max_degree + 1, n_steps + 1)
    kernel: object = None

    def snapshot(self, t_index):
        if not 0 <= t_index <= self.grid.n_steps:
            raise IndexError(f"time index {t_index} outside 0..{self.grid.n_steps}")
        return Snapshot(self.basis, self.coeffs[:, t_index])

    @property
    def initial(self):
        return self.snapshot(0)


def project(f, basis, rule):
    """c_n = int f h_n d gamma_alpha by the Gauss ``rule``."""
    if not math.isclose(rule.alpha, basis.alpha, rel_tol=1e-14):
        raise ValidationError("quadrature rule and basis use different alpha")
    if rule.degree < 2 * basis.max_degree + 2:
        raise ValidationError(
            f"rule of degree {rule.degree} cannot project onto degree "
            f"{basis.max_degree} (need >= {2 * basis.max_degree + 2})"
        )
    fx = np.asarray(f(rule.nodes), dtype=np.float64) * np.ones_like(rule.nodes)
    return basis.values(rule.nodes) @ (rule.weights * fx)


def projection_residual(f, basis, rule):
    """L2(gamma_alpha) norm of f minus its projection onto ``basis``.

    A reported truncation diagnostic: it measures how much of f the basis
    misses, by the same quadrature ``rule``; it does not bound the error of
    the evolved solution.
    """
    c = project(f, basis, rule)
    fx = np.asarray(f(rule.nodes), dtype=np.float64) * np.ones_like(rule.nodes)
    r = fx - c @ basis.values(rule.nodes)
    return math.sqrt(rule.integrate(r * r))


def evolve(coeffs0, kernel, basis, grid, backend=None):
    coeffs0 = np.asarray(coeffs0, dtype=np.float64)
    if coeffs0.shape != (basis.size,):
        raise ValidationError(f"expected {basis.size} initial coefficients, got {coeffs0.shape}")
    cache = {}
    rows = np.empty((basis.size, grid.n_steps + 1))
    for n in range(basis.size):
        mu = basis.alpha * n
        if mu not in cache:
            cache[mu] = volterra.solve_relaxation(kernel, mu, grid, backend).values
        rows[n] = coeffs0[n] * cache[mu]
    rows.setflags(write=False)
    return SpectralState(basis, grid, rows, kernel)


def evaluate(state, t_index, x):
    """u(t_index, x) inside the evaluation window."""
    xa = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(xa) > state.basis.half_width):
        raise DomainError(f"x outside evaluation window |x| <= {state.basis.half_width:g}")
    out = state.snapshot(t_index)(xa)
    return float(out[0]) if xa.ndim == 0 else out


def check_positivity(state, x_window=None, n_points=401):
    """min_x u(t_m, x) over ``n_points`` equispaced points, for every t_m."""
    if x_window is None:
        w = state.basis.half_width
        x_window = (-w, w)
    x = np.linspace(x_window[0], x_window[1], n_points)
    return (state.coeffs.T @ state.basis.values(x)).min(axis=1)


def mass(state, t_index):
    return float(state.coeffs[0, t_index])


def exponential_profile(basis, theta=1.0):
    """Coefficients of exp(theta sqrt(alpha) x - theta^2/2), truncated.

    exp(theta y - theta^2/2) = sum theta^n He_n(y)/n!, so c_n = theta^n/sqrt(n!).
    These are the saturating data of the log-Sobolev inequality.
    """
    n = np.arange(basis.size)
    return np.array([theta ** k / math.sqrt(math.factorial(k)) for k in n])
